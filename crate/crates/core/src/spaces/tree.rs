use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Approximation, Atom, Block, GroundSpace, InstanceKind, LevelInterval, Reduct, Selector, SpaceModel,
};

/// Largest number of tree nodes the builder accepts.
pub const TREE_NODE_BUDGET: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    pub branching: usize,
    pub height: usize,
}

/// Strong subtrees of the complete `b`-ary tree of height `h`.
///
/// Nodes are numbered in level order: the root is 0 and the `i`-th node at
/// tree depth `d` has id `(b^d - 1)/(b - 1) + i`. Ground level `d + 1` holds the
/// nodes of depth `d`. A block is the set of nodes of one level of a strong
/// subtree; it always sits inside a single ground level, so the ordered-level
/// invariant of other instances is not required here.
#[derive(Clone, Debug)]
pub struct Tree {
    ground: GroundSpace,
    b: usize,
    h: usize,
    offsets: Vec<usize>,
}

impl Tree {
    pub fn new(params: TreeParams) -> Result<Self> {
        let TreeParams {
            branching: b,
            height: h,
        } = params;
        if b < 2 {
            return Err(Error::Parameter("tree branching must be at least 2".into()));
        }
        if h < 1 {
            return Err(Error::Parameter("tree height must be at least 1".into()));
        }
        let mut offsets = Vec::with_capacity(h + 2);
        let mut total = 0usize;
        let mut width = 1usize;
        for _ in 0..=h {
            offsets.push(total);
            total = total.saturating_add(width);
            if total > TREE_NODE_BUDGET {
                return Err(Error::Parameter(format!(
                    "tree with b={b}, h={h} exceeds the node budget of {TREE_NODE_BUDGET}"
                )));
            }
            width = width.saturating_mul(b);
        }
        offsets.push(total);
        let raw = (0..=h)
            .map(|d| (offsets[d]..offsets[d + 1]).map(|v| v as Atom).collect())
            .collect();
        Ok(Tree {
            ground: GroundSpace::new(InstanceKind::Tree, raw)?,
            b,
            h,
            offsets,
        })
    }

    pub fn branching(&self) -> usize {
        self.b
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.offsets[self.h + 1]
    }

    pub fn node(&self, depth: usize, index: usize) -> Atom {
        (self.offsets[depth] + index) as Atom
    }

    pub fn depth_of(&self, v: Atom) -> usize {
        let v = v as usize;
        (0..=self.h).rfind(|&d| self.offsets[d] <= v).unwrap_or(0)
    }

    fn index_of(&self, v: Atom) -> usize {
        v as usize - self.offsets[self.depth_of(v)]
    }

    pub fn child(&self, v: Atom, j: usize) -> Atom {
        let d = self.depth_of(v);
        self.node(d + 1, self.index_of(v) * self.b + j)
    }

    /// `anc` lies on the path from the root to `v` (inclusive).
    pub fn below_or_equal(&self, anc: Atom, v: Atom) -> bool {
        let (da, dv) = (self.depth_of(anc), self.depth_of(v));
        if dv < da {
            return false;
        }
        let mut idx = self.index_of(v);
        for _ in da..dv {
            idx /= self.b;
        }
        idx == self.index_of(anc)
    }

    pub fn level_block(&self, nodes: Vec<Atom>) -> Block {
        let d = nodes.first().map_or(0, |&v| self.depth_of(v));
        Block::new(nodes, LevelInterval::new(d + 1, d + 2))
    }

    fn nodes_at(&self, x: &Reduct, depth: usize) -> Vec<Atom> {
        x.atoms().into_iter().filter(|&v| self.depth_of(v) == depth).collect()
    }
}

impl SpaceModel for Tree {
    fn kind(&self) -> InstanceKind {
        InstanceKind::Tree
    }

    fn ground(&self) -> &GroundSpace {
        &self.ground
    }

    fn top(&self) -> Reduct {
        let blocks = self
            .ground
            .levels
            .iter()
            .map(|l| self.level_block(l.atoms.clone()))
            .collect();
        Approximation::from_blocks(blocks)
    }

    fn block_valid(&self, block: &Block) -> bool {
        let Some(&first) = block.atoms().first() else {
            return false;
        };
        if block.atoms().iter().any(|&v| v as usize >= self.node_count()) {
            return false;
        }
        let d = self.depth_of(first);
        block.atoms().iter().all(|&v| self.depth_of(v) == d) && block.source() == LevelInterval::new(d + 1, d + 2)
    }

    fn is_approximation(&self, s: &Approximation) -> bool {
        if !s.blocks().iter().all(|b| self.block_valid(b)) {
            return false;
        }
        let Some(root) = s.blocks().first() else {
            return true;
        };
        if root.atoms().len() != 1 {
            return false;
        }
        for w in s.blocks().windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            if self.depth_of(next.least()) <= self.depth_of(prev.least()) {
                return false;
            }
            if next.atoms().len() != prev.atoms().len() * self.b {
                return false;
            }
            for &u in prev.atoms() {
                for j in 0..self.b {
                    let c = self.child(u, j);
                    let above = next.atoms().iter().filter(|&&v| self.below_or_equal(c, v)).count();
                    if above != 1 {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn leq_fin_core(&self, s: &Approximation, t: &Approximation) -> bool {
        let t_nodes = t.atoms();
        s.atoms().iter().all(|v| t_nodes.binary_search(v).is_ok())
    }

    fn is_reduct_of(&self, y: &Reduct, x: &Reduct) -> bool {
        self.leq_fin_core(y, x)
    }

    fn one_step_extensions(&self, s: &Approximation, x: &Reduct) -> Vec<Approximation> {
        let Some(last) = s.last() else {
            return x
                .atoms()
                .into_iter()
                .map(|v| s.extended(self.level_block(vec![v])))
                .collect();
        };
        let last_depth = self.depth_of(last.least());
        let mut out = Vec::new();
        for depth in last_depth + 1..=self.h {
            let level = self.nodes_at(x, depth);
            // one slot per (leaf, successor) pair, each choosing a node above it
            let slots: Vec<Vec<Atom>> = last
                .atoms()
                .iter()
                .flat_map(|&u| (0..self.b).map(move |j| (u, j)))
                .map(|(u, j)| {
                    let c = self.child(u, j);
                    level.iter().copied().filter(|&v| self.below_or_equal(c, v)).collect()
                })
                .collect();
            if slots.iter().any(|c: &Vec<Atom>| c.is_empty()) {
                continue;
            }
            let mut choice = vec![0usize; slots.len()];
            loop {
                let nodes = choice.iter().zip(&slots).map(|(&i, c)| c[i]).collect();
                out.push(s.extended(self.level_block(nodes)));
                let mut k = 0;
                while k < choice.len() {
                    choice[k] += 1;
                    if choice[k] < slots[k].len() {
                        break;
                    }
                    choice[k] = 0;
                    k += 1;
                }
                if k == choice.len() {
                    break;
                }
            }
        }
        out
    }

    fn inner_family(&self) -> Vec<Selector> {
        vec![Selector::Drop, Selector::Full]
    }

    fn limited_family(&self) -> bool {
        true
    }
}
