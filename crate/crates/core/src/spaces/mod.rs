//! Concrete instances and the combination operators built on them.

mod ellentuck;
mod fin;
mod tree;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use ellentuck::{Ellentuck, EllentuckParams};
pub use fin::{Fin, FinParams};
pub use tree::{Tree, TreeParams, TREE_NODE_BUDGET};

use crate::catalog::Space;
use crate::error::{Error, Result};
use crate::model::{Approximation, Atom, Block, Reduct};

pub fn build_ellentuck(params: EllentuckParams) -> Result<Space> {
    Space::new(Ellentuck::new(params)?)
}

pub fn build_fin(params: FinParams) -> Result<Space> {
    Space::new(Fin::new(params)?)
}

pub fn build_tree(params: TreeParams) -> Result<Space> {
    Space::new(Tree::new(params)?)
}

/// `⟨X⟩`: unions of nonempty subfamilies of the blocks of `x`.
pub fn closure(fin: &Fin, x: &Reduct) -> Result<BTreeSet<Block>> {
    use crate::model::SpaceModel;
    if x.is_empty() {
        return Err(Error::Domain("closure of an empty reduct".into()));
    }
    if x.len() >= 64 {
        return Err(Error::Budget {
            budget: 63,
            what: "blocks in a closure".into(),
        });
    }
    let mut out = BTreeSet::new();
    for mask in 1u64..(1u64 << x.len()) {
        let atoms: Vec<Atom> = x
            .blocks()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .flat_map(|(_, b)| b.atoms().iter().copied())
            .collect();
        out.insert(Block::from_atoms(fin.ground(), atoms)?);
    }
    Ok(out)
}

/// `⟨w_0,…,w_n⟩_s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationSet {
    pub base: Approximation,
    pub generators: Vec<Block>,
    pub members: BTreeSet<Block>,
}

/// Which disjunct of the side condition a generator list satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideCondition {
    Chain,
    SameLevel,
}

fn side_condition(space: &Space, ws: &[Block]) -> Option<SideCondition> {
    let ground = space.model().ground();
    let levels: BTreeSet<Option<usize>> = ws
        .iter()
        .flat_map(|w| w.atoms().iter().map(|&a| ground.level_of(a)))
        .collect();
    if levels.len() == 1 && !levels.contains(&None) {
        return Some(SideCondition::SameLevel);
    }
    if ws.windows(2).all(|p| p[0].greatest() < p[1].least()) {
        return Some(SideCondition::Chain);
    }
    None
}

/// End extensions of approximations `t` with `s ≤_fin t` whose new block is
/// made out of exactly the generators `ws`, each of them used.
pub fn combinations(space: &Space, ws: &[Block], s: &Approximation) -> CombinationSet {
    let mut set = CombinationSet {
        base: s.clone(),
        generators: ws.to_vec(),
        members: BTreeSet::new(),
    };
    if ws.is_empty() || side_condition(space, ws).is_none() {
        return set;
    }
    let mut atoms: Vec<Atom> = ws.iter().flat_map(|w| w.atoms().iter().copied()).collect();
    let before = atoms.len();
    atoms.sort_unstable();
    atoms.dedup();
    if atoms.len() != before {
        return set;
    }
    let model = space.model();
    let cat = space.catalog();
    for p in cat.all() {
        let Some(t) = cat.parent(p) else { continue };
        let block = cat.get(p).last().expect("nonempty");
        if block.atoms() != atoms.as_slice() {
            continue;
        }
        if s.is_empty() || model.leq_fin_core(s, cat.get(t)) {
            set.members.insert(block.clone());
        }
    }
    set
}

/// `LX_n`: sequences of `n` new blocks `w` with `s⌢w ∈ [s,X]_{|s|+n}` for
/// some `s ∈ AX`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LXCatalog {
    pub reduct: Reduct,
    pub arities: Vec<BTreeSet<Vec<Block>>>,
}

impl LXCatalog {
    pub fn get(&self, n: usize) -> Option<&BTreeSet<Vec<Block>>> {
        n.checked_sub(1).and_then(|i| self.arities.get(i))
    }

    pub fn contains_block(&self, w: &Block) -> bool {
        self.get(1).is_some_and(|l| l.contains(&vec![w.clone()]))
    }
}

pub fn lx_catalog(space: &Space, x: &Reduct, max_arity: usize) -> Result<LXCatalog> {
    let cat = space.catalog();
    let xi = cat.require(x)?;
    let mut arities = vec![BTreeSet::new(); max_arity];
    for t in cat.down(xi).ones() {
        let ta = cat.get(t);
        for n in 1..=max_arity.min(ta.len()) {
            arities[n - 1].insert(ta.blocks()[ta.len() - n..].to_vec());
        }
    }
    Ok(LXCatalog {
        reduct: x.clone(),
        arities,
    })
}

/// First approximation of `AU` with a block that skips a ground level inside
/// its own source interval; `None` means the instance has full initial
/// segments.
pub fn partial_segment_witness(space: &Space) -> Option<Approximation> {
    let ground = space.model().ground();
    let cat = space.catalog();
    cat.all()
        .map(|i| cat.get(i))
        .find(|s| {
            s.blocks().iter().any(|b| {
                let src = b.source();
                (src.start..src.end).any(|lvl| {
                    !ground.levels[lvl - 1]
                        .atoms
                        .iter()
                        .any(|a| b.atoms().binary_search(a).is_ok())
                })
            })
        })
        .cloned()
}

/// First approximation with a block sourced from more than one level.
pub fn multi_level_witness(space: &Space) -> Option<Approximation> {
    let cat = space.catalog();
    cat.all()
        .map(|i| cat.get(i))
        .find(|s| s.blocks().iter().any(|b| b.source().len() > 1))
        .cloned()
}
