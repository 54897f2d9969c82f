use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Approximation, Atom, Block, GroundSpace, InstanceKind, Reduct, Selector, SpaceModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinParams {
    /// Ground block sequence `x_0 < x_1 < ...`.
    pub blocks: Vec<Vec<Atom>>,
    /// Largest number of ground levels a single block may span.
    #[serde(default)]
    pub span_cap: Option<usize>,
}

impl FinParams {
    /// `count` singleton ground blocks `{0}, {1}, ...`.
    pub fn singletons(count: usize) -> Self {
        FinParams {
            blocks: (0..count as Atom).map(|a| vec![a]).collect(),
            span_cap: None,
        }
    }

    pub fn with_span_cap(mut self, cap: usize) -> Self {
        self.span_cap = Some(cap);
        self
    }
}

/// Truncated `FIN^[∞]`: levels are the ground blocks, reducts are block
/// sequences drawn from the closure `⟨U⟩`.
#[derive(Clone, Debug)]
pub struct Fin {
    ground: GroundSpace,
    span_cap: Option<usize>,
}

impl Fin {
    pub fn new(params: FinParams) -> Result<Self> {
        if params.blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::Parameter("FIN blocks must be nonempty".into()));
        }
        for (i, w) in params.blocks.windows(2).enumerate() {
            let max = w[0].iter().max().copied().unwrap_or(0);
            let min = w[1].iter().min().copied().unwrap_or(0);
            if max >= min {
                return Err(Error::Parameter(format!(
                    "blocks {i} and {} are not ordered (max {max} >= min {min})",
                    i + 1
                )));
            }
        }
        if params.span_cap == Some(0) {
            return Err(Error::Parameter("span cap must be positive".into()));
        }
        Ok(Fin {
            ground: GroundSpace::new(InstanceKind::Fin, params.blocks)?,
            span_cap: params.span_cap,
        })
    }

    pub fn span_cap(&self) -> Option<usize> {
        self.span_cap
    }

    /// The ground block `x_i` (0-based).
    pub fn ground_block(&self, i: usize) -> Block {
        Block::from_atoms(&self.ground, self.ground.levels[i].atoms.clone()).expect("ground levels are valid")
    }

    /// Union of the ground blocks with the given 0-based indices.
    pub fn union_of(&self, indices: &[usize]) -> Result<Block> {
        let atoms: Vec<Atom> = indices
            .iter()
            .flat_map(|&i| self.ground.levels[i].atoms.iter().copied())
            .collect();
        Block::from_atoms(&self.ground, atoms)
    }

    /// Sequence of unions; each inner slice lists ground-block indices.
    pub fn seq(&self, groups: &[&[usize]]) -> Result<Approximation> {
        let blocks = groups.iter().map(|g| self.union_of(g)).collect::<Result<Vec<_>>>()?;
        Ok(Approximation::from_blocks(blocks))
    }

    fn within_cap(&self, block: &Block) -> bool {
        self.span_cap.is_none_or(|cap| block.source().len() <= cap)
    }

    /// Whether `block` is a union of blocks of `of`.
    pub(crate) fn in_closure(block: &Block, of: &Approximation) -> bool {
        let mut covered: Vec<Atom> = of
            .blocks()
            .iter()
            .filter(|b| b.atoms().iter().all(|a| block.atoms().binary_search(a).is_ok()))
            .flat_map(|b| b.atoms().iter().copied())
            .collect();
        covered.sort_unstable();
        covered == block.atoms()
    }
}

impl SpaceModel for Fin {
    fn kind(&self) -> InstanceKind {
        InstanceKind::Fin
    }

    fn ground(&self) -> &GroundSpace {
        &self.ground
    }

    fn top(&self) -> Reduct {
        let blocks = (0..self.ground.depth()).map(|i| self.ground_block(i)).collect();
        Approximation::from_blocks(blocks)
    }

    fn block_valid(&self, block: &Block) -> bool {
        if block.is_empty() || !self.within_cap(block) {
            return false;
        }
        let Ok(expected) = Block::from_atoms(&self.ground, block.atoms().to_vec()) else {
            return false;
        };
        if expected.source() != block.source() {
            return false;
        }
        // every touched ground level must be used in full
        self.ground
            .levels
            .iter()
            .filter(|l| l.atoms.iter().any(|a| block.atoms().binary_search(a).is_ok()))
            .all(|l| l.atoms.iter().all(|a| block.atoms().binary_search(a).is_ok()))
    }

    fn is_approximation(&self, s: &Approximation) -> bool {
        s.blocks().iter().all(|b| self.block_valid(b)) && s.blocks().windows(2).all(|w| w[0].greatest() < w[1].least())
    }

    fn leq_fin_core(&self, s: &Approximation, t: &Approximation) -> bool {
        s.blocks().iter().all(|b| Self::in_closure(b, t))
    }

    fn is_reduct_of(&self, y: &Reduct, x: &Reduct) -> bool {
        y.blocks().iter().all(|b| Self::in_closure(b, x))
    }

    fn one_step_extensions(&self, s: &Approximation, x: &Reduct) -> Vec<Approximation> {
        let floor = s.max_atom();
        let above: Vec<&Block> = x
            .blocks()
            .iter()
            .filter(|b| floor.is_none_or(|m| b.least() > m))
            .collect();
        let mut out = Vec::new();
        for mask in 1u64..(1u64 << above.len()) {
            let atoms: Vec<Atom> = above
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, b)| b.atoms().iter().copied())
                .collect();
            if let Ok(block) = Block::from_atoms(&self.ground, atoms) {
                if self.within_cap(&block) {
                    out.push(s.extended(block));
                }
            }
        }
        out
    }

    fn inner_family(&self) -> Vec<Selector> {
        vec![
            Selector::Drop,
            Selector::Min,
            Selector::Max,
            Selector::MinMax,
            Selector::Identity,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compat, extensions, leq_fin};

    #[test]
    fn ordering_invariant() {
        let ok = FinParams {
            blocks: vec![vec![0], vec![2], vec![5]],
            span_cap: None,
        };
        let fin = Fin::new(ok).unwrap();
        assert_eq!(fin.ground().depth(), 3);
        let bad = FinParams {
            blocks: vec![vec![0, 3], vec![2]],
            span_cap: None,
        };
        assert!(matches!(Fin::new(bad), Err(Error::Parameter(_))));
    }

    #[test]
    fn union_reduct_accepted() {
        let fin = Fin::new(FinParams {
            blocks: vec![vec![0], vec![2], vec![5]],
            span_cap: None,
        })
        .unwrap();
        let y = fin.seq(&[&[0, 1], &[2]]).unwrap();
        assert!(fin.is_approximation(&y));
        assert!(fin.is_reduct_of(&y, &fin.top()));
    }

    #[test]
    fn blockwise_order() {
        let fin = Fin::new(FinParams {
            blocks: vec![vec![0, 1], vec![3]],
            span_cap: None,
        })
        .unwrap();
        let s = fin.seq(&[&[0, 1]]).unwrap();
        let merged = Approximation::from_blocks(vec![fin.union_of(&[0, 1]).unwrap()]);
        let t = fin.seq(&[&[0], &[1]]).unwrap();
        assert!(leq_fin(&fin, &merged, &t).unwrap());
        assert!(leq_fin(&fin, &s, &t).unwrap());
        assert!(!leq_fin(&fin, &t, &merged).unwrap());
    }

    #[test]
    fn three_extensions_of_first_block() {
        let fin = Fin::new(FinParams::singletons(3)).unwrap();
        let x = fin.top();
        let s = fin.seq(&[&[0]]).unwrap();
        let ext = extensions(&fin, &s, &x);
        let expected = vec![
            fin.seq(&[&[0], &[1]]).unwrap(),
            fin.seq(&[&[0], &[1, 2]]).unwrap(),
            fin.seq(&[&[0], &[2]]).unwrap(),
        ];
        assert_eq!(ext, expected);
        assert!(compat(&fin, &x, &fin.seq(&[&[0, 1]]).unwrap()));
    }

    #[test]
    fn span_cap_limits_blocks() {
        let fin = Fin::new(FinParams::singletons(4).with_span_cap(2)).unwrap();
        assert!(!fin.block_valid(&fin.union_of(&[0, 2]).unwrap()));
        assert!(fin.block_valid(&fin.union_of(&[1, 2]).unwrap()));
    }
}
