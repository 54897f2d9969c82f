use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    Approximation, Atom, Block, GroundSpace, InstanceKind, LevelInterval, Reduct, Selector, SpaceModel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllentuckParams {
    pub n: usize,
}

/// Truncated Ellentuck space: level `i` (1-based) is the singleton `{i-1}`,
/// reducts are subsets, and `≤_fin` is inclusion.
#[derive(Clone, Debug)]
pub struct Ellentuck {
    ground: GroundSpace,
    n: usize,
}

impl Ellentuck {
    pub fn new(params: EllentuckParams) -> Result<Self> {
        if params.n == 0 {
            return Err(Error::Parameter("ellentuck needs N >= 1".into()));
        }
        let raw = (0..params.n as Atom).map(|a| vec![a]).collect();
        Ok(Ellentuck {
            ground: GroundSpace::new(InstanceKind::Ellentuck, raw)?,
            n: params.n,
        })
    }

    pub fn block(a: Atom) -> Block {
        Block::new(vec![a], LevelInterval::new(a as usize + 1, a as usize + 2))
    }

    /// The approximation listing `atoms` in increasing order.
    pub fn set(atoms: &[Atom]) -> Approximation {
        let mut sorted = atoms.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        Approximation::from_blocks(sorted.into_iter().map(Self::block).collect())
    }
}

impl SpaceModel for Ellentuck {
    fn kind(&self) -> InstanceKind {
        InstanceKind::Ellentuck
    }

    fn ground(&self) -> &GroundSpace {
        &self.ground
    }

    fn top(&self) -> Reduct {
        Self::set(&(0..self.n as Atom).collect::<Vec<_>>())
    }

    fn block_valid(&self, block: &Block) -> bool {
        match block.atoms() {
            [a] => (*a as usize) < self.n && block.source() == Self::block(*a).source(),
            _ => false,
        }
    }

    fn is_approximation(&self, s: &Approximation) -> bool {
        s.blocks().iter().all(|b| self.block_valid(b)) && s.blocks().windows(2).all(|w| w[0].least() < w[1].least())
    }

    fn leq_fin_core(&self, s: &Approximation, t: &Approximation) -> bool {
        let t_atoms = t.atoms();
        s.atoms().iter().all(|a| t_atoms.binary_search(a).is_ok())
    }

    fn is_reduct_of(&self, y: &Reduct, x: &Reduct) -> bool {
        self.leq_fin_core(y, x)
    }

    fn one_step_extensions(&self, s: &Approximation, x: &Reduct) -> Vec<Approximation> {
        let floor = s.max_atom();
        x.atoms()
            .into_iter()
            .filter(|&a| floor.is_none_or(|m| a > m))
            .map(|a| s.extended(Self::block(a)))
            .collect()
    }

    fn inner_family(&self) -> Vec<Selector> {
        vec![Selector::Drop, Selector::Keep]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{depth, extensions, leq_fin, DepthValue};

    #[test]
    fn zero_is_rejected() {
        assert!(Ellentuck::new(EllentuckParams { n: 0 }).is_err());
    }

    #[test]
    fn subset_order() {
        let e = Ellentuck::new(EllentuckParams { n: 10 }).unwrap();
        assert!(leq_fin(&e, &Ellentuck::set(&[2, 5]), &Ellentuck::set(&[1, 2, 5, 9])).unwrap());
        assert!(!leq_fin(&e, &Ellentuck::set(&[2, 6]), &Ellentuck::set(&[1, 2, 5, 9])).unwrap());
    }

    #[test]
    fn depth_examples() {
        let e = Ellentuck::new(EllentuckParams { n: 10 }).unwrap();
        let x = Ellentuck::set(&[1, 3, 5, 7, 9]);
        assert_eq!(depth(&e, &x, &Ellentuck::set(&[3, 5])), DepthValue::Finite(3));
        assert_eq!(depth(&e, &x, &Approximation::empty()), DepthValue::Finite(0));
        assert_eq!(
            depth(&e, &Ellentuck::set(&[1, 3, 5]), &Ellentuck::set(&[4])),
            DepthValue::Infinite
        );
    }

    #[test]
    fn extension_examples() {
        let e = Ellentuck::new(EllentuckParams { n: 6 }).unwrap();
        let ext = extensions(&e, &Ellentuck::set(&[1]), &Ellentuck::set(&[1, 2, 4]));
        assert_eq!(ext, vec![Ellentuck::set(&[1, 2]), Ellentuck::set(&[1, 4])]);
        assert!(extensions(&e, &Ellentuck::set(&[2]), &Ellentuck::set(&[1, 3])).is_empty());
    }
}
