//! Diagonal fusion: one reduct on which a hereditary property holds at every
//! approximation (single form) or every pair of approximations (pair form)
//! up to a depth budget.

use serde::{Deserialize, Serialize};

use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::model::Reduct;

/// A reduct-hereditary predicate `P(s, Y)` with a refinement procedure.
pub trait PropertyOracle {
    fn holds(&self, space: &Space, s: Id, y: Id) -> bool;

    /// Some `Y ≤ x` with `frozen ⊑ Y` and `P(s, Y)`. The default scans every
    /// candidate and keeps the longest, then the least.
    fn refine(&self, space: &Space, s: Id, x: Id, frozen: Id) -> Option<Id> {
        longest_where(space, x, frozen, |y| self.holds(space, s, y))
    }
}

/// Pair version `P(s, t, Y)`.
pub trait PairPropertyOracle {
    fn holds(&self, space: &Space, s: Id, t: Id, y: Id) -> bool;

    fn refine(&self, space: &Space, s: Id, t: Id, x: Id, frozen: Id) -> Option<Id> {
        longest_where(space, x, frozen, |y| self.holds(space, s, t, y))
    }
}

impl<F: Fn(&Space, Id, Id) -> bool> PropertyOracle for F {
    fn holds(&self, space: &Space, s: Id, y: Id) -> bool {
        self(space, s, y)
    }
}

pub(crate) fn longest_where(space: &Space, x: Id, frozen: Id, mut pred: impl FnMut(Id) -> bool) -> Option<Id> {
    let cat = space.catalog();
    let mut best: Option<Id> = None;
    for y in cat.down(x).ones() {
        if best.is_some_and(|b| cat.length(y) <= cat.length(b)) || !cat.is_prefix(frozen, y) {
            continue;
        }
        if pred(y) {
            best = Some(y);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuseResult {
    pub reduct: Reduct,
    /// Stages completed; a stage freezes one more block.
    pub stages: usize,
    pub refinements: usize,
}

struct Run<'a> {
    space: &'a Space,
    x: Id,
    refinements: usize,
}

impl Run<'_> {
    fn fail(&self, stage: usize) -> Error {
        Error::Exhausted {
            stage,
            partial: self.space.catalog().get(self.x).clone(),
        }
    }
}

/// Fusion for a single-approximation property, starting from `start`.
pub fn fuse(space: &Space, p: &dyn PropertyOracle, start: &Reduct, depth_budget: usize) -> Result<FuseResult> {
    let cat = space.catalog();
    let mut run = Run {
        space,
        x: cat.require(start)?,
        refinements: 0,
    };
    let empty = cat.empty_id();
    if !p.holds(space, empty, run.x) {
        run.x = p.refine(space, empty, run.x, empty).ok_or_else(|| run.fail(0))?;
        run.refinements += 1;
    }
    let mut stages = 0;
    for n in 0..depth_budget {
        if cat.length(run.x) < n + 1 {
            break;
        }
        let frozen = cat.prefix(run.x, n + 1);
        for z in cat.down(frozen).ones() {
            if !p.holds(space, z, run.x) {
                run.x = p.refine(space, z, run.x, frozen).ok_or_else(|| run.fail(n + 1))?;
                run.refinements += 1;
            }
        }
        stages = n + 1;
    }
    Ok(FuseResult {
        reduct: cat.get(run.x).clone(),
        stages,
        refinements: run.refinements,
    })
}

/// Fusion for a pair property; at stage `n` every pair drawn from
/// `{z : z ≤_fin r_{n+1}(X_n)}` is handled.
pub fn fuse_pairs(
    space: &Space,
    p: &dyn PairPropertyOracle,
    start: &Reduct,
    depth_budget: usize,
) -> Result<FuseResult> {
    let cat = space.catalog();
    let mut run = Run {
        space,
        x: cat.require(start)?,
        refinements: 0,
    };
    let mut stages = 0;
    for n in 0..depth_budget {
        if cat.length(run.x) < n + 1 {
            break;
        }
        let frozen = cat.prefix(run.x, n + 1);
        let zs: Vec<Id> = cat.down(frozen).ones().collect();
        for (i, &s) in zs.iter().enumerate() {
            for &t in &zs[i + 1..] {
                if !p.holds(space, s, t, run.x) {
                    run.x = p.refine(space, s, t, run.x, frozen).ok_or_else(|| run.fail(n))?;
                    run.refinements += 1;
                }
            }
        }
        stages = n + 1;
    }
    Ok(FuseResult {
        reduct: cat.get(run.x).clone(),
        stages,
        refinements: run.refinements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_ellentuck, EllentuckParams};

    #[test]
    fn trivial_property_keeps_top() {
        let space = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let always = |_: &Space, _: Id, _: Id| true;
        let r = fuse(&space, &always, &space.top(), 5).unwrap();
        assert_eq!(r.reduct, space.top());
        assert_eq!(r.refinements, 0);
    }

    #[test]
    fn unsatisfiable_fails_at_stage_zero() {
        let space = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        let never = |_: &Space, _: Id, _: Id| false;
        match fuse(&space, &never, &space.top(), 4) {
            Err(Error::Exhausted { stage, partial }) => {
                assert_eq!(stage, 0);
                assert_eq!(partial, space.top());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hereditary_property_holds_everywhere() {
        // P(s,Y): Y avoids every odd atom lying above all of s
        let space = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let p = |sp: &Space, s: Id, y: Id| {
            let cat = sp.catalog();
            let floor = cat.get(s).max_atom();
            cat.get(y)
                .atoms()
                .iter()
                .all(|&a| a % 2 == 0 || floor.is_some_and(|m| a <= m))
        };
        let r = fuse(&space, &p, &space.top(), 6).unwrap();
        let cat = space.catalog();
        let z = cat.require(&r.reduct).unwrap();
        for s in cat.down(z).ones() {
            assert!(p(&space, s, z));
        }
        assert!(r.reduct.len() >= 3);
    }
}
