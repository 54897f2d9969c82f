//! Brute-force canonization: every reduct against every position-wise map.

use serde::{Deserialize, Serialize};

use super::inner::{eval_inner, inner_family, InnerMap};
use super::{members_in, verify_ids};
use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::fronts::{Coloring, Front};
use crate::model::{Reduct, Selector};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Length of every witness; witnesses need a nonempty `F↾X`.
    pub length: usize,
    pub witnesses: Vec<(Reduct, InnerMap)>,
    pub candidates: usize,
}

fn all_maps(family: &[Selector], len: usize) -> Vec<InnerMap> {
    let mut maps = vec![Vec::new()];
    for _ in 0..len {
        maps = maps
            .into_iter()
            .flat_map(|m: Vec<Selector>| {
                family.iter().map(move |&s| {
                    let mut next = m.clone();
                    next.push(s);
                    next
                })
            })
            .collect();
    }
    maps.into_iter().map(InnerMap::new).collect()
}

/// All `(X, φ)` of maximal length with `f(s)=f(t) ⟺ φ(s)=φ(t)` on `F↾X`.
/// Fails when reducts times maps exceeds `budget`.
pub fn oracle_canonize(space: &Space, front: &Front, coloring: &Coloring, budget: usize) -> Result<OracleResult> {
    let cat = space.catalog();
    let family = inner_family(space);
    let len = front.max_len();
    let maps_count = (family.len() as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
    let total = maps_count.saturating_mul(cat.len() as u128);
    if total > budget as u128 {
        return Err(Error::Budget {
            budget,
            what: format!("{total} oracle candidates"),
        });
    }
    let maps = all_maps(&family, len);
    let scope = cat.require(&front.scope)?;
    let mut reducts: Vec<Id> = cat
        .down(scope)
        .ones()
        .filter(|&x| !members_in(space, front, x).is_empty())
        .collect();
    reducts.sort_by_key(|&x| (usize::MAX - cat.length(x), x));

    let mut out = OracleResult {
        length: 0,
        witnesses: Vec::new(),
        candidates: 0,
    };
    for x in reducts {
        if !out.witnesses.is_empty() && cat.length(x) < out.length {
            break;
        }
        for phi in &maps {
            out.candidates += 1;
            if verify_ids(space, x, phi, front, coloring)?.holds {
                out.length = cat.length(x);
                out.witnesses.push((cat.get(x).clone(), phi.clone()));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agreement {
    pub agrees: bool,
    /// The oracle witness compared against, with the most common members.
    pub oracle_witness: Option<(Reduct, InnerMap)>,
    pub common: Option<Reduct>,
    pub common_members: usize,
    pub same_length: bool,
}

/// Some oracle witness induces the same kernel as `(x, phi)` on `F↾meet`.
/// Among agreeing witnesses the one sharing the most members is reported.
pub fn agreement(space: &Space, front: &Front, x: &Reduct, phi: &InnerMap, oracle: &OracleResult) -> Result<Agreement> {
    let cat = space.catalog();
    let mut best: Option<Agreement> = None;
    for (xo, po) in &oracle.witnesses {
        let meet = space.meet(x, xo)?;
        let idx = members_in(space, front, cat.require(&meet)?);
        let ours = idx
            .iter()
            .map(|&k| eval_inner(phi, &front.members()[k]))
            .collect::<Result<Vec<_>>>()?;
        let theirs = idx
            .iter()
            .map(|&k| eval_inner(po, &front.members()[k]))
            .collect::<Result<Vec<_>>>()?;
        let same = (0..idx.len()).all(|i| (i + 1..idx.len()).all(|j| (ours[i] == ours[j]) == (theirs[i] == theirs[j])));
        if same && best.as_ref().is_none_or(|b| idx.len() > b.common_members) {
            best = Some(Agreement {
                agrees: true,
                oracle_witness: Some((xo.clone(), po.clone())),
                common: Some(meet),
                common_members: idx.len(),
                same_length: x.len() == oracle.length,
            });
        }
    }
    Ok(best.unwrap_or(Agreement {
        agrees: false,
        oracle_witness: None,
        common: None,
        common_members: 0,
        same_length: x.len() == oracle.length,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{generate, ColoringSpec};
    use crate::fronts::uniform_front;
    use crate::spaces::{build_ellentuck, EllentuckParams};

    #[test]
    fn constant_includes_top_all_drop() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let front = uniform_front(&e, 2).unwrap();
        let c = generate(&front, &ColoringSpec::Constant);
        let r = oracle_canonize(&e, &front, &c, 100_000).unwrap();
        assert!(r.witnesses.contains(&(e.top(), InnerMap::all_drop(2))));
    }

    #[test]
    fn min_projects_to_first_coordinate() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let front = uniform_front(&e, 2).unwrap();
        let c = generate(&front, &ColoringSpec::Min);
        let r = oracle_canonize(&e, &front, &c, 100_000).unwrap();
        assert_eq!(r.length, 5);
        for (x, phi) in &r.witnesses {
            // kernel equals the projection to coordinate 0 on F↾X
            let check = verify_ids(
                &e,
                e.catalog().require(x).unwrap(),
                &InnerMap::new(vec![Selector::Keep, Selector::Drop]),
                &front,
                &c,
            )
            .unwrap();
            assert!(check.holds, "{x} {phi}");
        }
    }

    #[test]
    fn injective_forces_full_keep() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let front = uniform_front(&e, 2).unwrap();
        let c = generate(&front, &ColoringSpec::Injective);
        let r = oracle_canonize(&e, &front, &c, 100_000).unwrap();
        assert!(r
            .witnesses
            .iter()
            .all(|(_, phi)| phi.components == vec![Selector::Keep; 2]));
    }

    #[test]
    fn budget_guard() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let front = uniform_front(&e, 2).unwrap();
        let c = generate(&front, &ColoringSpec::Constant);
        assert!(matches!(oracle_canonize(&e, &front, &c, 10), Err(Error::Budget { .. })));
    }
}
