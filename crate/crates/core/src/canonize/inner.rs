//! Inner components and position-wise inner maps.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::axioms::basic_candidates;
use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::model::{Approximation, Atom, Block, Reduct, Selector};

/// `φ_s`: the selector applied to the new block of each one-step extension of `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InnerComponent {
    pub base: Approximation,
    pub selector: Selector,
}

impl InnerComponent {
    pub fn apply(&self, p: &Approximation) -> Vec<Atom> {
        p.last().map(|b| self.selector.apply(b)).unwrap_or_default()
    }
}

/// Selectors the instance declares for inner components, drop first.
pub fn inner_family(space: &Space) -> Vec<Selector> {
    space.model().inner_family()
}

/// An inner map with one selector per block position: the component at
/// position `i` acts on `t(i)` whatever the prefix before it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InnerMap {
    pub components: Vec<Selector>,
}

impl InnerMap {
    pub fn new(components: Vec<Selector>) -> Self {
        InnerMap { components }
    }

    pub fn all_drop(len: usize) -> Self {
        InnerMap {
            components: vec![Selector::Drop; len],
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Positions whose selector keeps something.
    pub fn active_positions(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.components[i] != Selector::Drop)
            .collect()
    }

    pub fn component(&self, base: &Approximation) -> Option<InnerComponent> {
        self.components.get(base.len()).map(|&selector| InnerComponent {
            base: base.clone(),
            selector,
        })
    }
}

impl fmt::Display for InnerMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.components.iter().map(Selector::name).collect();
        write!(f, "({})", names.join(","))
    }
}

/// Value of an inner map: nonempty component outputs in prefix order.
pub type InnerValue = Vec<Vec<Atom>>;

pub fn eval_inner(phi: &InnerMap, t: &Approximation) -> Result<InnerValue> {
    if t.len() > phi.len() {
        return Err(Error::Domain(format!(
            "inner map has {} components but {t} has {} blocks",
            phi.len(),
            t.len()
        )));
    }
    Ok(t.blocks()
        .iter()
        .zip(&phi.components)
        .map(|(b, sel)| sel.apply(b))
        .filter(|v| !v.is_empty())
        .collect())
}

/// `c(p)=c(q)` iff `sel(p)=sel(q)` over the given new blocks.
pub(crate) fn selector_fits(sel: Selector, blocks: &[(&Block, u64)]) -> bool {
    let mut forward: HashMap<u64, Vec<Atom>> = HashMap::new();
    let mut backward: HashMap<Vec<Atom>, u64> = HashMap::new();
    for &(b, c) in blocks {
        let out = sel.apply(b);
        if *forward.entry(c).or_insert_with(|| out.clone()) != out || *backward.entry(out).or_insert(c) != c {
            return false;
        }
    }
    true
}

/// Searches `[s,X]` for a reduct and a family member whose kernel on the
/// colored one-step extensions equals the kernel of `color`. Extensions
/// mapped to `None` are ignored. Prefers the most colored extensions, then
/// the least reduct, then family order.
pub fn search_inner_a4star(
    space: &Space,
    s: &Approximation,
    x: &Reduct,
    color: &dyn Fn(&Approximation) -> Option<u64>,
    mu: usize,
) -> Result<(Reduct, InnerComponent)> {
    search_inner_with(space, s, x, color, mu, &inner_family(space))
}

/// [`search_inner_a4star`] over an explicit family.
pub fn search_inner_with(
    space: &Space,
    s: &Approximation,
    x: &Reduct,
    color: &dyn Fn(&Approximation) -> Option<u64>,
    mu: usize,
    family: &[Selector],
) -> Result<(Reduct, InnerComponent)> {
    let cat = space.catalog();
    let (si, xi) = (cat.require(s)?, cat.require(x)?);
    if !cat.contains(xi, si) {
        return Err(Error::Domain(format!("{x} is not compatible with {s}")));
    }
    let colors: HashMap<Id, u64> = cat
        .extensions_in(si, xi)
        .into_iter()
        .filter_map(|p| color(cat.get(p)).map(|c| (p, c)))
        .collect();
    let mut admissible = false;
    let mut best: Option<(usize, Id, Selector)> = None;
    for (y, ext) in basic_candidates(cat, si, xi) {
        let colored: Vec<(&Block, u64)> = ext
            .iter()
            .filter_map(|p| {
                colors
                    .get(p)
                    .map(|&c| (cat.get(*p).last().expect("extensions are nonempty"), c))
            })
            .collect();
        if colored.len() < mu.max(1) {
            continue;
        }
        admissible = true;
        if best.is_some_and(|(k, _, _)| colored.len() <= k) {
            continue;
        }
        if let Some(&sel) = family.iter().find(|&&sel| selector_fits(sel, &colored)) {
            best = Some((colored.len(), y, sel));
        }
    }
    match best {
        Some((_, y, selector)) => Ok((
            cat.get(y).clone(),
            InnerComponent {
                base: s.clone(),
                selector,
            },
        )),
        None if admissible => Err(Error::NoInnerWitness),
        None => Err(Error::TruncationTooShallow { needed: mu.max(1) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::pigeonhole_a4;
    use crate::spaces::{build_ellentuck, Ellentuck, EllentuckParams, Fin, FinParams};

    #[test]
    fn evaluation() {
        let t = Ellentuck::set(&[3, 7]);
        let keep_drop = InnerMap::new(vec![Selector::Keep, Selector::Drop]);
        assert_eq!(eval_inner(&keep_drop, &t).unwrap(), vec![vec![3]]);
        let keep_keep = InnerMap::new(vec![Selector::Keep; 2]);
        assert_eq!(eval_inner(&keep_keep, &t).unwrap(), vec![vec![3], vec![7]]);
        assert!(eval_inner(&InnerMap::all_drop(2), &t).unwrap().is_empty());
        assert!(eval_inner(&InnerMap::all_drop(1), &t).is_err());
        assert_eq!(keep_drop.to_string(), "(keep,drop)");
    }

    #[test]
    fn family_sizes() {
        let e = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        assert_eq!(inner_family(&e).len(), 2);
        let f = Space::new(Fin::new(FinParams::singletons(3)).unwrap()).unwrap();
        assert_eq!(inner_family(&f).len(), 5);
    }

    #[test]
    fn constant_and_identity_kernels() {
        let e = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let top = e.top();
        let s = Ellentuck::set(&[1]);
        // the largest member of [s,U] drops atom 0
        let tail = Ellentuck::set(&[1, 2, 3, 4, 5]);
        let (y, comp) = search_inner_a4star(&e, &s, &top, &|_| Some(0), 1).unwrap();
        assert_eq!((y, comp.selector), (tail.clone(), Selector::Drop));
        let (y, comp) = search_inner_a4star(&e, &s, &top, &|p| Some(p.max_atom().unwrap() as u64), 1).unwrap();
        assert_eq!((y, comp.selector), (tail, Selector::Keep));
        let (y, comp) = search_inner_a4star(&e, &Approximation::empty(), &top, &|_| Some(0), 1).unwrap();
        assert_eq!((y, comp.selector), (top, Selector::Drop));
    }

    #[test]
    fn fin_min_of_new_block() {
        let f = Fin::new(FinParams::singletons(4)).unwrap();
        let space = Space::new(f.clone()).unwrap();
        let s = f.seq(&[&[0]]).unwrap();
        let color = |p: &Approximation| Some(p.last().unwrap().least() as u64);
        let (y, comp) = search_inner_a4star(&space, &s, &space.top(), &color, 1).unwrap();
        assert_eq!(comp.selector, Selector::Min);
        // brute force: min fits on y and nothing earlier in the family does
        let cat = space.catalog();
        let blocks: Vec<(Block, u64)> = cat
            .extensions_in(cat.require(&s).unwrap(), cat.require(&y).unwrap())
            .into_iter()
            .map(|p| {
                let b = cat.get(p).last().unwrap().clone();
                let c = b.least() as u64;
                (b, c)
            })
            .collect();
        for i in 0..blocks.len() {
            for j in 0..blocks.len() {
                let same_color = blocks[i].1 == blocks[j].1;
                assert_eq!(same_color, blocks[i].0.least() == blocks[j].0.least());
            }
        }
    }

    #[test]
    fn drop_only_family_is_pigeonhole() {
        let e = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let top = e.top();
        for s in [Approximation::empty(), Ellentuck::set(&[0]), Ellentuck::set(&[1, 2])] {
            for mask in 0u64..8 {
                let color = |p: &Approximation| (mask >> (p.max_atom().unwrap() % 3)) & 1;
                let a4 = pigeonhole_a4(&e, &s, &top, &color, 1).unwrap();
                let (y, comp) = search_inner_with(&e, &s, &top, &|p| Some(color(p)), 1, &[Selector::Drop]).unwrap();
                assert_eq!(comp.selector, Selector::Drop);
                assert_eq!(y, a4);
            }
        }
    }

    #[test]
    fn too_few_extensions() {
        let e = build_ellentuck(EllentuckParams { n: 3 }).unwrap();
        let s = Ellentuck::set(&[2]);
        let r = search_inner_a4star(&e, &s, &e.top(), &|_| Some(0), 1);
        assert_eq!(r, Err(Error::TruncationTooShallow { needed: 1 }));
    }
}
