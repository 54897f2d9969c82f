//! Fronts, their prefix closures, and label-free colorings.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::model::{Approximation, Atom, Block, Reduct};

/// A finite family of approximations together with the reduct it is meant
/// to cover. `base` is the common initial segment every covered reduct must
/// start with (empty except for subfronts).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Front {
    members: Vec<Approximation>,
    pub scope: Reduct,
    pub base: Approximation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrontViolation {
    Comparable {
        shorter: Approximation,
        longer: Approximation,
    },
    Uncovered {
        reduct: Reduct,
    },
    Outside {
        member: Approximation,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontCheck {
    pub is_front: bool,
    pub violation: Option<FrontViolation>,
    /// Reducts inspected for covering.
    pub checked: usize,
}

impl Front {
    pub fn new(mut members: Vec<Approximation>, scope: Reduct) -> Self {
        members.sort();
        members.dedup();
        Front {
            members,
            scope,
            base: Approximation::empty(),
        }
    }

    pub fn members(&self) -> &[Approximation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn index_of(&self, s: &Approximation) -> Option<usize> {
        self.members.binary_search(s).ok()
    }

    pub fn contains(&self, s: &Approximation) -> bool {
        self.index_of(s).is_some()
    }

    /// Length of the longest member.
    pub fn max_len(&self) -> usize {
        self.members.iter().map(Approximation::len).max().unwrap_or(0)
    }

    pub fn member_ids(&self, space: &Space) -> Result<Vec<Id>> {
        self.members.iter().map(|s| space.catalog().require(s)).collect()
    }
}

/// `AX_n` as a front on `x`.
pub fn uniform_front_on(space: &Space, x: &Reduct, n: usize) -> Result<Front> {
    let cat = space.catalog();
    let xi = cat.require(x)?;
    let members: Vec<Approximation> = cat
        .down(xi)
        .ones()
        .filter(|&s| cat.length(s) == n)
        .map(|s| cat.get(s).clone())
        .collect();
    if members.is_empty() {
        return Err(Error::Parameter(format!("no approximations of length {n} inside {x}")));
    }
    Ok(Front::new(members, x.clone()))
}

/// `AU_n`.
pub fn uniform_front(space: &Space, n: usize) -> Result<Front> {
    uniform_front_on(space, &space.top(), n)
}

/// Antichain and covering test. Covering is checked on reducts of the scope
/// that start with the base and are long enough to contain every member.
pub fn is_front(space: &Space, members: &[Approximation], scope: &Reduct, base: &Approximation) -> Result<FrontCheck> {
    let cat = space.catalog();
    let xi = cat.require(scope)?;
    let bi = cat.require(base)?;
    let mut sorted = members.to_vec();
    sorted.sort();
    sorted.dedup();
    let ids = sorted.iter().map(|s| cat.require(s)).collect::<Result<Vec<Id>>>()?;
    let fail = |v: FrontViolation, checked| {
        Ok(FrontCheck {
            is_front: false,
            violation: Some(v),
            checked,
        })
    };
    for (i, &a) in ids.iter().enumerate() {
        if !cat.contains(xi, a) {
            return fail(
                FrontViolation::Outside {
                    member: sorted[i].clone(),
                },
                0,
            );
        }
        for (j, &b) in ids.iter().enumerate() {
            if i != j && cat.is_prefix(a, b) {
                return fail(
                    FrontViolation::Comparable {
                        shorter: sorted[i].clone(),
                        longer: sorted[j].clone(),
                    },
                    0,
                );
            }
        }
    }
    let need = sorted
        .iter()
        .map(Approximation::len)
        .max()
        .unwrap_or(0)
        .max(cat.length(bi));
    let mut checked = 0;
    for y in cat.down(xi).ones() {
        if cat.length(y) < need || !cat.is_prefix(bi, y) {
            continue;
        }
        checked += 1;
        if !ids.iter().any(|&s| cat.is_prefix(s, y)) {
            return fail(
                FrontViolation::Uncovered {
                    reduct: cat.get(y).clone(),
                },
                checked,
            );
        }
    }
    if ids.is_empty() {
        return fail(FrontViolation::Uncovered { reduct: scope.clone() }, checked);
    }
    Ok(FrontCheck {
        is_front: true,
        violation: None,
        checked,
    })
}

/// `F̂`: every prefix of a member, including the empty approximation.
pub fn hat(front: &Front) -> Vec<Approximation> {
    let mut out: Vec<Approximation> = front
        .members()
        .iter()
        .flat_map(|s| (0..=s.len()).map(move |k| s.prefix(k)))
        .collect();
    out.push(Approximation::empty());
    out.sort();
    out.dedup();
    out
}

/// `F_t`, the members extending `t`, as a front on `scope/t`.
pub fn subfront(front: &Front, t: &Approximation) -> Result<Front> {
    if front.contains(t) {
        return Err(Error::Domain(format!("{t} is a member of the front")));
    }
    if !front.members().iter().any(|s| t.is_prefix_of(s)) {
        return Err(Error::Domain(format!("{t} is not a prefix of any member")));
    }
    let members = front.members().iter().filter(|s| t.is_prefix_of(s)).cloned().collect();
    let mut sub = Front::new(members, front.scope.clone());
    sub.base = t.clone();
    Ok(sub)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restricted {
    pub front: Front,
    /// Covering could not be confirmed inside the new scope.
    pub undecided: bool,
}

/// `F↾Y`: members that are approximations of `y`.
pub fn restrict_front(space: &Space, front: &Front, y: &Reduct) -> Result<Restricted> {
    let cat = space.catalog();
    let yi = cat.require(y)?;
    let members: Vec<Approximation> = front
        .members()
        .iter()
        .filter(|s| cat.id(s).is_some_and(|i| cat.contains(yi, i)))
        .cloned()
        .collect();
    let mut out = Front::new(members, y.clone());
    out.base = front.base.clone();
    let undecided = match cat.id(&out.base) {
        Some(b) if cat.contains(yi, b) => !is_front(space, out.members(), y, &out.base)?.is_front,
        _ => true,
    };
    Ok(Restricted { front: out, undecided })
}

/// A coloring of a front, kept only up to relabeling: `kernel[i]` is the
/// class of member `i`, classes numbered by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    kernel: Vec<usize>,
}

impl Coloring {
    pub fn from_labels<K: Eq + std::hash::Hash>(labels: impl IntoIterator<Item = K>) -> Self {
        let mut seen: HashMap<K, usize> = HashMap::new();
        let kernel = labels
            .into_iter()
            .map(|k| {
                let next = seen.len();
                *seen.entry(k).or_insert(next)
            })
            .collect();
        Coloring { kernel }
    }

    pub fn from_groups(groups: &[Vec<usize>], size: usize) -> Result<Self> {
        let mut labels = vec![usize::MAX; size];
        for (g, members) in groups.iter().enumerate() {
            for &i in members {
                if i >= size || labels[i] != usize::MAX {
                    return Err(Error::Input(format!("kernel group index {i} is invalid or repeated")));
                }
                labels[i] = g;
            }
        }
        if labels.contains(&usize::MAX) {
            return Err(Error::Input("kernel does not cover every member".into()));
        }
        Ok(Self::from_labels(labels))
    }

    pub fn kernel(&self) -> &[usize] {
        &self.kernel
    }

    pub fn len(&self) -> usize {
        self.kernel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kernel.is_empty()
    }

    pub fn class(&self, index: usize) -> usize {
        self.kernel[index]
    }

    pub fn classes(&self) -> usize {
        self.kernel.iter().max().map_or(0, |m| m + 1)
    }

    /// Member-index groups, one per class.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes()];
        for (i, &c) in self.kernel.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// On-disk form of a front and its coloring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrontFile {
    pub members: Vec<Vec<Vec<Atom>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<Vec<usize>>>,
}

impl FrontFile {
    pub fn from_front(front: &Front, coloring: Option<&Coloring>) -> Self {
        FrontFile {
            members: front
                .members()
                .iter()
                .map(|s| s.blocks().iter().map(|b| b.atoms().to_vec()).collect())
                .collect(),
            kernel: coloring.map(Coloring::groups),
        }
    }

    /// Rebuilds the front on `U`; the coloring is re-indexed to the sorted
    /// member order.
    pub fn load(&self, space: &Space) -> Result<(Front, Option<Coloring>)> {
        let ground = space.model().ground();
        let raw: Vec<Approximation> = self
            .members
            .iter()
            .map(|blocks| {
                let bs = blocks
                    .iter()
                    .map(|b| Block::from_atoms(ground, b.clone()))
                    .collect::<Result<Vec<_>>>()?;
                let s = Approximation::from_blocks(bs);
                space.catalog().require(&s)?;
                Ok(s)
            })
            .collect::<Result<_>>()?;
        let front = Front::new(raw.clone(), space.top());
        if front.len() != raw.len() {
            return Err(Error::Input("front members repeat".into()));
        }
        let coloring = match &self.kernel {
            None => None,
            Some(groups) => {
                let by_file = Coloring::from_groups(groups, raw.len())?;
                let mut labels = BTreeMap::new();
                for (i, s) in raw.iter().enumerate() {
                    labels.insert(front.index_of(s).expect("member"), by_file.class(i));
                }
                Some(Coloring::from_labels(labels.into_values()))
            }
        };
        Ok((front, coloring))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_ellentuck, build_fin, Ellentuck, EllentuckParams, FinParams};

    #[test]
    fn uniform_sizes() {
        let e = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        assert_eq!(uniform_front(&e, 2).unwrap().len(), 6);
        assert_eq!(uniform_front(&e, 0).unwrap().members(), &[Approximation::empty()]);
        assert!(uniform_front(&e, 5).is_err());
        let f = build_fin(FinParams::singletons(3)).unwrap();
        assert_eq!(uniform_front(&f, 1).unwrap().len(), 7);
    }

    #[test]
    fn front_tests() {
        let e = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        let top = e.top();
        let au2 = uniform_front(&e, 2).unwrap();
        let empty = Approximation::empty();
        assert!(is_front(&e, au2.members(), &top, &empty).unwrap().is_front);
        assert!(is_front(&e, std::slice::from_ref(&empty), &top, &empty).unwrap().is_front);
        let s = Ellentuck::set(&[1]);
        let t = Ellentuck::set(&[1, 2]);
        let r = is_front(&e, &[s.clone(), t.clone()], &top, &empty).unwrap();
        assert_eq!(r.violation, Some(FrontViolation::Comparable { shorter: s, longer: t }));
    }

    #[test]
    fn hat_and_subfront() {
        let e = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        let au2 = uniform_front(&e, 2).unwrap();
        // {3} heads no pair at the truncation, so it is not a prefix of a member
        assert_eq!(hat(&au2).len(), 1 + 3 + 6);
        assert!(!hat(&au2).contains(&Ellentuck::set(&[3])));
        let sub = subfront(&au2, &Ellentuck::set(&[0])).unwrap();
        assert_eq!(
            sub.members(),
            &[
                Ellentuck::set(&[0, 1]),
                Ellentuck::set(&[0, 2]),
                Ellentuck::set(&[0, 3])
            ]
        );
        assert_eq!(
            subfront(&au2, &Approximation::empty()).unwrap().members(),
            au2.members()
        );
        assert!(subfront(&au2, &Ellentuck::set(&[0, 1])).is_err());
        assert!(is_front(&e, sub.members(), &sub.scope, &sub.base).unwrap().is_front);
    }

    #[test]
    fn restriction() {
        let e = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        let au2 = uniform_front(&e, 2).unwrap();
        let r = restrict_front(&e, &au2, &Ellentuck::set(&[1, 2, 3])).unwrap();
        assert_eq!(r.front.len(), 3);
        assert!(!r.undecided);
        let same = restrict_front(&e, &au2, &e.top()).unwrap();
        assert_eq!(same.front.members(), au2.members());
        let au1 = uniform_front_on(&e, &Ellentuck::set(&[0]), 1).unwrap();
        let off = restrict_front(&e, &au1, &Ellentuck::set(&[2, 3])).unwrap();
        assert!(off.front.is_empty());
        assert!(off.undecided);
    }

    #[test]
    fn kernels_ignore_labels() {
        let a = Coloring::from_labels([5, 5, 9, 1]);
        let b = Coloring::from_labels(["x", "x", "y", "z"]);
        assert_eq!(a, b);
        assert_eq!(a.groups(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(Coloring::from_groups(&a.groups(), 4).unwrap(), a);
    }

    #[test]
    fn file_round_trip() {
        let e = build_ellentuck(EllentuckParams { n: 4 }).unwrap();
        let au2 = uniform_front(&e, 2).unwrap();
        let c = Coloring::from_labels(au2.members().iter().map(|s| s.atoms()[0]));
        let file = FrontFile::from_front(&au2, Some(&c));
        let text = serde_json::to_string(&file).unwrap();
        let back: FrontFile = serde_json::from_str(&text).unwrap();
        let (f2, c2) = back.load(&e).unwrap();
        assert_eq!(f2.members(), au2.members());
        assert_eq!(c2.unwrap(), c);
    }
}
