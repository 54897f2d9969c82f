//! Exhaustive index of `AU` for a truncated instance.
//!
//! Every finite reduct is an approximation, so one table serves both roles:
//! `down[x]` is the set of approximations of the reduct `x`, which is also the
//! set of reducts `Y ≤ x`. Ids follow the total order on approximations
//! (lexicographic on blocks), so iterating a bitset visits candidates in the
//! order used for deterministic tie-breaking.

use std::collections::HashMap;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::model::{Approximation, Reduct, SpaceModel};

/// Default cap on `|AU|`.
pub const DEFAULT_ENUM_CAP: usize = 20_000;

pub type Id = usize;

pub struct Catalog {
    items: Vec<Approximation>,
    index: HashMap<Approximation, Id>,
    parent: Vec<Option<Id>>,
    children: Vec<Vec<Id>>,
    down: Vec<FixedBitSet>,
    up: Vec<FixedBitSet>,
    top: Id,
}

impl Catalog {
    pub fn build(model: &dyn SpaceModel, cap: usize) -> Result<Self> {
        let top_reduct = model.top();
        let mut items = vec![Approximation::empty()];
        let mut frontier = vec![Approximation::empty()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for s in &frontier {
                for p in model.one_step_extensions(s, &top_reduct) {
                    next.push(p);
                }
            }
            next.sort();
            next.dedup();
            items.extend(next.iter().cloned());
            if items.len() > cap {
                return Err(Error::Budget {
                    budget: cap,
                    what: "approximations of U".into(),
                });
            }
            frontier = next;
        }
        items.sort();
        items.dedup();
        let index: HashMap<Approximation, Id> = items.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let n = items.len();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        for (i, a) in items.iter().enumerate() {
            if !a.is_empty() {
                let p = index[&a.prefix(a.len() - 1)];
                parent[i] = Some(p);
                children[p].push(i);
            }
        }
        let mut down = vec![FixedBitSet::with_capacity(n); n];
        let mut up = vec![FixedBitSet::with_capacity(n); n];
        for (x, xa) in items.iter().enumerate() {
            for (s, sa) in items.iter().enumerate() {
                if sa.is_empty() || model.leq_fin_core(sa, xa) {
                    down[x].insert(s);
                    up[s].insert(x);
                }
            }
        }
        let top = *index
            .get(&top_reduct)
            .ok_or_else(|| Error::Parameter("U is not reachable by one-step extensions".into()))?;
        Ok(Catalog {
            items,
            index,
            parent,
            children,
            down,
            up,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, id: Id) -> &Approximation {
        &self.items[id]
    }

    pub fn id(&self, s: &Approximation) -> Option<Id> {
        self.index.get(s).copied()
    }

    pub fn require(&self, s: &Approximation) -> Result<Id> {
        self.id(s).ok_or_else(|| Error::mismatch(s))
    }

    pub fn top(&self) -> Id {
        self.top
    }

    pub fn empty_id(&self) -> Id {
        0
    }

    pub fn parent(&self, id: Id) -> Option<Id> {
        self.parent[id]
    }

    /// One-step extensions of `id` inside `U`.
    pub fn children(&self, id: Id) -> &[Id] {
        &self.children[id]
    }

    pub fn length(&self, id: Id) -> usize {
        self.items[id].len()
    }

    /// `AX` for the reduct `x`; equivalently all `Y ≤ x`.
    pub fn down(&self, x: Id) -> &FixedBitSet {
        &self.down[x]
    }

    /// All reducts `Z` with `s ∈ AZ`.
    pub fn up(&self, s: Id) -> &FixedBitSet {
        &self.up[s]
    }

    pub fn contains(&self, x: Id, s: Id) -> bool {
        self.down[x].contains(s)
    }

    /// `s ⊑ t`.
    pub fn is_prefix(&self, s: Id, t: Id) -> bool {
        let mut cur = Some(t);
        let target = self.length(s);
        while let Some(c) = cur {
            if self.length(c) == target {
                return c == s;
            }
            if self.length(c) < target {
                return false;
            }
            cur = self.parent[c];
        }
        false
    }

    /// Prefix `r_n` of an indexed approximation.
    pub fn prefix(&self, id: Id, n: usize) -> Id {
        let mut cur = id;
        while self.length(cur) > n {
            cur = self.parent[cur].expect("nonempty approximations have parents");
        }
        cur
    }

    /// Extensions of `s` inside `x`: `[s,X]_{|s|+1}` when `s ∈ AX`.
    pub fn extensions_in(&self, s: Id, x: Id) -> Vec<Id> {
        if !self.contains(x, s) {
            return Vec::new();
        }
        self.children[s]
            .iter()
            .copied()
            .filter(|&p| self.contains(x, p))
            .collect()
    }

    /// Reducts of `x` having `s` as an initial segment: `[s,X]`.
    pub fn basic_set(&self, s: Id, x: Id) -> Vec<Id> {
        self.down[x].ones().filter(|&y| self.is_prefix(s, y)).collect()
    }

    /// Length of the longest reduct, i.e. the truncation depth seen by `r`.
    pub fn max_length(&self) -> usize {
        self.items.iter().map(Approximation::len).max().unwrap_or(0)
    }

    pub fn all(&self) -> impl Iterator<Item = Id> + '_ {
        0..self.items.len()
    }
}

/// A model together with its index; the handle most operations take.
#[derive(Clone)]
pub struct Space {
    model: Arc<dyn SpaceModel>,
    catalog: Arc<Catalog>,
}

impl Space {
    pub fn new(model: impl SpaceModel + 'static) -> Result<Self> {
        Self::with_cap(Arc::new(model), DEFAULT_ENUM_CAP)
    }

    pub fn with_cap(model: Arc<dyn SpaceModel>, cap: usize) -> Result<Self> {
        let catalog = Catalog::build(model.as_ref(), cap)?;
        Ok(Space {
            model,
            catalog: Arc::new(catalog),
        })
    }

    pub fn model(&self) -> &dyn SpaceModel {
        self.model.as_ref()
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn top(&self) -> Reduct {
        self.catalog.get(self.catalog.top()).clone()
    }

    /// Longest common reduct of `x` and `y`; ties broken by the catalog order.
    pub fn meet(&self, x: &Reduct, y: &Reduct) -> Result<Reduct> {
        let (xi, yi) = (self.catalog.require(x)?, self.catalog.require(y)?);
        let mut best = self.catalog.empty_id();
        for z in self.catalog.down(xi).ones() {
            if self.catalog.contains(yi, z) && self.catalog.length(z) > self.catalog.length(best) {
                best = z;
            }
        }
        Ok(self.catalog.get(best).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Ellentuck, EllentuckParams};

    #[test]
    fn ellentuck_catalog_is_powerset() {
        let space = Space::new(Ellentuck::new(EllentuckParams { n: 5 }).unwrap()).unwrap();
        let cat = space.catalog();
        assert_eq!(cat.len(), 32);
        assert_eq!(cat.down(cat.top()).count_ones(..), 32);
        assert_eq!(cat.children(cat.empty_id()).len(), 5);
        let s = cat.require(&Ellentuck::set(&[1])).unwrap();
        let t = cat.require(&Ellentuck::set(&[1, 3])).unwrap();
        assert!(cat.is_prefix(s, t));
        assert!(!cat.is_prefix(t, s));
        assert_eq!(cat.prefix(t, 1), s);
    }

    #[test]
    fn cap_is_enforced() {
        let model = Arc::new(Ellentuck::new(EllentuckParams { n: 6 }).unwrap());
        assert!(matches!(Space::with_cap(model, 10), Err(Error::Budget { .. })));
    }
}
