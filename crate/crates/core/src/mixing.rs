//! Mixing and separation of approximations under a front coloring.
//!
//! Quantifiers over reducts range over the pool of `Z ≤ X` that contain both
//! approximations and keep at least `mu` live one-step extensions of each
//! (an extension is live in `Z` when some front member of `Z` extends it).
//! An approximation that is itself a front member needs no headroom.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::fronts::{hat, Coloring, Front};
use crate::fusion::{fuse_pairs, PairPropertyOracle};
use crate::model::{depth, Approximation, Atom, Block, DepthValue, Reduct};
use crate::report::{Report, RunConfig, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndecidedReason {
    /// No reduct keeps both approximations with enough headroom.
    EmptyPool,
    /// Some reducts of the pool separate, others do not.
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MixDecision {
    Mixes,
    Separates,
    Undecided(UndecidedReason),
}

impl MixDecision {
    pub fn is_decided(&self) -> bool {
        !matches!(self, MixDecision::Undecided(_))
    }

    pub fn symbol(&self) -> char {
        match self {
            MixDecision::Mixes => 'M',
            MixDecision::Separates => 'S',
            MixDecision::Undecided(_) => '?',
        }
    }
}

const NO_COLOR: u32 = u32::MAX;

/// A front coloring indexed against a space, with a decision cache.
pub struct MixContext {
    space: Space,
    front: Front,
    coloring: Coloring,
    mu: usize,
    color: Vec<u32>,
    in_front: FixedBitSet,
    in_hat: FixedBitSet,
    /// `below[u]`: front members extending `u`.
    below: Vec<FixedBitSet>,
    cache: RefCell<HashMap<(Id, Id, Id), MixDecision>>,
}

impl MixContext {
    pub fn new(space: &Space, front: &Front, coloring: &Coloring, mu: usize) -> Result<Self> {
        if coloring.len() != front.len() {
            return Err(Error::Input(format!(
                "coloring has {} entries for a front of {} members",
                coloring.len(),
                front.len()
            )));
        }
        let cat = space.catalog();
        let n = cat.len();
        let mut color = vec![NO_COLOR; n];
        let mut in_front = FixedBitSet::with_capacity(n);
        let mut in_hat = FixedBitSet::with_capacity(n);
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (i, s) in front.members().iter().enumerate() {
            let id = cat.require(s)?;
            color[id] = coloring.class(i) as u32;
            in_front.insert(id);
            for k in 0..=cat.length(id) {
                let p = cat.prefix(id, k);
                in_hat.insert(p);
                below[p].insert(id);
            }
        }
        in_hat.insert(cat.empty_id());
        Ok(MixContext {
            space: space.clone(),
            front: front.clone(),
            coloring: coloring.clone(),
            mu,
            color,
            in_front,
            in_hat,
            below,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn front(&self) -> &Front {
        &self.front
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    pub fn is_member(&self, id: Id) -> bool {
        self.in_front.contains(id)
    }

    pub fn in_hat(&self, id: Id) -> bool {
        self.in_hat.contains(id)
    }

    /// Color class of a front member.
    pub fn color_of(&self, id: Id) -> Option<u32> {
        (self.color[id] != NO_COLOR).then_some(self.color[id])
    }

    /// `F_u↾Z`.
    pub fn members_below(&self, u: Id, z: Id) -> FixedBitSet {
        let mut out = self.below[u].clone();
        out.intersect_with(self.space.catalog().down(z));
        out
    }

    /// One-step extensions of `u` inside `z` that some member of `F↾z` extends.
    pub fn live_children(&self, u: Id, z: Id) -> Vec<Id> {
        self.space
            .catalog()
            .extensions_in(u, z)
            .into_iter()
            .filter(|&p| !self.members_below(p, z).is_clear())
            .collect()
    }

    pub fn has_headroom(&self, u: Id, z: Id) -> bool {
        let cat = self.space.catalog();
        cat.contains(z, u) && (self.is_member(u) || self.live_children(u, z).len() >= self.mu.max(1))
    }

    fn colors_below(&self, u: Id, z: Id) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.coloring.classes());
        for m in self.members_below(u, z).ones() {
            out.insert(self.color[m] as usize);
        }
        out
    }

    /// Some `s' ∈ F_s↾Z`, `t' ∈ F_t↾Z` share a color.
    pub fn collides(&self, s: Id, t: Id, z: Id) -> bool {
        !self.colors_below(s, z).is_disjoint(&self.colors_below(t, z))
    }

    /// Reducts `Z ≤ X` over which the quantifiers for `(s, t)` range.
    pub fn pool(&self, x: Id, s: Id, t: Id) -> Vec<Id> {
        let cat = self.space.catalog();
        let mut cand = cat.down(x).clone();
        cand.intersect_with(cat.up(s));
        cand.intersect_with(cat.up(t));
        cand.ones()
            .filter(|&z| self.has_headroom(s, z) && self.has_headroom(t, z))
            .collect()
    }

    fn check_hat(&self, u: Id) -> Result<()> {
        if self.in_hat(u) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{} is not in the prefix closure of the front",
                self.space.catalog().get(u)
            )))
        }
    }

    pub fn decide_ids(&self, x: Id, s: Id, t: Id) -> Result<MixDecision> {
        self.check_hat(s)?;
        self.check_hat(t)?;
        let cat = self.space.catalog();
        for u in [s, t] {
            if !cat.contains(x, u) {
                return Err(Error::Domain(format!(
                    "{} is not compatible with {}",
                    cat.get(x),
                    cat.get(u)
                )));
            }
        }
        if s == t {
            return Ok(MixDecision::Mixes);
        }
        let key = (x, s.min(t), s.max(t));
        if let Some(d) = self.cache.borrow().get(&key) {
            return Ok(*d);
        }
        let pool = self.pool(x, s, t);
        let d = if pool.is_empty() {
            MixDecision::Undecided(UndecidedReason::EmptyPool)
        } else if !self.collides(s, t, x) {
            // collisions persist upward and x heads the pool
            MixDecision::Separates
        } else if pool.iter().all(|&z| self.collides(s, t, z)) {
            MixDecision::Mixes
        } else {
            MixDecision::Undecided(UndecidedReason::Split)
        };
        self.cache.borrow_mut().insert(key, d);
        Ok(d)
    }

    pub fn decide(&self, x: &Reduct, s: &Approximation, t: &Approximation) -> Result<MixDecision> {
        let cat = self.space.catalog();
        self.decide_ids(cat.require(x)?, cat.require(s)?, cat.require(t)?)
    }

    /// Non-member prefixes of members that are approximations of `z` with
    /// enough headroom, in catalog order.
    pub fn table_rows(&self, z: Id) -> (Vec<Id>, Vec<Id>) {
        let cat = self.space.catalog();
        let mut rows = Vec::new();
        let mut excluded = Vec::new();
        for u in self.in_hat.ones() {
            if self.is_member(u) || !cat.contains(z, u) {
                continue;
            }
            if self.has_headroom(u, z) {
                rows.push(u);
            } else {
                excluded.push(u);
            }
        }
        (rows, excluded)
    }

    fn depth_in(&self, z: Id, u: Id) -> Option<usize> {
        let cat = self.space.catalog();
        match depth(self.space.model(), cat.get(z), cat.get(u)) {
            DepthValue::Finite(k) => Some(k),
            DepthValue::Infinite => None,
        }
    }
}

/// `P(s, t, Y)`: `Y` decides `s, t` whenever both are table rows of `Y`.
pub struct DecidesPair<'a>(pub &'a MixContext);

impl PairPropertyOracle for DecidesPair<'_> {
    fn holds(&self, space: &Space, s: Id, t: Id, y: Id) -> bool {
        let ctx = self.0;
        let row = |u: Id| ctx.in_hat(u) && !ctx.is_member(u) && ctx.has_headroom(u, y);
        if !row(s) || !row(t) {
            return true;
        }
        debug_assert!(std::ptr::eq(space.catalog(), ctx.space.catalog()));
        ctx.decide_ids(y, s, t).is_ok_and(|d| d.is_decided())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingTable {
    pub reduct: Reduct,
    pub rows: Vec<Approximation>,
    pub depths: Vec<Option<usize>>,
    pub entries: Vec<Vec<MixDecision>>,
    /// Prefixes dropped for lack of headroom inside the reduct.
    pub excluded: Vec<Approximation>,
    pub fuse_refinements: usize,
}

impl MixingTable {
    pub fn index_of(&self, s: &Approximation) -> Option<usize> {
        self.rows.iter().position(|r| r == s)
    }

    pub fn get(&self, s: &Approximation, t: &Approximation) -> Option<MixDecision> {
        Some(self.entries[self.index_of(s)?][self.index_of(t)?])
    }

    pub fn undecided(&self) -> usize {
        self.entries.iter().flatten().filter(|d| !d.is_decided()).count()
    }

    /// ASCII matrix, one row per approximation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, r) in self.rows.iter().enumerate() {
            let line: String = self.entries[i].iter().map(MixDecision::symbol).collect();
            out.push_str(&format!("{i:>3} {line}  {r}\n"));
        }
        out
    }
}

/// Table of decisions at `z` itself, without fusion.
pub fn mixing_table_at(ctx: &MixContext, z: &Reduct) -> Result<MixingTable> {
    let cat = ctx.space.catalog();
    let zi = cat.require(z)?;
    build_table(ctx, zi, 0)
}

fn build_table(ctx: &MixContext, zi: Id, refinements: usize) -> Result<MixingTable> {
    let cat = ctx.space.catalog();
    let (rows, excluded) = ctx.table_rows(zi);
    let entries = rows
        .iter()
        .map(|&s| {
            rows.iter()
                .map(|&t| ctx.decide_ids(zi, s, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MixingTable {
        reduct: cat.get(zi).clone(),
        rows: rows.iter().map(|&r| cat.get(r).clone()).collect(),
        depths: rows.iter().map(|&r| ctx.depth_in(zi, r)).collect(),
        entries,
        excluded: excluded.iter().map(|&r| cat.get(r).clone()).collect(),
        fuse_refinements: refinements,
    })
}

/// Fuses `x` to a reduct deciding every pair of rows, then tabulates.
pub fn mixing_table(ctx: &MixContext, x: &Reduct, depth_budget: usize) -> Result<MixingTable> {
    let fused = fuse_pairs(&ctx.space, &DecidesPair(ctx), x, depth_budget)?;
    let zi = ctx.space.catalog().require(&fused.reduct)?;
    build_table(ctx, zi, fused.refinements)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triple {
    /// Mixes with both ends.
    pub pivot: Approximation,
    pub left: Approximation,
    pub right: Approximation,
    pub depths: [Option<usize>; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transitivity {
    pub equal_depth: Vec<Triple>,
    pub unequal_depth: Vec<Triple>,
    /// Undecided entries the check could not use.
    pub undecided_pairs: usize,
}

impl Transitivity {
    pub fn contains(&self, pivot: &Approximation, a: &Approximation, b: &Approximation) -> bool {
        self.equal_depth
            .iter()
            .chain(&self.unequal_depth)
            .any(|t| &t.pivot == pivot && ((&t.left == a && &t.right == b) || (&t.left == b && &t.right == a)))
    }
}

/// Triples with `Mixes(l,p)`, `Mixes(p,r)` and `Separates(l,r)`.
pub fn transitivity_check(table: &MixingTable) -> Transitivity {
    let n = table.rows.len();
    let mut out = Transitivity {
        equal_depth: Vec::new(),
        unequal_depth: Vec::new(),
        undecided_pairs: 0,
    };
    out.undecided_pairs = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !table.entries[i][j].is_decided())
        .count();
    for p in 0..n {
        for l in 0..n {
            if l == p || table.entries[l][p] != MixDecision::Mixes {
                continue;
            }
            for r in l + 1..n {
                if r == p || table.entries[p][r] != MixDecision::Mixes {
                    continue;
                }
                if table.entries[l][r] != MixDecision::Separates {
                    continue;
                }
                let depths = [table.depths[p], table.depths[l], table.depths[r]];
                let t = Triple {
                    pivot: table.rows[p].clone(),
                    left: table.rows[l].clone(),
                    right: table.rows[r].clone(),
                    depths,
                };
                if depths[0].is_some() && depths[0] == depths[1] && depths[1] == depths[2] {
                    out.equal_depth.push(t);
                } else {
                    out.unequal_depth.push(t);
                }
            }
        }
    }
    out
}

/// Separation persists to every reduct that still has a nonempty pool.
pub fn monotonicity_check(ctx: &MixContext, x: &Reduct, config: &RunConfig) -> Result<Report> {
    let cat = ctx.space.catalog();
    let xi = cat.require(x)?;
    let (rows, _) = ctx.table_rows(xi);
    let mut checked = 0usize;
    for (i, &s) in rows.iter().enumerate() {
        for &t in &rows[i + 1..] {
            if ctx.decide_ids(xi, s, t)? != MixDecision::Separates {
                continue;
            }
            for y in ctx.pool(xi, s, t) {
                checked += 1;
                let d = ctx.decide_ids(y, s, t)?;
                if d != MixDecision::Separates {
                    return Ok(
                        Report::new("separation-monotone", Verdict::Fail, config).with_witness(json!({
                            "s": cat.get(s).to_string(), "t": cat.get(t).to_string(),
                            "X": x.to_string(), "Y": cat.get(y).to_string(), "decision": d,
                        })),
                    );
                }
            }
        }
    }
    Ok(Report::new("separation-monotone", Verdict::Pass, config).with_details(json!({ "reducts_checked": checked })))
}

/// If every extension of `s` mixes with some extension of `t`, then `s`
/// mixes with `t`.
pub fn extension_criterion_check(ctx: &MixContext, x: &Reduct, config: &RunConfig) -> Result<Report> {
    let cat = ctx.space.catalog();
    let xi = cat.require(x)?;
    let (rows, _) = ctx.table_rows(xi);
    let mut applied = 0usize;
    let mut undecided = 0usize;
    for &s in &rows {
        for &t in &rows {
            if s == t {
                continue;
            }
            let ws = ctx.live_children(s, xi);
            let vs = ctx.live_children(t, xi);
            let mut premise = true;
            for &w in &ws {
                let mut found = false;
                for &v in &vs {
                    if ctx.decide_ids(xi, w, v)? == MixDecision::Mixes {
                        found = true;
                        break;
                    }
                }
                if !found {
                    premise = false;
                    break;
                }
            }
            if !premise {
                continue;
            }
            applied += 1;
            match ctx.decide_ids(xi, s, t)? {
                MixDecision::Mixes => {}
                MixDecision::Undecided(_) => undecided += 1,
                MixDecision::Separates => {
                    return Ok(
                        Report::new("extension-criterion", Verdict::Fail, config).with_witness(json!({
                            "s": cat.get(s).to_string(), "t": cat.get(t).to_string(), "X": x.to_string(),
                        })),
                    );
                }
            }
        }
    }
    let verdict = if undecided > 0 {
        Verdict::Undecided
    } else {
        Verdict::Pass
    };
    Ok(Report::new("extension-criterion", verdict, config)
        .with_details(json!({ "premises": applied, "undecided": undecided })))
}

/// Pattern forced on the first new block of the extensions of `s` that
/// realize the mixing with `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakMixWitness {
    pub w: Block,
    /// The remainder `v` may be any nonempty set disjoint from `w`.
    pub any_remainder: bool,
    /// The remainder can always be chosen entirely above `w`.
    pub remainder_above: bool,
    /// One `(Y, s̄, t̄)` per reduct of the pool.
    pub evidence: Vec<(Reduct, Approximation, Approximation)>,
}

fn first_new_block(s_len: usize, bar: &Approximation) -> &Block {
    &bar.blocks()[s_len]
}

/// Colliding pair in `z` whose first new block on the `s` side satisfies `ok`.
fn pattern_collision(ctx: &MixContext, s: Id, t: Id, z: Id, ok: &dyn Fn(&Block) -> bool) -> Option<(Id, Id)> {
    let cat = ctx.space.catalog();
    let s_len = cat.length(s);
    let ts = ctx.members_below(t, z);
    for sb in ctx.members_below(s, z).ones() {
        if cat.length(sb) <= s_len || !ok(first_new_block(s_len, cat.get(sb))) {
            continue;
        }
        if let Some(tb) = ts.ones().find(|&tb| ctx.color[tb] == ctx.color[sb]) {
            return Some((sb, tb));
        }
    }
    None
}

pub fn weak_mixing_detect(
    ctx: &MixContext,
    x: &Reduct,
    s: &Approximation,
    t: &Approximation,
) -> Result<Option<WeakMixWitness>> {
    let cat = ctx.space.catalog();
    let (xi, si, ti) = (cat.require(x)?, cat.require(s)?, cat.require(t)?);
    let (ds, dt) = (ctx.depth_in(xi, si), ctx.depth_in(xi, ti));
    if !matches!((ds, dt), (Some(a), Some(b)) if a < b) {
        return Err(Error::Domain(format!("depth of {s} is not below depth of {t}")));
    }
    if ctx.decide_ids(xi, si, ti)? != MixDecision::Mixes {
        return Err(Error::Domain(format!("{x} does not mix {s} with {t}")));
    }
    let pool = ctx.pool(xi, si, ti);
    let s_atoms: BTreeSet<Atom> = s.atoms().into_iter().collect();
    let material: Vec<Atom> = t.atoms().into_iter().filter(|a| !s_atoms.contains(a)).collect();
    let disjoint = |b: &Block| b.atoms().iter().all(|a| material.binary_search(a).is_err());
    if pool
        .iter()
        .all(|&z| pattern_collision(ctx, si, ti, z, &disjoint).is_some())
    {
        return Ok(None);
    }
    let ground = ctx.space.model().ground();
    let mut pieces: Vec<Vec<Atom>> = Vec::new();
    for level in &ground.levels {
        let piece: Vec<Atom> = level
            .atoms
            .iter()
            .copied()
            .filter(|a| material.binary_search(a).is_ok())
            .collect();
        if !piece.is_empty() {
            pieces.push(piece);
        }
    }
    if pieces.len() > 16 {
        return Err(Error::Budget {
            budget: 16,
            what: "material pieces for weak mixing".into(),
        });
    }
    let mut candidates: Vec<Block> = (1u32..1 << pieces.len())
        .map(|mask| {
            let atoms = pieces
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, p)| p.iter().copied())
                .collect();
            Block::from_atoms(ground, atoms)
        })
        .collect::<Result<_>>()?;
    candidates.sort();
    for w in candidates {
        let contains_w = |b: &Block| {
            b.atoms().len() > w.atoms().len() && w.atoms().iter().all(|a| b.atoms().binary_search(a).is_ok())
        };
        let above_w = |b: &Block| contains_w(b) && b.atoms().iter().all(|a| w.atoms().contains(a) || *a > w.greatest());
        let hits: Option<Vec<(Id, Id, Id)>> = pool
            .iter()
            .map(|&z| pattern_collision(ctx, si, ti, z, &contains_w).map(|(a, b)| (z, a, b)))
            .collect();
        let Some(hits) = hits else { continue };
        let remainder_above = pool
            .iter()
            .all(|&z| pattern_collision(ctx, si, ti, z, &above_w).is_some());
        return Ok(Some(WeakMixWitness {
            w,
            any_remainder: true,
            remainder_above,
            evidence: hits
                .into_iter()
                .map(|(z, a, b)| (cat.get(z).clone(), cat.get(a).clone(), cat.get(b).clone()))
                .collect(),
        }));
    }
    Ok(None)
}

/// Weakly mixed pairs compose, with growing forced material.
pub fn weak_mix_monotonicity_check(ctx: &MixContext, x: &Reduct, config: &RunConfig) -> Result<Report> {
    let cat = ctx.space.catalog();
    let xi = cat.require(x)?;
    let (rows, _) = ctx.table_rows(xi);
    let mut found: HashMap<(Id, Id), Block> = HashMap::new();
    for &s in &rows {
        for &t in &rows {
            let ok = matches!((ctx.depth_in(xi, s), ctx.depth_in(xi, t)), (Some(a), Some(b)) if a < b);
            if !ok || ctx.decide_ids(xi, s, t)? != MixDecision::Mixes {
                continue;
            }
            if let Some(w) = weak_mixing_detect(ctx, x, cat.get(s), cat.get(t))? {
                found.insert((s, t), w.w);
            }
        }
    }
    let mut keys: Vec<&(Id, Id)> = found.keys().collect();
    keys.sort();
    let mut chains = 0usize;
    for &&(s, t) in &keys {
        for &&(t2, p) in &keys {
            if t2 != t {
                continue;
            }
            chains += 1;
            let w_st = &found[&(s, t)];
            let good = found
                .get(&(s, p))
                .is_some_and(|w_sp| w_st.atoms().iter().all(|a| w_sp.atoms().contains(a)));
            if !good {
                return Ok(
                    Report::new("weak-mix-monotone", Verdict::Fail, config).with_witness(json!({
                        "s": cat.get(s).to_string(), "t": cat.get(t).to_string(), "p": cat.get(p).to_string(),
                        "w_st": w_st.to_string(), "w_sp": found.get(&(s, p)).map(Block::to_string),
                    })),
                );
            }
        }
    }
    Ok(Report::new("weak-mix-monotone", Verdict::Pass, config)
        .with_details(json!({ "weak_pairs": found.len(), "chains": chains })))
}

/// Prefix closure of the front minus the front itself, as catalog ids.
pub fn inner_nodes(ctx: &MixContext) -> Vec<Id> {
    hat(&ctx.front)
        .iter()
        .filter_map(|s| ctx.space.catalog().id(s))
        .filter(|&id| !ctx.is_member(id))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{generate, ColoringSpec};
    use crate::fronts::uniform_front;
    use crate::spaces::{build_ellentuck, Ellentuck, EllentuckParams, Fin, FinParams};

    fn ctx_for(space: &Space, n: usize, spec: ColoringSpec) -> MixContext {
        let front = uniform_front(space, n).unwrap();
        let c = generate(&front, &spec);
        MixContext::new(space, &front, &c, 1).unwrap()
    }

    #[test]
    fn constant_mixes() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let ctx = ctx_for(&e, 2, ColoringSpec::Constant);
        let t = mixing_table_at(&ctx, &e.top()).unwrap();
        assert!(t.entries.iter().flatten().all(|d| *d == MixDecision::Mixes));
    }

    #[test]
    fn injective_separates() {
        let e = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let ctx = ctx_for(&e, 2, ColoringSpec::Injective);
        let d = ctx
            .decide(&e.top(), &Ellentuck::set(&[1]), &Ellentuck::set(&[2]))
            .unwrap();
        assert_eq!(d, MixDecision::Separates);
        assert!(ctx
            .decide(&e.top(), &Ellentuck::set(&[1]), &Ellentuck::set(&[0, 1, 2]))
            .is_err());
    }

    #[test]
    fn min_and_max() {
        let e = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let top = e.top();
        let min = ctx_for(&e, 2, ColoringSpec::Min);
        assert_eq!(
            min.decide(&top, &Ellentuck::set(&[1]), &Ellentuck::set(&[3])).unwrap(),
            MixDecision::Separates
        );
        let max = ctx_for(&e, 2, ColoringSpec::Max);
        assert_eq!(
            max.decide(&top, &Ellentuck::set(&[1]), &Ellentuck::set(&[3])).unwrap(),
            MixDecision::Mixes
        );
    }

    fn fin4() -> (Fin, Space) {
        let f = Fin::new(FinParams::singletons(4)).unwrap();
        (f.clone(), Space::new(f).unwrap())
    }

    #[test]
    fn fin_union_is_not_transitive() {
        let (f, space) = fin4();
        let ctx = ctx_for(&space, 2, ColoringSpec::Union);
        let top = space.top();
        let s = f.seq(&[&[0]]).unwrap();
        let t = f.seq(&[&[0, 2]]).unwrap();
        let t2 = f.seq(&[&[0, 1, 2]]).unwrap();
        assert_eq!(ctx.decide(&top, &s, &t).unwrap(), MixDecision::Mixes);
        assert_eq!(ctx.decide(&top, &s, &t2).unwrap(), MixDecision::Mixes);
        assert_eq!(ctx.decide(&top, &t, &t2).unwrap(), MixDecision::Separates);
        let table = mixing_table(&ctx, &top, 8).unwrap();
        assert_eq!(table.reduct, top);
        let tr = transitivity_check(&table);
        assert!(tr.contains(&s, &t, &t2));
        assert!(tr.equal_depth.is_empty());
    }

    #[test]
    fn fin_weak_mixing_forces_the_skipped_block() {
        let (f, space) = fin4();
        let ctx = ctx_for(&space, 2, ColoringSpec::Union);
        let s = f.seq(&[&[0]]).unwrap();
        let t = f.seq(&[&[0, 2]]).unwrap();
        let w = weak_mixing_detect(&ctx, &space.top(), &s, &t).unwrap().unwrap();
        assert_eq!(w.w, f.ground_block(2));
        let constant = ctx_for(&space, 2, ColoringSpec::Constant);
        assert_eq!(weak_mixing_detect(&constant, &space.top(), &s, &t).unwrap(), None);
    }
}
