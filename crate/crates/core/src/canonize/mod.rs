//! Canonical forms of front colorings: inner maps, the guided search, the
//! brute-force oracle, and the checks run on their witnesses.

mod inner;
mod lemmas;
mod oracle;
mod ramsey_number;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use inner::{
    eval_inner, inner_family, search_inner_a4star, search_inner_with, InnerComponent, InnerMap, InnerValue,
};
pub use lemmas::{avoidance_check, lemma_suite, level_matching_check, maximality_check};
pub use oracle::{agreement, oracle_canonize, Agreement, OracleResult};
pub use ramsey_number::{canonical_ramsey_number, is_canonical_on, RamseySearch};

use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::fronts::{Coloring, Front};
use crate::fusion::{fuse, PropertyOracle};
use crate::mixing::{inner_nodes, MixContext, MixDecision};
use crate::model::{Approximation, Reduct, Selector};
use crate::report::{Report, RunConfig, Verdict};

/// Structure map between extension families of approximations at unequal
/// depths. Only the identity on level material is provided.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingIota {
    #[default]
    Identity,
}

impl EmbeddingIota {
    pub fn map<'a>(&self, p: &'a Approximation) -> &'a Approximation {
        match self {
            EmbeddingIota::Identity => p,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonCheck {
    pub holds: bool,
    /// First offending pair of members, in front order.
    pub counterexample: Option<(Approximation, Approximation)>,
    pub members: usize,
    pub pairs: usize,
}

/// Front indices of the members of `F↾X`.
pub(crate) fn members_in(space: &Space, front: &Front, x: Id) -> Vec<usize> {
    let cat = space.catalog();
    front
        .members()
        .iter()
        .enumerate()
        .filter(|(_, s)| cat.id(s).is_some_and(|i| cat.contains(x, i)))
        .map(|(k, _)| k)
        .collect()
}

/// Checks `f(s)=f(t) ⟺ φ(s)=φ(t)` on every pair of `F↾X`.
pub fn verify_canonical(
    space: &Space,
    x: &Reduct,
    phi: &InnerMap,
    front: &Front,
    coloring: &Coloring,
) -> Result<CanonCheck> {
    let xi = space.catalog().require(x)?;
    verify_ids(space, xi, phi, front, coloring)
}

fn verify_ids(space: &Space, xi: Id, phi: &InnerMap, front: &Front, coloring: &Coloring) -> Result<CanonCheck> {
    let idx = members_in(space, front, xi);
    let values = idx
        .iter()
        .map(|&k| eval_inner(phi, &front.members()[k]))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = 0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            pairs += 1;
            let same_f = coloring.class(idx[i]) == coloring.class(idx[j]);
            if same_f != (values[i] == values[j]) {
                let m = front.members();
                return Ok(CanonCheck {
                    holds: false,
                    counterexample: Some((m[idx[i]].clone(), m[idx[j]].clone())),
                    members: idx.len(),
                    pairs,
                });
            }
        }
    }
    Ok(CanonCheck {
        holds: true,
        counterexample: None,
        members: idx.len(),
        pairs,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CanonStats {
    pub inner_nodes: usize,
    /// Inner nodes where the family matched the mixing kernel at `U`.
    pub components_found: usize,
    pub no_inner_witness: usize,
    pub too_shallow: usize,
    /// Mixing pairs left undecided while building the per-node kernels.
    pub undecided_pairs: usize,
    pub preferred: Option<InnerMap>,
    pub assignments_total: usize,
    pub assignments_tried: usize,
    pub fuse_refinements: usize,
    pub fuse_exhausted: usize,
    pub shrink_candidates: usize,
    pub witness_members: usize,
    pub iota: EmbeddingIota,
    pub limited_family: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonReport {
    pub check: String,
    pub witness: Option<Reduct>,
    pub phi: Option<InnerMap>,
    pub verdict: Verdict,
    pub oracle_agreement: Option<bool>,
    pub coverage: f64,
    pub stats: CanonStats,
    pub diagnostics: Vec<String>,
    pub config: RunConfig,
}

impl CanonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Mixing classes among the live one-step extensions of `s` in `x`,
/// closed under transitivity; keyed by extension id.
fn mixing_classes(ctx: &MixContext, s: Id, x: Id, undecided: &mut usize) -> Result<BTreeMap<Id, u64>> {
    let live = ctx.live_children(s, x);
    let mut parent: Vec<usize> = (0..live.len()).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..live.len() {
        for j in i + 1..live.len() {
            match ctx.decide_ids(x, live[i], live[j])? {
                MixDecision::Mixes => {
                    let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                    parent[a.max(b)] = a.min(b);
                }
                MixDecision::Separates => {}
                MixDecision::Undecided(_) => *undecided += 1,
            }
        }
    }
    Ok((0..live.len())
        .map(|i| (live[i], root(&mut parent, i) as u64))
        .collect())
}

/// Result of the per-node search at the top reduct.
struct NodeSearch {
    /// Position to selector tallies.
    tallies: BTreeMap<usize, HashMap<Selector, usize>>,
    failures: Vec<(Approximation, Error)>,
    found: usize,
    shallow: usize,
}

fn search_nodes(ctx: &MixContext, x: Id, stats: &mut CanonStats) -> Result<NodeSearch> {
    let space = ctx.space();
    let cat = space.catalog();
    let mut out = NodeSearch {
        tallies: BTreeMap::new(),
        failures: Vec::new(),
        found: 0,
        shallow: 0,
    };
    for s in inner_nodes(ctx) {
        if !cat.contains(x, s) {
            continue;
        }
        stats.inner_nodes += 1;
        let classes = mixing_classes(ctx, s, x, &mut stats.undecided_pairs)?;
        let color = |p: &Approximation| cat.id(p).and_then(|id| classes.get(&id).copied());
        match search_inner_a4star(space, cat.get(s), cat.get(x), &color, ctx.mu()) {
            Ok((_, comp)) => {
                out.found += 1;
                *out.tallies
                    .entry(cat.length(s))
                    .or_default()
                    .entry(comp.selector)
                    .or_default() += 1;
            }
            Err(Error::TruncationTooShallow { .. }) => out.shallow += 1,
            Err(e) => out.failures.push((cat.get(s).clone(), e)),
        }
    }
    Ok(out)
}

/// Empirical property (P) at the top of the front's scope: every inner node
/// with enough live extensions has an inner component matching its mixing
/// kernel.
pub fn property_p_check(ctx: &MixContext, config: &RunConfig) -> Result<Report> {
    let cat = ctx.space().catalog();
    let x = cat.require(&ctx.front().scope)?;
    let mut stats = CanonStats::default();
    let nodes = search_nodes(ctx, x, &mut stats)?;
    let verdict = if nodes.failures.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let failing: Vec<String> = nodes.failures.iter().map(|(s, _)| s.to_string()).collect();
    Ok(Report::new("property-p", verdict, config).with_details(json!({
        "inner_nodes": stats.inner_nodes,
        "matched": nodes.found,
        "too_shallow": nodes.shallow,
        "no_inner_witness": failing,
        "undecided_pairs": stats.undecided_pairs,
    })))
}

/// Per position: selectors ranked by how many nodes chose them, then the
/// rest of the family in family order.
fn preference_lists(
    family: &[Selector],
    len: usize,
    tallies: &BTreeMap<usize, HashMap<Selector, usize>>,
) -> Vec<Vec<Selector>> {
    (0..len)
        .map(|pos| {
            let mut ranked: Vec<(usize, usize, Selector)> = family
                .iter()
                .enumerate()
                .map(|(order, &sel)| {
                    let votes = tallies.get(&pos).and_then(|t| t.get(&sel)).copied().unwrap_or(0);
                    (usize::MAX - votes, order, sel)
                })
                .collect();
            ranked.sort();
            ranked.into_iter().map(|(_, _, sel)| sel).collect()
        })
        .collect()
}

/// The first `limit` assignments in lexicographic preference order.
fn assignments(prefs: &[Vec<Selector>], limit: usize) -> Vec<InnerMap> {
    let mut out = Vec::new();
    let mut digits = vec![0usize; prefs.len()];
    loop {
        out.push(InnerMap::new(digits.iter().zip(prefs).map(|(&d, p)| p[d]).collect()));
        if out.len() >= limit {
            return out;
        }
        // advance the last position fastest
        let mut i = prefs.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < prefs[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// `P(s, Y)`: any two live extensions of an inner node `s` are decided in
/// `Y`, and they mix exactly when the selector at `|s|` agrees on them.
struct SelectorAgreement<'a> {
    ctx: &'a MixContext,
    phi: &'a InnerMap,
}

impl PropertyOracle for SelectorAgreement<'_> {
    fn holds(&self, space: &Space, s: Id, y: Id) -> bool {
        let ctx = self.ctx;
        if !ctx.in_hat(s) || ctx.is_member(s) {
            return true;
        }
        let cat = space.catalog();
        let Some(&sel) = self.phi.components.get(cat.length(s)) else {
            return true;
        };
        let live = ctx.live_children(s, y);
        let out: Vec<_> = live
            .iter()
            .map(|&p| sel.apply(cat.get(p).last().expect("nonempty")))
            .collect();
        for i in 0..live.len() {
            for j in i + 1..live.len() {
                match ctx.decide_ids(y, live[i], live[j]) {
                    Ok(MixDecision::Mixes) if out[i] == out[j] => {}
                    Ok(MixDecision::Separates) if out[i] != out[j] => {}
                    _ => return false,
                }
            }
        }
        true
    }
}

/// Longest `Y ≤ z` with a nonempty `F↾Y` on which `phi` verifies.
fn shrink(ctx: &MixContext, z: Id, phi: &InnerMap, counter: &mut usize) -> Result<Option<Id>> {
    let space = ctx.space();
    let cat = space.catalog();
    let mut cands: Vec<Id> = cat.down(z).ones().collect();
    cands.sort_by_key(|&y| (usize::MAX - cat.length(y), y));
    for y in cands {
        *counter += 1;
        let check = verify_ids(space, y, phi, ctx.front(), ctx.coloring())?;
        if check.holds && check.members > 0 {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

/// Guided canonization: mixing kernels per inner node, inner components by
/// selector search over one-step extensions, fusion to a reduct where the chosen selectors match the
/// mixing relation, verification, and shrinking on failure.
pub fn canonize(space: &Space, front: &Front, coloring: &Coloring, config: &RunConfig) -> Result<CanonReport> {
    let ctx = MixContext::new(space, front, coloring, config.mu)?;
    canonize_ctx(&ctx, config)
}

pub fn canonize_ctx(ctx: &MixContext, config: &RunConfig) -> Result<CanonReport> {
    let space = ctx.space();
    let cat = space.catalog();
    let front = ctx.front();
    let top = cat.require(&front.scope)?;
    let family = inner_family(space);
    let mut stats = CanonStats {
        limited_family: space.model().limited_family(),
        ..CanonStats::default()
    };
    let mut diagnostics = Vec::new();

    let nodes = search_nodes(ctx, top, &mut stats)?;
    stats.components_found = nodes.found;
    stats.no_inner_witness = nodes.failures.len();
    stats.too_shallow = nodes.shallow;
    for (s, e) in &nodes.failures {
        diagnostics.push(format!("inner node {s}: {e}"));
    }

    let prefs = preference_lists(&family, front.max_len(), &nodes.tallies);
    stats.assignments_total = prefs.iter().map(Vec::len).product();
    let plan = assignments(&prefs, config.retries + 1);
    stats.preferred = plan.first().cloned();

    let mut best: Option<(Id, InnerMap)> = None;
    for phi in plan {
        stats.assignments_tried += 1;
        let oracle = SelectorAgreement { ctx, phi: &phi };
        let z = match fuse(space, &oracle, &front.scope, config.depth_budget) {
            Ok(r) => {
                stats.fuse_refinements += r.refinements;
                cat.require(&r.reduct)?
            }
            Err(Error::Exhausted { stage, partial }) => {
                stats.fuse_exhausted += 1;
                diagnostics.push(format!(
                    "{phi}: fusion exhausted at stage {stage}, shrinking from {partial}"
                ));
                cat.require(&partial)?
            }
            Err(e) => return Err(e),
        };
        let Some(y) = shrink(ctx, z, &phi, &mut stats.shrink_candidates)? else {
            diagnostics.push(format!("{phi}: no verifying reduct below {}", cat.get(z)));
            continue;
        };
        if best.as_ref().is_none_or(|(b, _)| cat.length(y) > cat.length(*b)) {
            best = Some((y, phi));
        }
        if cat.length(y) == cat.length(top) {
            break;
        }
    }

    let coverage = stats.assignments_tried as f64 / stats.assignments_total.max(1) as f64;
    let mut report = CanonReport {
        check: "canonize".into(),
        witness: None,
        phi: None,
        verdict: Verdict::Undecided,
        oracle_agreement: None,
        coverage,
        stats,
        diagnostics,
        config: config.clone(),
    };
    if let Some((y, phi)) = best {
        let check = verify_ids(space, y, &phi, front, ctx.coloring())?;
        debug_assert!(check.holds);
        report.stats.witness_members = check.members;
        report.witness = Some(cat.get(y).clone());
        report.phi = Some(phi);
        report.verdict = if check.holds { Verdict::Pass } else { Verdict::Undecided };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colorings::{generate, ColoringSpec};
    use crate::fronts::uniform_front;
    use crate::spaces::{build_ellentuck, EllentuckParams, Fin, FinParams};

    fn run(space: &Space, n: usize, spec: ColoringSpec) -> CanonReport {
        let front = uniform_front(space, n).unwrap();
        let c = generate(&front, &spec);
        canonize(space, &front, &c, &RunConfig::for_space(space)).unwrap()
    }

    #[test]
    fn constant_is_all_drop_on_top() {
        let e = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let r = run(&e, 2, ColoringSpec::Constant);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.witness, Some(e.top()));
        assert_eq!(r.phi, Some(InnerMap::all_drop(2)));
    }

    #[test]
    fn ellentuck_min_keeps_first() {
        let e = build_ellentuck(EllentuckParams { n: 6 }).unwrap();
        let r = run(&e, 2, ColoringSpec::Min);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.phi, Some(InnerMap::new(vec![Selector::Keep, Selector::Drop])));
        assert_eq!(r.witness, Some(e.top()));
    }

    #[test]
    fn fin_max_selector() {
        let space = Space::new(Fin::new(FinParams::singletons(4)).unwrap()).unwrap();
        let r = run(&space, 1, ColoringSpec::Max);
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.phi, Some(InnerMap::new(vec![Selector::Max])));
    }

    #[test]
    fn all_drop_fails_on_nonconstant() {
        let e = build_ellentuck(EllentuckParams { n: 5 }).unwrap();
        let front = uniform_front(&e, 2).unwrap();
        let c = generate(&front, &ColoringSpec::Max);
        let check = verify_canonical(&e, &e.top(), &InnerMap::all_drop(2), &front, &c).unwrap();
        assert!(!check.holds);
        assert!(check.counterexample.is_some());
    }

    #[test]
    fn assignment_order() {
        let prefs = vec![
            vec![Selector::Keep, Selector::Drop],
            vec![Selector::Drop, Selector::Keep],
        ];
        let a = assignments(&prefs, 10);
        assert_eq!(a.len(), 4);
        assert_eq!(a[0], InnerMap::new(vec![Selector::Keep, Selector::Drop]));
        assert_eq!(a[1], InnerMap::new(vec![Selector::Keep, Selector::Keep]));
        assert_eq!(assignments(&prefs, 1).len(), 1);
    }
}
