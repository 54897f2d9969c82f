//! Checks run on a canonization witness, and instance-level assumptions the
//! construction relies on.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::inner::{eval_inner, search_inner_a4star, InnerMap};
use super::{members_in, verify_ids};
use crate::catalog::{Id, Space};
use crate::error::{Error, Result};
use crate::fusion::fuse;
use crate::mixing::{MixContext, MixDecision};
use crate::model::{depth, Approximation, DepthValue, Reduct, Selector};
use crate::report::{Report, RunConfig, Verdict};

#[derive(Default)]
struct Tally {
    checked: usize,
    skipped: usize,
    counterexample: Option<Value>,
}

impl Tally {
    fn fail(&mut self, witness: Value) {
        if self.counterexample.is_none() {
            self.counterexample = Some(witness);
        }
    }

    fn json(&self) -> Value {
        json!({
            "pass": self.counterexample.is_none(),
            "checked": self.checked,
            "skipped": self.skipped,
            "counterexample": self.counterexample,
        })
    }
}

fn depth_in(space: &Space, x: &Reduct, s: &Approximation) -> Option<usize> {
    match depth(space.model(), x, s) {
        DepthValue::Finite(k) => Some(k),
        DepthValue::Infinite => None,
    }
}

/// Consistency checks on `(X, φ)`, reported under these keys:
///
/// * `equal_values_mix`: `φ(s)=φ(t)` implies `X` mixes `s` and `t`, over table rows and
///   members of `X`; undecided pairs are skipped and counted.
/// * `prefix_free`: no `φ(s)` is a strict prefix of `φ(t)` for distinct members.
/// * `kernel_match`: `f(s)=f(t)` implies `φ(s)=φ(t)` on `F↾X`.
/// * `selector_classes`: for inner nodes `s ≠ t` where `φ` keeps something at `|s|` and drops
///   at `|t|`, the extensions `p` of `s` with `depth_X(p)=depth_X(t)` that
///   `X` mixes with `t` fall in at most one class of the selector at `|s|`.
pub fn lemma_suite(ctx: &MixContext, x: &Reduct, phi: &InnerMap, config: &RunConfig) -> Result<Report> {
    let space = ctx.space();
    let cat = space.catalog();
    let front = ctx.front();
    let xi = cat.require(x)?;
    let members: Vec<Id> = members_in(space, front, xi)
        .into_iter()
        .map(|k| cat.require(&front.members()[k]))
        .collect::<Result<_>>()?;
    let (rows, _) = ctx.table_rows(xi);
    let value = |id: Id| eval_inner(phi, cat.get(id));
    let name = |id: Id| cat.get(id).to_string();

    let mut mix_tally = Tally::default();
    let nodes: Vec<Id> = rows.iter().chain(&members).copied().collect();
    for (i, &s) in nodes.iter().enumerate() {
        for &t in &nodes[i + 1..] {
            if value(s)? != value(t)? {
                continue;
            }
            match ctx.decide_ids(xi, s, t)? {
                MixDecision::Mixes => mix_tally.checked += 1,
                MixDecision::Separates => {
                    mix_tally.checked += 1;
                    mix_tally.fail(json!({ "s": name(s), "t": name(t) }));
                }
                MixDecision::Undecided(_) => mix_tally.skipped += 1,
            }
        }
    }

    let mut prefix_tally = Tally::default();
    let mut kernel_tally = Tally::default();
    for &s in &members {
        for &t in &members {
            if s == t {
                continue;
            }
            let (vs, vt) = (value(s)?, value(t)?);
            prefix_tally.checked += 1;
            if vs.len() < vt.len() && vt[..vs.len()] == vs[..] {
                prefix_tally.fail(json!({ "s": name(s), "t": name(t) }));
            }
            if s < t && ctx.color_of(s) == ctx.color_of(t) {
                kernel_tally.checked += 1;
                if vs != vt {
                    kernel_tally.fail(json!({ "s": name(s), "t": name(t) }));
                }
            }
        }
    }

    let mut classes_tally = Tally::default();
    for &s in &rows {
        let Some(&sel) = phi.components.get(cat.length(s)) else {
            continue;
        };
        if sel == Selector::Drop {
            continue;
        }
        for &t in &rows {
            if t == s || phi.components.get(cat.length(t)) != Some(&Selector::Drop) {
                continue;
            }
            let dt = depth_in(space, x, cat.get(t));
            let mut classes = BTreeSet::new();
            for p in ctx.live_children(s, xi) {
                if !ctx.in_hat(p) || depth_in(space, x, cat.get(p)) != dt {
                    continue;
                }
                if ctx.decide_ids(xi, t, p)? == MixDecision::Mixes {
                    classes.insert(sel.apply(cat.get(p).last().expect("nonempty")));
                }
            }
            classes_tally.checked += 1;
            if classes.len() > 1 {
                classes_tally.fail(json!({ "s": name(s), "t": name(t), "classes": classes.len() }));
            }
        }
    }

    let failed = [&classes_tally, &mix_tally, &prefix_tally, &kernel_tally]
        .iter()
        .any(|t| t.counterexample.is_some());
    let verdict = if failed { Verdict::Fail } else { Verdict::Pass };
    Ok(Report::new("lemma-suite", verdict, config)
        .with_witness(json!({ "reduct": x.to_string(), "phi": phi.to_string() }))
        .with_details(json!({
            "selector_classes": classes_tally.json(),
            "equal_values_mix": mix_tally.json(),
            "prefix_free": prefix_tally.json(),
            "kernel_match": kernel_tally.json(),
        })))
}

fn contained(small: &[u32], big: &[u32]) -> bool {
    small.iter().all(|a| big.contains(a))
}

/// Componentwise `φ_alt(s) ⊆ φ(s)` for every member of `F↾Z`, with `Z`
/// obtained by fusing the two-coloring "contained or not" from `y`.
/// Both maps must verify on `F↾y`.
pub fn maximality_check(
    ctx: &MixContext,
    y: &Reduct,
    phi: &InnerMap,
    phi_alt: &InnerMap,
    config: &RunConfig,
) -> Result<Report> {
    let space = ctx.space();
    let cat = space.catalog();
    let front = ctx.front();
    let yi = cat.require(y)?;
    for (label, map) in [("phi", phi), ("phi_alt", phi_alt)] {
        let check = verify_ids(space, yi, map, front, ctx.coloring())?;
        if !check.holds {
            return Err(Error::Domain(format!(
                "{label} = {map} does not represent the coloring on {y}"
            )));
        }
    }
    let good = |m: Id| -> bool {
        let t = cat.get(m);
        t.blocks()
            .iter()
            .enumerate()
            .all(|(i, b)| match (phi_alt.components.get(i), phi.components.get(i)) {
                (Some(a), Some(p)) => contained(&a.apply(b), &p.apply(b)),
                _ => false,
            })
    };
    // P(s, Z): every member of F↾Z extending s satisfies containment
    let p = |_: &Space, s: Id, z: Id| ctx.members_below(s, z).ones().all(good);
    let (z, refinements) = match fuse(space, &p, y, config.depth_budget) {
        Ok(r) => (Some(r.reduct), r.refinements),
        Err(Error::Exhausted { .. }) => (None, 0),
        Err(e) => return Err(e),
    };
    let members = match &z {
        Some(z) => members_in(space, front, cat.require(z)?).len(),
        None => 0,
    };
    let verdict = if members > 0 { Verdict::Pass } else { Verdict::Undecided };
    Ok(Report::new("maximality", verdict, config)
        .with_witness(
            json!({ "Z": z.as_ref().map(|z| z.to_string()), "phi": phi.to_string(), "phi_alt": phi_alt.to_string() }),
        )
        .with_details(json!({ "members": members, "refinements": refinements })))
}

/// Ground levels used by the last block of `p`.
fn new_levels(space: &Space, p: &Approximation) -> BTreeSet<usize> {
    let g = space.model().ground();
    p.last()
        .map(|b| b.atoms().iter().filter_map(|&a| g.level_of(a)).collect())
        .unwrap_or_default()
}

fn top_level(space: &Space, s: &Approximation) -> usize {
    let g = space.model().ground();
    s.atoms().iter().filter_map(|&a| g.level_of(a)).max().unwrap_or(0)
}

/// For `s, t ∈ AU_n`: each one-step extension of `s` built from levels lying
/// above both `s` and `t` has a counterpart extension of `t` built from
/// exactly the same levels.
pub fn level_matching_check(space: &Space, n: usize, config: &RunConfig) -> Report {
    let cat = space.catalog();
    let top = cat.top();
    let layer: Vec<Id> = cat.down(top).ones().filter(|&s| cat.length(s) == n).collect();
    let level_sets: Vec<Vec<BTreeSet<usize>>> = layer
        .iter()
        .map(|&s| {
            cat.extensions_in(s, top)
                .iter()
                .map(|&p| new_levels(space, cat.get(p)))
                .collect()
        })
        .collect();
    let mut checked = 0usize;
    for (i, &s) in layer.iter().enumerate() {
        for (j, &t) in layer.iter().enumerate() {
            if i == j {
                continue;
            }
            let floor = top_level(space, cat.get(s)).max(top_level(space, cat.get(t)));
            for levels in &level_sets[i] {
                if levels.first().is_none_or(|&l| l <= floor) {
                    continue;
                }
                checked += 1;
                if !level_sets[j].contains(levels) {
                    return Report::new("level-matching", Verdict::Fail, config).with_witness(json!({
                        "s": cat.get(s).to_string(),
                        "t": cat.get(t).to_string(),
                        "levels": levels,
                    }));
                }
            }
        }
    }
    Report::new("level-matching", Verdict::Pass, config).with_details(json!({ "length": n, "checked": checked }))
}

/// Each extension of an `s` with at least two extensions in `U` is avoided
/// by some `Y ∈ [s,U]` that still extends `s`; when `s` has a single
/// extension the inner search assigns it the drop selector.
pub fn avoidance_check(space: &Space, config: &RunConfig) -> Result<Report> {
    let cat = space.catalog();
    let top = cat.top();
    let (mut avoided, mut singles) = (0usize, 0usize);
    for s in cat.down(top).ones() {
        let ext = cat.extensions_in(s, top);
        match ext.len() {
            0 => {}
            1 => {
                singles += 1;
                let sp = cat.get(s);
                let (_, comp) = search_inner_a4star(space, sp, cat.get(top), &|p| cat.id(p).map(|i| i as u64), 1)?;
                if comp.selector != Selector::Drop {
                    return Ok(Report::new("avoidance", Verdict::Fail, config)
                        .with_witness(json!({ "s": sp.to_string(), "selector": comp.selector })));
                }
            }
            _ => {
                for &v in &ext {
                    let ok = cat.basic_set(s, top).into_iter().any(|y| {
                        let inner = cat.extensions_in(s, y);
                        !inner.is_empty() && !inner.contains(&v)
                    });
                    if !ok {
                        return Ok(Report::new("avoidance", Verdict::Fail, config).with_witness(json!({
                            "s": cat.get(s).to_string(),
                            "v": cat.get(v).to_string(),
                        })));
                    }
                    avoided += 1;
                }
            }
        }
    }
    Ok(Report::new("avoidance", Verdict::Pass, config)
        .with_details(json!({ "avoided_extensions": avoided, "single_extension_nodes": singles })))
}
