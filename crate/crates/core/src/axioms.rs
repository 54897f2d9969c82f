//! Exhaustive axiom harness and the one-step pigeonhole search.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::catalog::{Catalog, Id, Space};
use crate::error::{Error, Result};
use crate::model::{Approximation, Reduct};
use crate::report::{Report, RunConfig, Verdict};

/// Default number of elementary checks before a report gives up.
pub const AXIOM_WORK_BUDGET: u64 = 200_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axiom {
    A1,
    A2,
    A3,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl Axiom {
    pub const ALL: [Axiom; 3] = [Axiom::A1, Axiom::A2, Axiom::A3];
}

struct Meter {
    budget: u64,
    used: u64,
}

impl Meter {
    fn tick(&mut self, n: u64) -> bool {
        self.used = self.used.saturating_add(n);
        self.used <= self.budget
    }
}

enum Outcome {
    Pass(serde_json::Value),
    Fail(&'static str, serde_json::Value),
    OutOfBudget(f64),
}

pub fn check_axioms(space: &Space, axiom: Axiom, config: &RunConfig) -> Report {
    check_axioms_with_budget(space, axiom, config, AXIOM_WORK_BUDGET)
}

pub fn check_axioms_with_budget(space: &Space, axiom: Axiom, config: &RunConfig, budget: u64) -> Report {
    let mut meter = Meter { budget, used: 0 };
    let outcome = match axiom {
        Axiom::A1 => check_a1(space, &mut meter),
        Axiom::A2 => check_a2(space, &mut meter),
        Axiom::A3 => check_a3(space, &mut meter),
    };
    let check = format!("axiom-{axiom}");
    let size = json!({ "approximations": space.catalog().len(), "work": meter.used });
    match outcome {
        Outcome::Pass(extra) => {
            Report::new(check, Verdict::Pass, config).with_details(json!({ "size": size, "stats": extra }))
        }
        Outcome::Fail(clause, witness) => Report::new(check, Verdict::Fail, config)
            .with_witness(witness)
            .with_details(json!({ "size": size, "clause": clause })),
        Outcome::OutOfBudget(coverage) => Report::new(check, Verdict::Undecided, config)
            .with_coverage(coverage)
            .with_details(json!({ "size": size, "reason": "enumeration budget exceeded" })),
    }
}

fn show(a: &Approximation) -> String {
    a.to_string()
}

fn check_a1(space: &Space, meter: &mut Meter) -> Outcome {
    let model = space.model();
    let cat = space.catalog();
    let n = cat.len();
    let prefixes = |x: Id| -> Vec<Option<Approximation>> {
        (0..=cat.max_length())
            .map(|k| model.restrict(cat.get(x), k).ok())
            .collect()
    };
    let table: Vec<Vec<Option<Approximation>>> = cat.all().map(prefixes).collect();
    for x in cat.all() {
        if table[x][0].as_ref().is_none_or(|r| !r.is_empty()) {
            return Outcome::Fail("r_0(X) is empty", json!({ "X": show(cat.get(x)) }));
        }
    }
    for x in 0..n {
        if !meter.tick(n as u64) {
            return Outcome::OutOfBudget(x as f64 / n as f64);
        }
        for y in x + 1..n {
            if table[x] == table[y] {
                return Outcome::Fail(
                    "distinct reducts differ at some approximation",
                    json!({ "X": show(cat.get(x)), "Y": show(cat.get(y)) }),
                );
            }
        }
    }
    // r_n(X) = r_m(Y) forces n = m and equal shorter prefixes; grouping by value
    // reduces the pairwise check to a comparison with the first occurrence
    let mut groups: HashMap<&Approximation, (Id, usize)> = HashMap::new();
    for x in 0..n {
        for (k, r) in table[x].iter().enumerate() {
            let Some(r) = r else { continue };
            match groups.get(r) {
                None => {
                    groups.insert(r, (x, k));
                }
                Some(&(y, m)) => {
                    let same_prefixes = (0..k).all(|j| table[x][j] == table[y][j]);
                    if m != k || !same_prefixes {
                        return Outcome::Fail(
                            "equal approximations have equal length and prefixes",
                            json!({ "X": show(cat.get(x)), "n": k, "Y": show(cat.get(y)), "m": m }),
                        );
                    }
                }
            }
        }
    }
    Outcome::Pass(json!({ "reducts": n }))
}

fn leq_table(space: &Space) -> Vec<FixedBitSet> {
    let model = space.model();
    let cat = space.catalog();
    let n = cat.len();
    let mut le = vec![FixedBitSet::with_capacity(n); n];
    for (s, row) in le.iter_mut().enumerate() {
        for t in 0..n {
            if model.leq_fin_core(cat.get(s), cat.get(t)) {
                row.insert(t);
            }
        }
    }
    le
}

fn check_a2(space: &Space, meter: &mut Meter) -> Outcome {
    let model = space.model();
    let cat = space.catalog();
    let n = cat.len();
    let le = leq_table(space);
    for s in 0..n {
        if !le[s].contains(s) {
            return Outcome::Fail("≤_fin is reflexive", json!({ "s": show(cat.get(s)) }));
        }
        if !meter.tick(n as u64) {
            return Outcome::OutOfBudget(s as f64 / (3 * n) as f64);
        }
        for t in le[s].ones() {
            if !le[t].is_subset(&le[s]) {
                let u = le[t].difference(&le[s]).next().expect("nonempty difference");
                return Outcome::Fail(
                    "≤_fin is transitive",
                    json!({ "s": show(cat.get(s)), "t": show(cat.get(t)), "u": show(cat.get(u)) }),
                );
            }
        }
    }
    let max_pred = (0..n).map(|t| (0..n).filter(|&s| le[s].contains(t)).count()).max();
    for x in 0..n {
        if !meter.tick(n as u64 * cat.max_length() as u64) {
            return Outcome::OutOfBudget((n + x) as f64 / (3 * n) as f64);
        }
        for y in 0..n {
            let xa = cat.get(x);
            let ya = cat.get(y);
            let by_approx = (0..=xa.len()).all(|k| {
                let r = xa.prefix(k);
                (0..=ya.len()).any(|m| model.leq_fin_core(&r, &ya.prefix(m)))
            });
            if by_approx != model.is_reduct_of(xa, ya) {
                return Outcome::Fail(
                    "X ≤ Y iff every r_n(X) sits below some r_m(Y)",
                    json!({ "X": show(xa), "Y": show(ya), "reduct": !by_approx }),
                );
            }
        }
    }
    for t in 0..n {
        if !meter.tick(n as u64 * cat.max_length() as u64) {
            return Outcome::OutOfBudget((2 * n + t) as f64 / (3 * n) as f64);
        }
        for t2 in le[t].ones() {
            for k in 0..=cat.length(t) {
                let s = cat.prefix(t, k);
                let found = (0..=cat.length(t2)).any(|j| le[s].contains(cat.prefix(t2, j)));
                if !found {
                    return Outcome::Fail(
                        "a prefix of t lies below some prefix of t'",
                        json!({ "s": show(cat.get(s)), "t": show(cat.get(t)), "t'": show(cat.get(t2)) }),
                    );
                }
            }
        }
    }
    Outcome::Pass(json!({ "max_predecessors": max_pred.unwrap_or(0) }))
}

/// `B[s] = {Y : s ⊑ Y}` for every indexed `s`.
fn prefix_sets(cat: &Catalog) -> Vec<FixedBitSet> {
    let n = cat.len();
    let mut b = vec![FixedBitSet::with_capacity(n); n];
    for y in 0..n {
        for k in 0..=cat.length(y) {
            b[cat.prefix(y, k)].insert(y);
        }
    }
    b
}

fn intersect(a: &FixedBitSet, b: &FixedBitSet) -> FixedBitSet {
    let mut out = a.clone();
    out.intersect_with(b);
    out
}

fn check_a3(space: &Space, meter: &mut Meter) -> Outcome {
    let cat = space.catalog();
    let n = cat.len();
    let b = prefix_sets(cat);
    let mut basic_sizes = 0usize;
    for x in 0..n {
        if !meter.tick(n as u64) {
            return Outcome::OutOfBudget(x as f64 / (2 * n) as f64);
        }
        for (s, bs) in b.iter().enumerate().take(n) {
            let sx = intersect(cat.down(x), bs);
            if sx.is_clear() {
                continue;
            }
            basic_sizes = basic_sizes.max(sx.count_ones(..));
            for y in sx.ones() {
                if intersect(cat.down(y), &b[s]).is_clear() {
                    return Outcome::Fail(
                        "[s,Y] is nonempty for Y in a nonempty [s,X]",
                        json!({ "s": show(cat.get(s)), "X": show(cat.get(x)), "Y": show(cat.get(y)) }),
                    );
                }
            }
        }
    }
    for x in 0..n {
        let live: Vec<(Id, FixedBitSet)> = (0..n)
            .map(|s| (s, intersect(cat.down(x), &b[s])))
            .filter(|(_, sx)| !sx.is_clear())
            .collect();
        for y in cat.up(x).ones() {
            if !meter.tick((live.len() * n) as u64) {
                return Outcome::OutOfBudget((n + x) as f64 / (2 * n) as f64);
            }
            for (s, sx) in &live {
                let ok = intersect(cat.down(y), &b[*s]).ones().any(|z| {
                    let sz = intersect(cat.down(z), &b[*s]);
                    !sz.is_clear() && sz.is_subset(sx)
                });
                if !ok {
                    return Outcome::Fail(
                        "some Z in [s,Y] has a nonempty [s,Z] inside [s,X]",
                        json!({ "s": show(cat.get(*s)), "X": show(cat.get(x)), "Y": show(cat.get(y)) }),
                    );
                }
            }
        }
    }
    Outcome::Pass(json!({ "largest_basic_set": basic_sizes }))
}

/// Candidate reducts `Y ∈ [s,X]` with their one-step extension lists.
pub(crate) fn basic_candidates(cat: &Catalog, s: Id, x: Id) -> Vec<(Id, Vec<Id>)> {
    cat.basic_set(s, x)
        .into_iter()
        .map(|y| (y, cat.extensions_in(s, y)))
        .collect()
}

/// A reduct `Y ∈ [s,X]` on whose one-step extensions `color` is constant,
/// keeping at least `mu` of them. The witness with the most extensions wins;
/// ties go to the least reduct.
pub fn pigeonhole_a4(
    space: &Space,
    s: &Approximation,
    x: &Reduct,
    color: &dyn Fn(&Approximation) -> u64,
    mu: usize,
) -> Result<Reduct> {
    let cat = space.catalog();
    let (si, xi) = (cat.require(s)?, cat.require(x)?);
    if !cat.contains(xi, si) {
        return Err(Error::Domain(format!("{x} is not compatible with {s}")));
    }
    let candidates = basic_candidates(cat, si, xi);
    let colors: HashMap<Id, u64> = cat
        .extensions_in(si, xi)
        .into_iter()
        .map(|p| (p, color(cat.get(p))))
        .collect();
    if colors.is_empty() {
        return Err(Error::TruncationTooShallow { needed: mu.max(1) });
    }
    best_monochromatic(&candidates, &colors, mu)
        .map(|y| cat.get(y).clone())
        .ok_or(Error::TruncationTooShallow { needed: mu })
}

pub(crate) fn best_monochromatic(candidates: &[(Id, Vec<Id>)], colors: &HashMap<Id, u64>, mu: usize) -> Option<Id> {
    let mut best: Option<(usize, Id)> = None;
    for (y, ext) in candidates {
        if ext.len() < mu.max(1) || best.is_some_and(|(k, _)| ext.len() <= k) {
            continue;
        }
        let c0 = colors[&ext[0]];
        if ext.iter().all(|p| colors[p] == c0) {
            best = Some((ext.len(), *y));
        }
    }
    best.map(|(_, y)| y)
}

/// How the colorings fed to [`check_pigeonhole`] are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColoringSweep {
    /// Every 2-coloring; falls back to `random` sampling above `max_extensions`.
    Exhaustive {
        max_extensions: usize,
        fallback: usize,
    },
    Random {
        count: usize,
    },
}

/// Runs the pigeonhole search on `U` for every `s` with `|s| ≤ max_len` and
/// asserts each returned reduct directly.
pub fn check_pigeonhole(space: &Space, max_len: usize, sweep: ColoringSweep, config: &RunConfig) -> Report {
    let cat = space.catalog();
    let top = cat.top();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut runs = 0usize;
    let mut bases = 0usize;
    let mut sampled = 0usize;
    for s in cat.down(top).ones() {
        if cat.length(s) > max_len {
            continue;
        }
        let ext = cat.extensions_in(s, top);
        if ext.is_empty() {
            continue;
        }
        bases += 1;
        let candidates = basic_candidates(cat, s, top);
        let (masks, exhaustive): (Vec<u64>, bool) = match sweep {
            ColoringSweep::Exhaustive { max_extensions, .. } if ext.len() <= max_extensions.min(20) => {
                ((0..1u64 << ext.len()).collect(), true)
            }
            ColoringSweep::Exhaustive { fallback: count, .. } | ColoringSweep::Random { count } => {
                (vec![0; count], false)
            }
        };
        if !exhaustive {
            sampled += 1;
        }
        for mask in masks {
            let colors: HashMap<Id, u64> = ext
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, if exhaustive { mask >> i & 1 } else { rng.gen_range(0..2) }))
                .collect();
            runs += 1;
            let fail = |reason: &str, y: Option<Id>| {
                Report::new("pigeonhole", Verdict::Fail, config).with_witness(json!({
                    "s": cat.get(s).to_string(),
                    "coloring": ext.iter().map(|p| json!([cat.get(*p).to_string(), colors[p]])).collect::<Vec<_>>(),
                    "Y": y.map(|y| cat.get(y).to_string()),
                    "reason": reason,
                }))
            };
            let Some(y) = best_monochromatic(&candidates, &colors, config.mu) else {
                return fail("no monochromatic reduct keeps enough extensions", None);
            };
            let kept = cat.extensions_in(s, y);
            let monochromatic = kept.iter().all(|p| colors[p] == colors[&kept[0]]);
            if !cat.contains(top, y) || !cat.is_prefix(s, y) || kept.len() < config.mu || !monochromatic {
                return fail("returned reduct violates the postcondition", Some(y));
            }
        }
    }
    Report::new("pigeonhole", Verdict::Pass, config)
        .with_details(json!({ "bases": bases, "sampled_bases": sampled, "colorings": runs, "max_len": max_len }))
}
