//! Canonical Ramsey numbers by exhaustive enumeration of kernels.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamseySearch {
    pub arity: usize,
    pub target: usize,
    pub value: usize,
    pub kernels_checked: usize,
    /// A kernel on `[value-1]^arity` with no canonical `target`-set, in
    /// restricted-growth form over the lexicographic list of `arity`-sets.
    pub bad_kernel_below: Option<Vec<usize>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// For every candidate set `M` and index set `I`: the `n`-sets inside `M`
/// (as indices into the list of `n`-sets) with their projection class.
struct Patterns {
    cases: Vec<Vec<(usize, usize)>>,
}

impl Patterns {
    fn new(points: usize, arity: usize, target: usize) -> Self {
        let sets = combinations(points, arity);
        let index: HashMap<&[usize], usize> = sets.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut cases = Vec::new();
        for m in combinations(points, target) {
            let inside: Vec<Vec<usize>> = combinations(target, arity)
                .into_iter()
                .map(|pos| pos.iter().map(|&p| m[p]).collect())
                .collect();
            for mask in 0u32..(1 << arity) {
                let mut keys: HashMap<Vec<usize>, usize> = HashMap::new();
                let case = inside
                    .iter()
                    .map(|a| {
                        let proj: Vec<usize> = (0..arity).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
                        let next = keys.len();
                        (index[a.as_slice()], *keys.entry(proj).or_insert(next))
                    })
                    .collect();
                cases.push(case);
            }
        }
        Patterns { cases }
    }

    fn admits(&self, kernel: &[usize], scratch: &mut (Vec<usize>, Vec<usize>)) -> bool {
        const UNSET: usize = usize::MAX;
        'case: for case in &self.cases {
            let (fwd, back) = scratch;
            fwd.clear();
            fwd.resize(kernel.len(), UNSET);
            back.clear();
            back.resize(case.len(), UNSET);
            for &(set, key) in case {
                let class = kernel[set];
                if fwd[class] == UNSET && back[key] == UNSET {
                    fwd[class] = key;
                    back[key] = class;
                } else if fwd[class] != key || back[key] != class {
                    continue 'case;
                }
            }
            return true;
        }
        false
    }
}

/// `f(A)=f(B) ⟺ A|I=B|I` on `[M]^n`, for a kernel given over the
/// lexicographic list of `n`-subsets of `[points]`.
pub fn is_canonical_on(kernel: &[usize], points: usize, arity: usize, m: &[usize], index_set: &[usize]) -> bool {
    let sets = combinations(points, arity);
    let inside: Vec<usize> = (0..sets.len())
        .filter(|&i| sets[i].iter().all(|a| m.contains(a)))
        .collect();
    inside.iter().all(|&a| {
        inside.iter().all(|&b| {
            let pa: Vec<usize> = index_set.iter().map(|&i| sets[a][i]).collect();
            let pb: Vec<usize> = index_set.iter().map(|&i| sets[b][i]).collect();
            (kernel[a] == kernel[b]) == (pa == pb)
        })
    })
}

/// Least `N` such that every kernel on `[N]^arity` has a `target`-set on
/// which it is a coordinate projection. Kernels are enumerated once per
/// relabeling class as restricted growth strings; `budget` caps the total.
pub fn canonical_ramsey_number(arity: usize, target: usize, budget: usize) -> Result<RamseySearch> {
    if arity == 0 {
        return Err(Error::Parameter("arity must be positive".into()));
    }
    let mut checked = 0usize;
    let mut bad_below = None;
    for points in 1usize.. {
        if points < target {
            continue;
        }
        let slots = combinations(points, arity).len();
        let patterns = Patterns::new(points, arity, target);
        let mut scratch = (Vec::new(), Vec::new());
        let mut rgs = vec![0usize; slots];
        let mut bad = None;
        loop {
            checked += 1;
            if checked > budget {
                return Err(Error::Budget {
                    budget,
                    what: format!("kernels; largest N fully checked is {}", points - 1),
                });
            }
            if !patterns.admits(&rgs, &mut scratch) {
                bad = Some(rgs.clone());
                break;
            }
            if !next_rgs(&mut rgs) {
                break;
            }
        }
        match bad {
            None => {
                return Ok(RamseySearch {
                    arity,
                    target,
                    value: points,
                    kernels_checked: checked,
                    bad_kernel_below: bad_below,
                })
            }
            Some(k) => bad_below = Some(k),
        }
    }
    unreachable!("the point count is unbounded")
}

/// Next restricted growth string in lexicographic order.
fn next_rgs(a: &mut [usize]) -> bool {
    let n = a.len();
    let mut prefix_max = vec![0usize; n];
    for i in 1..n {
        prefix_max[i] = prefix_max[i - 1].max(a[i - 1]);
    }
    for i in (1..n).rev() {
        if a[i] <= prefix_max[i] {
            a[i] += 1;
            for v in &mut a[i + 1..] {
                *v = 0;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgs_counts_are_bell_numbers() {
        for (n, bell) in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)] {
            let mut a = vec![0; n];
            let mut count = 1;
            while next_rgs(&mut a) {
                count += 1;
            }
            assert_eq!(count, bell);
        }
    }

    #[test]
    fn small_values() {
        assert_eq!(canonical_ramsey_number(1, 1, 1000).unwrap().value, 1);
        assert_eq!(canonical_ramsey_number(1, 2, 1000).unwrap().value, 2);
        let r = canonical_ramsey_number(1, 3, 1000).unwrap();
        assert_eq!(r.value, 5);
        // the bad kernel on [4] is a 2+2 split
        let bad = r.bad_kernel_below.unwrap();
        assert_eq!(bad.len(), 4);
        let ones = bad.iter().filter(|&&c| c == 1).count();
        assert_eq!((bad.iter().max(), ones), (Some(&1), 2));
    }

    #[test]
    fn pairs_on_two_points() {
        assert_eq!(canonical_ramsey_number(2, 2, 1000).unwrap().value, 2);
    }

    #[test]
    fn budget_reports_progress() {
        match canonical_ramsey_number(1, 4, 100) {
            Err(Error::Budget { what, .. }) => assert!(what.contains("largest N")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn direct_predicate() {
        // min on pairs of [4] is the projection to coordinate 0
        let sets = combinations(4, 2);
        let kernel: Vec<usize> = sets.iter().map(|s| s[0]).collect();
        assert!(is_canonical_on(&kernel, 4, 2, &[0, 1, 2, 3], &[0]));
        assert!(!is_canonical_on(&kernel, 4, 2, &[0, 1, 2, 3], &[1]));
    }
}
