//! Invariants over random kernels and random reducts.

use proptest::prelude::*;

use ramsey_canon::canonize::{canonize, verify_canonical, InnerMap};
use ramsey_canon::fronts::{is_front, uniform_front, Coloring};
use ramsey_canon::fusion::fuse;
use ramsey_canon::mixing::MixContext;
use ramsey_canon::report::RunConfig;
use ramsey_canon::spaces::{build_ellentuck, EllentuckParams};
use ramsey_canon::{Approximation, Error, Id, Selector, Space};

fn ellentuck(n: usize) -> Space {
    build_ellentuck(EllentuckParams { n }).unwrap()
}

fn labels(len: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..3, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn canonize_ignores_label_names(raw in labels(10), shift in 1u8..50) {
        let space = ellentuck(5);
        let front = uniform_front(&space, 2).unwrap();
        let a = Coloring::from_labels(raw.iter().copied());
        let b = Coloring::from_labels(raw.iter().map(|l| l.wrapping_mul(7).wrapping_add(shift)));
        let cfg = RunConfig::for_space(&space);
        let ra = canonize(&space, &front, &a, &cfg).unwrap();
        let rb = canonize(&space, &front, &b, &cfg).unwrap();
        prop_assert_eq!(ra.to_json(), rb.to_json());
    }

    #[test]
    fn canonicity_is_hereditary(raw in labels(10), keep_first in any::<bool>(), keep_second in any::<bool>()) {
        let space = ellentuck(5);
        let front = uniform_front(&space, 2).unwrap();
        let coloring = Coloring::from_labels(raw);
        let pick = |k: bool| if k { Selector::Keep } else { Selector::Drop };
        let phi = InnerMap::new(vec![pick(keep_first), pick(keep_second)]);
        let cat = space.catalog();
        for x in cat.down(cat.top()).ones() {
            if cat.length(x) < 2 || !verify_canonical(&space, cat.get(x), &phi, &front, &coloring).unwrap().holds {
                continue;
            }
            for y in cat.down(x).ones() {
                if cat.length(y) >= 2 {
                    let below = verify_canonical(&space, cat.get(y), &phi, &front, &coloring).unwrap();
                    prop_assert!(below.holds, "{} holds but {} does not", cat.get(x), cat.get(y));
                }
            }
        }
    }

    #[test]
    fn canonize_witness_verifies(raw in labels(10)) {
        let space = ellentuck(5);
        let front = uniform_front(&space, 2).unwrap();
        let coloring = Coloring::from_labels(raw);
        let report = canonize(&space, &front, &coloring, &RunConfig::for_space(&space)).unwrap();
        if let (Some(x), Some(phi)) = (&report.witness, &report.phi) {
            prop_assert!(verify_canonical(&space, x, phi, &front, &coloring).unwrap().holds);
        }
    }

    #[test]
    fn mixing_is_symmetric(raw in labels(10), i in 0usize..16, j in 0usize..16) {
        let space = ellentuck(5);
        let front = uniform_front(&space, 2).unwrap();
        let coloring = Coloring::from_labels(raw);
        let ctx = MixContext::new(&space, &front, &coloring, 1).unwrap();
        let cat = space.catalog();
        let short: Vec<Id> = cat.all().filter(|&s| cat.length(s) <= 1 && ctx.in_hat(s)).collect();
        let (s, t) = (short[i % short.len()], short[j % short.len()]);
        let top = space.top();
        prop_assert_eq!(
            ctx.decide(&top, cat.get(s), cat.get(t)).unwrap(),
            ctx.decide(&top, cat.get(t), cat.get(s)).unwrap()
        );
    }

    #[test]
    fn fusion_result_satisfies_property(mask in 0u32..64, budget in 1usize..4) {
        // P(s, Y): the one-step extensions of s inside Y share one color
        let space = ellentuck(6);
        let color = move |p: &Approximation| mask >> p.max_atom().unwrap() & 1;
        let p = move |space: &Space, s: Id, y: Id| {
            let cat = space.catalog();
            let ext = cat.extensions_in(s, y);
            ext.iter().all(|&e| color(cat.get(e)) == color(cat.get(ext[0])))
        };
        match fuse(&space, &p, &space.top(), budget) {
            Ok(r) => {
                let cat = space.catalog();
                let y = cat.require(&r.reduct).unwrap();
                for s in cat.down(y).ones() {
                    if cat.length(s) < r.stages {
                        prop_assert!(p(&space, s, y), "fails at {}", cat.get(s));
                    }
                }
            }
            Err(Error::Exhausted { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn uniform_fronts_are_fronts(n in 2usize..7, k in 0usize..4) {
        let space = ellentuck(n);
        prop_assume!(k <= n);
        let front = uniform_front(&space, k).unwrap();
        let check = is_front(&space, front.members(), &space.top(), &Approximation::empty()).unwrap();
        prop_assert!(check.is_front);
    }

    #[test]
    fn kernel_groups_round_trip(raw in prop::collection::vec(0u8..5, 1..20)) {
        let c = Coloring::from_labels(raw.iter().copied());
        let back = Coloring::from_groups(&c.groups(), c.len()).unwrap();
        prop_assert_eq!(back, c);
    }
}
