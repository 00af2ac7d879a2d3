use proptest::prelude::*;

use ehp_core::classical::{build_WH, build_h_bo, build_laurent, HboVariant};
use ehp_core::extcalc::{resolve, Boundary, Ring};
use ehp_core::gradmod::{
    free_module, freeness_check, indecomposables, sq1_homology, trivial_module, verify_action, GradedModule, Level,
};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(12)
}

fn generators() -> impl Strategy<Value = Vec<i32>> {
    proptest::collection::vec(0i32..6, 1..4).prop_map(|mut g| {
        g.sort_unstable();
        g
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn explicit_free_modules_are_free(n in 0u32..=2, gens in generators(), hi in 8i32..14) {
        let m = free_module(Some(n), &gens, 0, hi);
        let rep = freeness_check(&m, n, 0, hi).unwrap();
        prop_assert!(rep.pass(), "{:?}", rep.first_failure());
    }

    #[test]
    fn free_modules_have_no_sq1_homology(n in 0u32..=2, gens in generators()) {
        let hi = 14;
        let m = free_module(Some(n), &gens, 0, hi);
        let (lo, top) = m.window().interior();
        for t in lo..=top.min(hi - 1) {
            prop_assert_eq!(sq1_homology(&m, t).unwrap(), 0, "t = {}", t);
        }
    }

    #[test]
    fn json_round_trip(n in 0u32..=1, gens in generators(), margin in 0u32..3) {
        let m = free_module(Some(n), &gens, 0, 9).with_margin(margin);
        let s = m.to_json();
        let back = GradedModule::from_json(&s).unwrap();
        prop_assert_eq!(back.to_json(), s);
        prop_assert_eq!(back, m);
    }

    #[test]
    fn builders_satisfy_adem(d in 0i32..4, gen_lo in -8i32..-2, coeff in 2u32..6, oriented in any::<bool>(), lo in -8i32..0, hi in 1i32..8) {
        for m in [build_WH(d, gen_lo, coeff, oriented), build_laurent(lo, hi)] {
            let v = verify_action(&m);
            prop_assert!(v.is_empty(), "{}: {:?}", m.name, v.first());
        }
    }

    #[test]
    fn oriented_sq1_homology_vanishes_below_the_top(d in 0i32..4, half in -5i32..-1, coeff in 4u32..9) {
        // Sq^1 pairs wt[2i] with wt[2i + 1], so the bottom generator must be even.
        let gen_lo = 2 * half;
        let m = build_WH(d, gen_lo, coeff, true);
        for t in gen_lo..d {
            prop_assert_eq!(sq1_homology(&m, t).unwrap(), 0, "t = {}", t);
        }
    }

    #[test]
    fn resolutions_are_minimal_complexes(
        which in 0usize..3,
        gens in generators(),
        sub in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let (m, boundary) = match which {
            0 => (trivial_module(), Boundary::Exact),
            1 => (free_module(None, &gens, 0, 12), Boundary::Truncated),
            _ => (build_h_bo(12, HboVariant::Thom), Boundary::Truncated),
        };
        let ring = if sub { Ring::Sub(1) } else { Ring::Full };
        let r = resolve(&m, ring, boundary, 3, 10, Some(seed)).unwrap();
        prop_assert!(r.d_squared_violations(&m).unwrap().is_empty());
        prop_assert!(r.minimality_violations().is_empty());
        let plain = resolve(&m, ring, boundary, 3, 10, None).unwrap();
        prop_assert!(r.chart().same_dims(&plain.chart()));
    }
}

#[test]
fn indecomposables_are_stable_under_window_growth() {
    let small = build_h_bo(8, HboVariant::Thom);
    let large = build_h_bo(12, HboVariant::Thom);
    let (lo, hi) = small.window().interior();
    for t in lo..=hi {
        let a = indecomposables(&small, Level::Full, t).unwrap().dim;
        let b = indecomposables(&large, Level::Full, t).unwrap().dim;
        assert_eq!(a, b, "t = {t}");
    }
}
