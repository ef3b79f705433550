//! Randomized properties of the coverage bounds.

use covergeo_core::bounds::{
    bound_flatnorm, bound_reach, bound_regions, bound_u_minus_a, invert_for_n, volume_floor, CoverageBound,
};
use covergeo_core::partition::good_partition;
use covergeo_core::shapes;
use proptest::prelude::*;

fn any_bound() -> impl Strategy<Value = CoverageBound> {
    prop_oneof![
        (1usize..5000, 2usize..=3, 0.01f64..1.0, 1.0f64..100.0)
            .prop_map(|(m, n, d, e)| bound_reach(m, n, d, e).unwrap()),
        (1usize..5000, 0.01f64..1.0, 0.0f64..0.999, 1.0f64..100.0).prop_map(|(m, d, f, e)| {
            let a = f * volume_floor(2, d);
            bound_u_minus_a(m, 2, d, a, e).unwrap()
        }),
        (1usize..5000, 0.01f64..1.0, 0.0f64..0.999, 1.0f64..100.0).prop_map(|(m, d, f, a)| {
            bound_flatnorm(m, d, f * 0.5 * d * d, a).unwrap()
        }),
        prop::collection::vec(0.001f64..1.0, 1..200).prop_map(|w| {
            let total: f64 = w.iter().sum();
            let e = total * 1.5;
            bound_regions(&w, e).unwrap()
        }),
    ]
}

/// Smallest `N` with `evaluate(N) ≥ p`, by doubling then bisection.
fn bisect_for_n(b: &CoverageBound, p: f64) -> u64 {
    let mut hi = 1u64;
    while b.evaluate(hi) < p {
        hi *= 2;
    }
    let mut lo = 0u64;
    if b.evaluate(0) >= p {
        return 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if b.evaluate(mid) >= p {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn bounds_are_clamped_and_monotone(b in any_bound(), n in 0u64..1_000_000, step in 1u64..100_000) {
        let lo = b.evaluate(n);
        let hi = b.evaluate(n + step);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(hi >= lo);
        let d = b.evaluate_detail(n);
        prop_assert!(d.raw <= 1.0);
        prop_assert_eq!(d.value, if d.underflow { 1.0 } else { d.raw.clamp(0.0, 1.0) });
    }

    #[test]
    fn inversion_round_trips(b in any_bound(), p in 0.001f64..0.999_999) {
        let n = invert_for_n(&b, p).unwrap();
        prop_assert!(b.evaluate(n) >= p);
        if n > 0 {
            prop_assert!(b.evaluate(n - 1) < p);
        }
        prop_assert_eq!(n, bisect_for_n(&b, p));
    }

    #[test]
    fn regions_dominate_the_uniform_floor(w in prop::collection::vec(0.01f64..1.0, 1..100), n in 0u64..100_000) {
        let total: f64 = w.iter().sum();
        let e = total * 1.2;
        let floor = w.iter().copied().fold(f64::INFINITY, f64::min);
        let b = bound_regions(&w, e).unwrap();
        let uniform = 1.0 - w.len() as f64 * (-floor * n as f64 / e).exp();
        prop_assert!(b.evaluate(n) >= uniform.max(0.0));
    }
}

#[test]
fn inversion_rejects_degenerate_targets() {
    let b = bound_reach(3, 2, 0.2, 1.0).unwrap();
    for p in [0.0, 1.0, -0.5, 2.0, f64::NAN] {
        assert!(invert_for_n(&b, p).is_err());
    }
}

#[test]
fn partition_regions_beat_the_reach_bound() {
    // δ/√2 a whole number of cells, so seed cubes are not snapped and every
    // region holds at least δ²/2.
    let d = shapes::disk(32.0, 1.0).unwrap();
    for cells in [4.0, 6.0, 8.0] {
        let delta = cells * std::f64::consts::SQRT_2;
        let p = good_partition(&d, delta).unwrap();
        assert_eq!(p.ell, cells);
        let regions = bound_regions(&p.region_measures(), d.measure()).unwrap();
        let reach = bound_reach(p.len(), 2, delta, d.measure()).unwrap();
        for n in [10u64, 100, 1000, 10_000, 100_000] {
            assert!(regions.evaluate(n) >= reach.evaluate(n), "delta {delta}, N {n}");
        }
        assert!(regions.evaluate(1000) > reach.evaluate(1000));
    }
}

#[test]
fn snapped_cubes_fall_below_the_reach_floor() {
    // With δ = 6h the cube side snaps from 4.24h to 4h, interior regions
    // hold 16h² < δ²/2 = 18h², and the reach bound overstates coverage for
    // large N. The snapped floor ℓ'² is what the regions bound honours.
    let d = shapes::disk(32.0, 1.0).unwrap();
    let p = good_partition(&d, 6.0).unwrap();
    let regions = bound_regions(&p.region_measures(), d.measure()).unwrap();
    let reach = bound_reach(p.len(), 2, 6.0, d.measure()).unwrap();
    assert!(regions.evaluate(1000) < reach.evaluate(1000));
    let snapped = 1.0 - p.len() as f64 * (-p.ell * p.ell * 1000.0 / d.measure()).exp();
    assert!(regions.evaluate(1000) >= snapped);
}
