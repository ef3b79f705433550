//! Randomized properties of the cube partitions.

use covergeo_core::partition::{cube_cells, good_partition, partition_with_eta, Partition};
use covergeo_core::morphology::{eta_delta, opening_stability_radius};
use covergeo_core::{shapes, GridSet};
use proptest::prelude::*;

#[derive(Clone, Debug)]
enum Shape {
    Disk { radius: f64 },
    TwoDisks { radius: f64, separation: f64 },
    Dumbbell { radius: f64, separation: f64, neck: f64 },
    Ball { radius: f64 },
}

fn build(shape: &Shape, h: f64) -> GridSet {
    match *shape {
        Shape::Disk { radius } => shapes::disk(radius, h),
        Shape::TwoDisks { radius, separation } => shapes::two_disks(radius, separation, h),
        Shape::Dumbbell { radius, separation, neck } => shapes::dumbbell(radius, separation, neck, h),
        Shape::Ball { radius } => shapes::ball(radius, h, 3),
    }
    .unwrap()
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        (10.0f64..40.0).prop_map(|radius| Shape::Disk { radius }),
        (10.0f64..30.0, 0.5f64..1.8).prop_map(|(radius, f)| Shape::TwoDisks { radius, separation: f * radius }),
        (10.0f64..20.0, 2.2f64..3.0, 2.0f64..6.0)
            .prop_map(|(radius, f, neck)| Shape::Dumbbell { radius, separation: f * radius, neck }),
        (6.0f64..10.0).prop_map(|radius| Shape::Ball { radius }),
    ]
}

fn labels_conserve_measure(p: &Partition) {
    let lat = p.base.lattice();
    let mut counts = vec![0usize; p.len() + 1];
    for (i, &l) in p.labels.iter().enumerate() {
        assert_eq!(l != 0, p.base.contains(i));
        counts[l as usize] += 1;
    }
    let total: usize = p.regions.iter().map(|r| r.cells).sum();
    assert_eq!(total, p.base.count());
    let sum: f64 = p.regions.iter().map(|r| r.cells as f64).sum::<f64>() * lat.cell_measure();
    assert_eq!(sum, p.base.measure());
    for r in &p.regions {
        assert_eq!(counts[r.id as usize], r.cells);
    }
}

/// Smallest squared distance (cell units) from a cell to the seed cube of
/// any region, by brute force over the cube's cells.
fn nearest_cube_dist2(p: &Partition, m: usize, i: usize) -> u64 {
    let lat = p.base.lattice();
    let n = lat.ndim();
    let c = lat.coords(i);
    p.regions
        .iter()
        .map(|r| {
            let mut best = u64::MAX;
            let zr = if n == 3 { 0..m } else { 0..1 };
            for dz in zr {
                for dy in 0..m {
                    for dx in 0..m {
                        let q = [r.seed_cube[0] * m + dx, r.seed_cube[1] * m + dy, r.seed_cube[2] * m + dz];
                        let d: u64 = (0..3).map(|a| (c[a].abs_diff(q[a]) as u64).pow(2)).sum();
                        best = best.min(d);
                    }
                }
            }
            best
        })
        .min()
        .unwrap()
}

fn check_geometry(p: &Partition, delta: f64, fattening: f64) {
    let lat = p.base.lattice();
    let n = lat.ndim() as f64;
    let h = lat.h();
    let ell = p.ell;
    let m = cube_cells(lat, delta);
    assert_eq!(ell, m as f64 * h);
    for r in &p.regions {
        let floor = ell.powi(lat.ndim() as i32) * (1.0 - n * h / ell);
        assert!(r.measure >= floor - 1e-9, "region {} measure {} < {}", r.id, r.measure, floor);
        let cap = n.sqrt() * ell + 2.0 * fattening + h * n.sqrt();
        assert!(r.diameter <= cap + 1e-9, "region {} diameter {} > {}", r.id, r.diameter, cap);
    }
    let reach = (fattening + h) / h;
    for i in p.base.cells() {
        assert!(nearest_cube_dist2(p, m, i) as f64 <= reach * reach + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn good_partitions_hold_their_invariants(s in shape(), h in prop::sample::select(vec![1.0, 0.5]), f in 0.0f64..1.0) {
        let set = build(&s, h);
        let rho = opening_stability_radius(&set);
        prop_assume!(rho >= 4.0 * h);
        let delta = 4.0 * h + f * (rho.min(16.0 * h) - 4.0 * h);
        let p = good_partition(&set, delta).unwrap();
        labels_conserve_measure(&p);
        check_geometry(&p, delta, delta);
        prop_assert_eq!(&good_partition(&set, delta).unwrap(), &p);
    }

    #[test]
    fn eta_partitions_hold_their_invariants(s in shape(), f in 0.0f64..1.0) {
        let h = 1.0;
        let set = build(&s, h);
        let inradius = covergeo_core::morphology::inradius(&set);
        prop_assume!(inradius > 5.0 * h);
        let delta = 4.0 * h + f * (inradius.min(14.0) - 4.5 * h);
        let p = partition_with_eta(&set, delta).unwrap();
        let eta = eta_delta(&set, delta).unwrap();
        prop_assert_eq!(p.fattening, eta.max(delta));
        labels_conserve_measure(&p);
        check_geometry(&p, delta, p.fattening);
        prop_assert_eq!(&partition_with_eta(&set, delta).unwrap(), &p);
    }
}
