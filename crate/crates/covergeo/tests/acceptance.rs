//! Acceptance run: one PASS/FAIL line per criterion, then a summary.
//!
//! Runs as a plain binary (`harness = false`). The process fails when any
//! criterion fails, except those listed in `KNOWN_FAILURES`; those still
//! print FAIL, and the run errors out if one of them starts passing so
//! the list cannot go stale.

use std::time::{Duration, Instant};

use covergeo::run::estimate_parallel;
use covergeo_core::bounds::{
    bound_flatnorm, bound_reach, bound_u_minus_a, invert_for_n, reach_constant, volume_floor, CoverageBound,
};
use covergeo_core::edt::distance_transform;
use covergeo_core::flatnorm::{
    almost_cover_pipeline, brute_force_minimum, discrete_energy, fill_in_experiment, lambda_threshold,
    minimize_mask,
};
use covergeo_core::montecarlo::{covered_fraction, covers, CoverageMode, SampleSet};
use covergeo_core::morphology::{erode, open};
use covergeo_core::partition::{certify_good, good_partition};
use covergeo_core::rng::{below, unit_f64, CounterRng, GENERATOR_ID};
use covergeo_core::shapes::{self, Hole};
use covergeo_core::{Error, GridSet, Lattice};

/// Criteria expected to fail, with the reason printed next to the line.
/// The analysis is kept in the decisions ledger.
const KNOWN_FAILURES: &[(&str, &str)] = &[(
    "7b",
    "any hole of area R²/4 is filled at λ = 4/R: keeping it costs at least its perimeter (≥ 70.9) \
     while filling costs λ·|A| = 40",
)];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

struct Suite {
    outcomes: Vec<Outcome>,
}

impl Suite {
    fn run(&mut self, id: &'static str, title: &'static str, f: impl FnOnce() -> (bool, String)) {
        let start = Instant::now();
        let (pass, detail) = f();
        let elapsed = start.elapsed();
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = match KNOWN_FAILURES.iter().find(|(k, _)| *k == id) {
            Some((_, why)) if !pass => format!(" [known failure: {why}]"),
            Some(_) => " [listed as a known failure but passed]".to_string(),
            None => String::new(),
        };
        println!("{tag} criterion {id:<3} {title} ({:.2} s): {detail}{note}", elapsed.as_secs_f64());
        self.outcomes.push(Outcome { id, title, pass, detail, elapsed });
    }
}

struct Draws {
    rng: CounterRng,
    next: u64,
}

impl Draws {
    fn new(seed: u64) -> Self {
        Draws { rng: CounterRng::new(seed), next: 0 }
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next += 1;
        below(self.rng.block(self.next, 0, 0)[0], n)
    }

    fn unit(&mut self) -> f64 {
        self.next += 1;
        unit_f64(self.rng.block(self.next, 0, 0)[0])
    }

    fn set_2d(&mut self, w: usize, h: usize, density: f64) -> GridSet {
        let lat = Lattice::new(&[w, h], 1.0, &[0.0, 0.0]).unwrap();
        let mask = (0..lat.len()).map(|i| !lat.on_rim(i) && self.unit() < density).collect();
        GridSet::new(lat, mask).unwrap()
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn test_shapes() -> Vec<(&'static str, GridSet)> {
    vec![
        ("disk R=32", shapes::disk(32.0, 1.0).unwrap()),
        ("two disks R=32 sep=32", shapes::two_disks(32.0, 32.0, 1.0).unwrap()),
    ]
}

/// Wilson upper bound against the bound at `N₀, 2N₀, 4N₀`, then `p̂` at
/// the 0.99 count. Returns the pass flag and a one-line summary.
fn soundness(e: &GridSet, r: f64, bound: &CoverageBound, seed: u64) -> (bool, String) {
    const TRIALS: u64 = 1000;
    let n0 = invert_for_n(bound, 0.5).unwrap();
    let n99 = invert_for_n(bound, 0.99).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [n0, 2 * n0, 4 * n0] {
        let rep = estimate_parallel(e, r, n, TRIALS, seed, CoverageMode::Full, Some(bound), threads()).unwrap();
        let b = bound.evaluate(n);
        let pass = rep.wilson_hi >= b - 1e-9 && rep.verdict == Some(true);
        ok &= pass;
        parts.push(format!("N={n} hi={:.3}≥{b:.3}", rep.wilson_hi));
    }
    let rep = estimate_parallel(e, r, n99, TRIALS, seed, CoverageMode::Full, Some(bound), threads()).unwrap();
    ok &= rep.p_hat >= 0.97;
    parts.push(format!("N99={n99} p̂={:.3}", rep.p_hat));
    (ok, parts.join(", "))
}

fn criterion_1(s: &mut Suite) {
    for (name, e) in test_shapes() {
        for delta in [6.0, 8.0, 12.0] {
            s.run("1", "good partition certificate", || {
                let start = Instant::now();
                let p = good_partition(&e, delta).unwrap();
                let cert = certify_good(&p, delta);
                let secs = start.elapsed().as_secs_f64();
                let floor = delta * delta / 2.0 - cert.measure_slack;
                let cap = 3.0 * delta + (2f64.sqrt() + 1.0);
                let pass = cert.verdict && cert.min_measure() >= floor && cert.max_diameter() <= cap && secs < 5.0;
                (
                    pass,
                    format!(
                        "{name}, δ={delta}: M={}, min |R|={} ≥ {floor:.2}, max diam={:.2} ≤ {cap:.2}, {secs:.2} s < 5 s",
                        p.len(),
                        cert.min_measure(),
                        cert.max_diameter()
                    ),
                )
            });
        }
    }
}

fn criterion_2(s: &mut Suite) {
    let start = Instant::now();
    let mut seed = 100;
    for (name, e) in test_shapes() {
        for delta in [6.0, 8.0, 12.0] {
            seed += 1;
            s.run("2", "reach bound soundness", || {
                let m = good_partition(&e, delta).unwrap().len();
                let bound = bound_reach(m, 2, delta, e.measure()).unwrap();
                let (ok, line) = soundness(&e, 3.0 * delta, &bound, seed);
                (ok, format!("{name}, δ={delta}, M={m}: {line}"))
            });
        }
    }
    let total = start.elapsed().as_secs_f64();
    s.run("2", "soundness runtime", || (total < 120.0, format!("{total:.1} s < 120 s")));
}

fn criterion_3(s: &mut Suite) {
    let delta = 8.0;
    s.run("3", "U minus A soundness", || {
        let (e, a) = shapes::disk_minus_hole(32.0, Hole::Square { side: 4 }, 1.0).unwrap();
        let u = e.union(&a).unwrap();
        let m = good_partition(&u, delta).unwrap().len();
        let bound = bound_u_minus_a(m, 2, delta, a.measure(), e.measure()).unwrap();
        let (ok, line) = soundness(&e, 3.0 * delta, &bound, 200);
        let half = 0.5 * delta * delta / 2.0;
        (ok && a.measure() == half, format!("|A|={} = {half}, M={m}: {line}", a.measure()))
    });
    s.run("3", "U minus A hypothesis error", || {
        let limit = volume_floor(2, delta);
        let (e, a) = shapes::disk_minus_hole(32.0, Hole::Square { side: 6 }, 1.0).unwrap();
        let at_limit = bound_u_minus_a(100, 2, delta, limit, e.measure());
        let above = bound_u_minus_a(100, 2, delta, a.measure(), e.measure());
        let typed = |r: &Result<CoverageBound, Error>| {
            matches!(r, Err(err @ Error::RemovedTooLarge { .. }) if err.is_hypothesis())
        };
        (
            typed(&at_limit) && typed(&above),
            format!("|A|={limit} and |A|={} both raise RemovedTooLarge", a.measure()),
        )
    });
}

fn criterion_4(s: &mut Suite) {
    s.run("4", "flat norm min-cut exactness", || {
        let lat = Lattice::new(&[4, 4], 1.0, &[0.0, 0.0]).unwrap();
        let mut d = Draws::new(4);
        let mut mismatches = 0;
        for _ in 0..50 {
            let e: Vec<bool> = (0..16).map(|_| d.unit() < 0.5).collect();
            let lambda = 0.05 + 2.0 * d.unit();
            let sigma = minimize_mask(&lat, &e, lambda).unwrap();
            let (best, _) = brute_force_minimum(&lat, &e, lambda);
            if discrete_energy(&lat, &e, &sigma, lambda) != best {
                mismatches += 1;
            }
        }
        (mismatches == 0, format!("{mismatches} of 50 random 4×4 masks differ from enumeration"))
    });
}

fn criterion_5(s: &mut Suite) {
    s.run("5", "disk lambda threshold", || {
        let r = 1.0;
        let disk = shapes::disk(r, r / 64.0).unwrap();
        let t = lambda_threshold(&disk).unwrap();
        let ratio = t.lambda / (2.0 / r);
        ((0.97..=1.03).contains(&ratio), format!("Λ={:.5}, Λ·R/2={ratio:.4} in [0.97, 1.03]", t.lambda))
    });
}

fn criterion_6(s: &mut Suite) {
    s.run("6", "reach constant", || {
        let start = Instant::now();
        let rc = reach_constant();
        let secs = start.elapsed().as_secs_f64();
        let pass = (rc.c_hat - 0.2217).abs() <= 5e-4 && (rc.theta_star - 5.231).abs() <= 5e-3 && secs < 1.0;
        (pass, format!("Ĉ={:.5}, θ′={:.4}, {secs:.3} s < 1 s", rc.c_hat, rc.theta_star))
    });
}

fn criterion_7(s: &mut Suite) {
    let r = 40.0;
    let lambda = 4.0 / r;
    s.run("7", "fill-in restores U", || {
        let (e, a) = shapes::disk_minus_hole(r, Hole::Square { side: 3 }, 1.0).unwrap();
        let u = e.union(&a).unwrap();
        let rep = fill_in_experiment(&u, &a, lambda).unwrap();
        (
            rep.verdict && rep.sym_diff_to_u <= rep.tolerance,
            format!("|Σ Δ U|={} ≤ {:.1}", rep.sym_diff_to_u, rep.tolerance),
        )
    });
    s.run("7b", "fill-in control, hole area R²/4 fails", || {
        let side = (r / 2.0) as usize;
        let (e, a) = shapes::disk_minus_hole(r, Hole::Square { side }, 1.0).unwrap();
        let u = e.union(&a).unwrap();
        match fill_in_experiment(&u, &a, lambda) {
            Ok(rep) => (
                !rep.verdict,
                format!(
                    "|A|={}, |Σ Δ U|={} vs tolerance {:.1}, verdict {}",
                    rep.measure_a,
                    rep.sym_diff_to_u,
                    rep.tolerance,
                    if rep.verdict { "restored" } else { "not restored" }
                ),
            ),
            Err(err) => (false, format!("raised an error: {err}")),
        }
    });
}

fn criterion_8(s: &mut Suite) {
    s.run("8", "almost-cover pipeline", || {
        let r = 128.0;
        let lambda = 3.0 / r;
        let delta = 8.0;
        let (e, _) = shapes::disk_minus_hole(r, Hole::Spiked { side: 4, spike: 2 }, 1.0).unwrap();
        let out = almost_cover_pipeline(&e, lambda, delta).unwrap();
        let bound = bound_flatnorm(out.partition.len(), delta, out.flat.sym_diff_measure, out.a.measure()).unwrap();
        let n = invert_for_n(&bound, 0.95).unwrap();
        let rep =
            estimate_parallel(&e, 3.0 * delta, n, 500, 8, CoverageMode::Almost(out.alpha), None, threads()).unwrap();
        let hyp = out.flat.sym_diff_measure < delta * delta / 2.0 && delta < 1.0 / (5.0 * lambda);
        (
            hyp && out.good.verdict && out.almost.verdict && rep.p_hat >= 0.90,
            format!(
                "|S|={}, M={}, α={:.6}, N={n}, p̂={:.3} ≥ 0.90 over {} trials",
                out.flat.sym_diff_measure,
                out.partition.len(),
                out.alpha,
                rep.p_hat,
                rep.trials
            ),
        )
    });
}

fn brute_sq(lat: &Lattice, source: &[bool], i: usize) -> Option<u64> {
    (0..lat.len()).filter(|&j| source[j]).map(|j| lat.cell_dist2(i, j)).min()
}

fn criterion_9(s: &mut Suite) {
    s.run("9", "distance transform oracle", || {
        let mut d = Draws::new(9);
        let mut grids = 0;
        let mut bad = 0;
        for w in 3..=24 {
            for h in 3..=24 {
                let density = 0.2 + 0.7 * d.unit();
                let set = d.set_2d(w, h, density);
                let lat = set.lattice();
                let inside = set.mask().to_vec();
                let outside: Vec<bool> = inside.iter().map(|&m| !m).collect();
                for (from_complement, source) in [(false, &inside), (true, &outside)] {
                    match distance_transform(&set, from_complement) {
                        Ok(df) => {
                            if (0..lat.len()).any(|i| Some(df.squared_cells(i)) != brute_sq(lat, source, i)) {
                                bad += 1;
                            }
                        }
                        Err(_) if !source.contains(&true) => {}
                        Err(_) => bad += 1,
                    }
                }
                grids += 1;
            }
        }
        (bad == 0, format!("{grids} grids up to 24×24, {bad} mismatches"))
    });

    s.run("9", "coverage oracle", || {
        let mut d = Draws::new(19);
        let mut bad = 0;
        for instance in 0..20 {
            let w = 6 + d.below(12) as usize;
            let set = d.set_2d(w, 12, 0.6);
            let lat = *set.lattice();
            let n = d.below(12) as usize;
            let points: Vec<[f64; 3]> = (0..n)
                .map(|_| [(1.4 * d.unit() - 0.2) * w as f64, (1.4 * d.unit() - 0.2) * 12.0, 0.0])
                .collect();
            let r = 0.3 + 4.0 * d.unit();
            let hit = set
                .cells()
                .filter(|&i| {
                    let c = lat.center(i);
                    points.iter().any(|p| (p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) <= r * r)
                })
                .count();
            let samples = SampleSet { points, seed: 0, trial: instance, generator: GENERATOR_ID };
            let v = covers(&set, &samples, r).unwrap();
            let f = covered_fraction(&set, &samples, r).unwrap();
            let total = set.count();
            let expected = if total == 0 { 1.0 } else { hit as f64 / total as f64 };
            if v.covered != (hit == total) || (total > 0 && f.fraction != expected) {
                bad += 1;
            }
        }
        (bad == 0, format!("20 instances, {bad} mismatches"))
    });

    s.run("9", "morphology properties", || {
        let mut d = Draws::new(29);
        let mut bad = 0;
        const CASES: usize = 10_000;
        for _ in 0..CASES {
            let w = 4 + d.below(16) as usize;
            let h = 4 + d.below(16) as usize;
            let density = 0.2 + 0.75 * d.unit();
            let set = d.set_2d(w, h, density);
            let r1 = 5.0 * d.unit();
            let r2 = r1 + 3.0 * d.unit();
            let o1 = open(&set, r1);
            let idempotent = open(&o1, r1) == o1;
            let anti_extensive = o1.is_subset_of(&set).unwrap();
            let monotone = erode(&set, r2).is_subset_of(&erode(&set, r1)).unwrap()
                && open(&set, r2).is_subset_of(&o1).unwrap();
            if !(idempotent && anti_extensive && monotone) {
                bad += 1;
            }
        }
        (bad == 0, format!("{CASES} random cases, {bad} violations"))
    });
}

fn main() {
    let mut s = Suite { outcomes: Vec::new() };
    criterion_1(&mut s);
    criterion_2(&mut s);
    criterion_3(&mut s);
    criterion_4(&mut s);
    criterion_5(&mut s);
    criterion_6(&mut s);
    criterion_7(&mut s);
    criterion_8(&mut s);
    criterion_9(&mut s);

    let known = |o: &Outcome| KNOWN_FAILURES.iter().any(|(k, _)| *k == o.id);
    let passed = s.outcomes.iter().filter(|o| o.pass).count();
    let expected_fail = s.outcomes.iter().filter(|o| !o.pass && known(o)).count();
    let unexpected: Vec<&Outcome> = s.outcomes.iter().filter(|o| !o.pass && !known(o)).collect();
    let stale: Vec<&Outcome> = s.outcomes.iter().filter(|o| o.pass && known(o)).collect();
    let total: f64 = s.outcomes.iter().map(|o| o.elapsed.as_secs_f64()).sum();
    println!(
        "acceptance: {passed} passed, {expected_fail} known failure(s), {} unexpected failure(s), {:.1} s",
        unexpected.len(),
        total
    );
    for o in unexpected.iter().chain(stale.iter()) {
        eprintln!("criterion {} ({}): {}", o.id, o.title, o.detail);
    }
    if !unexpected.is_empty() || !stale.is_empty() {
        std::process::exit(1);
    }
}
