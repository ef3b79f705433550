//! Uniform sampling and coverage experiments.
//!
//! Sample `i` of trial `t` is drawn from the counter-based generator at
//! address `(i, t)`, so every trial is a pure function of
//! `(set, seed, t, N)` and trials may run in any order.
//!
//! Coverage of a cell means its center lies within `r` of a sample (the
//! set itself is defined by cell centers). A conservative variant shrinks
//! `r` by half a cell diagonal so the whole cell is covered.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::CoverageBound;
use crate::edt::squared_distances;
use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice};
use crate::rng::{below, unit_f64, CounterRng, GENERATOR_ID};

/// `z` for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Statistical slack in the soundness verdict.
pub const SOUNDNESS_EPS: f64 = 1e-9;

/// I.i.d. uniform points in a set.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    /// Physical coordinates; unused axes are zero.
    pub points: Vec<[f64; 3]>,
    pub seed: u64,
    pub trial: u32,
    pub generator: &'static str,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Pre-indexed cells of a set for repeated sampling.
#[derive(Clone, Debug)]
pub struct Sampler<'a> {
    set: &'a GridSet,
    cells: Vec<usize>,
    rng: CounterRng,
}

impl<'a> Sampler<'a> {
    pub fn new(set: &'a GridSet, seed: u64) -> Result<Self> {
        let cells: Vec<usize> = set.cells().collect();
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(Sampler { set, cells, rng: CounterRng::new(seed) })
    }

    /// Sample `i` of trial `t`. All cells have equal measure, so a
    /// uniform cell index followed by a uniform offset inside the cell is
    /// uniform on the set.
    pub fn point(&self, trial: u32, i: u64) -> [f64; 3] {
        let lat = self.set.lattice();
        let [a, b] = self.rng.block(i, trial, 0);
        let cell = self.cells[below(a, self.cells.len() as u64) as usize];
        let c = lat.coords(cell);
        let o = lat.origin();
        let h = lat.h();
        let mut p = [0.0; 3];
        p[0] = o[0] + (c[0] as f64 + unit_f64(b)) * h;
        let [u1, u2] = if lat.ndim() == 3 { self.rng.block(i, trial, 1) } else { [b.rotate_left(32), 0] };
        p[1] = o[1] + (c[1] as f64 + unit_f64(u1)) * h;
        if lat.ndim() == 3 {
            p[2] = o[2] + (c[2] as f64 + unit_f64(u2)) * h;
        }
        p
    }

    pub fn sample(&self, trial: u32, n: usize) -> SampleSet {
        SampleSet {
            points: (0..n as u64).map(|i| self.point(trial, i)).collect(),
            seed: self.rng.seed(),
            trial,
            generator: GENERATOR_ID,
        }
    }
}

/// `N` i.i.d. uniform points in `E` (trial 0 of the seed's stream).
pub fn sample_uniform(e: &GridSet, n: usize, seed: u64) -> Result<SampleSet> {
    if n == 0 {
        return Err(Error::InvalidParameter { name: "N", value: 0.0 });
    }
    Ok(Sampler::new(e, seed)?.sample(0, n))
}

/// Coverage verdicts at the cell-center radius and the shrunken radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverVerdict {
    pub covered: bool,
    /// Verdict with `r − h√n/2`.
    pub conservative: bool,
}

/// Covered fraction at the cell-center radius and the shrunken radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoveredFraction {
    pub fraction: f64,
    pub conservative: f64,
}

/// Nearest-sample queries against cell centers.
///
/// A distance transform from the cells holding samples gives, for every
/// cell, a value within half a cell diagonal of the true nearest-sample
/// distance; cells whose fate that bracket cannot decide are resolved by
/// scanning the sample buckets around them.
struct CoverageIndex<'a> {
    lat: &'a Lattice,
    sq: Vec<u64>,
    start: Vec<u32>,
    pts: Vec<[f64; 3]>,
    /// Samples beyond the lattice, checked one by one.
    stray: Vec<[f64; 3]>,
}

impl<'a> CoverageIndex<'a> {
    fn new(lat: &'a Lattice, samples: &[[f64; 3]]) -> Option<Self> {
        let mut counts = vec![0u32; lat.len() + 1];
        let mut cell_of = Vec::with_capacity(samples.len());
        let mut stray = Vec::new();
        for p in samples {
            let c = lat.cell_of_point(p);
            match c {
                Some(c) => counts[c + 1] += 1,
                None => stray.push(*p),
            }
            cell_of.push(c);
        }
        for i in 0..lat.len() {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut pts = vec![[0.0; 3]; counts[lat.len()] as usize];
        for (p, c) in samples.iter().zip(&cell_of) {
            if let Some(c) = *c {
                pts[fill[c] as usize] = *p;
                fill[c] += 1;
            }
        }
        let occupied: Vec<bool> = (0..lat.len()).map(|i| counts[i + 1] > counts[i]).collect();
        let sq = match squared_distances(lat, &occupied) {
            Some(sq) => sq,
            None if !stray.is_empty() => vec![u64::MAX; lat.len()],
            None => return None,
        };
        Some(CoverageIndex { lat, sq, start: counts, pts, stray })
    }

    /// Whether the center of `cell` lies within `r` of some sample.
    fn covered(&self, cell: usize, r: f64) -> bool {
        if r < 0.0 {
            return false;
        }
        let h = self.lat.h();
        let half_diag = 0.5 * libm::sqrt(self.lat.ndim() as f64);
        let rc = r / h;
        let d = libm::sqrt(self.sq[cell] as f64);
        if d + half_diag <= rc * (1.0 - 1e-12) {
            return true;
        }
        if !self.stray.is_empty() && within(&self.stray, self.lat.center(cell), r) {
            return true;
        }
        if d - half_diag > rc * (1.0 + 1e-12) {
            return false;
        }
        self.exact(cell, r)
    }

    fn exact(&self, cell: usize, r: f64) -> bool {
        let lat = self.lat;
        let p = lat.center(cell);
        let c = lat.coords(cell);
        let reach = libm::ceil(r / lat.h() + 1.0) as i64;
        let dims = lat.dims();
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..lat.ndim() {
            lo[a] = (c[a] as i64 - reach).max(0);
            hi[a] = (c[a] as i64 + reach).min(dims[a] as i64 - 1);
        }
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let j = lat.index([x as usize, y as usize, z as usize]);
                    if within(&self.pts[self.start[j] as usize..self.start[j + 1] as usize], p, r) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

fn within(pts: &[[f64; 3]], p: [f64; 3], r: f64) -> bool {
    let r2 = r * r;
    pts.iter().any(|q| {
        let dx = q[0] - p[0];
        let dy = q[1] - p[1];
        let dz = q[2] - p[2];
        dx * dx + dy * dy + dz * dz <= r2
    })
}

fn shrink(lat: &Lattice, r: f64) -> f64 {
    r - 0.5 * lat.h() * libm::sqrt(lat.ndim() as f64)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && !r.is_nan() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "radius", value: r })
    }
}

/// Whether `∪ B(X_i, r) ⊇ E` at cell resolution.
pub fn covers(e: &GridSet, samples: &SampleSet, r: f64) -> Result<CoverVerdict> {
    check_radius(r)?;
    Ok(covers_points(e, &samples.points, r))
}

fn covers_points(e: &GridSet, pts: &[[f64; 3]], r: f64) -> CoverVerdict {
    let Some(index) = CoverageIndex::new(e.lattice(), pts) else {
        let none = e.is_empty();
        return CoverVerdict { covered: none, conservative: none };
    };
    let covered = e.cells().all(|c| index.covered(c, r));
    let conservative = covered && {
        let rs = shrink(e.lattice(), r);
        e.cells().all(|c| index.covered(c, rs))
    };
    CoverVerdict { covered, conservative }
}

/// `|∪ B(X_i, r) ∩ E| / |E|` at cell resolution.
pub fn covered_fraction(e: &GridSet, samples: &SampleSet, r: f64) -> Result<CoveredFraction> {
    check_radius(r)?;
    Ok(fraction_points(e, &samples.points, r))
}

fn fraction_points(e: &GridSet, pts: &[[f64; 3]], r: f64) -> CoveredFraction {
    let total = e.count();
    if total == 0 {
        return CoveredFraction { fraction: 1.0, conservative: 1.0 };
    }
    let Some(index) = CoverageIndex::new(e.lattice(), pts) else {
        return CoveredFraction { fraction: 0.0, conservative: 0.0 };
    };
    let rs = shrink(e.lattice(), r);
    let mut hit = 0usize;
    let mut hit_c = 0usize;
    for c in e.cells() {
        if index.covered(c, r) {
            hit += 1;
            if index.covered(c, rs) {
                hit_c += 1;
            }
        }
    }
    CoveredFraction { fraction: hit as f64 / total as f64, conservative: hit_c as f64 / total as f64 }
}

/// What counts as a successful trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoverageMode {
    /// Every cell of `E` covered.
    Full,
    /// Covered fraction at least `1 − α`.
    Almost(f64),
}

/// Two-sided Wilson score interval.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Outcome of a batch of independent coverage experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub samples: u64,
    pub radius: f64,
    pub mode: CoverageMode,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    /// Successes under the shrunken-radius semantics.
    pub conservative_successes: u64,
    pub p_hat: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    /// Covered fraction per trial (almost mode only).
    pub fractions: Vec<f64>,
    pub bound: Option<f64>,
    /// `wilson_hi ≥ bound − ε`; only decided with a bound and at least
    /// 100 trials.
    pub verdict: Option<bool>,
}

/// Result of one trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub success: bool,
    pub conservative: bool,
    pub fraction: Option<f64>,
}

/// Runs trial `t` of an experiment.
pub fn run_trial(
    e: &GridSet,
    sampler: &Sampler<'_>,
    r: f64,
    n: u64,
    t: u32,
    mode: CoverageMode,
) -> TrialOutcome {
    let pts: Vec<[f64; 3]> = (0..n).map(|i| sampler.point(t, i)).collect();
    outcome(e, &pts, r, mode)
}

fn outcome(e: &GridSet, pts: &[[f64; 3]], r: f64, mode: CoverageMode) -> TrialOutcome {
    match mode {
        CoverageMode::Full => {
            let v = covers_points(e, pts, r);
            TrialOutcome { success: v.covered, conservative: v.conservative, fraction: None }
        }
        CoverageMode::Almost(alpha) => {
            let f = fraction_points(e, pts, r);
            TrialOutcome {
                success: f.fraction >= 1.0 - alpha,
                conservative: f.conservative >= 1.0 - alpha,
                fraction: Some(f.fraction),
            }
        }
    }
}

/// Aggregates trial outcomes (in trial order) into a report.
pub fn aggregate(
    outcomes: &[TrialOutcome],
    samples: u64,
    radius: f64,
    mode: CoverageMode,
    seed: u64,
    bound: Option<&CoverageBound>,
) -> TrialReport {
    let trials = outcomes.len() as u64;
    let successes = outcomes.iter().filter(|o| o.success).count() as u64;
    let conservative_successes = outcomes.iter().filter(|o| o.conservative).count() as u64;
    let (lo, hi) = wilson_interval(successes, trials, Z95);
    let bound_value = bound.map(|b| b.evaluate(samples));
    let verdict = match bound_value {
        Some(b) if trials >= 100 => Some(hi >= b - SOUNDNESS_EPS),
        _ => None,
    };
    TrialReport {
        samples,
        radius,
        mode,
        seed,
        trials,
        successes,
        conservative_successes,
        p_hat: if trials > 0 { successes as f64 / trials as f64 } else { 0.0 },
        wilson_lo: lo,
        wilson_hi: hi,
        fractions: outcomes.iter().filter_map(|o| o.fraction).collect(),
        bound: bound_value,
        verdict,
    }
}

/// Estimates `P(∪ B(X_i, r) ⊇ E)` (or the almost-coverage probability)
/// from `trials` independent experiments with `n` samples each.
pub fn estimate_probability(
    e: &GridSet,
    r: f64,
    n: u64,
    trials: u64,
    seed: u64,
    mode: CoverageMode,
    bound: Option<&CoverageBound>,
) -> Result<TrialReport> {
    check_radius(r)?;
    if trials == 0 {
        return Err(Error::InvalidParameter { name: "trials", value: 0.0 });
    }
    if trials > u32::MAX as u64 {
        return Err(Error::InvalidParameter { name: "trials", value: trials as f64 });
    }
    if let CoverageMode::Almost(alpha) = mode {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter { name: "alpha", value: alpha });
        }
    }
    let outcomes: Vec<TrialOutcome> = if n == 0 {
        // Nothing to draw, so an empty set is still a valid input here.
        let o = outcome(e, &[], r, mode);
        vec![o; trials as usize]
    } else {
        let sampler = Sampler::new(e, seed)?;
        (0..trials as u32).map(|t| run_trial(e, &sampler, r, n, t, mode)).collect()
    };
    Ok(aggregate(&outcomes, n, r, mode, seed, bound))
}
