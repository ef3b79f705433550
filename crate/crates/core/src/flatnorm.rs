//! Multiscale flat norm of planar sets, `min_Σ Per(Σ) + λ|Σ Δ E|`.
//!
//! The discrete energy uses the Cauchy–Crofton perimeter of
//! [`crate::measure`] and counts `|Σ Δ E|` in cells. It is a sum of unary
//! and submodular pairwise terms, so one s–t minimum cut minimizes it
//! exactly:
//!
//! * every cell is a node; the source side of the cut is `Σ`,
//! * a cell of `E` hangs off the source with capacity `λh²`, a cell of
//!   `E^c` off the sink with the same capacity,
//! * every 16-neighborhood pair carries its Crofton weight both ways,
//!   and pairs leaving the lattice become edges to the sink.
//!
//! Among all minimizers the largest one is returned: every node that can
//! no longer reach the sink in the residual graph.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::{bound_flatnorm, reach_constant, CoverageBound};
use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice};
use crate::maxflow::FlowGraph;
use crate::measure::{perimeter, CroftonWeights};
use crate::morphology::{opening_stability_radius, stability_radius_mask};
use crate::partition::{
    certify_almost, certify_good, good_partition, restrict_partition, AlmostPartitionCertificate,
    GoodPartitionCertificate, Partition,
};

/// A flat-norm minimizer and its energy decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatNormResult {
    pub lambda: f64,
    /// The minimizer `Σ_λ`, i.e. the regularized set `E_λ`.
    pub sigma: GridSet,
    /// `Per(Σ) + λ|Σ Δ E|`.
    pub energy: f64,
    pub perim_sigma: f64,
    /// `|Σ Δ E|`, the mass of the difference `S_λ`.
    pub sym_diff_measure: f64,
    pub input_perimeter: f64,
    pub input_measure: f64,
}

impl FlatNormResult {
    pub fn e_lambda(&self) -> &GridSet {
        &self.sigma
    }
}

/// Discrete energy of a labeling `sigma` against `e` on an arbitrary
/// 2D lattice. Cells beyond the lattice are outside both sets.
pub fn discrete_energy(lat: &Lattice, e: &[bool], sigma: &[bool], lambda: f64) -> f64 {
    let w = CroftonWeights::for_lattice(lat);
    let per = w.length(&w.cut_counts(lat, sigma));
    let disagree = e.iter().zip(sigma).filter(|(a, b)| a != b).count();
    per + lambda * lat.cell_measure() * disagree as f64
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "lambda", value: lambda })
    }
}

/// Maximal minimizer of the discrete energy on an arbitrary 2D mask (no
/// rim requirement).
pub fn minimize_mask(lat: &Lattice, e: &[bool], lambda: f64) -> Result<Vec<bool>> {
    check_lambda(lambda)?;
    if lat.ndim() != 2 {
        return Err(Error::UnsupportedDimension(lat.ndim()));
    }
    let n = lat.len();
    let (s, t) = (n, n + 1);
    let w = CroftonWeights::for_lattice(lat);
    let unary = lambda * lat.cell_measure();
    let mut g = FlowGraph::new(n + 2);
    // Terminal arcs first: the search trees then reach every cell before
    // spreading sideways, which keeps augmenting paths short.
    for (i, &inside) in e.iter().enumerate() {
        if inside {
            g.add_edge(s, i, unary, 0.0);
        } else {
            g.add_edge(i, t, unary, 0.0);
        }
    }
    for i in 0..n {
        let c = lat.coords(i);
        let c = [c[0] as i64, c[1] as i64, 0];
        for (off, &wk) in w.offsets.iter().zip(&w.weights) {
            match lat.checked_index([c[0] + off[0], c[1] + off[1], 0]) {
                Some(j) => g.add_edge(i, j, wk, wk),
                None => g.add_edge(i, t, wk, 0.0),
            }
            if lat.checked_index([c[0] - off[0], c[1] - off[1], 0]).is_none() {
                g.add_edge(i, t, wk, 0.0);
            }
        }
    }
    g.max_flow(s, t);
    let to_sink = g.reaches_sink(t);
    Ok(to_sink[..n].iter().map(|&r| !r).collect())
}

/// Minimizes `Per(Σ) + λ|Σ Δ E|` over subsets of the lattice.
pub fn flatnorm_minimize(e: &GridSet, lambda: f64) -> Result<FlatNormResult> {
    if e.ndim() != 2 {
        return Err(Error::UnsupportedDimension(e.ndim()));
    }
    let lat = *e.lattice();
    let mut sigma = minimize_mask(&lat, e.mask(), lambda)?;
    // The rim stays empty for bounded inputs; enforce it for the GridSet
    // invariant in case of exact ties.
    for (i, s) in sigma.iter_mut().enumerate() {
        if lat.on_rim(i) {
            *s = false;
        }
    }
    let sigma = GridSet::new(lat, sigma)?;
    Ok(result_for(e, sigma, lambda))
}

fn result_for(e: &GridSet, sigma: GridSet, lambda: f64) -> FlatNormResult {
    let perim_sigma = perimeter(&sigma);
    let sym = sigma.symmetric_difference(e).map(|s| s.measure()).unwrap_or(f64::NAN);
    FlatNormResult {
        lambda,
        energy: perim_sigma + lambda * sym,
        perim_sigma,
        sym_diff_measure: sym,
        input_perimeter: perimeter(e),
        input_measure: e.measure(),
        sigma,
    }
}

/// Location of the λ at which the minimizer stops being empty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaThreshold {
    /// Midpoint of the final bracket.
    pub lambda: f64,
    /// Largest probed λ with an empty minimizer.
    pub lo: f64,
    /// Smallest probed λ with a nonempty minimizer.
    pub hi: f64,
    pub evaluations: usize,
}

/// Bisects for the ∅ ↔ nonempty transition of the minimizer.
///
/// The initial bracket is `[0.1/diam(E), 10/h]`, widened by factors of
/// ten when needed. Bisection is geometric and stops once the bracket is
/// narrower than `10⁻³` of its midpoint.
pub fn lambda_threshold(e: &GridSet) -> Result<LambdaThreshold> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    if e.ndim() != 2 {
        return Err(Error::UnsupportedDimension(e.ndim()));
    }
    let cells: Vec<usize> = e.cells().collect();
    let diam = crate::measure::diameter(&cells, e.lattice())?;
    let mut lo = 0.1 / diam;
    let mut hi = 10.0 / e.h();
    let mut evaluations = 0;
    let mut nonempty = |lambda: f64| -> Result<bool> {
        evaluations += 1;
        Ok(minimize_mask(e.lattice(), e.mask(), lambda)?.iter().any(|&s| s))
    };
    let mut widen = 0;
    while nonempty(lo)? {
        lo /= 10.0;
        widen += 1;
        if widen > 6 {
            return Err(Error::NoTransition { lo, hi });
        }
    }
    widen = 0;
    while !nonempty(hi)? {
        hi *= 10.0;
        widen += 1;
        if widen > 6 {
            return Err(Error::NoTransition { lo, hi });
        }
    }
    while hi - lo > 1e-3 * 0.5 * (lo + hi) {
        let mid = libm::sqrt(lo * hi);
        if nonempty(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(LambdaThreshold { lambda: 0.5 * (lo + hi), lo, hi, evaluations })
}

/// Opening-stability radii of a minimizer and of its complement compared
/// with the lower bound `Ĉ/λ` on the reach of minimizer boundaries.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachReport {
    pub lambda: f64,
    pub c_hat: f64,
    /// `Ĉ/λ − 3h`.
    pub required: f64,
    pub sigma_radius: f64,
    pub complement_radius: f64,
    pub verdict: bool,
}

pub fn minimizer_reach_check(res: &FlatNormResult) -> Result<ReachReport> {
    if res.sigma.is_empty() {
        return Err(Error::EmptySet);
    }
    let c_hat = reach_constant().c_hat;
    let lat = res.sigma.lattice();
    let required = c_hat / res.lambda - 3.0 * lat.h();
    let sigma_radius = opening_stability_radius(&res.sigma);
    let comp: Vec<bool> = res.sigma.mask().iter().map(|&m| !m).collect();
    let complement_radius = stability_radius_mask(lat, &comp);
    Ok(ReachReport {
        lambda: res.lambda,
        c_hat,
        required,
        sigma_radius,
        complement_radius,
        verdict: sigma_radius >= required && complement_radius >= required,
    })
}

/// Everything produced by the almost-cover pipeline.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub flat: FlatNormResult,
    pub threshold: LambdaThreshold,
    /// `A = E ∩ Σ_λ`.
    pub a: GridSet,
    /// Good partition of `Σ_λ`.
    pub sigma_partition: Partition,
    /// Its restriction to `A`.
    pub partition: Partition,
    pub good: GoodPartitionCertificate,
    /// `α_δ = δ² / (2|E|)`.
    pub alpha: f64,
    pub almost: AlmostPartitionCertificate,
    pub bound: CoverageBound,
}

/// Regularizes `E` by the flat norm at scale λ, partitions the minimizer
/// at scale δ and restricts the partition to `A = E ∩ Σ_λ`, yielding an
/// `α_δ`-almost partition of `E` and the matching almost-coverage bound.
///
/// Each hypothesis (`λ > Λ_E`, `|S_λ| < δ²/2`, `δ < 1/(5λ)`) fails with
/// its own error.
pub fn almost_cover_pipeline(e: &GridSet, lambda: f64, delta: f64) -> Result<PipelineOutcome> {
    check_lambda(lambda)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    if e.ndim() != 2 {
        return Err(Error::UnsupportedDimension(e.ndim()));
    }
    let scale_limit = 1.0 / (5.0 * lambda);
    if delta >= scale_limit {
        return Err(Error::DeltaTooLargeForScale { delta, limit: scale_limit });
    }
    let threshold = lambda_threshold(e)?;
    if lambda <= threshold.hi {
        return Err(Error::LambdaBelowThreshold { lambda, threshold: threshold.lambda });
    }
    let flat = flatnorm_minimize(e, lambda)?;
    let limit = 0.5 * delta * delta;
    if flat.sym_diff_measure >= limit {
        return Err(Error::SymDiffTooLarge { sym_diff: flat.sym_diff_measure, limit });
    }
    let a = e.intersection(&flat.sigma)?;
    let sigma_partition = good_partition(&flat.sigma, delta)?;
    let partition = restrict_partition(&sigma_partition, &a)?;
    let good = certify_good(&partition, delta);
    let alpha = delta * delta / (2.0 * e.measure());
    let almost = certify_almost(&partition, e, alpha)?;
    let bound = bound_flatnorm(partition.len(), delta, flat.sym_diff_measure, a.measure())?;
    Ok(PipelineOutcome {
        flat,
        threshold,
        a,
        sigma_partition,
        partition,
        good,
        alpha,
        almost,
        bound,
    })
}

/// Outcome of minimizing on `U ∖ A` and comparing the minimizer with `U`.
#[derive(Clone, Debug)]
pub struct FillInReport {
    pub lambda: f64,
    pub measure_a: f64,
    /// Smallest distance from a cell of `A` to the complement of `U`.
    pub margin: f64,
    pub stability_radius_u: f64,
    /// `|Σ_λ Δ U|`.
    pub sym_diff_to_u: f64,
    /// `2·Per(U)·h`, two cell rings along the boundary of `U`.
    pub tolerance: f64,
    /// The minimizer restored `U` to within the tolerance.
    pub verdict: bool,
    pub result: FlatNormResult,
}

/// Removes `A` from `U`, minimizes, and checks whether the minimizer fills
/// `A` back in.
pub fn fill_in_experiment(u: &GridSet, a: &GridSet, lambda: f64) -> Result<FillInReport> {
    check_lambda(lambda)?;
    let outside = a.cells_outside(u)?;
    if !outside.is_empty() {
        return Err(Error::NotSubset { offending: outside });
    }
    let h = u.h();
    let margin = if a.is_empty() {
        f64::INFINITY
    } else {
        let df = crate::edt::distance_transform(u, true)?;
        a.cells().map(|i| df.value(i)).fold(f64::INFINITY, f64::min)
    };
    let required = 2.0 * h;
    if margin < required {
        return Err(Error::NotCompactlyInside { margin, required });
    }
    let rho = opening_stability_radius(u);
    let two_over = 2.0 / lambda;
    if two_over >= rho {
        return Err(Error::ScaleExceedsStability { two_over_lambda: two_over, stability_radius: rho });
    }
    let e = u.difference(a)?;
    let result = flatnorm_minimize(&e, lambda)?;
    let sym = result.sigma.symmetric_difference(u)?.measure();
    let tolerance = 2.0 * perimeter(u) * h;
    Ok(FillInReport {
        lambda,
        measure_a: a.measure(),
        margin,
        stability_radius_u: rho,
        sym_diff_to_u: sym,
        tolerance,
        verdict: sym <= tolerance,
        result,
    })
}

/// Exhaustive minimum over all labelings of a tiny lattice, used by tests
/// as an independent oracle. Labelings are visited in Gray-code order with
/// integer cut counts updated per flip, and each energy is evaluated the
/// same way as [`discrete_energy`], so equal labelings give bit-identical
/// energies.
#[doc(hidden)]
pub fn brute_force_minimum(lat: &Lattice, e: &[bool], lambda: f64) -> (f64, Vec<bool>) {
    let n = lat.len();
    assert!(n <= 25, "brute force limited to 25 cells");
    let w = CroftonWeights::for_lattice(lat);
    // For every cell and direction: the neighbor one step forward and one
    // step back, `None` when it lies beyond the lattice.
    let mut links: Vec<Vec<(usize, Option<usize>)>> = vec![Vec::new(); n];
    for (i, link) in links.iter_mut().enumerate() {
        let c = lat.coords(i);
        let c = [c[0] as i64, c[1] as i64, c[2] as i64];
        for (k, o) in w.offsets.iter().enumerate() {
            link.push((k, lat.checked_index([c[0] + o[0], c[1] + o[1], c[2] + o[2]])));
            link.push((k, lat.checked_index([c[0] - o[0], c[1] - o[1], c[2] - o[2]])));
        }
    }
    let mut sigma = vec![false; n];
    let mut counts = vec![0i64; w.offsets.len()];
    let mut disagree = e.iter().filter(|&&x| x).count() as i64;
    let energy = |counts: &[i64], disagree: i64| -> f64 {
        let per: f64 = w.weights.iter().zip(counts).map(|(wk, &c)| wk * c as f64).sum();
        per + lambda * lat.cell_measure() * disagree as f64
    };
    let mut best = (energy(&counts, disagree), sigma.clone());
    for step in 1u32..(1 << n) {
        let i = step.trailing_zeros() as usize;
        let now = !sigma[i];
        for &(k, j) in &links[i] {
            let other = j.map_or(false, |j| sigma[j]);
            // Cut before the flip is `sigma[i] != other`, after it `now != other`.
            counts[k] += if now != other { 1 } else { -1 };
        }
        sigma[i] = now;
        disagree += if now != e[i] { 1 } else { -1 };
        let en = energy(&counts, disagree);
        if en < best.0 {
            best = (en, sigma.clone());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn rejects_bad_inputs() {
        let d = shapes::disk(5.0, 1.0).unwrap();
        assert!(flatnorm_minimize(&d, 0.0).is_err());
        assert!(flatnorm_minimize(&d, -1.0).is_err());
        let b = shapes::ball(3.0, 1.0, 3).unwrap();
        assert_eq!(flatnorm_minimize(&b, 1.0), Err(Error::UnsupportedDimension(3)));
    }

    #[test]
    fn energy_decomposition_and_sandwich() {
        let d = shapes::dumbbell(8.0, 24.0, 3.0, 1.0).unwrap();
        for lambda in [0.1, 0.3, 1.0] {
            let r = flatnorm_minimize(&d, lambda).unwrap();
            let recomputed = discrete_energy(d.lattice(), d.mask(), r.sigma.mask(), lambda);
            assert!((r.energy - recomputed).abs() <= 1e-9 * recomputed.max(1.0));
            assert!(r.energy <= r.input_perimeter + 1e-9);
            assert!(r.energy <= lambda * r.input_measure + 1e-9);
        }
    }

    #[test]
    fn small_grids_match_brute_force() {
        let lat = Lattice::new(&[4, 4], 0.5, &[0.0, 0.0]).unwrap();
        let mut state = 5u64;
        for _ in 0..10 {
            let e: Vec<bool> = (0..16)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    state >> 63 == 1
                })
                .collect();
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let lambda = 1.0 + 8.0 * ((state >> 11) as f64 / (1u64 << 53) as f64);
            let sigma = minimize_mask(&lat, &e, lambda).unwrap();
            let (best, _) = brute_force_minimum(&lat, &e, lambda);
            assert_eq!(discrete_energy(&lat, &e, &sigma, lambda), best);
        }
    }

    #[test]
    fn fill_in_requires_margin() {
        let u = shapes::disk(10.0, 1.0).unwrap();
        let mut mask = vec![false; u.lattice().len()];
        let edge = u.cells().next().unwrap();
        mask[edge] = true;
        let a = GridSet::new(*u.lattice(), mask).unwrap();
        assert!(matches!(fill_in_experiment(&u, &a, 0.5), Err(Error::NotCompactlyInside { .. })));
    }

    #[test]
    fn empty_minimizer_has_no_reach_report() {
        let d = shapes::disk(6.0, 1.0).unwrap();
        let r = flatnorm_minimize(&d, 0.05).unwrap();
        assert!(r.sigma.is_empty());
        assert_eq!(minimizer_reach_check(&r), Err(Error::EmptySet));
    }
}
