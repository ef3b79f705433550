//! Closed-form lower bounds on coverage probabilities.
//!
//! Every bound has the shape `1 − Σ_i exp(−c_i N)` where `N` is the
//! number of i.i.d. uniform samples. The uniform kinds use `M` equal
//! terms with a single coefficient; the region kind uses one term per
//! partition region with `c_i = |R_i|/|E|`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::powi;

/// Which covering result a bound instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `1 − M exp(−δⁿ N / (n^{n/2} |E|))`.
    Reach,
    /// `1 − Σ_R exp(−(|R|/|E|) N)`.
    Regions,
    /// `1 − M exp(−(δⁿ n^{−n/2} − |A|) N / |E|)` for `E = U ∖ A`.
    UMinusA,
    /// `1 − M exp(−(δ²/2 − |S_λ|) N / |A|)`.
    FlatNormAlmost,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Reach => "reach",
            BoundKind::Regions => "regions",
            BoundKind::UMinusA => "u-minus-a",
            BoundKind::FlatNormAlmost => "flatnorm-almost",
        }
    }
}

/// A coverage lower bound as a function of the sample count.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageBound {
    pub kind: BoundKind,
    /// Number of terms (partition regions).
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    /// Measure normalizing the exponent: `|E|`, or `|A|` for the
    /// flat-norm bound.
    pub measure_e: f64,
    /// `|A|` for [`BoundKind::UMinusA`], `|S_λ|` for
    /// [`BoundKind::FlatNormAlmost`], zero otherwise.
    pub measure_removed: f64,
    /// Exponent coefficient per sample of the equal-term kinds; the
    /// smallest coefficient for the region kind.
    pub coefficient: f64,
    region_coefficients: Vec<f64>,
}

/// Value of a bound at one sample count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    /// Clamped to `[0, 1]`.
    pub value: f64,
    /// `1 − Σ exp(·)` before clamping.
    pub raw: f64,
    /// Every exponential underflowed to zero; `value` is exactly 1.
    pub underflow: bool,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value: v })
    }
}

fn check_dim(n: usize) -> Result<()> {
    if (2..=3).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// `δⁿ / n^{n/2}`, the measure of a cube of diameter δ.
pub fn volume_floor(n: usize, delta: f64) -> f64 {
    powi(delta, n as i32) / libm::pow(n as f64, 0.5 * n as f64)
}

fn uniform(
    kind: BoundKind,
    m: usize,
    n: usize,
    delta: f64,
    measure_e: f64,
    removed: f64,
    coefficient: f64,
) -> Result<CoverageBound> {
    if !(coefficient > 0.0 && coefficient.is_finite()) {
        return Err(Error::NonPositiveExponent { coefficient });
    }
    Ok(CoverageBound {
        kind,
        m,
        n,
        delta,
        measure_e,
        measure_removed: removed,
        coefficient,
        region_coefficients: Vec::new(),
    })
}

/// Bound for sets whose complement has reach above δ.
pub fn bound_reach(m: usize, n: usize, delta: f64, measure_e: f64) -> Result<CoverageBound> {
    if m == 0 {
        return Err(Error::InvalidParameter { name: "M", value: 0.0 });
    }
    check_dim(n)?;
    positive("delta", delta)?;
    positive("measure of E", measure_e)?;
    let c = volume_floor(n, delta) / measure_e;
    uniform(BoundKind::Reach, m, n, delta, measure_e, 0.0, c)
}

/// Subadditivity bound over explicit region measures.
pub fn bound_regions(regions: &[f64], measure_e: f64) -> Result<CoverageBound> {
    positive("measure of E", measure_e)?;
    if regions.is_empty() {
        return Err(Error::InvalidParameter { name: "M", value: 0.0 });
    }
    let mut total = 0.0;
    for &r in regions {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter { name: "region measure", value: r });
        }
        total += r;
    }
    if total > measure_e * (1.0 + 1e-9) {
        return Err(Error::InvalidParameter { name: "sum of region measures", value: total });
    }
    let coeffs: Vec<f64> = regions.iter().map(|r| r / measure_e).collect();
    let min = coeffs.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CoverageBound {
        kind: BoundKind::Regions,
        m: regions.len(),
        n: 0,
        delta: 0.0,
        measure_e,
        measure_removed: 0.0,
        coefficient: min,
        region_coefficients: coeffs,
    })
}

/// Bound for `E = U ∖ A` with `|A| < δⁿ n^{−n/2}`.
pub fn bound_u_minus_a(
    m: usize,
    n: usize,
    delta: f64,
    measure_a: f64,
    measure_e: f64,
) -> Result<CoverageBound> {
    if m == 0 {
        return Err(Error::InvalidParameter { name: "M", value: 0.0 });
    }
    check_dim(n)?;
    positive("delta", delta)?;
    positive("measure of E", measure_e)?;
    if !(measure_a >= 0.0 && measure_a.is_finite()) {
        return Err(Error::InvalidParameter { name: "measure of A", value: measure_a });
    }
    let limit = volume_floor(n, delta);
    if measure_a >= limit {
        return Err(Error::RemovedTooLarge { measure: measure_a, limit });
    }
    let c = (limit - measure_a) / measure_e;
    uniform(BoundKind::UMinusA, m, n, delta, measure_e, measure_a, c)
}

/// Almost-coverage bound built from a flat-norm minimizer in the plane.
pub fn bound_flatnorm(
    m: usize,
    delta: f64,
    measure_s_lambda: f64,
    measure_a: f64,
) -> Result<CoverageBound> {
    if m == 0 {
        return Err(Error::InvalidParameter { name: "M", value: 0.0 });
    }
    positive("delta", delta)?;
    positive("measure of A", measure_a)?;
    if !(measure_s_lambda >= 0.0 && measure_s_lambda.is_finite()) {
        return Err(Error::InvalidParameter { name: "measure of S_lambda", value: measure_s_lambda });
    }
    let limit = 0.5 * delta * delta;
    if measure_s_lambda >= limit {
        return Err(Error::SymDiffTooLarge { sym_diff: measure_s_lambda, limit });
    }
    let c = (limit - measure_s_lambda) / measure_a;
    uniform(BoundKind::FlatNormAlmost, m, 2, delta, measure_a, measure_s_lambda, c)
}

impl CoverageBound {
    /// Exponent coefficients of the individual terms.
    pub fn coefficients(&self) -> impl Iterator<Item = f64> + '_ {
        let uniform = self.region_coefficients.is_empty();
        (0..self.m).map(move |i| if uniform { self.coefficient } else { self.region_coefficients[i] })
    }

    /// Full evaluation with the unclamped value and underflow flag.
    pub fn evaluate_detail(&self, samples: u64) -> Evaluation {
        let n = samples as f64;
        let tail: f64 = if self.region_coefficients.is_empty() {
            self.m as f64 * libm::exp(-self.coefficient * n)
        } else {
            self.region_coefficients.iter().map(|c| libm::exp(-c * n)).sum()
        };
        let raw = 1.0 - tail;
        if tail == 0.0 {
            return Evaluation { value: 1.0, raw, underflow: true };
        }
        Evaluation { value: raw.clamp(0.0, 1.0), raw, underflow: false }
    }

    /// Lower bound on the coverage probability with `samples` points.
    pub fn evaluate(&self, samples: u64) -> f64 {
        self.evaluate_detail(samples).value
    }

    /// Smallest sample count whose bound reaches `p_target`.
    pub fn invert_for_n(&self, p_target: f64) -> Result<u64> {
        invert_for_n(self, p_target)
    }
}

/// Smallest integer `N` with `bound.evaluate(N) ≥ p_target`.
pub fn invert_for_n(bound: &CoverageBound, p_target: f64) -> Result<u64> {
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(Error::InvalidParameter { name: "target probability", value: p_target });
    }
    // Equal-coefficient closed form, exact for uniform kinds and an upper
    // bound for the region kind (every term is at most the slowest one).
    let guess = libm::log(bound.m as f64 / (1.0 - p_target)) / bound.coefficient;
    let mut hi = libm::ceil(guess.max(0.0)) as u64;
    while bound.evaluate(hi) < p_target {
        hi = hi.saturating_mul(2).max(1);
    }
    if !bound.region_coefficients.is_empty() {
        let mut lo = 0u64;
        if bound.evaluate(lo) >= p_target {
            return Ok(0);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if bound.evaluate(mid) >= p_target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return Ok(hi);
    }
    // Correct the closed form for rounding in either direction.
    while hi > 0 && bound.evaluate(hi - 1) >= p_target {
        hi -= 1;
    }
    Ok(hi)
}

/// The reach constant of planar flat-norm minimizers.
#[derive(Clone, Debug, PartialEq)]
pub struct ReachConstant {
    /// `sup C(θ)` over `(3π/2, 2π)`.
    pub c_hat: f64,
    /// Maximizer of `C`.
    pub theta_star: f64,
    /// `(θ, C(θ))` samples of the initial scan.
    pub profile: Vec<(f64, f64)>,
}

/// `C(θ) = [2 cos θ − (1 + sin θ)(cos θ + 2)] / [2 (cos θ + 1)]`.
pub fn reach_profile(theta: f64) -> f64 {
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    (2.0 * c - (1.0 + s) * (c + 2.0)) / (2.0 * (c + 1.0))
}

/// Maximizes `C(θ)` on `(3π/2, 2π)`: a 10⁴-point scan followed by
/// golden-section refinement around the best sample.
pub fn reach_constant() -> ReachConstant {
    use core::f64::consts::PI;
    const SCAN: usize = 10_000;
    let a = 1.5 * PI;
    let b = 2.0 * PI;
    let step = (b - a) / (SCAN + 1) as f64;
    let profile: Vec<(f64, f64)> = (1..=SCAN)
        .map(|i| {
            let t = a + step * i as f64;
            (t, reach_profile(t))
        })
        .collect();
    let best = profile
        .iter()
        .enumerate()
        .fold(0, |acc, (i, p)| if p.1 > profile[acc].1 { i } else { acc });
    let mut lo = profile[best.saturating_sub(1)].0;
    let mut hi = profile[(best + 1).min(SCAN - 1)].0;
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = reach_profile(x1);
    let mut f2 = reach_profile(x2);
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = reach_profile(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = reach_profile(x1);
        }
    }
    let theta_star = 0.5 * (lo + hi);
    ReachConstant { c_hat: reach_profile(theta_star), theta_star, profile }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_is_vacuous() {
        let b = bound_reach(5, 2, 0.1, 1.0).unwrap();
        assert_eq!(b.evaluate(0), 0.0);
        assert_eq!(b.evaluate_detail(0).raw, -4.0);
        let b = bound_reach(1, 2, 0.1, 1.0).unwrap();
        assert_eq!(b.evaluate(0), 0.0);
    }

    #[test]
    fn algebraic_inversion() {
        let (m, n, delta, e) = (37usize, 2usize, 0.1, core::f64::consts::PI);
        let b = bound_reach(m, n, delta, e).unwrap();
        let big_n = 2.0 * e * libm::log(m as f64 * 1e6) / (delta * delta);
        let v = 1.0 - m as f64 * libm::exp(-delta * delta * big_n / (2.0 * e));
        assert!((v - (1.0 - 1e-6)).abs() < 1e-12);
        // evaluate at the rounded-up count stays within the same tolerance band
        assert!(b.evaluate(big_n.ceil() as u64) >= 1.0 - 1e-6 - 1e-12);
    }

    #[test]
    fn monotone_ladder() {
        let b = bound_reach(100, 2, 0.1, core::f64::consts::PI).unwrap();
        let v: Vec<f64> = [1_000u64, 10_000, 100_000].iter().map(|&n| b.evaluate(n)).collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
        assert!(v[2] > 0.999_999);
    }

    #[test]
    fn single_region_is_one_minus_exp() {
        let b = bound_regions(&[2.5], 2.5).unwrap();
        for n in [0u64, 1, 3, 10] {
            assert!((b.evaluate(n) - (1.0 - libm::exp(-(n as f64)))).abs() < 1e-15);
        }
    }

    #[test]
    fn equal_regions_reproduce_uniform() {
        let e = 10.0;
        let delta = 0.5;
        let floor = volume_floor(2, delta);
        let b = bound_regions(&[floor; 7], e).unwrap();
        let u = bound_reach(7, 2, delta, e).unwrap();
        for n in [0u64, 50, 200, 1000] {
            assert!((b.evaluate(n) - u.evaluate(n)).abs() < 1e-12);
        }
    }

    #[test]
    fn region_errors() {
        assert!(bound_regions(&[1.0, 0.0], 2.0).is_err());
        assert!(bound_regions(&[1.5, 1.0], 2.0).is_err());
        assert!(bound_regions(&[], 2.0).is_err());
    }

    #[test]
    fn nonpositive_inputs() {
        assert!(bound_reach(0, 2, 0.1, 1.0).is_err());
        assert!(bound_reach(1, 4, 0.1, 1.0).is_err());
        assert!(bound_reach(1, 2, -0.1, 1.0).is_err());
        assert!(bound_reach(1, 2, 0.1, 0.0).is_err());
    }

    #[test]
    fn u_minus_a_limits() {
        let plain = bound_reach(4, 2, 0.2, 3.0).unwrap();
        let none = bound_u_minus_a(4, 2, 0.2, 0.0, 3.0).unwrap();
        assert_eq!(plain.coefficient, none.coefficient);
        let limit = volume_floor(2, 0.2);
        assert_eq!(
            bound_u_minus_a(4, 2, 0.2, limit, 3.0),
            Err(Error::RemovedTooLarge { measure: limit, limit })
        );
        let near = bound_u_minus_a(4, 2, 0.2, limit * (1.0 - 1e-12), 3.0).unwrap();
        assert!(near.evaluate(1000) < 1e-6);
    }

    #[test]
    fn flatnorm_limits() {
        let b = bound_flatnorm(3, 0.2, 0.0, 2.0).unwrap();
        let r = bound_reach(3, 2, 0.2, 2.0).unwrap();
        assert!((b.coefficient - r.coefficient).abs() < 1e-15);
        let limit = 0.2 * 0.2 / 2.0;
        assert!(bound_flatnorm(3, 0.2, limit, 2.0).is_err());
        let near = bound_flatnorm(3, 0.2, limit * (1.0 - 1e-12), 2.0).unwrap();
        assert!(near.evaluate(1000) < 1e-6);
        assert!(bound_flatnorm(3, 0.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn inversion_closed_form() {
        let (n, e, delta) = (2usize, 3.0, 0.1);
        let b = bound_reach(1, n, delta, e).unwrap();
        let expect = libm::ceil(2.0 * e * libm::log(100.0) / (delta * delta)) as u64;
        assert_eq!(invert_for_n(&b, 0.99).unwrap(), expect);
        assert!(invert_for_n(&b, 1.0).is_err());
        assert!(invert_for_n(&b, 0.0).is_err());
    }

    #[test]
    fn underflow_is_exactly_one() {
        let b = bound_reach(3, 2, 1.0, 1.0).unwrap();
        let ev = b.evaluate_detail(100_000);
        assert!(ev.underflow);
        assert_eq!(ev.value, 1.0);
    }

    #[test]
    fn profile_endpoints_below_max() {
        let rc = reach_constant();
        let first = rc.profile.first().unwrap().1;
        let last = rc.profile.last().unwrap().1;
        assert!(first < rc.c_hat && last < rc.c_hat);
        assert!(rc.profile.iter().all(|p| p.1.is_finite() && p.1 <= rc.c_hat));
        assert_eq!(rc.profile.len(), 10_000);
    }
}
