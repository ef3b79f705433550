//! Erosion, dilation and opening by Euclidean balls.
//!
//! Erosion keeps cells whose distance to the complement is strictly
//! greater than `r` (so `x + B ⊂ E`), dilation adds cells within
//! distance `r` inclusive.
//!
//! Opening is the union of all balls of radius greater than `r` that fit
//! in the set. In the continuum this is `(E ⊖ B) ⊕ B`; on the lattice,
//! erosion followed by dilation with one digital disk is not monotone in
//! `r` (the radius-1.2 disk is a five-cell cross, the radius-1.9 disk a
//! 3×3 block that no union of crosses forms), while the union over all
//! larger radii is. It satisfies `open(S, 0) = S`, `open(S, r) ⊆ S`,
//! idempotence, and `open(S, r₂) ⊆ open(S, r₁)` for `r₁ ≤ r₂`, exactly at
//! cell resolution, and contains `dilate(erode(S, r), r)`.

use alloc::vec::Vec;

use crate::edt::{lower_envelope, squared_distances};
use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice};

/// `E ⊖ B(0, r)`: cells of the set farther than `r` from its complement.
pub fn erode(set: &GridSet, r: f64) -> GridSet {
    let mask = erode_mask(set.lattice(), set.mask(), r);
    GridSet::from_parts_unchecked(*set.lattice(), mask)
}

/// `E ⊕ B(0, r)` on a lattice padded so the result is never clipped.
pub fn dilate(set: &GridSet, r: f64) -> GridSet {
    let k = if r > 0.0 { libm::floor(r / set.h()) as usize + 1 } else { 0 };
    let padded = set.pad(k);
    let mask = dilate_mask(padded.lattice(), padded.mask(), r);
    GridSet::from_parts_unchecked(*padded.lattice(), mask)
}

/// Dilation restricted to the set's own lattice.
pub fn dilate_clipped(set: &GridSet, r: f64) -> GridSet {
    let mut mask = dilate_mask(set.lattice(), set.mask(), r);
    for (i, m) in mask.iter_mut().enumerate() {
        if set.lattice().on_rim(i) {
            *m = false;
        }
    }
    GridSet::from_parts_unchecked(*set.lattice(), mask)
}

/// `E ∘ B(0, r)`: the union of the balls of radius above `r` inside the
/// set, on the set's own lattice.
pub fn open(set: &GridSet, r: f64) -> GridSet {
    GridSet::from_parts_unchecked(*set.lattice(), open_mask(set.lattice(), set.mask(), r))
}

/// Largest probed radius `r` with `open(set, r) = set`.
///
/// Opening shrinks as `r` grows, so stability is decided by bisection
/// between one cell and the inradius down to a bracket of `h/2`. A set
/// that is not stable at one cell gets 0.
pub fn opening_stability_radius(set: &GridSet) -> f64 {
    stability_radius_mask(set.lattice(), set.mask())
}

/// `η_δ = max_{y ∈ E} dist(y, E ⊖ B(0, δ))`.
pub fn eta_delta(set: &GridSet, delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    let core = erode_mask(set.lattice(), set.mask(), delta);
    let sq = squared_distances(set.lattice(), &core).ok_or(Error::ErosionEmpty { delta })?;
    let worst = set.cells().map(|i| sq[i]).max().unwrap_or(0);
    Ok(libm::sqrt(worst as f64) * set.h())
}

/// Largest distance from a cell of the set to its complement.
pub fn inradius(set: &GridSet) -> f64 {
    inradius_mask(set.lattice(), set.mask())
}

pub(crate) fn inradius_mask(lat: &Lattice, mask: &[bool]) -> f64 {
    let comp: Vec<bool> = mask.iter().map(|&m| !m).collect();
    match squared_distances(lat, &comp) {
        Some(sq) => {
            let m = sq.iter().zip(mask).filter(|(_, &m)| m).map(|(&s, _)| s).max().unwrap_or(0);
            libm::sqrt(m as f64) * lat.h()
        }
        // Mask fills the whole lattice: no complement cell in the array.
        None => f64::INFINITY,
    }
}

/// Erosion of an arbitrary mask. The complement is taken inside the
/// lattice only; cells beyond the array do not count as complement.
pub(crate) fn erode_mask(lat: &Lattice, mask: &[bool], r: f64) -> Vec<bool> {
    let comp: Vec<bool> = mask.iter().map(|&m| !m).collect();
    let Some(sq) = squared_distances(lat, &comp) else {
        return mask.to_vec();
    };
    let t2 = lat.radius_sq_cells(r);
    mask.iter().zip(&sq).map(|(&m, &s)| m && s as f64 > t2).collect()
}

pub(crate) fn dilate_mask(lat: &Lattice, mask: &[bool], r: f64) -> Vec<bool> {
    let Some(sq) = squared_distances(lat, mask) else {
        return mask.to_vec();
    };
    let t2 = lat.radius_sq_cells(r);
    sq.iter().map(|&s| s as f64 <= t2).collect()
}

/// Union of every ball of radius greater than `r` that fits in the set.
///
/// A cell `c` is the center of the fitting ball `{x : |x − c|² < D(c)}`,
/// with `D` the squared distance to the complement, and that ball has
/// radius above `r` when `D(c) > r²`. Cell `x` is kept when
/// `max_c D(c) − |x − c|² > 0` over those centers, a single lower-envelope
/// pass on `−D`.
pub(crate) fn open_mask(lat: &Lattice, mask: &[bool], r: f64) -> Vec<bool> {
    let comp: Vec<bool> = mask.iter().map(|&m| !m).collect();
    let Some(sq) = squared_distances(lat, &comp) else {
        return mask.to_vec();
    };
    let t2 = lat.radius_sq_cells(r);
    let f: Vec<f64> = mask
        .iter()
        .zip(&sq)
        .map(|(&m, &s)| if m && s as f64 > t2 { -(s as f64) } else { f64::INFINITY })
        .collect();
    lower_envelope(lat, f).iter().map(|&v| v < 0.0).collect()
}

fn stable_at(lat: &Lattice, mask: &[bool], r: f64) -> bool {
    let opened = open_mask(lat, mask, r);
    mask.iter().zip(&opened).all(|(&m, &o)| !m || o)
}

pub(crate) fn stability_radius_mask(lat: &Lattice, mask: &[bool]) -> f64 {
    let h = lat.h();
    if !mask.iter().any(|&m| m) {
        return 0.0;
    }
    if !stable_at(lat, mask, h) {
        return 0.0;
    }
    let mut hi = inradius_mask(lat, mask);
    if !hi.is_finite() {
        // No complement inside the array: bound by the lattice extent.
        let d = lat.dims();
        hi = libm::sqrt((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64) * h;
    }
    if hi <= h {
        return h;
    }
    if stable_at(lat, mask, hi) {
        return hi;
    }
    let mut lo = h;
    while hi - lo > 0.5 * h {
        let mid = 0.5 * (lo + hi);
        if stable_at(lat, mask, mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    #[test]
    fn zero_radius_is_identity() {
        let d = shapes::disk(10.0, 1.0).unwrap();
        assert_eq!(erode(&d, 0.0), d);
        assert_eq!(open(&d, 0.0), d);
        assert_eq!(dilate_clipped(&d, 0.0), d);
    }

    #[test]
    fn erosion_beyond_inradius_is_empty() {
        let d = shapes::disk(10.0, 1.0).unwrap();
        assert!(erode(&d, 10.5).is_empty());
        assert!(!erode(&d, 8.0).is_empty());
    }

    #[test]
    fn eroded_disk_area() {
        let d = shapes::disk(10.0, 1.0).unwrap();
        let e = erode(&d, 3.0);
        let expect = core::f64::consts::PI * 49.0;
        // two-cell ring around a radius-7 circle
        let ring = 2.0 * 2.0 * core::f64::consts::PI * 7.0;
        assert!((e.measure() - expect).abs() <= ring, "{} vs {}", e.measure(), expect);
    }

    #[test]
    fn dilation_never_clips() {
        let d = shapes::disk(5.0, 1.0).unwrap();
        let big = dilate(&d, 7.0);
        assert!(big.lattice().dims()[0] > d.lattice().dims()[0]);
        let bb = big.bounding_box().unwrap();
        assert!(bb.0[0] >= 1 && bb.1[0] + 2 <= big.lattice().dims()[0]);
        let expect = core::f64::consts::PI * 144.0;
        assert!((big.measure() - expect).abs() <= 2.0 * 2.0 * core::f64::consts::PI * 12.0);
    }

    #[test]
    fn eta_of_zero_delta() {
        let d = shapes::disk(8.0, 1.0).unwrap();
        assert_eq!(eta_delta(&d, 0.0).unwrap(), 0.0);
        assert_eq!(eta_delta(&d, 9.0), Err(Error::ErosionEmpty { delta: 9.0 }));
    }
}
