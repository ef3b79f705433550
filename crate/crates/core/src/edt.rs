//! Exact Euclidean distance transform.
//!
//! Squared distances between cell centers are computed with the separable
//! lower-envelope-of-parabolas algorithm of Felzenszwalb and Huttenlocher,
//! one pass per axis. All intermediate values are integers held in `f64`,
//! so the result is exact.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{DistanceField, GridSet, Lattice};

/// Distance from every cell center to the nearest cell center of the set
/// (`from_complement = false`) or of its complement within the lattice
/// (`from_complement = true`).
pub fn distance_transform(set: &GridSet, from_complement: bool) -> Result<DistanceField> {
    let source: Vec<bool> = if from_complement {
        set.mask().iter().map(|&m| !m).collect()
    } else {
        set.mask().to_vec()
    };
    let sq = squared_distances(set.lattice(), &source).ok_or(Error::EmptySource)?;
    Ok(DistanceField::from_squared(*set.lattice(), sq))
}

/// Squared cell-unit distance to the nearest `true` cell of `source`.
/// `None` when the source has no cells.
pub(crate) fn squared_distances(lattice: &Lattice, source: &[bool]) -> Option<Vec<u64>> {
    if !source.iter().any(|&s| s) {
        return None;
    }
    let f: Vec<f64> = source.iter().map(|&s| if s { 0.0 } else { f64::INFINITY }).collect();
    Some(lower_envelope(lattice, f).into_iter().map(|v| v as u64).collect())
}

/// `min_c f(c) + |x − c|²` over all cells `c`, with `|·|` in cell units.
/// Infinite entries of `f` take no part.
pub(crate) fn lower_envelope(lattice: &Lattice, mut f: Vec<f64>) -> Vec<f64> {
    let dims = lattice.dims();
    let strides = [1, dims[0], dims[0] * dims[1]];
    let longest = dims.iter().copied().max().unwrap_or(1);
    let mut line = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut env = Envelope::with_capacity(longest);

    for axis in 0..lattice.ndim() {
        let n = dims[axis];
        if n == 1 {
            continue;
        }
        let stride = strides[axis];
        // Enumerate the start of every line along `axis`.
        for start in 0..lattice.len() {
            let c = lattice.coords(start);
            if c[axis] != 0 {
                continue;
            }
            for (k, v) in line[..n].iter_mut().enumerate() {
                *v = f[start + k * stride];
            }
            env.transform(&line[..n], &mut out[..n]);
            for (k, v) in out[..n].iter().enumerate() {
                f[start + k * stride] = *v;
            }
        }
    }
    f
}

struct Envelope {
    v: Vec<usize>,
    z: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Envelope { v: vec![0; n], z: vec![0.0; n + 1] }
    }

    /// 1D lower envelope of the parabolas `f(p) + (q − p)²`.
    /// Infinite samples contribute no parabola.
    fn transform(&mut self, f: &[f64], d: &mut [f64]) {
        let n = f.len();
        let mut k: isize = -1;
        for q in 0..n {
            if !f[q].is_finite() {
                continue;
            }
            let fq = f[q] + (q * q) as f64;
            loop {
                if k < 0 {
                    k = 0;
                    self.v[0] = q;
                    self.z[0] = f64::NEG_INFINITY;
                    self.z[1] = f64::INFINITY;
                    break;
                }
                let p = self.v[k as usize];
                let fp = f[p] + (p * p) as f64;
                let s = (fq - fp) / (2.0 * (q as f64 - p as f64));
                if s <= self.z[k as usize] {
                    k -= 1;
                    continue;
                }
                k += 1;
                self.v[k as usize] = q;
                self.z[k as usize] = s;
                self.z[k as usize + 1] = f64::INFINITY;
                break;
            }
        }
        if k < 0 {
            d.fill(f64::INFINITY);
            return;
        }
        let mut j = 0usize;
        for (q, out) in d.iter_mut().enumerate() {
            while self.z[j + 1] < q as f64 {
                j += 1;
            }
            let p = self.v[j];
            let dq = q as f64 - p as f64;
            *out = dq * dq + f[p];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(lat: &Lattice, source: &[bool]) -> Vec<u64> {
        let src: Vec<usize> = (0..lat.len()).filter(|&i| source[i]).collect();
        (0..lat.len())
            .map(|i| src.iter().map(|&s| lat.cell_dist2(i, s)).min().unwrap())
            .collect()
    }

    #[test]
    fn single_cell_corner_distance() {
        let lat = Lattice::new(&[5, 5], 1.0, &[0.0, 0.0]).unwrap();
        let mut m = vec![false; 25];
        m[lat.index([2, 2, 0])] = true;
        let set = GridSet::new(lat, m).unwrap();
        let df = distance_transform(&set, false).unwrap();
        assert_eq!(df.value(0), 2.0 * core::f64::consts::SQRT_2);
        assert_eq!(df.value(lat.index([2, 2, 0])), 0.0);
    }

    #[test]
    fn zero_on_source() {
        let lat = Lattice::new(&[6, 6], 0.5, &[0.0, 0.0]).unwrap();
        let set = GridSet::from_fn(lat, |_| true);
        let df = distance_transform(&set, false).unwrap();
        for i in set.cells() {
            assert_eq!(df.value(i), 0.0);
        }
    }

    #[test]
    fn empty_source_is_an_error() {
        let lat = Lattice::new(&[4, 4], 1.0, &[0.0, 0.0]).unwrap();
        assert_eq!(distance_transform(&GridSet::empty(lat), false), Err(Error::EmptySource));
    }

    #[test]
    fn matches_brute_force_3d() {
        let lat = Lattice::new(&[7, 5, 6], 1.0, &[0.0, 0.0, 0.0]).unwrap();
        let mut state = 0x1234_5678_u64;
        let source: Vec<bool> = (0..lat.len())
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (state >> 60) < 2
            })
            .collect();
        assert_eq!(squared_distances(&lat, &source).unwrap(), brute(&lat, &source));
    }

    #[test]
    fn single_source_in_long_line() {
        let lat = Lattice::new(&[40, 3], 1.0, &[0.0, 0.0]).unwrap();
        let mut s = vec![false; lat.len()];
        s[lat.index([39, 2, 0])] = true;
        assert_eq!(squared_distances(&lat, &s).unwrap(), brute(&lat, &s));
    }
}
