//! Perimeter and diameter estimators.
//!
//! Perimeter is a Cauchy–Crofton line count: every pair of cells joined
//! by a neighborhood vector `e_k` whose membership differs is a crossing
//! of the boundary by a line in direction `e_k`, weighted by the density
//! and angular share of that line family. In 2D the 16-neighborhood is
//! used (eight undirected directions); in 3D the 26-neighborhood, with
//! one weight per symmetry class fitted so that the area of a plane is
//! within a few percent of exact for every orientation.
//!
//! Cells outside the lattice count as outside the set.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice};

/// Undirected 16-neighborhood direction vectors, by increasing angle.
pub const DIRECTIONS_2D: [[i64; 2]; 8] =
    [[1, 0], [2, 1], [1, 1], [1, 2], [0, 1], [-1, 2], [-1, 1], [-2, 1]];

/// Undirected 26-neighborhood direction vectors.
pub const DIRECTIONS_3D: [[i64; 3]; 13] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 0, 1],
    [1, 0, -1],
    [0, 1, 1],
    [0, 1, -1],
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [-1, 1, 1],
];

/// Class weights of the 26-neighborhood in units of `h²`.
const WEIGHTS_3D: (f64, f64, f64) = (0.147_891_07, 0.124_207_54, 0.077_534_29);

/// Neighborhood system with its Cauchy–Crofton edge weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CroftonWeights {
    pub offsets: Vec<[i64; 3]>,
    /// Physical weight per cut edge of each offset, in units of
    /// `h^{n-1}`.
    pub weights: Vec<f64>,
}

impl CroftonWeights {
    pub fn for_lattice(lat: &Lattice) -> Self {
        let h = lat.h();
        if lat.ndim() == 2 {
            let angles: Vec<f64> =
                DIRECTIONS_2D.iter().map(|e| libm::atan2(e[1] as f64, e[0] as f64)).collect();
            let pi = core::f64::consts::PI;
            let n = angles.len();
            let mut offsets = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for k in 0..n {
                let prev = if k == 0 { angles[n - 1] - pi } else { angles[k - 1] };
                let next = if k + 1 == n { angles[0] + pi } else { angles[k + 1] };
                let span = 0.5 * (next - prev);
                let e = DIRECTIONS_2D[k];
                let len = libm::sqrt((e[0] * e[0] + e[1] * e[1]) as f64);
                offsets.push([e[0], e[1], 0]);
                weights.push(h * span / (2.0 * len));
            }
            CroftonWeights { offsets, weights }
        } else {
            // Per-class coefficients (axis, face diagonal, body diagonal)
            // minimizing the worst relative error of the plane area over
            // all plane orientations; the error stays within ±4.5%.
            let (a, b, c) = WEIGHTS_3D;
            let h2 = h * h;
            let offsets: Vec<[i64; 3]> = DIRECTIONS_3D.to_vec();
            let weights = offsets
                .iter()
                .map(|e| {
                    let nz = e.iter().filter(|&&v| v != 0).count();
                    h2 * match nz {
                        1 => a,
                        2 => b,
                        _ => c,
                    }
                })
                .collect();
            CroftonWeights { offsets, weights }
        }
    }

    /// Cut-edge counts per direction for a mask on `lat`.
    pub fn cut_counts(&self, lat: &Lattice, mask: &[bool]) -> Vec<u64> {
        let mut counts = alloc::vec![0u64; self.offsets.len()];
        for (i, &inside) in mask.iter().enumerate() {
            let c = lat.coords(i);
            let c = [c[0] as i64, c[1] as i64, c[2] as i64];
            for (k, e) in self.offsets.iter().enumerate() {
                // Each undirected pair is visited once from its first cell;
                // pairs reaching outside the lattice are visited from both
                // ends since the outside cell has no index.
                let fwd = lat.checked_index([c[0] + e[0], c[1] + e[1], c[2] + e[2]]);
                match fwd {
                    Some(j) => {
                        if inside != mask[j] {
                            counts[k] += 1;
                        }
                    }
                    None => {
                        if inside {
                            counts[k] += 1;
                        }
                    }
                }
                if inside && lat.checked_index([c[0] - e[0], c[1] - e[1], c[2] - e[2]]).is_none()
                {
                    counts[k] += 1;
                }
            }
        }
        counts
    }

    /// Weighted sum of cut counts, in a fixed order so equal count
    /// vectors give bit-identical lengths.
    pub fn length(&self, counts: &[u64]) -> f64 {
        self.weights.iter().zip(counts).map(|(w, &c)| w * c as f64).sum()
    }
}

/// Isotropic perimeter estimate of a set.
pub fn perimeter(set: &GridSet) -> f64 {
    perimeter_mask(set.lattice(), set.mask())
}

pub(crate) fn perimeter_mask(lat: &Lattice, mask: &[bool]) -> f64 {
    let w = CroftonWeights::for_lattice(lat);
    w.length(&w.cut_counts(lat, mask))
}

/// Diameter of a union of cells: the largest distance between two cell
/// centers plus `h·√n` for the extent of the cells themselves.
pub fn diameter(cells: &[usize], lat: &Lattice) -> Result<f64> {
    if cells.is_empty() {
        return Err(Error::EmptySet);
    }
    let pts: Vec<[i64; 3]> = cells
        .iter()
        .map(|&i| {
            let c = lat.coords(i);
            [c[0] as i64, c[1] as i64, c[2] as i64]
        })
        .collect();
    let d2 = if lat.ndim() == 2 { max_dist2_planar(pts) } else { max_dist2_spatial(pts) };
    let pad = libm::sqrt(lat.ndim() as f64);
    Ok((libm::sqrt(d2 as f64) + pad) * lat.h())
}

fn dist2(a: &[i64; 3], b: &[i64; 3]) -> u64 {
    let mut s = 0i64;
    for k in 0..3 {
        let d = a[k] - b[k];
        s += d * d;
    }
    s as u64
}

fn brute_max(pts: &[[i64; 3]]) -> u64 {
    let mut best = 0;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            best = best.max(dist2(a, b));
        }
    }
    best
}

fn cross(o: &[i64; 3], a: &[i64; 3], b: &[i64; 3]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Farthest pair over the convex hull (monotone chain).
fn max_dist2_planar(mut pts: Vec<[i64; 3]>) -> u64 {
    pts.sort_unstable();
    pts.dedup();
    if pts.len() <= 3 {
        return brute_max(&pts);
    }
    let mut hull: Vec<[i64; 3]> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    brute_max(&hull)
}

/// Keeps only the two x-extreme cells of every (y, z) row; interior
/// points of a row are never hull vertices.
fn max_dist2_spatial(mut pts: Vec<[i64; 3]>) -> u64 {
    pts.sort_unstable_by_key(|p| (p[2], p[1], p[0]));
    let mut ext: Vec<[i64; 3]> = Vec::new();
    let mut i = 0;
    while i < pts.len() {
        let mut j = i;
        while j + 1 < pts.len() && pts[j + 1][1] == pts[i][1] && pts[j + 1][2] == pts[i][2] {
            j += 1;
        }
        ext.push(pts[i]);
        if j != i {
            ext.push(pts[j]);
        }
        i = j + 1;
    }
    brute_max(&ext)
}
