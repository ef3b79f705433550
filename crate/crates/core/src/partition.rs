//! Whitney-type good partitions.
//!
//! Construction follows the classical cube argument. With `E* = E ⊖ B(0, δ)`
//! and lattice cubes of side `ℓ ≤ δ/√n` (so each cube has diameter at most
//! δ), let `Q_1, …, Q_M` be the cubes meeting `E*`, in lexicographic
//! lattice order. Region `k` is
//!
//! ```text
//! R_k = [B(Q_k, r) ∩ E] ∖ [R_1 ∪ … ∪ R_{k-1} ∪ Q_{k+1} ∪ … ∪ Q_M]
//! ```
//!
//! with fattening radius `r = δ` (sets stable under opening by δ-balls) or
//! `r = η_δ` (general sets). Each region contains its own cube, so
//! `|R_k| ≥ ℓⁿ`, and `diam(R_k) ≤ √n ℓ + 2r`.
//!
//! Cubes are blocks of `m = ⌊δ/(√n h)⌋` cells anchored at lattice index 0.
//! Cells never sit on a cube face, so the cubes are exactly disjoint.

use alloc::vec;
use alloc::vec::Vec;

use crate::bounds::volume_floor;
use crate::error::{Error, Result};
use crate::grid::{powi, GridSet, Lattice};
use crate::measure::diameter;
use crate::morphology::{erode, eta_delta, opening_stability_radius};

/// One region of a partition.
#[derive(Clone, Debug, PartialEq)]
pub struct Region {
    /// Label used in [`Partition::labels`], starting at 1.
    pub id: u32,
    pub cells: usize,
    pub measure: f64,
    pub diameter: f64,
    /// Position of the seed cube in the construction order.
    pub seed_index: usize,
    /// Lattice index of the seed cube (cell index divided by the cube
    /// side in cells, per axis).
    pub seed_cube: [usize; 3],
}

/// Labeling of a set's cells into regions.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    /// The partitioned set.
    pub base: GridSet,
    /// Region id per lattice cell; 0 outside `base`.
    pub labels: Vec<u32>,
    pub regions: Vec<Region>,
    /// δ used in the construction.
    pub delta: f64,
    /// Snapped cube side `ℓ'`.
    pub ell: f64,
    /// Radius the cubes were fattened by (δ or η_δ).
    pub fattening: f64,
    /// Measure removed from the originally partitioned set by
    /// [`restrict_partition`]; lowers the guaranteed region measure.
    pub removed_measure: f64,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Cells carrying the given label.
    pub fn cells_of(&self, id: u32) -> Vec<usize> {
        self.labels.iter().enumerate().filter(|(_, &l)| l == id).map(|(i, _)| i).collect()
    }

    pub fn region_measures(&self) -> Vec<f64> {
        self.regions.iter().map(|r| r.measure).collect()
    }

    /// Upper bound on region diameters this construction guarantees:
    /// `δ + 2r` for fattening radius `r`.
    pub fn diameter_cap(&self) -> f64 {
        self.delta + 2.0 * self.fattening
    }
}

/// Cube side in cells for a given δ: the largest `m` with `m h ≤ δ/√n`.
pub fn cube_cells(lat: &Lattice, delta: f64) -> usize {
    let t = delta / (libm::sqrt(lat.ndim() as f64) * lat.h());
    libm::floor(t + 1e-9) as usize
}

fn resolution_floor(set: &GridSet, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter { name: "delta", value: delta });
    }
    let floor = 4.0 * set.h();
    if delta < floor * (1.0 - 1e-12) {
        return Err(Error::DeltaBelowResolution { delta, floor });
    }
    Ok(())
}

/// Good partition of a set stable under opening by δ-balls: every region
/// has measure at least `ℓ'ⁿ` and diameter at most `δ + 2 max(δ, η_δ)`
/// (plus cell extent), which is `3δ` up to a fraction of a cell.
pub fn good_partition(set: &GridSet, delta: f64) -> Result<Partition> {
    resolution_floor(set, delta)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let rho = opening_stability_radius(set);
    if delta > rho {
        return Err(Error::DeltaExceedsStability { delta, stability_radius: rho });
    }
    // Stability puts every point within δ of E* in the continuum; on the
    // lattice a few cells can sit up to about half a cell diagonal
    // farther, so fatten by the measured distance when it is larger.
    let eta = eta_delta(set, delta)?;
    build(set, delta, eta.max(delta))
}

/// Partition of an arbitrary set with `δ < sup dist(x, E^c)`, fattening
/// by `η_δ` instead of δ; diameters are bounded by `δ + 2η_δ`.
pub fn partition_with_eta(set: &GridSet, delta: f64) -> Result<Partition> {
    resolution_floor(set, delta)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let inradius = crate::morphology::inradius(set);
    if delta >= inradius {
        return Err(Error::DeltaExceedsInradius { delta, inradius });
    }
    let eta = eta_delta(set, delta)?;
    build(set, delta, eta.max(delta))
}

fn build(set: &GridSet, delta: f64, fattening: f64) -> Result<Partition> {
    let lat = *set.lattice();
    let ndim = lat.ndim();
    let m = cube_cells(&lat, delta);
    debug_assert!(m >= 1);
    let core = erode(set, delta);
    if core.is_empty() {
        return Err(Error::ErosionEmpty { delta });
    }

    // Seed cubes: blocks meeting E*, in lexicographic lattice order.
    let mut cubes: Vec<[usize; 3]> = core
        .cells()
        .map(|i| {
            let c = lat.coords(i);
            [c[0] / m, c[1] / m, c[2] / m]
        })
        .collect();
    cubes.sort_unstable();
    cubes.dedup();

    let dims = lat.dims();
    let mut labels = vec![0u32; lat.len()];
    let block_range = |q: &[usize; 3], a: usize| -> (usize, usize) {
        if a >= ndim {
            return (0, 1);
        }
        (q[a] * m, ((q[a] + 1) * m).min(dims[a]))
    };
    // Every cube belongs to its own region.
    for (k, q) in cubes.iter().enumerate() {
        let (x0, x1) = block_range(q, 0);
        let (y0, y1) = block_range(q, 1);
        let (z0, z1) = block_range(q, 2);
        for z in z0..z1 {
            for y in y0..y1 {
                for x in x0..x1 {
                    let i = lat.index([x, y, z]);
                    debug_assert!(set.contains(i), "seed cube leaves the set");
                    labels[i] = k as u32 + 1;
                }
            }
        }
    }
    // Remaining cells go to the first cube whose fattening reaches them.
    let r2 = lat.radius_sq_cells(fattening);
    let reach = libm::floor(libm::sqrt(r2) + 1e-9) as usize;
    for (k, q) in cubes.iter().enumerate() {
        let mut lo = [0usize; 3];
        let mut hi = [1usize; 3];
        let mut blo = [0usize; 3];
        let mut bhi = [1usize; 3];
        for a in 0..ndim {
            let (b0, b1) = block_range(q, a);
            blo[a] = b0;
            bhi[a] = b1;
            lo[a] = b0.saturating_sub(reach);
            hi[a] = (b1 + reach).min(dims[a]);
        }
        for z in lo[2]..hi[2] {
            for y in lo[1]..hi[1] {
                for x in lo[0]..hi[0] {
                    let i = lat.index([x, y, z]);
                    if labels[i] != 0 || !set.contains(i) {
                        continue;
                    }
                    let c = [x, y, z];
                    let mut d2 = 0u64;
                    for a in 0..ndim {
                        let gap = if c[a] < blo[a] {
                            blo[a] - c[a]
                        } else if c[a] >= bhi[a] {
                            c[a] + 1 - bhi[a]
                        } else {
                            0
                        } as u64;
                        d2 += gap * gap;
                    }
                    if d2 as f64 <= r2 {
                        labels[i] = k as u32 + 1;
                    }
                }
            }
        }
    }
    let uncovered = set.cells().filter(|&i| labels[i] == 0).count();
    if uncovered > 0 {
        return Err(Error::UncoveredCells { count: uncovered });
    }
    let regions = collect_regions(&lat, &labels, cubes.len(), |k| (k, cubes[k]))?;
    Ok(Partition {
        base: set.clone(),
        labels,
        regions,
        delta,
        ell: m as f64 * lat.h(),
        fattening,
        removed_measure: 0.0,
    })
}

fn collect_regions(
    lat: &Lattice,
    labels: &[u32],
    count: usize,
    seed: impl Fn(usize) -> (usize, [usize; 3]),
) -> Result<Vec<Region>> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 {
            members[l as usize - 1].push(i);
        }
    }
    let vol = lat.cell_measure();
    members
        .iter()
        .enumerate()
        .map(|(k, cells)| {
            let (seed_index, seed_cube) = seed(k);
            Ok(Region {
                id: k as u32 + 1,
                cells: cells.len(),
                measure: cells.len() as f64 * vol,
                diameter: diameter(cells, lat)?,
                seed_index,
                seed_cube,
            })
        })
        .collect()
}

/// `{R ∩ E_sub : R ∈ P}` with empty regions dropped and the rest
/// renumbered in their original order.
pub fn restrict_partition(p: &Partition, sub: &GridSet) -> Result<Partition> {
    let outside = sub.cells_outside(&p.base)?;
    if !outside.is_empty() {
        return Err(Error::NotSubset { offending: outside });
    }
    let lat = *p.base.lattice();
    let mut remap = vec![0u32; p.regions.len() + 1];
    let mut kept: Vec<usize> = Vec::new();
    let mut counts = vec![0usize; p.regions.len() + 1];
    for (i, &l) in p.labels.iter().enumerate() {
        if l != 0 && sub.contains(i) {
            counts[l as usize] += 1;
        }
    }
    for (k, r) in p.regions.iter().enumerate() {
        if counts[r.id as usize] > 0 {
            kept.push(k);
            remap[r.id as usize] = kept.len() as u32;
        }
    }
    let labels: Vec<u32> = p
        .labels
        .iter()
        .enumerate()
        .map(|(i, &l)| if l != 0 && sub.contains(i) { remap[l as usize] } else { 0 })
        .collect();
    let regions = collect_regions(&lat, &labels, kept.len(), |k| {
        let r = &p.regions[kept[k]];
        (r.seed_index, r.seed_cube)
    })?;
    let removed = p.base.measure() - sub.measure();
    Ok(Partition {
        base: sub.clone(),
        labels,
        regions,
        delta: p.delta,
        ell: p.ell,
        fattening: p.fattening,
        removed_measure: p.removed_measure + removed,
    })
}

/// Measured values and verdicts for one region.
#[derive(Clone, Debug, PartialEq)]
pub struct RegionCheck {
    pub id: u32,
    pub measure: f64,
    pub diameter: f64,
    pub measure_ok: bool,
    pub diameter_ok: bool,
}

/// Result of checking the good-partition inequalities
/// `|R| ≥ δⁿ/n^{n/2}` and `diam(R) ≤ cap` on every region.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodPartitionCertificate {
    pub delta: f64,
    /// `δⁿ/n^{n/2}`.
    pub volume_floor: f64,
    /// `ℓ'ⁿ`, the measure of one snapped seed cube.
    pub snapped_floor: f64,
    /// Measure removed by restriction, subtracted from the floor.
    pub removed_measure: f64,
    /// `volume_floor − removed_measure`.
    pub effective_floor: f64,
    /// Allowance for snapping the cube side down to whole cells:
    /// `n (δ/√n)^{n−1} h`, a one-cell ring over half of the ideal cube's
    /// faces.
    pub measure_slack: f64,
    /// `δ + 2r` with `r` the fattening radius (3δ for good partitions).
    pub diam_cap: f64,
    /// `(√n + 1) h`.
    pub diameter_slack: f64,
    /// Labels agree with the base set and region records.
    pub labeling_consistent: bool,
    pub regions: Vec<RegionCheck>,
    pub verdict: bool,
}

impl GoodPartitionCertificate {
    pub fn min_measure(&self) -> f64 {
        self.regions.iter().map(|r| r.measure).fold(f64::INFINITY, f64::min)
    }

    pub fn max_diameter(&self) -> f64 {
        self.regions.iter().map(|r| r.diameter).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.regions.iter().filter(|r| !(r.measure_ok && r.diameter_ok)).count()
    }
}

fn labeling_consistent(p: &Partition) -> bool {
    if p.labels.len() != p.base.mask().len() {
        return false;
    }
    let mut counts = vec![0usize; p.regions.len() + 1];
    for (i, &l) in p.labels.iter().enumerate() {
        let inside = p.base.contains(i);
        if inside != (l != 0) || l as usize > p.regions.len() {
            return false;
        }
        counts[l as usize] += 1;
    }
    let total: usize = p.regions.iter().map(|r| r.cells).sum();
    total == p.base.count()
        && p.regions.iter().enumerate().all(|(k, r)| r.id as usize == k + 1 && counts[k + 1] == r.cells)
}

/// Checks the good-partition inequalities for δ.
pub fn certify_good(p: &Partition, delta: f64) -> GoodPartitionCertificate {
    let lat = p.base.lattice();
    let n = lat.ndim();
    let h = lat.h();
    let floor = volume_floor(n, delta);
    let side = delta / libm::sqrt(n as f64);
    let measure_slack = n as f64 * powi(side, n as i32 - 1) * h;
    let diameter_slack = (libm::sqrt(n as f64) + 1.0) * h;
    let diam_cap = delta + 2.0 * p.fattening.max(delta);
    let effective_floor = floor - p.removed_measure;
    let consistent = labeling_consistent(p);
    let regions: Vec<RegionCheck> = p
        .regions
        .iter()
        .map(|r| RegionCheck {
            id: r.id,
            measure: r.measure,
            diameter: r.diameter,
            measure_ok: r.measure >= effective_floor - measure_slack,
            diameter_ok: r.diameter <= diam_cap + diameter_slack,
        })
        .collect();
    let verdict = consistent
        && effective_floor > 0.0
        && !regions.is_empty()
        && regions.iter().all(|r| r.measure_ok && r.diameter_ok);
    GoodPartitionCertificate {
        delta,
        volume_floor: floor,
        snapped_floor: powi(p.ell, n as i32),
        removed_measure: p.removed_measure,
        effective_floor,
        measure_slack,
        diam_cap,
        diameter_slack,
        labeling_consistent: consistent,
        regions,
        verdict,
    }
}

/// Result of checking that a partitioned set `A` occupies most of `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlmostPartitionCertificate {
    pub alpha: f64,
    pub measure_a: f64,
    pub measure_e: f64,
    /// `|A| / |E|`.
    pub coverage_ratio: f64,
    pub subset: bool,
    /// `A ⊆ E` and `|A| ≥ (1 − α)|E|`.
    pub verdict: bool,
    /// `A ⊆ E` and `|E ∖ A| ≥ (1 − α)|E|`, the same test with `|E ∖ A|`
    /// in place of `|A|`; reported for comparison only.
    pub literal_verdict: bool,
}

pub fn certify_almost(p: &Partition, e: &GridSet, alpha: f64) -> Result<AlmostPartitionCertificate> {
    let subset = p.base.is_subset_of(e)?;
    let measure_a = p.base.measure();
    let measure_e = e.measure();
    let ratio = if measure_e > 0.0 { measure_a / measure_e } else { 0.0 };
    let verdict = subset && measure_a >= (1.0 - alpha) * measure_e;
    let literal = subset && (measure_e - measure_a) >= (1.0 - alpha) * measure_e;
    Ok(AlmostPartitionCertificate {
        alpha,
        measure_a,
        measure_e,
        coverage_ratio: ratio,
        subset,
        verdict,
        literal_verdict: literal,
    })
}
