use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Geometry of a regular lattice of cubical cells.
///
/// Cells are stored with axis 0 varying fastest. A 2D lattice keeps
/// `dims[2] == 1`. Cell `(i, j, k)` has its lower corner at
/// `origin + h·(i, j, k)` and its center half a cell further.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    dims: [usize; 3],
    ndim: usize,
    h: f64,
    origin: [f64; 3],
}

impl Lattice {
    pub fn new(dims: &[usize], h: f64, origin: &[f64]) -> Result<Self> {
        let ndim = dims.len();
        if !(2..=3).contains(&ndim) {
            return Err(Error::InvalidLattice("dimension must be 2 or 3"));
        }
        if origin.len() != ndim {
            return Err(Error::InvalidLattice("origin length differs from dimension"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidLattice("every axis needs at least one cell"));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidCellSize(h));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidLattice("origin must be finite"));
        }
        let mut d = [1; 3];
        let mut o = [0.0; 3];
        d[..ndim].copy_from_slice(dims);
        o[..ndim].copy_from_slice(origin);
        Ok(Lattice { dims: d, ndim, h, origin: o })
    }

    #[inline]
    pub fn ndim(&self) -> usize {
        self.ndim
    }

    /// Per-axis cell counts; the unused third axis of a 2D lattice is 1.
    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical measure of one cell, `hⁿ`.
    #[inline]
    pub fn cell_measure(&self) -> f64 {
        powi(self.h, self.ndim as i32)
    }

    #[inline]
    pub fn index(&self, c: [usize; 3]) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let r = idx / self.dims[0];
        [x, r % self.dims[1], r / self.dims[1]]
    }

    /// Index of the cell at signed coordinates, if it lies on the lattice.
    #[inline]
    pub fn checked_index(&self, c: [i64; 3]) -> Option<usize> {
        for (a, &v) in c.iter().enumerate() {
            if v < 0 || v as usize >= self.dims[a] {
                return None;
            }
        }
        Some(self.index([c[0] as usize, c[1] as usize, c[2] as usize]))
    }

    /// Physical center of a cell. Unused coordinates are zero.
    pub fn center(&self, idx: usize) -> [f64; 3] {
        let c = self.coords(idx);
        let mut p = [0.0; 3];
        for a in 0..self.ndim {
            p[a] = self.origin[a] + (c[a] as f64 + 0.5) * self.h;
        }
        p
    }

    /// Cell containing a physical point, if any.
    pub fn cell_of_point(&self, p: &[f64]) -> Option<usize> {
        let mut c = [0i64; 3];
        for a in 0..self.ndim {
            let t = libm::floor((p[a] - self.origin[a]) / self.h);
            if !t.is_finite() {
                return None;
            }
            c[a] = t as i64;
        }
        self.checked_index(c)
    }

    /// Same cell size, `k` more cells on every side of every active axis.
    pub fn padded(&self, k: usize) -> Lattice {
        let mut out = *self;
        for a in 0..self.ndim {
            out.dims[a] += 2 * k;
            out.origin[a] -= k as f64 * self.h;
        }
        out
    }

    /// Whether the cell lies on the outermost layer of an active axis.
    pub fn on_rim(&self, idx: usize) -> bool {
        let c = self.coords(idx);
        (0..self.ndim).any(|a| c[a] == 0 || c[a] + 1 == self.dims[a])
    }

    /// Squared distance in cell units between two cell centers.
    #[inline]
    pub fn cell_dist2(&self, a: usize, b: usize) -> u64 {
        let p = self.coords(a);
        let q = self.coords(b);
        let mut s = 0u64;
        for ax in 0..3 {
            let d = p[ax].abs_diff(q[ax]) as u64;
            s += d * d;
        }
        s
    }

    /// `(r/h)²`, snapped to the nearest integer when within 1e-9 of it so
    /// radii that are whole multiples of `h` compare exactly against
    /// integer squared cell distances.
    pub(crate) fn radius_sq_cells(&self, r: f64) -> f64 {
        let t = r / self.h;
        let t2 = t * t;
        let k = libm::round(t2);
        if libm::fabs(t2 - k) <= 1e-9 * if t2 > 1.0 { t2 } else { 1.0 } {
            k
        } else {
            t2
        }
    }

    fn same_geometry(&self, other: &Lattice) -> bool {
        self.dims == other.dims
            && self.ndim == other.ndim
            && self.h == other.h
            && self.origin == other.origin
    }
}

pub(crate) fn powi(x: f64, n: i32) -> f64 {
    let mut r = 1.0;
    for _ in 0..n {
        r *= x;
    }
    r
}

/// A bounded set sampled at lattice cell centers.
///
/// A cell is in the set when its center lies in it. The outer one-cell
/// rim of the lattice is always outside the set, so the complement is
/// never empty inside the array.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSet {
    lattice: Lattice,
    mask: Vec<bool>,
}

impl GridSet {
    /// Wraps a mask, rejecting masks that touch the rim.
    pub fn new(lattice: Lattice, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != lattice.len() {
            return Err(Error::InvalidLattice("mask length differs from cell count"));
        }
        if mask.iter().enumerate().any(|(i, &m)| m && lattice.on_rim(i)) {
            return Err(Error::RimTouched);
        }
        Ok(GridSet { lattice, mask })
    }

    /// Wraps a mask, adding a one-cell empty rim first if the mask
    /// touches the border.
    pub fn padded_if_needed(lattice: Lattice, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != lattice.len() {
            return Err(Error::InvalidLattice("mask length differs from cell count"));
        }
        if !mask.iter().enumerate().any(|(i, &m)| m && lattice.on_rim(i)) {
            return Ok(GridSet { lattice, mask });
        }
        let set = GridSet { lattice, mask };
        Ok(set.pad(1))
    }

    pub fn empty(lattice: Lattice) -> Self {
        GridSet { mask: alloc::vec![false; lattice.len()], lattice }
    }

    /// Builds a set from a membership test on cell centers. Rim cells are
    /// never included.
    pub fn from_fn(lattice: Lattice, mut inside: impl FnMut([f64; 3]) -> bool) -> Self {
        let mask = (0..lattice.len())
            .map(|i| !lattice.on_rim(i) && inside(lattice.center(i)))
            .collect();
        GridSet { lattice, mask }
    }

    pub(crate) fn from_parts_unchecked(lattice: Lattice, mask: Vec<bool>) -> Self {
        debug_assert_eq!(mask.len(), lattice.len());
        GridSet { lattice, mask }
    }

    #[inline]
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    #[inline]
    pub fn ndim(&self) -> usize {
        self.lattice.ndim
    }

    #[inline]
    pub fn h(&self) -> f64 {
        self.lattice.h
    }

    #[inline]
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    #[inline]
    pub fn contains(&self, idx: usize) -> bool {
        self.mask[idx]
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Lebesgue measure at grid resolution: cell count times `hⁿ`.
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.lattice.cell_measure()
    }

    /// Indices of the cells in the set, ascending.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }

    /// Inclusive per-axis cell index bounds of the set.
    pub fn bounding_box(&self) -> Option<([usize; 3], [usize; 3])> {
        let mut lo = [usize::MAX; 3];
        let mut hi = [0; 3];
        let mut any = false;
        for i in self.cells() {
            any = true;
            let c = self.lattice.coords(i);
            for a in 0..3 {
                lo[a] = lo[a].min(c[a]);
                hi[a] = hi[a].max(c[a]);
            }
        }
        any.then_some((lo, hi))
    }

    /// Copy on a lattice with `k` extra empty cells on every side.
    pub fn pad(&self, k: usize) -> GridSet {
        let lat = self.lattice.padded(k);
        let mut mask = alloc::vec![false; lat.len()];
        let off = [k, k, if self.ndim() == 3 { k } else { 0 }];
        for i in self.cells() {
            let c = self.lattice.coords(i);
            mask[lat.index([c[0] + off[0], c[1] + off[1], c[2] + off[2]])] = true;
        }
        GridSet { lattice: lat, mask }
    }

    fn check_same(&self, other: &GridSet) -> Result<()> {
        if self.lattice.same_geometry(&other.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }

    fn zip_with(&self, other: &GridSet, f: impl Fn(bool, bool) -> bool) -> Result<GridSet> {
        self.check_same(other)?;
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridSet { lattice: self.lattice, mask })
    }

    pub fn union(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &GridSet) -> Result<GridSet> {
        self.zip_with(other, |a, b| a != b)
    }

    pub fn is_subset_of(&self, other: &GridSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b))
    }

    /// Cells of `self` that are missing from `other`.
    pub fn cells_outside(&self, other: &GridSet) -> Result<Vec<usize>> {
        self.check_same(other)?;
        Ok(self
            .mask
            .iter()
            .zip(&other.mask)
            .enumerate()
            .filter(|(_, (&a, &b))| a && !b)
            .map(|(i, _)| i)
            .collect())
    }
}

/// Physical distance from every cell center to a source region.
///
/// Values are stored as squared distances in cell units, which are exact
/// integers; [`DistanceField::value`] converts to physical length.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceField {
    lattice: Lattice,
    sq: Vec<u64>,
}

impl DistanceField {
    pub(crate) fn from_squared(lattice: Lattice, sq: Vec<u64>) -> Self {
        DistanceField { lattice, sq }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Squared distance in units of cells.
    #[inline]
    pub fn squared_cells(&self, idx: usize) -> u64 {
        self.sq[idx]
    }

    pub fn squared_cells_slice(&self) -> &[u64] {
        &self.sq
    }

    /// Physical distance at a cell.
    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        libm::sqrt(self.sq[idx] as f64) * self.lattice.h
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.sq.len()).map(|i| self.value(i)).collect()
    }

    /// Largest distance over the cells selected by `mask`.
    pub fn max_over(&self, mask: &[bool]) -> Option<f64> {
        self.sq
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(&s, _)| s)
            .max()
            .map(|s| libm::sqrt(s as f64) * self.lattice.h)
    }
}

/// A ball `B(center, radius)` in physical coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    center: [f64; 3],
    radius: f64,
}

impl Ball {
    pub fn new(center: &[f64], radius: f64) -> Result<Self> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter { name: "radius", value: radius });
        }
        let mut c = [0.0; 3];
        c[..center.len().min(3)].copy_from_slice(&center[..center.len().min(3)]);
        Ok(Ball { center: c, radius })
    }

    pub fn center(&self) -> [f64; 3] {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Closed-ball membership.
    pub fn contains(&self, p: &[f64]) -> bool {
        let mut s = 0.0;
        for (a, &x) in p.iter().enumerate().take(3) {
            let d = x - self.center[a];
            s += d * d;
        }
        s <= self.radius * self.radius
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(nx: usize, ny: usize) -> Lattice {
        Lattice::new(&[nx, ny], 1.0, &[0.0, 0.0]).unwrap()
    }

    #[test]
    fn index_round_trip() {
        let l = Lattice::new(&[4, 5, 6], 0.5, &[0.0, 0.0, 0.0]).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.index(l.coords(i)), i);
        }
    }

    #[test]
    fn rejects_bad_lattices() {
        assert!(Lattice::new(&[3], 1.0, &[0.0]).is_err());
        assert!(Lattice::new(&[3, 0], 1.0, &[0.0, 0.0]).is_err());
        assert_eq!(Lattice::new(&[3, 3], 0.0, &[0.0, 0.0]), Err(Error::InvalidCellSize(0.0)));
        assert!(Lattice::new(&[3, 3], f64::NAN, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn rim_is_enforced_or_padded() {
        let l = lat(3, 3);
        let mut m = alloc::vec![false; 9];
        m[0] = true;
        assert_eq!(GridSet::new(l, m.clone()), Err(Error::RimTouched));
        let s = GridSet::padded_if_needed(l, m).unwrap();
        assert_eq!(s.lattice().dims(), [5, 5, 1]);
        assert_eq!(s.lattice().origin(), [-1.0, -1.0, 0.0]);
        assert_eq!(s.count(), 1);
        assert!(s.contains(s.lattice().index([1, 1, 0])));
    }

    #[test]
    fn measure_counts_cells() {
        let l = Lattice::new(&[5, 5], 0.5, &[0.0, 0.0]).unwrap();
        let s = GridSet::from_fn(l, |_| true);
        assert_eq!(s.count(), 9);
        assert_eq!(s.measure(), 9.0 * 0.25);
    }

    #[test]
    fn point_lookup() {
        let l = Lattice::new(&[4, 4], 0.25, &[-0.5, -0.5]).unwrap();
        assert_eq!(l.cell_of_point(&[-0.5, -0.5]), Some(0));
        assert_eq!(l.cell_of_point(&[0.49, -0.26]), Some(l.index([3, 0, 0])));
        assert_eq!(l.cell_of_point(&[0.5, 0.0]), None);
    }

    #[test]
    fn radius_snap() {
        let l = Lattice::new(&[4, 4], 0.1, &[0.0, 0.0]).unwrap();
        assert_eq!(l.radius_sq_cells(0.3), 9.0);
        assert!(l.radius_sq_cells(0.25) > 6.2 && l.radius_sq_cells(0.25) < 6.3);
    }

    #[test]
    fn ball_is_closed() {
        let b = Ball::new(&[0.0, 0.0], 1.0).unwrap();
        assert!(b.contains(&[1.0, 0.0]));
        assert!(!b.contains(&[1.0, 0.01]));
        assert!(Ball::new(&[0.0], -1.0).is_err());
    }
}
