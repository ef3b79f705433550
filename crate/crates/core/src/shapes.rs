//! Rasterized test shapes.
//!
//! Every shape is centered at the physical origin. The lattice covers the
//! shape's bounding box snapped outward to whole cells plus a one-cell
//! empty rim, so a disk of radius 1 at `h = 1/64` lives on a 130×130
//! lattice. Membership tests are strict (`|x| < R`): the sets are open.

use crate::error::{Error, Result};
use crate::grid::{GridSet, Lattice};

fn check_len(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value: v })
    }
}

/// Lattice covering `[lo, hi]` per axis with a one-cell rim.
pub fn lattice_for_box(lo: &[f64], hi: &[f64], h: f64) -> Result<Lattice> {
    check_len("h", h)?;
    let n = lo.len();
    let mut dims = [0usize; 3];
    let mut origin = [0.0; 3];
    for a in 0..n {
        let span = (hi[a] - lo[a]) / h;
        let cells = libm::ceil(span - 1e-9).max(1.0) as usize;
        let extra = cells as f64 * h - (hi[a] - lo[a]);
        dims[a] = cells + 2;
        origin[a] = lo[a] - 0.5 * extra - h;
    }
    Lattice::new(&dims[..n], h, &origin[..n])
}

/// Open ball of the given radius in `ndim` dimensions.
pub fn ball(radius: f64, h: f64, ndim: usize) -> Result<GridSet> {
    check_len("radius", radius)?;
    if !(2..=3).contains(&ndim) {
        return Err(Error::UnsupportedDimension(ndim));
    }
    let lo = [-radius; 3];
    let hi = [radius; 3];
    let lat = lattice_for_box(&lo[..ndim], &hi[..ndim], h)?;
    let r2 = radius * radius;
    Ok(GridSet::from_fn(lat, |p| p[0] * p[0] + p[1] * p[1] + p[2] * p[2] < r2))
}

/// Open disk of the given radius.
pub fn disk(radius: f64, h: f64) -> Result<GridSet> {
    ball(radius, h, 2)
}

/// Union of two open disks of equal radius with centers `separation`
/// apart on the x axis.
pub fn two_disks(radius: f64, separation: f64, h: f64) -> Result<GridSet> {
    check_len("radius", radius)?;
    check_len("separation", separation)?;
    let half = 0.5 * separation;
    let lat = lattice_for_box(&[-half - radius, -radius], &[half + radius, radius], h)?;
    let r2 = radius * radius;
    Ok(GridSet::from_fn(lat, |p| {
        let a = (p[0] + half) * (p[0] + half) + p[1] * p[1];
        let b = (p[0] - half) * (p[0] - half) + p[1] * p[1];
        a < r2 || b < r2
    }))
}

/// Two disks joined by a straight neck of width `neck` along the x axis.
pub fn dumbbell(radius: f64, separation: f64, neck: f64, h: f64) -> Result<GridSet> {
    check_len("radius", radius)?;
    check_len("separation", separation)?;
    check_len("neck", neck)?;
    let half = 0.5 * separation;
    let lat = lattice_for_box(&[-half - radius, -radius], &[half + radius, radius], h)?;
    let r2 = radius * radius;
    Ok(GridSet::from_fn(lat, |p| {
        let a = (p[0] + half) * (p[0] + half) + p[1] * p[1];
        let b = (p[0] - half) * (p[0] - half) + p[1] * p[1];
        a < r2 || b < r2 || (libm::fabs(p[0]) <= half && libm::fabs(p[1]) < 0.5 * neck)
    }))
}

/// Open axis-aligned cube (square in 2D) of the given side.
pub fn cube(side: f64, h: f64, ndim: usize) -> Result<GridSet> {
    check_len("side", side)?;
    if !(2..=3).contains(&ndim) {
        return Err(Error::UnsupportedDimension(ndim));
    }
    let half = 0.5 * side;
    let lo = [-half; 3];
    let hi = [half; 3];
    let lat = lattice_for_box(&lo[..ndim], &hi[..ndim], h)?;
    Ok(GridSet::from_fn(lat, |p| (0..ndim).all(|a| libm::fabs(p[a]) < half)))
}

/// Shape of a hole removed from a disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Hole {
    /// Square of `side` cells, axis aligned.
    Square { side: usize },
    /// Square of `side` cells minus a one-cell-wide column of length
    /// `spike` reaching in from the middle of its top edge. The column
    /// stays in the set as a spike too thin for any ball to reach its tip.
    Spiked { side: usize, spike: usize },
}

impl Hole {
    /// Cells removed by the hole.
    pub fn cell_count(&self) -> usize {
        match *self {
            Hole::Square { side } => side * side,
            Hole::Spiked { side, spike } => side * side - spike,
        }
    }
}

/// Cell-aligned hole centered (to the nearest cell) in `set`'s lattice.
pub fn centered_hole(lat: &Lattice, hole: Hole) -> Result<GridSet> {
    let side = match hole {
        Hole::Square { side } => side,
        Hole::Spiked { side, spike } => {
            if spike == 0 || spike >= side || side < 3 {
                return Err(Error::InvalidParameter { name: "spike", value: spike as f64 });
            }
            side
        }
    };
    if side == 0 {
        return Err(Error::InvalidParameter { name: "hole side", value: 0.0 });
    }
    let dims = lat.dims();
    let mut start = [0usize; 2];
    for a in 0..2 {
        if side + 2 > dims[a] {
            return Err(Error::InvalidParameter { name: "hole side", value: side as f64 });
        }
        start[a] = (dims[a] - side) / 2;
    }
    let mut mask = alloc::vec![false; lat.len()];
    for y in 0..side {
        for x in 0..side {
            if let Hole::Spiked { spike, .. } = hole {
                if x == side / 2 && y >= side - spike {
                    continue;
                }
            }
            mask[lat.index([start[0] + x, start[1] + y, 0])] = true;
        }
    }
    GridSet::new(*lat, mask)
}

/// Open disk with a cell-aligned hole removed from its middle. Returns
/// the set and the removed hole.
pub fn disk_minus_hole(radius: f64, hole: Hole, h: f64) -> Result<(GridSet, GridSet)> {
    let u = disk(radius, h)?;
    let a = centered_hole(u.lattice(), hole)?;
    let a = a.intersection(&u)?;
    Ok((u.difference(&a)?, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk_lattice_size() {
        let d = disk(1.0, 1.0 / 64.0).unwrap();
        assert_eq!(d.lattice().dims(), [130, 130, 1]);
        let bb = d.bounding_box().unwrap();
        assert_eq!(bb.0[0], 1);
        assert_eq!(bb.1[0], 128);
    }

    #[test]
    fn square_is_exact() {
        let s = cube(32.0, 1.0, 2).unwrap();
        assert_eq!(s.count(), 32 * 32);
        let c = cube(4.0, 1.0, 3).unwrap();
        assert_eq!(c.count(), 64);
    }

    #[test]
    fn zero_radius_rejected() {
        assert!(disk(0.0, 1.0).is_err());
        assert!(cube(1.0, -1.0, 2).is_err());
    }

    #[test]
    fn hole_sizes() {
        let (e, a) = disk_minus_hole(20.0, Hole::Square { side: 3 }, 1.0).unwrap();
        assert_eq!(a.count(), 9);
        let u = disk(20.0, 1.0).unwrap();
        assert_eq!(e.count() + 9, u.count());
        let (_, a) = disk_minus_hole(20.0, Hole::Spiked { side: 5, spike: 2 }, 1.0).unwrap();
        assert_eq!(a.count(), 23);
    }

    #[test]
    fn dumbbell_contains_neck() {
        let d = dumbbell(10.0, 30.0, 4.0, 1.0).unwrap();
        let two = two_disks(10.0, 30.0, 1.0).unwrap();
        assert!(two.is_subset_of(&d).unwrap());
        assert!(d.count() > two.count());
    }
}
