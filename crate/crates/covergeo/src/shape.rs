//! Textual shape specifications.
//!
//! A spec is a kind followed by optional `key=value` parameters:
//!
//! ```text
//! disk:r=32
//! disk:r=8,n=3                    ball in three dimensions
//! two-disks:r=32,sep=32
//! dumbbell:r=12,sep=36,neck=3
//! cube:side=20,n=2
//! disk-minus-hole:r=40,hole=3
//! disk-minus-hole:r=128,hole=4,spike=2
//! from-mask-file:path=masks/e.pbm
//! ```
//!
//! Lengths are physical. `h` may be given as a parameter or through the
//! `--h` flag; it defaults to 1. Hole sides are rounded to whole cells.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use covergeo_core::shapes::{self, Hole};
use covergeo_core::{GridSet, Lattice};

use crate::error::{Error, Result};
use crate::raster;

#[derive(Clone, Debug, PartialEq)]
pub enum ShapeKind {
    /// Disk, or ball when `ndim` is 3.
    Disk { radius: f64, ndim: usize },
    TwoDisks { radius: f64, separation: f64 },
    Dumbbell { radius: f64, separation: f64, neck: f64 },
    Cube { side: f64, ndim: usize },
    /// Disk minus a centered square hole of side `hole`; a positive
    /// `spike` leaves a one-cell column of that length inside the hole.
    DiskMinusHole { radius: f64, hole: f64, spike: f64 },
    FromMaskFile { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    /// Cell size; ignored for mask files, which carry their own.
    pub h: f64,
}

/// A built shape: the set itself plus, for a disk with a hole, the
/// enclosing disk and the removed cells.
#[derive(Clone, Debug)]
pub struct Shape {
    pub set: GridSet,
    pub enclosing: Option<GridSet>,
    pub removed: Option<GridSet>,
}

struct Params {
    kind: String,
    values: BTreeMap<String, String>,
}

impl Params {
    fn take_f64(&mut self, key: &str) -> Result<Option<f64>> {
        match self.values.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::Config(format!("{}: {key} must be a number, got {v:?}", self.kind))),
        }
    }

    fn need(&mut self, key: &str) -> Result<f64> {
        self.take_f64(key)?
            .ok_or_else(|| Error::Config(format!("{} needs {key}=<value>", self.kind)))
    }

    fn ndim(&mut self) -> Result<usize> {
        match self.take_f64("n")? {
            None => Ok(2),
            Some(n) if n == 2.0 || n == 3.0 => Ok(n as usize),
            Some(n) => Err(Error::Config(format!("{}: n must be 2 or 3, got {n}", self.kind))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::Config(format!("{}: unknown parameter {k}", self.kind))),
        }
    }
}

impl ShapeSpec {
    pub fn parse(text: &str) -> Result<ShapeSpec> {
        let (kind, rest) = text.trim().split_once(':').unwrap_or((text.trim(), ""));
        let mut values = BTreeMap::new();
        for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("{kind}: expected key=value, got {item:?}")))?;
            if values.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("{kind}: {} given twice", k.trim())));
            }
        }
        let mut p = Params { kind: kind.to_string(), values };
        let h = p.take_f64("h")?.unwrap_or(1.0);
        let kind = match kind {
            "disk" | "ball" => ShapeKind::Disk { radius: p.need("r")?, ndim: p.ndim()? },
            "two-disks" => ShapeKind::TwoDisks { radius: p.need("r")?, separation: p.need("sep")? },
            "dumbbell" => ShapeKind::Dumbbell {
                radius: p.need("r")?,
                separation: p.need("sep")?,
                neck: p.need("neck")?,
            },
            "cube" | "square" => ShapeKind::Cube { side: p.need("side")?, ndim: p.ndim()? },
            "disk-minus-hole" => ShapeKind::DiskMinusHole {
                radius: p.need("r")?,
                hole: p.need("hole")?,
                spike: p.take_f64("spike")?.unwrap_or(0.0),
            },
            "from-mask-file" | "file" => {
                let path = p
                    .values
                    .remove("path")
                    .ok_or_else(|| Error::Config(format!("{kind} needs path=<file>")))?;
                ShapeKind::FromMaskFile { path: path.into() }
            }
            other => return Err(Error::Config(format!("unknown shape kind {other:?}"))),
        };
        p.finish()?;
        Ok(ShapeSpec { kind, h })
    }

    /// Whole cells spanned by a physical length.
    fn cells(&self, len: f64, name: &'static str) -> Result<usize> {
        let c = (len / self.h).round();
        if !(c >= 1.0 && c.is_finite()) {
            return Err(covergeo_core::Error::InvalidParameter { name, value: len }.into());
        }
        Ok(c as usize)
    }

    pub fn build(&self) -> Result<Shape> {
        let h = self.h;
        let plain = |set: GridSet| Shape { set, enclosing: None, removed: None };
        let shape = match &self.kind {
            ShapeKind::Disk { radius, ndim } => plain(shapes::ball(*radius, h, *ndim)?),
            ShapeKind::TwoDisks { radius, separation } => plain(shapes::two_disks(*radius, *separation, h)?),
            ShapeKind::Dumbbell { radius, separation, neck } => {
                plain(shapes::dumbbell(*radius, *separation, *neck, h)?)
            }
            ShapeKind::Cube { side, ndim } => plain(shapes::cube(*side, h, *ndim)?),
            ShapeKind::DiskMinusHole { radius, hole, spike } => {
                let side = self.cells(*hole, "hole side")?;
                let hole = if *spike > 0.0 {
                    Hole::Spiked { side, spike: self.cells(*spike, "spike")? }
                } else {
                    Hole::Square { side }
                };
                let u = shapes::disk(*radius, h)?;
                let (set, removed) = shapes::disk_minus_hole(*radius, hole, h)?;
                Shape { set, enclosing: Some(u), removed: Some(removed) }
            }
            ShapeKind::FromMaskFile { path } => plain(raster::read_mask(path)?),
        };
        if shape.set.is_empty() {
            return Err(covergeo_core::Error::EmptySet.into());
        }
        Ok(shape)
    }

    /// Referenced input file, if any.
    pub fn input_file(&self) -> Option<&PathBuf> {
        match &self.kind {
            ShapeKind::FromMaskFile { path } => Some(path),
            _ => None,
        }
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ShapeKind::Disk { radius, ndim } => write!(f, "disk:r={radius},n={ndim}")?,
            ShapeKind::TwoDisks { radius, separation } => write!(f, "two-disks:r={radius},sep={separation}")?,
            ShapeKind::Dumbbell { radius, separation, neck } => {
                write!(f, "dumbbell:r={radius},sep={separation},neck={neck}")?
            }
            ShapeKind::Cube { side, ndim } => write!(f, "cube:side={side},n={ndim}")?,
            ShapeKind::DiskMinusHole { radius, hole, spike } => {
                write!(f, "disk-minus-hole:r={radius},hole={hole}")?;
                if *spike > 0.0 {
                    write!(f, ",spike={spike}")?;
                }
            }
            ShapeKind::FromMaskFile { path } => return write!(f, "from-mask-file:path={}", path.display()),
        }
        write!(f, ",h={}", self.h)
    }
}

/// Lattice of a built shape, for reporting.
pub fn describe(l: &Lattice) -> String {
    let d = l.dims();
    let dims: Vec<String> = d[..l.ndim()].iter().map(|x| x.to_string()).collect();
    format!("{} cells of size {}", dims.join("x"), l.h())
}
