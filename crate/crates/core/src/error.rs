use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Everything that can go wrong in the core crate.
///
/// Variants split into two families: hypothesis violations (a
/// precondition of one of the covering results does not hold for the
/// given input) and plain input errors. [`Error::is_hypothesis`] tells
/// them apart.
#[derive(Clone, Debug, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Lattice dimension is not 2 or 3, an axis count is zero, or the
    /// mask length disagrees with the axis counts.
    InvalidLattice(&'static str),
    /// Cell size is not a positive finite number.
    InvalidCellSize(f64),
    /// A true cell sits on the outer one-cell rim.
    RimTouched,
    /// Two sets that must share a lattice do not.
    LatticeMismatch,
    /// Distance transform requested from an empty source region.
    EmptySource,
    /// The input set is empty where a nonempty set is required.
    EmptySet,
    /// `E ⊖ B(0, δ)` is empty.
    ErosionEmpty { delta: f64 },
    /// A length, count or scale parameter is out of range.
    InvalidParameter { name: &'static str, value: f64 },
    /// δ exceeds the certified opening-stability radius of the set.
    DeltaExceedsStability { delta: f64, stability_radius: f64 },
    /// δ is below the four-cell resolution floor.
    DeltaBelowResolution { delta: f64, floor: f64 },
    /// δ is not below `sup dist(x, E^c)`.
    DeltaExceedsInradius { delta: f64, inradius: f64 },
    /// Some cells were not reached by any fattened seed cube.
    UncoveredCells { count: usize },
    /// Restriction target is not contained in the partitioned set.
    NotSubset { offending: alloc::vec::Vec<usize> },
    /// Exponent coefficient of a coverage bound is not positive.
    NonPositiveExponent { coefficient: f64 },
    /// `|A| < δⁿ n^{-n/2}` fails.
    RemovedTooLarge { measure: f64, limit: f64 },
    /// `|S_λ| < δ²/2` fails.
    SymDiffTooLarge { sym_diff: f64, limit: f64 },
    /// `δ < 1/(5λ)` fails.
    DeltaTooLargeForScale { delta: f64, limit: f64 },
    /// `λ > Λ_E` fails.
    LambdaBelowThreshold { lambda: f64, threshold: f64 },
    /// `2/λ < ρ` fails for the fill-in experiment.
    ScaleExceedsStability { two_over_lambda: f64, stability_radius: f64 },
    /// The removed set is not compactly inside the enclosing set.
    NotCompactlyInside { margin: f64, required: f64 },
    /// The operation only exists for another dimension.
    UnsupportedDimension(usize),
    /// No ∅ ↔ nonempty transition was found while widening the λ bracket.
    NoTransition { lo: f64, hi: f64 },
}

impl Error {
    /// True when the error reports a failed hypothesis of one of the
    /// covering results rather than malformed input.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::ErosionEmpty { .. }
                | Error::DeltaExceedsStability { .. }
                | Error::DeltaBelowResolution { .. }
                | Error::DeltaExceedsInradius { .. }
                | Error::NonPositiveExponent { .. }
                | Error::RemovedTooLarge { .. }
                | Error::SymDiffTooLarge { .. }
                | Error::DeltaTooLargeForScale { .. }
                | Error::LambdaBelowThreshold { .. }
                | Error::ScaleExceedsStability { .. }
                | Error::NotCompactlyInside { .. }
        )
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidLattice(why) => write!(f, "invalid lattice: {why}"),
            Error::InvalidCellSize(h) => write!(f, "cell size must be positive and finite, got {h}"),
            Error::RimTouched => f.write_str("set touches the outer one-cell rim"),
            Error::LatticeMismatch => f.write_str("sets live on different lattices"),
            Error::EmptySource => f.write_str("empty source"),
            Error::EmptySet => f.write_str("set is empty"),
            Error::ErosionEmpty { delta } => write!(f, "erosion empty at delta = {delta}"),
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::DeltaExceedsStability { delta, stability_radius } => write!(
                f,
                "delta exceeds stability radius: delta = {delta} > {stability_radius}"
            ),
            Error::DeltaBelowResolution { delta, floor } => {
                write!(f, "delta below resolution floor: delta = {delta} < 4h = {floor}")
            }
            Error::DeltaExceedsInradius { delta, inradius } => write!(
                f,
                "delta must be below sup dist(x, E^c): delta = {delta} >= {inradius}"
            ),
            Error::UncoveredCells { count } => {
                write!(f, "{count} cells are not within reach of any seed cube")
            }
            Error::NotSubset { offending } => {
                write!(f, "{} cells lie outside the partitioned set: ", offending.len())?;
                for (i, c) in offending.iter().take(16).enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                if offending.len() > 16 {
                    f.write_str(",...")?;
                }
                Ok(())
            }
            Error::NonPositiveExponent { coefficient } => {
                write!(f, "bound exponent coefficient must be positive, got {coefficient}")
            }
            Error::RemovedTooLarge { measure, limit } => write!(
                f,
                "A too large for delta: |A| = {measure} must be < delta^n n^(-n/2) = {limit}"
            ),
            Error::SymDiffTooLarge { sym_diff, limit } => {
                write!(f, "|S_lambda| = {sym_diff} must be < delta^2/2 = {limit}")
            }
            Error::DeltaTooLargeForScale { delta, limit } => {
                write!(f, "delta = {delta} must be < 1/(5 lambda) = {limit}")
            }
            Error::LambdaBelowThreshold { lambda, threshold } => {
                write!(f, "lambda = {lambda} must exceed Lambda_E = {threshold}")
            }
            Error::ScaleExceedsStability { two_over_lambda, stability_radius } => write!(
                f,
                "2/lambda = {two_over_lambda} must be < stability radius {stability_radius}"
            ),
            Error::NotCompactlyInside { margin, required } => write!(
                f,
                "A is not compactly inside U: margin {margin} < required {required}"
            ),
            Error::UnsupportedDimension(n) => write!(f, "unsupported dimension {n}"),
            Error::NoTransition { lo, hi } => {
                write!(f, "no empty/nonempty transition of the minimizer in [{lo}, {hi}]")
            }
        }
    }
}

impl core::error::Error for Error {}
