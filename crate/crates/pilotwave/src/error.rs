//! Crate-wide error type.

use core::fmt;

/// Errors reported by constructors, evolvers and experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid size is not a power of two (spectral stepping requires it).
    GridNotPowerOfTwo { n: usize },
    /// Domain bounds are inverted or degenerate.
    InvalidDomain { min: f64, max: f64 },
    /// A physical parameter that must be strictly positive is not.
    NonPositiveParam { name: &'static str, value: f64 },
    /// Packet width is too small for the grid spacing to resolve.
    ResolutionTooCoarse { width: f64, min_width: f64 },
    /// Packet tails carry more mass outside the domain than allowed.
    PacketTruncated { tail_mass: f64, limit: f64 },
    /// Two operands live on different grids.
    GridMismatch,
    /// Branches that must be disjoint overlap too much.
    BranchOverlap { overlap: f64, limit: f64 },
    /// Degenerate geometry that would collapse distinct branches.
    DegenerateGeometry { name: &'static str },
    /// Time step would alias the fastest retained kinetic mode.
    AliasingStep { dt: f64, dt_max: f64 },
    /// A particle left the computational domain.
    OutOfDomain { x: f64, y: f64 },
    /// Step count does not tile the requested final time.
    BadTimeGrid { t_final: f64, dt: f64 },
    /// Conditioning coordinate sits on a density node.
    ConditionalUndefined { y: f64 },
    /// The y-partition does not contain the actual configuration.
    PartitionGap { y: f64 },
    /// Not enough samples to run the requested test.
    InsufficientData { needed: usize, got: usize },
    /// Reference density or sample set is empty.
    EmptyInput,
    /// Paired sequences have different lengths.
    LengthMismatch { left: usize, right: usize },
    /// A state that must be normalized is not.
    NotNormalized { norm: f64 },
    /// System basis fails the orthonormality gate.
    BasisNotOrthonormal { residual: f64 },
    /// An experiment returned outcome probabilities that do not sum to one.
    DistributionNotNormalized { total: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridNotPowerOfTwo { n } => {
                write!(f, "grid size {n} is not a power of two")
            }
            Error::InvalidDomain { min, max } => {
                write!(f, "invalid domain [{min}, {max})")
            }
            Error::NonPositiveParam { name, value } => {
                write!(f, "parameter {name} must be positive, got {value}")
            }
            Error::ResolutionTooCoarse { width, min_width } => {
                write!(f, "packet width {width} below grid resolution floor {min_width}")
            }
            Error::PacketTruncated { tail_mass, limit } => {
                write!(f, "packet tail mass {tail_mass:.3e} outside domain exceeds {limit:.3e}")
            }
            Error::GridMismatch => write!(f, "operands live on different grids"),
            Error::BranchOverlap { overlap, limit } => {
                write!(f, "branch overlap {overlap:.3e} exceeds {limit:.3e}")
            }
            Error::DegenerateGeometry { name } => {
                write!(f, "degenerate geometry: {name}")
            }
            Error::AliasingStep { dt, dt_max } => {
                write!(f, "time step {dt} aliases fastest mode (max {dt_max:.3e})")
            }
            Error::OutOfDomain { x, y } => {
                write!(f, "particle left the domain at ({x}, {y})")
            }
            Error::BadTimeGrid { t_final, dt } => {
                write!(f, "dt {dt} does not tile t_final {t_final}")
            }
            Error::ConditionalUndefined { y } => {
                write!(f, "conditional wave function undefined: density node at y = {y}")
            }
            Error::PartitionGap { y } => {
                write!(f, "no partition cell contains y = {y}")
            }
            Error::InsufficientData { needed, got } => {
                write!(f, "need at least {needed} samples, got {got}")
            }
            Error::EmptyInput => write!(f, "empty input"),
            Error::LengthMismatch { left, right } => {
                write!(f, "length mismatch: {left} vs {right}")
            }
            Error::NotNormalized { norm } => {
                write!(f, "state not normalized (norm {norm})")
            }
            Error::BasisNotOrthonormal { residual } => {
                write!(f, "basis Gram matrix deviates from identity by {residual:.3e}")
            }
            Error::DistributionNotNormalized { total } => {
                write!(f, "outcome probabilities sum to {total}, expected 1")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
