use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A parameter is outside its admissible range.
    InvalidParameter(String),
    /// A difference stencil leaves the window.
    Boundary(String),
    /// A rescaling does not map lattice points onto lattice points.
    LatticeIncompatible(String),
    /// The requested slice or sub-domain does not exist.
    Domain(String),
    /// A norm was requested over an empty set of points.
    EmptyWindow,
    /// Fewer sample points than unknown polynomial coefficients.
    Underdetermined { samples: usize, unknowns: usize },
    /// No admissible (base point, scale) pair for a negative-order semi-norm.
    DomainTooSmall,
    /// The input of a Hölder extension violates its Hölder bound.
    NotHolder { ratio: f64, bound: f64 },
    /// Probe points of the coefficient extraction leave the window.
    WindowTooSmall(String),
    /// The probe system of the coefficient extraction is singular.
    DegenerateProbe,
    /// The index set of a weight system is empty.
    EmptyIndexSet,
    /// The symbol vanishes on the discrete frequency grid used by a solver.
    IllPosedSource { theta: alloc::vec::Vec<f64> },
    /// An iterative solver did not converge.
    NoConvergence(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Boundary(msg) => write!(f, "stencil leaves the window: {msg}"),
            Error::LatticeIncompatible(msg) => write!(f, "lattice incompatible rescaling: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::EmptyWindow => write!(f, "empty window"),
            Error::Underdetermined { samples, unknowns } => write!(
                f,
                "underdetermined fit: {samples} sample points for {unknowns} coefficients"
            ),
            Error::DomainTooSmall => write!(f, "no admissible (base point, scale) pair in the window"),
            Error::NotHolder { ratio, bound } => {
                write!(f, "input is not Hölder: pairwise ratio {ratio} exceeds {bound}")
            }
            Error::WindowTooSmall(msg) => write!(f, "window too small: {msg}"),
            Error::DegenerateProbe => write!(f, "singular probe system"),
            Error::EmptyIndexSet => write!(f, "empty index set"),
            Error::IllPosedSource { theta } => {
                write!(f, "symbol vanishes on the frequency grid at theta = {theta:?}")
            }
            Error::NoConvergence(what) => write!(f, "{what} did not converge"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
