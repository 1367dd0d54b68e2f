use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the library.
///
/// Variants split into two families: input validation (bad parameters, an
/// ill-posed model) and numerical failure (no bracket, quadrature did not
/// converge, ...). [`Error::is_numerical`] tells them apart, which the
/// command-line front end uses to pick an exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("jet of order {requested} requested, at most {available} available at r = {radius}")]
    OrderUnavailable {
        requested: usize,
        available: usize,
        radius: f64,
    },

    #[error("no bracket: {0}")]
    NoBracket(String),

    #[error("multiple roots detected: {0}")]
    MultipleRoots(String),

    #[error("lost the continued branch of the tilted radius at s = {s}: {reason}")]
    LostBranch { s: f64, reason: String },

    #[error("root finder did not converge: {0}")]
    RootNotConverged(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("degenerate droplet edge: denominator {denominator:e} at R = {radius}")]
    DegenerateEdge { radius: f64, denominator: f64 },

    #[error("finite-difference stencil leaves the valid tilt range: {0}")]
    StencilOutOfRange(String),

    #[error("gamma function pole at argument {0}")]
    GammaPole(f64),

    #[error("f'(R_s) vanishes at R_s = {0}")]
    ZeroSlope(f64),

    #[error("minimizer touches the boundary of the sampled range at Lambda = {0}")]
    RangeTooNarrow(f64),

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("radial integral diverges: {0}")]
    Divergent(String),

    #[error("no interior minimum of the saddle-point function: {0}")]
    NoInteriorMin(String),

    #[error("saddle-point function has several minima: {0}")]
    MultipleMinima(String),

    #[error("particles {0} and {1} collide")]
    PairCollision(usize, usize),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    /// `true` for failures of a numerical procedure on a well-formed input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidParameter(_) | Error::InvalidModel(_) | Error::UnknownSuite(_)
        )
    }
}
