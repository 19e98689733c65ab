use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("triangle {triangle} has non-positive signed area {area:e}")]
    InvertedElement { triangle: usize, area: f64 },

    #[error("interface coordinate {coord} does not lie on a grid line")]
    InterfaceMisaligned { coord: f64 },

    #[error("non-finite {what} at ({x}, {y})")]
    NonFinite { what: &'static str, x: f64, y: f64 },

    #[error("ellipticity violated at ({x}, {y}): eigenvalues [{lo}, {hi}] outside [{r}, {big_r}]")]
    Ellipticity { x: f64, y: f64, lo: f64, hi: f64, r: f64, big_r: f64 },

    #[error("all nodes are pinned; reduced system is empty")]
    EmptySystem,

    #[error("{method} broke down after {iterations} iterations (residual {residual:e})")]
    Breakdown { method: &'static str, iterations: usize, residual: f64 },

    #[error("{method} did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { method: &'static str, iterations: usize, residual: f64 },

    #[error("mesh Peclet number {peclet} >= 1; refine the mesh or reduce the drift")]
    Peclet { peclet: f64 },

    #[error("coefficient {value} below lower bound {bound} at x = {x}")]
    CoefficientBound { x: f64, value: f64, bound: f64 },

    #[error("n = {n} too small for the grid cover; minimal admissible n is {min_n}")]
    PreconditionFailed { n: usize, min_n: usize },

    #[error("missing constant {0}")]
    MissingConstant(&'static str),

    #[error("unknown example id {0:?}")]
    UnknownExample(String),

    #[error("latent witness outside the unit ball: norm {norm}")]
    WitnessOutside { norm: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
