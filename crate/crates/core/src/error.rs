use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("partition {d_a}x{d_b} does not factor dimension {dim}")]
    Partition { d_a: usize, d_b: usize, dim: usize },

    #[error("operator is not Hermitian (relative defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("singular spectrum: {floored} eigenvalue(s) at or below the spectral floor")]
    SingularSpectrum { floored: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("initial state is not stationary: |[rho0, H0]| = {residual:.3e}")]
    NonStationary { residual: f64 },

    #[error("step size too large: dt * |H| = {product:.3e} exceeds {limit}")]
    StepSize { product: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("theorem precondition violated: {0}")]
    TheoremPrecondition(String),

    #[error("non-causal kernel: negative-time weight {ratio:.3e} of peak")]
    NonCausal { ratio: f64 },

    #[error("time grid error: {0}")]
    Grid(String),

    #[error("numerical contract violated: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 1,
            _ => 2,
        }
    }
}
