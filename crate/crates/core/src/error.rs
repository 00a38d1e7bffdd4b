use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised across the library. Variants are split between
/// mathematical precondition violations (the decomposition does not
/// exist for the given data) and operational failures (I/O, parsing,
/// iteration budgets).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("real bilinear forms require real matrices (nonzero imaginary part at ({row},{col}))")]
    NonRealEntries { row: usize, col: usize },

    #[error("matrix is numerically singular (sigma_min/sigma_max = {ratio:.3e})")]
    SingularInput { ratio: f64 },

    #[error("gram matrix is numerically singular (sigma_min/sigma_max = {ratio:.3e})")]
    SingularGram { ratio: f64 },

    #[error("zero pivot encountered during factorization")]
    SingularFactorization,

    #[error("double-adjoint condition (F^[M,N])^[N,M] = F violated (residual {residual:.3e})")]
    DoubleAdjointViolation { residual: f64 },

    #[error("QR iteration did not converge within the budget of {0} steps")]
    ConvergenceFailure(usize),

    #[error("eigenvalue swap lost triangularity (residual {residual:.3e})")]
    IllConditionedSwap { residual: f64 },

    #[error("singular Sylvester equation: eigenvalue {value} shared between diagonal blocks")]
    SingularSylvester { value: Complex64 },

    #[error("stem function undefined at eigenvalue {value} (|lambda| within the zero band)")]
    UndefinedAtZero { value: Complex64 },

    #[error("eigenvalue {value} lies within {distance:.3e} of a stem discontinuity")]
    NearDiscontinuity { value: Complex64, distance: f64 },

    #[error("eigenvalue {value} lies on the closed negative real axis")]
    NegativeRealEigenvalue { value: Complex64 },

    #[error("custom stem violates {property} at eigenvalue {value}")]
    InvalidStem { property: &'static str, value: Complex64 },

    #[error("instance generation exhausted after {0} attempts")]
    GenerationExhausted(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for violations of a theorem's hypotheses, as opposed to
    /// operational failures. The CLI maps these to exit code 2.
    pub fn is_precondition_violation(&self) -> bool {
        !matches!(
            self,
            Error::ConvergenceFailure(_)
                | Error::GenerationExhausted(_)
                | Error::Parse(_)
                | Error::Schema { .. }
                | Error::Io(_)
        )
    }
}
