use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate lattice: basis matrix is singular")]
    DegenerateLattice,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("enumeration budget of {budget} nodes exceeded ({partial} results found so far)")]
    BudgetExceeded { budget: u64, partial: u64 },

    #[error("rho below Hermite threshold: rho = {rho} must exceed gamma_n^(1/2) = {threshold}")]
    BelowHermiteThreshold { rho: String, threshold: String },

    #[error("no lattice vector with 0 < |x| < {rho}")]
    EmptyCandidateSet { rho: String },

    #[error("dual not weakly admissible at radius {radius}")]
    NotWeaklyAdmissible { radius: String },

    #[error("lattice is not unimodular (det = {det})")]
    NotUnimodular { det: String },

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("terminating continued fraction: input is rational")]
    RationalInput,

    #[error("degenerate random draw after {attempts} attempts")]
    DegenerateDraw { attempts: u32 },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("term for exponent vector {exponents:?} failed: {source}")]
    SumTerm {
        exponents: Vec<i64>,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    /// True for errors that signal a mathematical degeneracy of the input
    /// (as opposed to malformed input).
    pub fn is_degeneracy(&self) -> bool {
        match self {
            Error::NotWeaklyAdmissible { .. } | Error::EmptyCandidateSet { .. } => true,
            Error::SumTerm { source, .. } => source.is_degeneracy(),
            _ => false,
        }
    }
}
