use thiserror::Error;

/// Everything that can go wrong while building or analysing a measurement scenario.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator is not Hermitian: max |M - M^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("state is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },
    #[error("state trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("Kraus operators are incomplete: max |sum M^dagger M - I| = {deviation:e}")]
    CompletenessViolation { deviation: f64 },
    #[error("POM element for outcome '{label}' is not positive: smallest eigenvalue {min_eigenvalue:e}")]
    NonPositiveEffect { label: String, min_eigenvalue: f64 },
    #[error("outcome '{0}' has no nonzero Kraus operator")]
    EmptyOutcome(String),
    #[error("duplicate outcome label '{0}'")]
    DuplicateLabel(String),
    #[error("unknown outcome label '{0}'")]
    UnknownLabel(String),
    #[error("no value assigned to outcome '{0}'")]
    MissingLabel(String),
    #[error("coupling is not unitary: max |U^dagger U - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("readout basis is not orthonormal: max deviation {deviation:e}")]
    ReadoutNotOrthonormal { deviation: f64 },
    #[error("target observable is not in the span of the POM (residual {residual:e})")]
    NotExpressible { residual: f64 },
    #[error("joint-picture quantity requested but the apparatus has no system-detector model")]
    NoJointModel,
    #[error("values do not estimate the target without bias: max |A_e[m] - A| = {deviation:e}")]
    BiasedInstrument { deviation: f64 },
    #[error("conditioning on an outcome with probability {probability:e}")]
    ZeroProbabilityConditioning { probability: f64 },
    #[error("probe strength must lie in (0, 1], got {0}")]
    InvalidStrength(f64),
    #[error("outcome '{label}' never fires: Tr(P_k) = {trace:e}")]
    NullOutcome { label: String, trace: f64 },
    #[error("posterior '{posterior}' has probability {probability:e} given outcome '{label}'")]
    ZeroPosterior {
        label: String,
        posterior: String,
        probability: f64,
    },
    #[error("relation {relation} needs {ingredient}")]
    MissingIngredient {
        relation: &'static str,
        ingredient: &'static str,
    },
    #[error("negative radicand {0:e} in Branciard bound")]
    NegativeRadicand(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
}

impl Error {
    /// True for errors caused by bad input (as opposed to numerical or
    /// internal-consistency failures).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_) | Error::InternalConsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
