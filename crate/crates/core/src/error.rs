use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("derivative requested at the pole 1/conj(a) or at infinity")]
    PoleDerivative,
    #[error("parameter a = 0 has no free critical points")]
    DegenerateParameter,
    #[error("polynomial root iteration did not converge in {iterations} iterations")]
    SolverDivergence { iterations: usize },
    #[error("orbit has true period {true_period}, below the requested {requested}")]
    LowerPeriod { true_period: u32, requested: u32 },
    #[error("operation needs the endomorphism region 1 < |a| < 2d+1")]
    RegionMismatch,
    #[error("neither convergence nor divergence established within the iteration budget")]
    Inconclusive,
    #[error("bracket does not straddle a root")]
    NoSignChange,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("set is not invariant under the multiplication map")]
    NotInvariant,
    #[error("deployment entry times q is not an integer")]
    IntegralityViolation,
    #[error("expected exactly one realizing cycle, found {count}")]
    UniquenessViolation { count: usize },
    #[error("iterate {step} falls in the gap interval J_*")]
    NotInLambda { step: usize },
    #[error("no cycle with the requested rotation number lies in the last sector")]
    NoSectorCycle,
    #[error("exact verification failed: {0}")]
    VerificationFailure(String),
    #[error("symbol {value} outside 0..={d}")]
    SymbolOutOfRange { value: u32, d: u32 },
    #[error("word too short to shift")]
    LengthTooShort,
    #[error("word is not admissible")]
    NotAdmissible,
    #[error("no repelling circle cycle with the requested rotation number")]
    NoRepellingCycle,
    #[error("parameter is not adjacent in the requested tongue")]
    NotAdjacent,
    #[error("ray at angle {angle} did not land within the depth budget")]
    RayBudget { angle: String },
}

impl Error {
    /// Variant name, used by the command line as a stable diagnostic tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::PoleDerivative => "PoleDerivative",
            Error::DegenerateParameter => "DegenerateParameter",
            Error::SolverDivergence { .. } => "SolverDivergence",
            Error::LowerPeriod { .. } => "LowerPeriod",
            Error::RegionMismatch => "RegionMismatch",
            Error::Inconclusive => "Inconclusive",
            Error::NoSignChange => "NoSignChange",
            Error::BudgetExceeded(_) => "BudgetExceeded",
            Error::NotInvariant => "NotInvariant",
            Error::IntegralityViolation => "IntegralityViolation",
            Error::UniquenessViolation { .. } => "UniquenessViolation",
            Error::NotInLambda { .. } => "NotInLambda",
            Error::NoSectorCycle => "NoSectorCycle",
            Error::VerificationFailure(_) => "VerificationFailure",
            Error::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            Error::LengthTooShort => "LengthTooShort",
            Error::NotAdmissible => "NotAdmissible",
            Error::NoRepellingCycle => "NoRepellingCycle",
            Error::NotAdjacent => "NotAdjacent",
            Error::RayBudget { .. } => "RayBudget",
        }
    }
}
