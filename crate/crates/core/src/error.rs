use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid map parameters: {0}")]
    InvalidParams(String),
    #[error("point {0} lies outside [0, 1]")]
    OutOfDomain(String),
    #[error("invalid sided point: {0}")]
    InvalidSidedPoint(String),
    #[error("working precision exhausted after {achieved_depth} steps")]
    PrecisionExhausted { achieved_depth: usize },
    #[error("orbit hits a critical point at step {step}")]
    AmbiguousCoding { step: usize },
    #[error("word is not in the language (fails at position {position})")]
    NotInLanguage { position: usize },
    #[error("depth exceeded: need {needed}, have {available}")]
    DepthExceeded { needed: usize, available: usize },
    #[error("kneading depth {available} too small, need at least {needed}")]
    InsufficientKneadingDepth { needed: usize, available: usize },
    #[error("irreducible component is empty")]
    EmptyComponent,
    #[error("power iteration did not converge ({iterations} iterations, residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("word is not admissible: {0}")]
    NotAdmissible(String),
    #[error("periodic orbit passes through critical point c_{index}")]
    CriticalCollision { index: usize },
    #[error("budget of {budget} exceeded")]
    BudgetExceeded { budget: usize },
    #[error("no witness within budget (best slack {best_slack:?})")]
    NoWitnessInBudget { best_slack: Option<i64> },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("every deviation count is zero")]
    AllZeroCounts,
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

pub type Result<T> = std::result::Result<T, Error>;
