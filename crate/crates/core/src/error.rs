use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("cannot parse {what} from {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
    #[error("ring handle mismatch: {0} vs {1}")]
    HandleMismatch(String, String),
    #[error("empty generator list")]
    EmptyGenerators,
    #[error("composition mismatch: source {0} differs from target {1}")]
    CompositionMismatch(String, String),
    #[error("not a morphism: {0}")]
    NotAMorphism(String),
    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("malformed tower: {0}")]
    MalformedTower(String),
    #[error("module is infinite, no finite character dual")]
    InfiniteDual,
    #[error("chain is not descending at level {0}")]
    MalformedChain(usize),
    #[error("closure did not stabilize within budget ({ideals} ideals after {rounds} rounds)")]
    PartialClosure { rounds: usize, ideals: usize },
    #[error("family is not directed: {0}")]
    NotDirected(String),
    #[error("operation requires a chain base")]
    ChainRequired,
    #[error("invalid divisibility certificate: {0}")]
    BadCertificate(String),
    #[error("depth mismatch: expected {expected}, got {got}")]
    DepthMismatch { expected: usize, got: usize },
    #[error("element {0} is not in the ideal")]
    NotInIdeal(String),
    #[error("family is not zero-convergent at index {0}")]
    NotZeroConvergent(usize),
    #[error("variance mismatch")]
    VarianceMismatch,
    #[error("operation needs finite levels")]
    FiniteOnly,
    #[error("module is not u-torsion-free: {0} dies in U⊗M")]
    TorsionObstruction(String),
    #[error("operation needs an injective unit map")]
    FaithfulOnly,
    #[error("module is not flat: {0}")]
    NotFlat(String),
    #[error("ideal {0} is not two-sided")]
    TwoSidedRequired(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
