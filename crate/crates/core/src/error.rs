use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the library. Every variant carries a stable short code
/// (see [`Error::code`]) that front ends can map to exit statuses.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kind mismatch: cannot combine a {left} with a {right}")]
    KindMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty basis")]
    EmptyBasis,

    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),

    #[error("zero vector cannot define a projector")]
    ZeroVector,

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("{what} is not normalized (norm² = {norm_sqr})")]
    NotNormalized { what: String, norm_sqr: f64 },

    #[error("non-unitary segment `{from}` -> `{to}` (max |U†U - I| = {deviation:e})")]
    NonUnitarySegment {
        from: String,
        to: String,
        deviation: f64,
    },

    #[error("non-projector operator for `{label}` (max deviation = {deviation:e})")]
    NonProjector { label: String, deviation: f64 },

    #[error("projector set does not sum to the identity (max deviation = {deviation:e})")]
    IncompleteProjectorSet { deviation: f64 },

    #[error("unknown stage `{0}`")]
    UnknownStage(String),

    #[error("stage `{from}` comes after stage `{to}`")]
    StageOrder { from: String, to: String },

    #[error("pointer references unknown site `{0}`")]
    UnknownPointerSite(String),

    #[error("pointer register `{0}` has already been coupled")]
    RegisterConsumed(String),

    #[error("pointer register `{label}` is {actual}, expected {expected}")]
    RegisterKind {
        label: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("unknown pointer register `{0}`")]
    UnknownRegister(String),

    #[error("weak pointer `{label}`: grid too small, shifted pointer loses {loss:e} of its norm")]
    GridTooSmall { label: String, loss: f64 },

    #[error("weak pointer `{label}`: coupling too strong, ready/shifted overlap {overlap} <= 0.9")]
    CouplingTooStrong { label: String, overlap: f64 },

    #[error("degenerate postselection (probability {probability:e})")]
    DegeneratePostselection { probability: f64 },

    #[error("state too large to expand densely ({0} amplitudes)")]
    TooLarge(usize),

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("unknown built-in scenario `{0}`")]
    UnknownBuiltin(String),
}

impl Error {
    /// Stable machine-readable code for the error class.
    pub fn code(&self) -> &'static str {
        match self {
            Error::KindMismatch { .. } => "kind-mismatch",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::EmptyBasis => "empty-basis",
            Error::DuplicateLabel(_) => "duplicate-label",
            Error::ZeroVector => "zero-vector",
            Error::NonFinite(_) => "non-finite",
            Error::NotNormalized { .. } => "not-normalized",
            Error::NonUnitarySegment { .. } => "non-unitary-segment",
            Error::NonProjector { .. } => "non-projector-site",
            Error::IncompleteProjectorSet { .. } => "incomplete-projector-set",
            Error::UnknownStage(_) => "unknown-stage",
            Error::StageOrder { .. } => "stage-order",
            Error::UnknownPointerSite(_) => "unknown-pointer-site",
            Error::RegisterConsumed(_) => "register-consumed",
            Error::RegisterKind { .. } => "register-kind",
            Error::UnknownRegister(_) => "unknown-register",
            Error::GridTooSmall { .. } => "grid-too-small",
            Error::CouplingTooStrong { .. } => "coupling-too-strong",
            Error::DegeneratePostselection { .. } => "degenerate-postselection",
            Error::TooLarge(_) => "too-large",
            Error::Schema(_) => "schema",
            Error::UnknownBuiltin(_) => "unknown-builtin",
        }
    }
}
