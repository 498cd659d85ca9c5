use thiserror::Error;

/// Errors produced by model construction and the measure/gradient pipeline.
#[derive(Debug, Error)]
pub enum FormError {
    #[error("backend mismatch: model is `{model}`, function is `{function}`")]
    BackendMismatch {
        model: &'static str,
        function: &'static str,
    },

    #[error("invalid atom space: {0}")]
    InvalidAtomSpace(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("function length {got} does not match expected {expected}")]
    FunctionLength { expected: usize, got: usize },

    #[error("domination violated at atom `{atom}`: measure {mu:e} but reference weight {nu:e}")]
    DominationViolation { atom: String, mu: f64, nu: f64 },

    #[error("empty generating family")]
    EmptyFamily,

    #[error("partition level {level} out of range ({levels} levels)")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("invalid partition chain: {0}")]
    InvalidChain(String),

    #[error(
        "coordinate sampling failed after {attempts} draws \
         (worst condition {worst_cond:.3e} at atom `{atom}`)"
    )]
    SamplingFailed {
        attempts: u32,
        worst_cond: f64,
        atom: String,
    },

    #[error("atom `{atom}` ill-conditioned: {cond:.3e} exceeds ceiling {max:.3e}")]
    IllConditioned { atom: String, cond: f64, max: f64 },

    #[error("coordinate tuple is not admissible (leading blocks not invertible)")]
    TupleNotAdmissible,

    #[error("function level {function} exceeds cell level {form}")]
    LevelMismatch { function: usize, form: usize },

    #[error("composite not representable in the catalogue: {0}")]
    NotRepresentable(String),

    #[error("density matrix not nonnegative definite at atom `{atom}` (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { atom: String, min_eigenvalue: f64 },

    #[error("singular interior system while deriving extension matrices")]
    SingularInterior,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, FormError>;
