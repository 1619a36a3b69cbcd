use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no registry entry for {name} with {n_qubits} qubits")]
    Lookup { name: String, n_qubits: usize },

    /// A registry entry whose recomputed Q-information disagrees with its
    /// reference value.
    #[error(
        "registry entry {name}({n_qubits}) failed validation: expected {expected}, recomputed {computed}"
    )]
    Validation {
        name: String,
        n_qubits: usize,
        expected: f64,
        computed: f64,
    },

    #[error("not a state: eigenvalue {eigenvalue:e} below the PSD floor")]
    NotAState { eigenvalue: f64 },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("optimizer did not converge: best omega {best_omega}, best purity {best_purity}")]
    Convergence { best_omega: f64, best_purity: f64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code for the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. } => 2,
            Error::NotAState { .. } | Error::Convergence { .. } => 3,
            _ => 1,
        }
    }
}
