use thiserror::Error;

/// Harness failures, each mapped to a stable process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file, flag or referenced input. Exit 2.
    #[error("config error: {0}")]
    Config(String),

    /// A replication produced a non-finite iterate. Exit 3.
    #[error("divergence in strategy {strategy:?}, replication {replication}: {detail}")]
    Divergence {
        strategy: String,
        replication: u64,
        detail: String,
    },

    /// Output could not be written or another runtime failure. Exit 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Divergence { .. } => 3,
            Self::Runtime(_) => 1,
        }
    }

    /// Classifies a simulator error raised while running `strategy`.
    pub fn from_core(strategy: &str, e: localsgd_core::Error) -> Self {
        use localsgd_core::Error as E;
        match e {
            E::Replication { replication, source } => match *source {
                E::Diverged { .. } => Self::Divergence {
                    strategy: strategy.to_string(),
                    replication,
                    detail: source.to_string(),
                },
                other => Self::Config(format!("{strategy}: {other}")),
            },
            E::Diverged { .. } => Self::Divergence {
                strategy: strategy.to_string(),
                replication: 0,
                detail: e.to_string(),
            },
            E::NoConvergence(_) => Self::Runtime(format!("{strategy}: {e}")),
            other => Self::Config(format!("{strategy}: {other}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}
