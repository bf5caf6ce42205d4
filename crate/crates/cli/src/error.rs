use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(cellcap_core::Error),
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 3 for I/O, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Core(_) => 1,
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

impl From<cellcap_core::Error> for CliError {
    fn from(e: cellcap_core::Error) -> Self {
        use cellcap_core::Error as E;
        match e {
            E::Config { key, reason } => {
                let key = match key {
                    "bs_density" => "grid",
                    "mu_density" => "mu_density_ratio",
                    "max_slots" => "tmax",
                    "n_realizations" => "realizations",
                    "csit_target" => "sinr_threshold",
                    other => other,
                };
                CliError::Config {
                    key: key.to_string(),
                    reason,
                }
            }
            E::BoundParams(reason) => CliError::Config {
                key: "bounds".into(),
                reason,
            },
            other => CliError::Core(other),
        }
    }
}
