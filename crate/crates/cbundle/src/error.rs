use cbundle_core::arith::ArithError;
use cbundle_core::bundle::BundleError;
use cbundle_core::conic::ConicError;
use cbundle_core::count::CountError;
use cbundle_core::dp::DpError;

/// Failure of a command, sorted by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    /// Prefixes the message, keeping the kind.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Input(m) => CliError::Input(format!("{what}: {m}")),
            CliError::Resource(m) => CliError::Resource(format!("{what}: {m}")),
            CliError::Internal(m) => CliError::Internal(format!("{what}: {m}")),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ArithError> for CliError {
    fn from(e: ArithError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ConicError> for CliError {
    fn from(e: ConicError) -> Self {
        match e {
            ConicError::ResourceLimit(m) => CliError::Resource(m),
            ConicError::Internal(m) => CliError::Internal(m),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BundleError> for CliError {
    fn from(e: BundleError) -> Self {
        match e {
            BundleError::Conic(c) => c.into(),
            BundleError::Arith(a) => a.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::Bundle(b) => b.into(),
            CountError::Conic(c) => c.into(),
            CountError::Arith(a) => a.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<DpError> for CliError {
    fn from(e: DpError) -> Self {
        match e {
            DpError::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            DpError::Counterexample(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
