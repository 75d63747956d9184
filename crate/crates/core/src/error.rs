use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A reflection coefficient with magnitude >= 1 was encountered.
    /// `stage` is 1-based.
    #[error("unstable model: reflection coefficient {value} at stage {stage}")]
    Unstable { stage: usize, value: f64 },

    #[error("sinkhorn did not converge in {iterations} iterations (marginal violation {violation:e})")]
    NoConvergence { iterations: usize, violation: f64 },

    #[error("target {index}: {source}")]
    Target {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("all {} multi-start runs failed: {}", .0.len(), join(.0))]
    AllRunsFailed(Vec<Error>),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn at_target(index: usize, source: Error) -> Self {
        Error::Target {
            index,
            source: Box::new(source),
        }
    }

    /// True if the root cause is a Sinkhorn convergence failure.
    pub fn is_convergence_failure(&self) -> bool {
        match self {
            Error::NoConvergence { .. } => true,
            Error::Target { source, .. } => source.is_convergence_failure(),
            Error::AllRunsFailed(errs) => errs.iter().all(Error::is_convergence_failure),
            _ => false,
        }
    }
}

fn join(errs: &[Error]) -> String {
    errs.iter()
        .enumerate()
        .map(|(i, e)| format!("run {i}: {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}
