use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Fewer observations than unknown taps.
    #[error("underdetermined system: {taps} taps but only {samples} samples")]
    Underdetermined { samples: usize, taps: usize },

    #[error("Gram matrix is numerically singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid {name}: {reason}")]
    Domain { name: &'static str, reason: String },

    /// A sweep configuration field violates its invariant.
    #[error("invalid config key `{key}`: {reason}")]
    Config { key: &'static str, reason: String },

    /// A Monte Carlo trial failed; carries the cell that produced it.
    #[error("trial failed at n={n}, k={k}, trial={trial}: {source}")]
    Trial {
        n: usize,
        k: usize,
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    /// True for numerical failures (singular or ill-conditioned solves),
    /// including those wrapped in a trial context.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. } | Error::Underdetermined { .. } => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
