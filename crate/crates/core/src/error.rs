use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a negative fundamental discriminant")]
    NotFundamental(i64),

    #[error("ambiguous breakpoint at x = {0}; use the exact rational entry point")]
    AmbiguousBreakpoint(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("term budget of {budget} exhausted (error estimate {estimate:e})")]
    BudgetExhausted { budget: u64, estimate: f64 },

    #[error("matrix not positive definite at N = {n} (pivot {pivot:e})")]
    NotPositiveDefinite { n: usize, pivot: f64 },

    #[error("matrix ({a}, {b}; {c}, {d}) is not a supported element of the group for D = {disc}")]
    NotInGroup {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        disc: i64,
    },

    #[error("could not snap {value} to a rational with small denominator")]
    SnapFailed { value: f64 },

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that signal exhausted numerical resources rather than bad input.
    pub fn is_precision_failure(&self) -> bool {
        matches!(
            self,
            Error::BudgetExhausted { .. } | Error::NotPositiveDefinite { .. } | Error::SnapFailed { .. }
        )
    }
}
