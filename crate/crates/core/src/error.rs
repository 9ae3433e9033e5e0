use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("basis of {size} states exceeds the configured cap of {cap}")]
    BasisTooLarge { size: u128, cap: usize },

    #[error("degenerate potential: M^j = 1 imprints no relative phase")]
    DegeneratePotential,

    #[error("phase-squeezing parameter undefined: <Jx> = 0")]
    UndefinedSqueezing,

    #[error("tridiagonal eigensolver did not converge after {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error(
        "truncation at n = 0 shifts the mean occupation to {realized} (target {target}); \
         use a larger mean occupation or a narrower profile"
    )]
    TruncationShift { realized: f64, target: f64 },

    #[error("fringe density is negative ({value}); moments violate <a>^2 <= <n>")]
    NegativeDensity { value: f64 },

    #[error("{quantity} did not converge: relative change {rel_change:e} at {nodes} nodes")]
    QuadratureNoConvergence {
        quantity: &'static str,
        nodes: usize,
        rel_change: f64,
    },

    #[error("no fringe signal: one-body Fisher information is zero")]
    NoFringeSignal,

    #[error("log-derivative of the density is singular at a perfect dark fringe")]
    DarkFringe,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
