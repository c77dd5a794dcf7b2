//! Error type shared across the pipeline.

/// Everything that can go wrong between parameter entry and report emission.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Rejected constructor input (orientation, finiteness, sizes).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Parameters outside the regime a construction step needs.
    #[error("parameter regime violated: {0}")]
    Regime(String),

    /// Root bracketing found no sign change on the scanned interval.
    #[error("no bracket: no sign change of {what} on ({lo}, {hi})")]
    NoBracket { what: String, lo: f64, hi: f64 },

    /// More than one sign change where uniqueness is assumed; never resolved silently.
    #[error("{count} sign changes of {what} on ({lo}, {hi}); refusing to pick one")]
    MultipleBrackets {
        what: String,
        count: usize,
        lo: f64,
        hi: f64,
    },

    /// A trajectory ended before covering what a consumer needs.
    #[error("trajectory span shortfall: {0}")]
    SpanShortfall(String),

    /// The ξ ↦ z change of variables lost strict monotonicity.
    #[error("non-monotone transform: {0}")]
    NonMonotone(String),

    /// Integration exceeded its step budget or produced non-finite state.
    #[error("integration failure: {0}")]
    Integration(String),

    /// First-integral drift exceeded the configured tolerance.
    #[error("first-integral drift {drift:.3e} exceeds tolerance {tol:.3e}")]
    ConservationDrift { drift: f64, tol: f64 },

    /// A check needs jump data the candidate does not carry.
    #[error("missing jump data: {0}")]
    MissingJump(String),

    /// A time step violated the CFL bound.
    #[error("CFL violation: dt = {dt:.3e} exceeds limit {limit:.3e}")]
    CflViolation { dt: f64, limit: f64 },

    /// A tracked feature reached the domain boundary.
    #[error("tracked feature left the domain at t = {time}")]
    FeatureLeftDomain { time: f64 },

    /// Unreadable or structurally wrong input file.
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
