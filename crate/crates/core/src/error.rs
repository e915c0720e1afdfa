use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto process exit codes: validation problems → 1,
/// size caps → 2, non-convergence → 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A game, latency function, or generator parameter failed validation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A profile or flow does not fit the game it was applied to.
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    /// Arithmetic left the representable domain (e.g. non-positive latency
    /// at a positive load).
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive operation would exceed its hard cap.
    #[error("instance too large: {need} exceeds cap {cap}")]
    TooLarge { need: u128, cap: u128 },

    /// An iterative solver ran out of its iteration budget.
    #[error("did not converge: {0}")]
    DidNotConverge(String),

    /// Discrete convexity of slot prices failed despite the quasi-log-convex
    /// flag being set.
    #[error("slot prices not convex on resource {resource} at slot {slot}")]
    ConvexityViolated { resource: String, slot: usize },

    /// A condition that should be impossible (e.g. a load balancing game
    /// without any pure Nash equilibrium).
    #[error("internal anomaly: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
