//! Selfish and online load balancing under the Nash social welfare (NSW)
//! objective: game models, equilibrium computation, exact optima, greedy
//! online assignment, non-atomic Wardrop flows, adversarial instance
//! generators, and tight-bound evaluators.
//!
//! All NSW arithmetic is carried out in the natural-log domain; the NSW
//! itself is exposed as `exp(value)` only at reporting boundaries.

pub mod bounds;
pub mod equilibria;
mod error;
pub mod generators;
pub mod json;
pub mod latency;
mod matching;
pub mod model;
pub mod nonatomic;
pub mod num;
pub mod online;
pub mod optima;
pub mod sampling;

pub use error::{Error, Result};
pub use latency::LatencyFunction;
pub use model::{AtomicGame, FlowProfile, GameMode, LogNsw, NonAtomicGame, Profile};
pub use online::OnlineInstance;
