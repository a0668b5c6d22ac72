//! Expected-rank optimal stopping for i.i.d. uniform observations.
//!
//! A decision maker sees `n` uniform draws one at a time and must select
//! exactly one, without recall; the payoff is the overall rank of the
//! selected value among all `n`. This crate provides:
//!
//! - the exact optimal policies for horizons 2, 3 and 4, with their
//!   closed-form threshold functions ([`exact`]);
//! - the memoryless threshold family, its closed-form expected rank and a
//!   numerical optimizer ([`memoryless`]);
//! - an independent backward-induction oracle that recomputes thresholds
//!   and values by quadrature, using no closed form ([`oracle`]);
//! - the classical no-information (relative-rank) benchmark ([`noinfo`]);
//! - a seeded, parallel-deterministic Monte Carlo harness ([`montecarlo`]).

pub mod emit;
pub mod error;
pub mod exact;
pub mod memoryless;
pub mod montecarlo;
pub mod noinfo;
pub mod oracle;
pub mod policy;
pub mod registry;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
pub use policy::{play, Decision, Policy};

/// Version tag stamped into every CLI output envelope.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");
