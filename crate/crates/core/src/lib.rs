//! Population-protocol simulation.
//!
//! A population of `n` anonymous agents is stored as a [`Configuration`]
//! (count per state). Sequential simulators evaluate one interaction at a
//! time over an [`urn`] backend; the [`batched`] simulators sample whole
//! collision-free runs at once. The [`oracle`] module holds exact references
//! for small instances.

pub mod batched;
pub mod configuration;
pub mod error;
pub mod oracle;
pub mod protocol;
pub mod rng;
pub mod sequential;
pub mod sim;
pub mod urn;
pub mod variates;

/// Index of an agent state, in `0..q`.
pub type State = usize;

pub use configuration::Configuration;
pub use error::{Error, Result};
pub use rng::{derive_seed, RngStream};
pub use sim::{simulate, RunOutcome, SimConfig, Simulator};
