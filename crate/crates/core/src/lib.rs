//! Analytical model of MAC-layer packet relaying at a cognitive secondary
//! sensor node: link outages, queue rates and delays, the relay power budget,
//! the acceptance-factor optimizer, relay buffer models, and a slotted
//! Monte-Carlo simulator of the protocol.

pub mod buffer;
pub mod channel;
pub mod config;
pub mod error;
pub mod figures;
pub mod optimizer;
pub mod queue;
pub mod search;
pub mod simulator;

pub use channel::{LinkParams, Links, NetworkParams, RateForm};
pub use error::{Error, Result, StabilityConstraint};
pub use queue::{rate_set, secondary_delay, DelayBreakdown, RateSet};
