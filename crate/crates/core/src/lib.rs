//! Data offloading from LEO satellites to groups of commercial ground dishes.
//!
//! Satellites run reverse auctions over their routed tasks. Dishes under
//! coverage bid capacity and cost, candidate groups are built by layered
//! merging, and winners are picked by a UCB-style utility-to-cost score with
//! payments computed from the runner-up. The crate also carries the physical
//! models (constellation geometry, battery life, latency) that feed the
//! utilities, three single-dish baseline schemes, and a discrete-time engine
//! that runs everything interval by interval.

pub mod auction;
pub mod baselines;
pub mod constellation;
pub mod error;
pub mod power;
pub mod sim;

pub use error::{Error, Result};
