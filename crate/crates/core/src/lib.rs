//! Evolving trade-network model with threshold collapse cascades.
//!
//! The crate is split along the lines of the model:
//!
//! * [`graph`]: directed multigraph of agents with preferential sampling.
//! * [`economy`]: prices, internal energy, solvency, avalanches and the
//!   event-time simulation loop.
//! * [`criticality`]: zeta function, critical threshold, branching
//!   probabilities and the Galton–Watson tree-size check.
//! * [`stats`]: log returns, drawdown events, CCDFs and power-law fitting.
//! * [`export`]: CSV and edge-list writers for simulation output.

pub mod criticality;
pub mod economy;
mod error;
pub mod export;
pub mod graph;
pub mod stats;

pub use error::{Error, Result};
