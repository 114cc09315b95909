//! Command-line front end: simulation runs, index analysis and the
//! critical-threshold calculator.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
