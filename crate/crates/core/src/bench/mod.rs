//! Benchmark drivers, run configuration and output files.

pub mod accuracy;
pub mod bubble;
pub mod config;
pub mod consistency;
pub mod output;
pub mod solitary;
pub mod errors;
