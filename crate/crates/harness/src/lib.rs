//! Experiment grids, verification suites and table output on top of
//! `sumprod-core`.

pub mod config;
pub mod experiments;
pub mod oracles;
pub mod rng;
pub mod table;
pub mod verify;

pub use config::{ExperimentConfig, Format};
pub use table::{Table, Value};
