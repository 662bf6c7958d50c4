//! Deterministic simulator of a single-core real-time device flooded with network
//! interrupts, with pluggable overload mitigation policies.

pub mod chart;
pub mod cli;
pub mod engine;
pub mod error;
pub mod event;
pub mod experiments;
pub mod loadgen;
pub mod metrics;
pub mod mitigation;
pub mod tasks;
pub mod time;

pub use engine::{CostModel, CriticalConfig, RunSummary, SimConfig, Simulation};
pub use error::{AnalysisError, ConfigError};
pub use metrics::SecondSnapshot;
pub use time::SimTime;
