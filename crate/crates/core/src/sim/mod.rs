//! Scenario simulation: configuration, the closed-loop runner, docking
//! detection, batches and CSV logs.

pub mod batch;
pub mod config;
pub mod log;
pub mod outcome;
pub mod runner;

pub use batch::{run_batch, summarize, BatchResult, BatchRun, BatchSummary};
pub use config::{parse_turbulence, turbulence_label, ControllerKind, GainTable, ScenarioConfig};
pub use log::{SimLog, StepRecord, CSV_COLUMNS, CSV_SCHEMA};
pub use outcome::{detect_docking, DockingOutcome, FailureReason};
pub use runner::{run_scenario, run_with_gains, ScenarioResult};
