//! Experiment runner: datasets, stream orders, metric capture, CSV output,
//! the lower-bound experiment and the verification campaigns.

pub mod exec;
pub mod experiment;
pub mod lowerbound;
pub mod order;
pub mod report;
pub mod verify;

pub use exec::Execution;
pub use experiment::{run_experiment, sweep_configs, AlgoId, Dataset, ExperimentConfig, ResultRecord, Session};
pub use lowerbound::{lower_bound_experiment, lower_bound_sweep, ProbeMode};
pub use order::{stream_order, OrderMode};
pub use report::{read_csv, write_csv};
