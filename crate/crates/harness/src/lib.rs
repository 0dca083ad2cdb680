//! Experiment harness for the `gmatch` solvers: Monte Carlo sweeps over the
//! correlated random graph models, QAPLIB runs, CSV records, summaries and
//! generated plot scripts.

pub mod config;
pub mod error;
pub mod plots;
pub mod records;
pub mod runner;
pub mod spec;
pub mod summary;

pub use config::RunConfig;
pub use error::{HarnessError, Result};
pub use plots::{emit_plots, PlotArtifacts};
pub use records::{read_csv, write_csv, Record};
pub use runner::{run_experiment, RunOutput};
pub use spec::{ExperimentKind, ExperimentSpec, Method, Model};
pub use summary::{aggregate, SummaryRow};
