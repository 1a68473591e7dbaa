//! Configuration, experiment drivers and file formats.

pub mod compare;
pub mod config;
pub mod convergence;
pub mod driver;
pub mod energy_log;
pub mod initial;
pub mod snapshot;

pub use compare::{compare_sav_naev, ComparisonReport, SchemeReport};
pub use config::{steps_to, RunConfig, PRESETS};
pub use convergence::{convergence_study, halving_sequence, ConvergenceTable, RateRow, RunSummary};
pub use driver::{run_simulation, run_simulation_with, RunOutcome};
pub use energy_log::{write_energy_csv, EnergyCsv, ENERGY_HEADER, RATE_HEADER};
pub use initial::{centered_noise, InitialCondition};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
