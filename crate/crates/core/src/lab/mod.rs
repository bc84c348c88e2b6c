//! Experiment configuration, convergence tables, oracles and reports.

pub mod config;
pub mod experiment;
pub mod oracle;
pub mod report;
pub mod suites;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind};
pub use experiment::{run_experiment, ExperimentReport};
pub use oracle::{oracle_matrix, OracleOptions, OracleRow};
pub use report::{emit, Format};
pub use suites::{algebraic_suites, AlgebraicSuites};
pub use table::{fit_rate, Check, ConvergenceTable, RateFit, TableRow};
