//! Example registry, run configuration, the solve pipeline and report writers.

pub mod config;
pub mod examples;
pub mod output;
pub mod run;

pub use config::{March, RunConfig, Slice};
pub use run::{
    convergence_study, dump_operators, run_example, solve_heat_dirichlet, ConvergenceRow,
    ConvergenceTable, RunReport,
};
