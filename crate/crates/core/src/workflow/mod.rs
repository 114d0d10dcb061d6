//! Reproducible file-based runs behind the `gapminimax` command line.
//!
//! Every command produces a [`RunRecord`]: a CSV table with a fixed header
//! and 17 significant digits, a JSON record echoing the configuration, and a
//! list of numeric assertions. Exit codes: 0 all assertions passed, 2 a
//! numeric assertion failed, 3 input error.

mod commands;
mod config;
mod record;

pub use commands::{
    export_channel, export_pair, random_suite_specs, run, run_abstract_solve, run_check_forms, run_converge,
    run_pollution_demo, run_solve, run_sweep, CONVERGE_FLOOR, MU_TOLERANCE, SPLIT_AGREEMENT,
};
pub use config::{
    parse_grid, parse_sizes, parse_splits, Command, MatrixInputs, NamedSplit, RandomSuite, RunConfig, SplitDescriptor,
};
pub use record::{error_exit_code, real, version, Assertion, RunRecord, Table, EXIT_ASSERTION, EXIT_INPUT, EXIT_OK};
