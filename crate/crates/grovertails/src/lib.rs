//! Command-line front end for `grovertails-core`: run configuration, report
//! documents, CSV exports and a plain-text matrix format.

pub mod config;
pub mod export;
pub mod matrix_text;
pub mod report;
pub mod run;

pub use config::{
    parse_complex, parse_complex_list, parse_vertex_list, ConfigError, Mode, OutputFormat,
    RunConfig,
};
pub use report::RunReport;
pub use run::{run, RunError, RunOutput};

/// Exit status for a run whose checks all passed.
pub const EXIT_OK: u8 = 0;
/// Exit status for usage, input and IO errors.
pub const EXIT_USAGE: u8 = 1;
/// Exit status when a law check fails or a solver assertion trips.
pub const EXIT_CHECK_FAILED: u8 = 2;
