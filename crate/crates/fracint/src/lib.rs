//! File formats and the `fracint` command line over `fracint-core`.

pub mod cli;
pub mod error;
pub mod formats;

pub use error::CliError;
