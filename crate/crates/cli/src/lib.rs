//! Command-line front end for `phasekit`: verification suites, demos,
//! gadget inspection and benchmarks, all reporting canonical JSON.

pub mod app;
pub mod bench;
pub mod demo;
pub mod error;
pub mod json;
pub mod report;
pub mod suites;

pub use error::CliError;
