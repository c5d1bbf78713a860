//! File formats, reports and the parallel ensemble runner around
//! `schauder-core`. The `schauder` binary is a thin command-line layer over
//! this crate.

pub mod config;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
