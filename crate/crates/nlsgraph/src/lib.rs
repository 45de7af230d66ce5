//! File formats, parallel drivers and the command-line front end for
//! [`nlsgraph_core`].

pub mod catalogue;
pub mod cli;
pub mod error;
pub mod io;
pub mod overrides;
pub mod parallel;
pub mod report;
pub mod scenario;

pub use error::{CliError, Result};
