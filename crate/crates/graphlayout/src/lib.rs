//! File formats, reports, a threaded sweep runner and the `graphlayout`
//! command line on top of [`graphlayout_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod report;
pub mod runner;

pub use error::{Error, Result};
pub use graphlayout_core as core;
