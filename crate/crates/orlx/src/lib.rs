//! Experiment harness: seeded test zoos, verification suites, reports and
//! file IO around `orlx-core`.

mod error;

pub mod config;
pub mod io;
pub mod report;
pub mod suites;
pub mod zoo;

pub use error::{Error, Result};
