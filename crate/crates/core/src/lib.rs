//! Numerical core for weighted inequalities on dyadic grids.
//!
//! Everything here is `no_std` (with `alloc`): Young functions and their
//! conjugates, localized Orlicz norms, weight characteristics over shifted
//! dyadic grids, maximal and sparse operators, bilinear fractional
//! integrals, and the Rubio de Francia iteration.
#![no_std]

extern crate alloc;

pub mod dyadic;
mod error;
pub mod integral;
pub mod math;
pub mod maximal;
pub mod orlicz;
pub mod rubio;
pub mod sparse;
pub mod weights;
pub mod young;

pub use dyadic::{Cell, Domain, Grid, GridFunction, Region, Shift};
pub use error::{Error, Result};
pub use young::YoungFunction;
