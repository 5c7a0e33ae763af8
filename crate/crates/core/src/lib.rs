//! Numerical verification of Hardy-type inequalities for Jordan products of
//! fractional momentum and position powers on radial test functions.

pub mod bessel;
pub mod cli;
pub mod error;
pub mod quadrature;
pub mod specialfn;
pub mod quadforms;
pub mod testfuncs;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
