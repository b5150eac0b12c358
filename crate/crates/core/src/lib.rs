//! Numerical enumeration of planar central configurations under homogeneous
//! potentials `U_alpha`, together with exact upper and lower bounds on their
//! number.

// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acsystem;
pub mod bounds;
pub mod classify;
pub mod cli;
pub mod error;
pub mod fewnomial;
pub mod geometry;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{Configuration, DistanceVector, PotentialParams};
