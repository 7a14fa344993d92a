//! Viscous Burgers solver: Hopf-Cole transform to the heat equation, sixth-order compact
//! differences in space, precise integration in time.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod banded;
pub mod bench;
pub mod cfd6;
pub mod error;
pub mod grid;
pub mod hopfcole;
pub mod pim;
pub mod splitting;
pub mod verify;
pub mod walls;

pub use error::{Error, Result};
