//! Certificate engine and finite-dimensional verification routines for
//! energy lower bounds of relativistic electrons coupled to a quantized,
//! ultraviolet-cut-off radiation field.
//!
//! Units throughout: ħ = c = 1.

pub mod atlas;
pub mod certificate;
pub mod error;
pub mod field;
pub mod geometry;
pub mod model;
pub mod spectral;
pub mod suites;

pub use error::{Error, Result};
