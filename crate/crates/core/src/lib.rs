//! Symplectic spiral embeddings of rectangles into disks, the double spiral
//! that squeezes a torus strip into a ball, and numerical verifiers for the
//! resulting maps.

// `!(x > 0.0)` rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops over parallel fixed-size arrays read better than zips here.
#![allow(clippy::needless_range_loop)]

pub mod chain;
pub mod double_spiral;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod maps;
pub mod quadrature;
pub mod spiral;
pub mod torus_strip;
pub mod verifier;

pub use error::{Error, Result};
pub use exec::Execution;
