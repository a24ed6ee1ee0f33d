//! Frequency-domain analysis of a semi-infinite crack on an imperfect
//! (spring-type) interface between two orthotropic half-planes.
//!
//! The out-of-plane problem reduces to one scalar convolution equation on the
//! crack line; the coupled in-plane problem to a 2×2 system. Both are solved
//! by collocation on a tip-graded grid using the kernels in [`specfun`].

// `!(x > 0.0)` is how validation rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod materials;
pub mod mode12;
pub mod mode3;
pub mod operators;
pub mod oracle;
pub mod profile;
pub mod quad;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
