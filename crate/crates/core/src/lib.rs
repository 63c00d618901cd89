//! Achievable rates of a size-constrained antenna with an optimal lossless
//! matching network.
//!
//! The crate models a point-to-point link whose transmit antenna is bounded
//! by a sphere, represents the antenna by its lowest-order spherical mode
//! circuit, and computes the matching network transmission that maximises
//! the Shannon rate under the Bode–Fano realisability constraints.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod chu;
pub mod error;
pub mod experiments;
pub mod interference;
pub mod matching;
pub mod model;
pub mod numerics;
pub mod rate;

pub use error::{Error, Result};
