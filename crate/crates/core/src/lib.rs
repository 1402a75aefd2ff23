#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expr;
pub mod geometry;
pub mod hypersurface;
pub mod jet;
pub mod models;
pub mod rigged;
pub mod rigging;
pub mod sampling;
pub mod scenario;
pub mod shape;

pub use error::{Error, Result};
pub use jet::Jet;
