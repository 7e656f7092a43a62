// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// reference values are frozen at full printed precision
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod cli;
pub mod demo;
pub mod diagnostics;
pub mod error;
pub mod forces;
pub mod integrators;
pub mod io;
pub mod kernels;
pub mod model;
pub mod noise;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
