//! Numerical laboratory for the fractal uncertainty principle on the line:
//! porous interval sets, discrete Fourier restriction norms, the hole/mollifier
//! iteration, harmonic-measure estimates on slit strips and multiplier weights.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod generate;
pub mod harmonic;
pub mod interval;
pub mod iteration;
pub mod operator;
pub mod porosity;
pub mod run;
pub mod theta;
pub mod weights;

pub use error::{Error, Result};
pub use interval::{Interval, IntervalSet, Rational};
