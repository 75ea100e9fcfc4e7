//! Rogue-wave dynamics of the focusing nonlinear Schrödinger equation and
//! parallel echo-state-network forecasting of the simulated fields.

// NaN-rejecting `!(x > 0.0)` checks and index loops over parallel buffers
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod esn;
pub mod forecast;
pub mod lyapunov;
pub mod nls;
pub mod ocean;

pub use error::{Error, Result};
