//! Numerical laboratory for the nonlinear dispersive equation `u_t = (u u_x)_xx`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod io;
pub mod numerics;
pub mod ode;
pub mod pde;
pub mod profiles;
pub mod w4;

pub use error::{Error, Result};
