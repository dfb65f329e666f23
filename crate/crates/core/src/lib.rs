//! Lower bounds on communication and randomness for three-party secure
//! computation, together with exact simulation and verification of concrete
//! protocols and correlated multi-secret sharing (CMSS) schemes.
//!
//! Alice (party 1) holds `X`, Bob (party 2) holds `Y`, and Charlie (party 3)
//! must end up with `Z ~ p(z|x,y)`. The three pairwise links carry transcripts
//! `M12`, `M23` and `M31`. This crate computes lower bounds on `H(M_ij)` from
//! the function alone, and enumerates real protocols exactly to compare.
//!
//! The crate is `no_std` (it needs `alloc`). Enable the `parallel` feature to
//! evaluate optimizer grids on a rayon pool.
//!
//! ## Modules
//!
//! * [`dist`]: finite joint distributions, channels and Shannon functionals.
//! * [`common_info`]: Gács-Körner common part and residual information.
//! * [`normal_form`]: reductions merging equivalent symbols, connectivity checks.
//! * [`bounds`]: every lower-bound family and the simplex optimizer behind them.
//! * [`protocol`]: protocol specs, exact execution, security checks, built-ins.
//! * [`cmss`]: correlated multi-secret sharing schemes.
#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod cmss;
pub mod common_info;
pub mod dist;
mod error;
pub mod normal_form;
pub mod protocol;
mod union_find;

pub use error::{Error, Result};

/// Probability mass at or below this value is treated as outside the support.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Tolerance for "equals zero" tests on information quantities.
pub const ZERO_TOL: f64 = 1e-9;
