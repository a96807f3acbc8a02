//! Bell-CHSH and Leggett tests for entangled thermal states (ETS) read out
//! by sign-binned, inefficient homodyne detection.
//!
//! Three computational routes share the same physics and check each other:
//!
//! * [`analytic`]: closed-form correlation of the qubit-mediated ETS,
//!   integrated over the thermal P-function in closed form.
//! * [`engine`]: exact algebra over finite superpositions of two-mode
//!   coherent states, integrated over the P-function by quadrature in
//!   [`ensemble`].
//! * [`fock`]: brute-force truncated number-basis simulation.
//!
//! [`inequalities`] optimizes the CHSH and Leggett functions over settings
//! on top of any of them.

// `!(x > 0.0)` is used on purpose: unlike `x <= 0.0` it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod engine;
pub mod ensemble;
pub mod error;
pub mod fock;
pub mod inequalities;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::Complex;
