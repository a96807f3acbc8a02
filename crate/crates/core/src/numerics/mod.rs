//! Numerical substrate: complex error functions, Gauss-Hermite quadrature
//! and a derivative-free optimizer.

mod faddeeva;
mod optimize;
mod quadrature;

pub use faddeeva::{erf_complex, erfc_complex, erfi_complex, exp_times_erf, faddeeva};
pub use optimize::{minimize, minimize_from, Minimum, OptimizerConfig};
pub use quadrature::{gauss_hermite, QuadratureRule, MAX_ORDER};

pub use num_complex::Complex64 as Complex;
