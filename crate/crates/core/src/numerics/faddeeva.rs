//! Complex error functions.
//!
//! The Faddeeva function `w(z) = exp(-z^2) erfc(-iz)` is evaluated with the
//! region-switched algorithm of the `errorfunctions` crate (Taylor and
//! continued-fraction regions, Algorithm 916 near the real axis). Everything
//! else in the erf family is expressed through it.

use errorfunctions::{erf_with_relerror, w_with_relerror};
use num_complex::Complex64;

/// Requested relative error; `0.0` asks for machine precision.
const RELERR: f64 = 0.0;

/// Faddeeva function `w(z) = exp(-z^2) erfc(-iz)`.
pub fn faddeeva(z: Complex64) -> Complex64 {
    w_with_relerror(z, RELERR)
}

/// Complex error function.
pub fn erf_complex(z: Complex64) -> Complex64 {
    erf_with_relerror(z, RELERR)
}

/// Imaginary error function, `erfi(z) = -i erf(iz)`.
pub fn erfi_complex(z: Complex64) -> Complex64 {
    let e = erf_complex(Complex64::new(-z.im, z.re));
    Complex64::new(e.im, -e.re)
}

/// Complementary error function.
pub fn erfc_complex(z: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) - erf_complex(z)
}

/// `exp(log_prefactor) * erf(z)` without overflow in either factor.
///
/// The coherent-state matrix elements of `sign(x)` multiply a Gaussian
/// overlap that can underflow by an erf whose magnitude can overflow
/// (large imaginary arguments). Writing `erf(z) = ±(1 - exp(-z^2) w(±iz))`
/// keeps both pieces inside one exponential.
pub fn exp_times_erf(log_prefactor: Complex64, z: Complex64) -> Complex64 {
    if !(log_prefactor.re.is_finite()) {
        // exp(-inf) * bounded-growth erf: the product vanishes.
        return Complex64::new(0.0, 0.0);
    }
    let growth = (-z * z).re;
    if growth < 20.0 && log_prefactor.re < 600.0 {
        return log_prefactor.exp() * erf_complex(z);
    }
    let (sign, wz) = if z.re >= 0.0 {
        (1.0, faddeeva(Complex64::new(-z.im, z.re)))
    } else {
        (-1.0, faddeeva(Complex64::new(z.im, -z.re)))
    };
    let first = if log_prefactor.re < -745.0 {
        Complex64::new(0.0, 0.0)
    } else {
        log_prefactor.exp()
    };
    let tail_log = log_prefactor - z * z;
    let tail = if tail_log.re < -745.0 {
        Complex64::new(0.0, 0.0)
    } else {
        tail_log.exp() * wz
    };
    (first - tail) * sign
}
