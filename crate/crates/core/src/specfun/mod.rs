//! Special-function primitives used by the measures and kernels.

pub mod gamma;
pub mod hyp2f1;
pub mod meixner;
pub mod quad;
pub mod whittaker;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use gamma::{ln_gamma, ln_pochhammer, pochhammer, rgamma};
pub use hyp2f1::{gauss_2f1_w, gauss_2f1_w_dc};
pub use meixner::{meixner_leading_coefficient, meixner_norm, meixner_polynomial};
pub use whittaker::{whittaker_w, whittaker_w_connection};

/// Tolerance on the relative imaginary part of quantities that must be real.
pub const EPS_REAL: f64 = 1e-9;

/// Returns the real part of `v` after checking `|Im v| <= EPS_REAL |v|`.
pub fn realize(v: Complex64) -> Result<f64> {
    realize_scaled(v, v.norm())
}

/// Like [`realize`] but measures the imaginary part against `scale`, for values
/// that come out of a cancelling sum whose terms had size `scale`.
pub fn realize_scaled(v: Complex64, scale: f64) -> Result<f64> {
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Domain(format!("non-finite value {v}")));
    }
    if v.im.abs() <= EPS_REAL * scale || v.im == 0.0 {
        Ok(v.re)
    } else {
        Err(Error::NotReal { re: v.re, im: v.im })
    }
}

/// Real logarithm of a positive quantity given through a complex logarithm
/// `w` (imaginary part only defined modulo `2 pi`). Fails if `exp(w)` is not
/// positive real to within [`EPS_REAL`].
pub fn realize_ln(w: Complex64) -> Result<f64> {
    if w.re == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::Domain(format!("non-finite logarithm {w}")));
    }
    let phase = w.im - std::f64::consts::TAU * (w.im / std::f64::consts::TAU).round();
    if phase.abs() > EPS_REAL {
        return Err(Error::NotReal { re: w.re.exp() * phase.cos(), im: w.re.exp() * phase.sin() });
    }
    Ok(w.re)
}
