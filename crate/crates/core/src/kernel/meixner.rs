//! The Meixner kernel: the Christoffel-Darboux projection for Meixner
//! polynomials, carried over to `l^2(Z_+)` with the counting measure.

use crate::error::{Error, Result};
use crate::specfun::meixner::{ln_meixner_weight, meixner_leading_coefficient, meixner_norm, meixner_polynomial};

/// Agreement demanded between [`meixner_kernel_sum`] and [`meixner_kernel_cd`].
pub const FORM_AGREEMENT: f64 = 1e-10;

fn check(n: u32, alpha: f64, xi: f64) -> Result<()> {
    if n == 0 || !(alpha > -1.0) || !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Domain(format!("Meixner kernel needs N >= 1, alpha > -1, 0 < xi < 1; got {n}, {alpha}, {xi}")));
    }
    Ok(())
}

/// `d/dk M_n(k)`, differentiating each product `(-n)_m (-k)_m` factor by factor.
fn meixner_polynomial_dk(n: u32, k: f64, alpha: f64, xi: f64) -> f64 {
    let x = (xi - 1.0) / xi;
    let mut total = 0.0;
    let mut coeff = 1.0; // (-n)_m x^m / ((alpha+1)_m m!)
    for m in 1..=n {
        let mf = f64::from(m - 1);
        coeff *= (mf - f64::from(n)) / ((alpha + 1.0 + mf) * (mf + 1.0)) * x;
        // d/dk prod_{j<m} (j - k) = -sum_i prod_{j != i} (j - k)
        let mut deriv = 0.0;
        for i in 0..m {
            let others: f64 = (0..m).filter(|&j| j != i).map(|j| f64::from(j) - k).product();
            deriv -= others;
        }
        total += coeff * deriv;
    }
    total
}

/// `sum_{n<N} M_n(k) M_n(l) / h_n * sqrt(f(k) f(l))` and the same sum in absolute values.
fn sum_form(n_max: u32, alpha: f64, xi: f64, k: u64, l: u64) -> (f64, f64) {
    let root = (0.5 * (ln_meixner_weight(k, alpha, xi) + ln_meixner_weight(l, alpha, xi))).exp();
    let (mut sum, mut abs) = (0.0, 0.0);
    for n in 0..n_max {
        let term = meixner_polynomial(n, k as f64, alpha, xi) * meixner_polynomial(n, l as f64, alpha, xi)
            / meixner_norm(n, alpha, xi);
        sum += term;
        abs += term.abs();
    }
    (sum * root, abs * root)
}

/// `M_N(k, l)` as the sum over `n < N`.
pub fn meixner_kernel_sum(n: u32, alpha: f64, xi: f64, k: u64, l: u64) -> Result<f64> {
    check(n, alpha, xi)?;
    Ok(sum_form(n, alpha, xi, k, l).0)
}

/// `M_N(k, l)` in Christoffel-Darboux form
/// `a_{N-1}/(a_N h_{N-1}) sqrt(f(k) f(l)) (M_N(k) M_{N-1}(l) - M_{N-1}(k) M_N(l)) / (k - l)`,
/// with the derivative form on the diagonal.
pub fn meixner_kernel_cd(n: u32, alpha: f64, xi: f64, k: u64, l: u64) -> Result<f64> {
    check(n, alpha, xi)?;
    let c = meixner_leading_coefficient(n - 1, alpha, xi)
        / (meixner_leading_coefficient(n, alpha, xi) * meixner_norm(n - 1, alpha, xi));
    let root = (0.5 * (ln_meixner_weight(k, alpha, xi) + ln_meixner_weight(l, alpha, xi))).exp();
    let (kf, lf) = (k as f64, l as f64);
    let top = |u: f64| meixner_polynomial(n, u, alpha, xi);
    let low = |u: f64| meixner_polynomial(n - 1, u, alpha, xi);
    let body = if k == l {
        meixner_polynomial_dk(n, kf, alpha, xi) * low(kf) - top(kf) * meixner_polynomial_dk(n - 1, kf, alpha, xi)
    } else {
        (top(kf) * low(lf) - low(kf) * top(lf)) / (kf - lf)
    };
    Ok(c * root * body)
}

/// `M_N(k, l)`: both forms, which must agree to [`FORM_AGREEMENT`] relative to
/// the size of the terms of the sum.
pub fn meixner_kernel(n: u32, alpha: f64, xi: f64, k: u64, l: u64) -> Result<f64> {
    check(n, alpha, xi)?;
    let (sum, scale) = sum_form(n, alpha, xi, k, l);
    let cd = meixner_kernel_cd(n, alpha, xi, k, l)?;
    if (sum - cd).abs() > FORM_AGREEMENT * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!("Meixner kernel M_{n}({k},{l}): sum {sum:e} vs CD {cd:e}")));
    }
    Ok(sum)
}
