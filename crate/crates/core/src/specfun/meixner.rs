//! Meixner polynomials `M_n(k; alpha+1, xi) = F(-n, -k; alpha+1; (xi-1)/xi)` and
//! their weight `f(k) = (alpha+1)_k xi^k / k!` on the nonnegative integers.

use super::gamma::{ln_factorial, ln_pochhammer_real};

/// `n`-th Meixner polynomial at (possibly non-integer) `k`; an `n+1` term sum.
pub fn meixner_polynomial(n: u32, k: f64, alpha: f64, xi: f64) -> f64 {
    let x = (xi - 1.0) / xi;
    let mut sum = 1.0;
    let mut term = 1.0;
    for m in 0..n {
        let mf = f64::from(m);
        term *= (mf - f64::from(n)) * (mf - k) / ((alpha + 1.0 + mf) * (mf + 1.0)) * x;
        sum += term;
    }
    sum
}

/// `ln f(k)` for the weight `(alpha+1)_k xi^k / k!`.
pub fn ln_meixner_weight(k: u64, alpha: f64, xi: f64) -> f64 {
    ln_pochhammer_real(alpha + 1.0, k) + k as f64 * xi.ln() - ln_factorial(k)
}

/// Squared norm `h_n = n! / (xi^n (1-xi)^(alpha+1) (alpha+1)_n)`.
pub fn meixner_norm(n: u32, alpha: f64, xi: f64) -> f64 {
    let n64 = u64::from(n);
    (ln_factorial(n64)
        - f64::from(n) * xi.ln()
        - (alpha + 1.0) * (1.0 - xi).ln()
        - ln_pochhammer_real(alpha + 1.0, n64))
    .exp()
}

/// Leading coefficient `a_n = ((xi-1)/xi)^n / (alpha+1)_n` of `M_n` in `k`.
/// Its sign alternates with `n`.
pub fn meixner_leading_coefficient(n: u32, alpha: f64, xi: f64) -> f64 {
    let magnitude = (f64::from(n) * ((1.0 - xi) / xi).ln() - ln_pochhammer_real(alpha + 1.0, u64::from(n))).exp();
    if n.is_multiple_of(2) {
        magnitude
    } else {
        -magnitude
    }
}
