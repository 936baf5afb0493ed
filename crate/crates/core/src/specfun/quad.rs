//! Exp-sinh (double-exponential) quadrature on `[0, inf)` for complex integrands.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

// The lower end reaches s = exp(-pi/2 sinh 6.5) ~ 1e-227, enough for integrands
// like s^(a-1) with Re a down to about 0.1.
const TAU_MIN: f64 = -6.5;
const TAU_MAX: f64 = 4.5;
const MAX_LEVEL: u32 = 10;

/// Integrates `exp(g(s))` over `(0, inf)` where `log_integrand(ln s, s)` returns
/// `g(s)`. Working with the logarithm keeps huge and tiny factors out of the way
/// of each other near both endpoints.
///
/// The substitution `s = exp(pi/2 sinh tau)` makes the transformed integrand
/// decay double-exponentially; the step is halved until two successive levels
/// agree to `rel_tol`.
pub fn exp_sinh<G>(log_integrand: G, rel_tol: f64) -> Result<Complex64>
where
    G: Fn(f64, f64) -> Complex64,
{
    let node = |tau: f64| -> Complex64 {
        let ln_s = FRAC_PI_2 * tau.sinh();
        let s = ln_s.exp();
        // ds = s * pi/2 cosh(tau) dtau
        let g = log_integrand(ln_s, s) + ln_s + (FRAC_PI_2 * tau.cosh()).ln();
        if g.re < -745.0 || !g.re.is_finite() {
            Complex64::new(0.0, 0.0)
        } else {
            g.exp()
        }
    };

    let mut h = 0.5;
    let range = |h: f64| ((TAU_MIN / h) as i64, (TAU_MAX / h) as i64);
    let (lo, hi) = range(h);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for j in lo..=hi {
        let v = node(j as f64 * h);
        sum += v;
        abs_sum += v.norm();
    }
    let mut estimate = sum * h;
    for _ in 0..MAX_LEVEL {
        h *= 0.5;
        let (lo, hi) = range(h);
        for j in (lo..=hi).filter(|j| j % 2 != 0) {
            let v = node(j as f64 * h);
            sum += v;
            abs_sum += v.norm();
        }
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        // the second test stops once the change is at rounding level of the terms
        if diff <= rel_tol * estimate.norm() || diff <= 8.0 * f64::EPSILON * abs_sum * h {
            return Ok(estimate);
        }
    }
    Err(Error::NonConvergence { what: "exp-sinh quadrature", terms: 1 << MAX_LEVEL })
}
