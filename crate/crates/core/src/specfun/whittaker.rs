//! Whittaker function `W_{kappa,mu}(x)` for real `kappa`, real or imaginary `mu`.
//!
//! Main route: `W = exp(-x/2) x^(mu+1/2) U(a, b, x)` with `a = 1/2 + mu - kappa`,
//! `b = 1 + 2 mu`, where the scaled Tricomi function `x^a U(a, b, x)` comes from
//! the Laplace integral
//!
//! ```text
//! x^a U(a, b, x) = 1/Gamma(a) int_0^inf e^-s s^(a-1) (1 + s/x)^(b-a-1) ds,  Re a > 0,
//! ```
//!
//! and the three-term recurrence in `a` (run downward, which is the stable
//! direction for `U`) covers `Re a <= 0`. There is no cancellation at large `x`.
//!
//! Second route: the connection formula through Kummer's `M`. It is exact in
//! principle but its two terms grow like `e^(x/2)` while `W` decays like
//! `e^(-x/2)`, so it is only used for small and moderate `x` and refuses to answer
//! once the cancellation exceeds [`CONNECTION_CANCELLATION_BUDGET`].

use num_complex::Complex64;

use super::gamma::{ln_gamma, rgamma};
use super::quad::exp_sinh;
use super::realize;
use crate::error::{Error, Result};

/// Largest tolerated ratio `(|T1| + |T2|) / |T1 + T2|` in the connection route.
pub const CONNECTION_CANCELLATION_BUDGET: f64 = 1e9;
/// `2 mu` closer than this to an integer triggers the perturbation in the connection route.
pub const EPS_INTEGER: f64 = 1e-8;
/// Perturbation of `mu` used around integer `2 mu`. The two connection terms are
/// `O(1/eps)` and cancel, so rounding grows like `1/eps^2` while the symmetric
/// average is off by `O(eps^2)`; this value balances the two.
pub const EPS_PERTURB: f64 = 3e-5;

const QUAD_TOL: f64 = 1e-15;

fn check_args(mu: Complex64, x: f64) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("Whittaker W needs x > 0, got {x}")));
    }
    if mu.re != 0.0 && mu.im != 0.0 {
        return Err(Error::Domain(format!("mu = {mu} must be real or purely imaginary")));
    }
    Ok(())
}

/// `x^a U(a, b, x)` for `Re a > 0` by quadrature.
fn scaled_u_integral(a: Complex64, b: Complex64, x: f64) -> Result<Complex64> {
    let expo = b - a - 1.0;
    let integral = exp_sinh(|ln_s, s| (a - 1.0) * ln_s - s + expo * (s / x).ln_1p(), QUAD_TOL)?;
    Ok(integral * rgamma(a))
}

/// `x^a U(a, b, x)` for any `a`, via the downward recurrence
/// `U(a-1) = (2a - b + x) U(a) - a (a - b + 1) U(a+1)`.
pub fn scaled_tricomi_u(a: Complex64, b: Complex64, x: f64) -> Result<Complex64> {
    let shift = if a.re >= 1.0 { 0 } else { (1.0 - a.re).ceil() as usize };
    let top = a + shift as f64;
    let mut upper = scaled_u_integral(top, b, x)?;
    if shift == 0 {
        return Ok(upper);
    }
    let mut upper2 = scaled_u_integral(top + 1.0, b, x)?;
    for step in 0..shift {
        let ak = top - step as f64;
        // scaled form: V(a) = x^a U(a)  =>  V(a-1) = (2a-b+x)/x V(a) - a(a-b+1)/x^2 V(a+1)
        let lower = (2.0 * ak - b + x) / x * upper - ak * (ak - b + 1.0) / (x * x) * upper2;
        upper2 = upper;
        upper = lower;
    }
    Ok(upper)
}

/// `W_{kappa,mu}(x)`, real for real `kappa` and real or purely imaginary `mu`.
pub fn whittaker_w(kappa: f64, mu: Complex64, x: f64) -> Result<f64> {
    check_args(mu, x)?;
    // W is even in mu; pick the sign with the larger Re a.
    let mu = if mu.re < 0.0 { -mu } else { mu };
    let a = 0.5 + mu - kappa;
    let b = 1.0 + 2.0 * mu;
    let v = scaled_tricomi_u(a, b, x)? * (kappa * x.ln() - 0.5 * x).exp();
    realize(v)
}

/// Kummer's `M(a, b, x) = sum (a)_n / ((b)_n n!) x^n`.
pub fn kummer_m(a: Complex64, b: Complex64, x: f64) -> Result<Complex64> {
    if super::hyp2f1::nonpositive_integer(b).is_some() {
        return Err(Error::Pole(format!("Kummer M with b = {b}")));
    }
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = sum;
    for n in 0..100_000usize {
        let nf = n as f64;
        term *= (a + nf) / ((b + nf) * (nf + 1.0)) * x;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) && nf > x.abs() + a.norm() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "Kummer series", terms: 100_000 })
}

fn connection_unperturbed(kappa: f64, mu: Complex64, x: f64) -> Result<f64> {
    let one = Complex64::new(1.0, 0.0);
    let half = 0.5 * one;
    let term = |m: Complex64| -> Result<Complex64> {
        // Gamma(-2m) / Gamma(1/2 - m - kappa) * x^(m+1/2) M(1/2 + m - kappa, 1 + 2m, x)
        let coeff = (ln_gamma(-2.0 * m)).exp() * rgamma(half - m - kappa);
        let m_val = kummer_m(half + m - kappa, one + 2.0 * m, x)?;
        Ok(coeff * ((m + 0.5) * x.ln()).exp() * m_val)
    };
    let t1 = term(mu)?;
    let t2 = term(-mu)?;
    let total = (t1 + t2) * (-0.5 * x).exp();
    let scale = (t1.norm() + t2.norm()) * (-0.5 * x).exp();
    if scale > CONNECTION_CANCELLATION_BUDGET * total.norm() {
        return Err(Error::Precision {
            what: "Whittaker connection formula",
            detail: format!("cancellation ratio {:e} at x = {x}", scale / total.norm()),
        });
    }
    realize(total)
}

/// `W_{kappa,mu}(x)` through the connection formula
/// `W = Gamma(-2mu)/Gamma(1/2-mu-kappa) M_{kappa,mu} + Gamma(2mu)/Gamma(1/2+mu-kappa) M_{kappa,-mu}`.
///
/// For `2 mu` within [`EPS_INTEGER`] of an integer the result is the symmetric
/// two-point combination `(W(mu + eps) + W(mu - eps)) / 2`, which removes the
/// `O(eps)` error term.
pub fn whittaker_w_connection(kappa: f64, mu: Complex64, x: f64) -> Result<f64> {
    check_args(mu, x)?;
    let two_mu = 2.0 * mu.re;
    if mu.im == 0.0 && (two_mu - two_mu.round()).abs() < EPS_INTEGER {
        let base = Complex64::new(0.5 * two_mu.round(), 0.0);
        let hi = connection_unperturbed(kappa, base + EPS_PERTURB, x)?;
        let lo = connection_unperturbed(kappa, base - EPS_PERTURB, x)?;
        return Ok(0.5 * (hi + lo));
    }
    connection_unperturbed(kappa, mu, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn elementary_case() {
        // W_{0,1/2}(x) = exp(-x/2)
        for x in [0.1, 0.5, 2.0, 7.0, 30.0] {
            let w = whittaker_w(0.0, re(0.5), x).unwrap();
            assert!((w - (-0.5 * x).exp()).abs() < 1e-14 * (-0.5 * x).exp(), "x={x}: {w}");
        }
        // W_{kappa, kappa - 1/2}(x) = x^kappa exp(-x/2)
        let (k, x) = (1.3, 4.2);
        let w = whittaker_w(k, re(k - 0.5), x).unwrap();
        let expect = x.powf(k) * (-0.5 * x).exp();
        assert!((w - expect).abs() < 1e-14 * expect);
    }

    #[test]
    fn reference_values() {
        // mpmath.whitw at 30 digits
        let cases = [
            (11.0 / 12.0, re(1.0 / 12.0), 1.0, 0.516_030_762_711_457_0),
            (-1.0 / 12.0, re(1.0 / 12.0), 2.0, 0.308_372_566_027_735_07),
            (0.5, Complex64::new(0.0, 1.5), 1.5, 0.143_499_651_603_815_06),
            (-0.5, Complex64::new(0.0, 1.5), 0.5, 0.046_888_907_785_971_433),
            (-1.7, re(0.3), 50.0, 1.641_221_124_890_338_7e-14),
        ];
        for (k, m, x, expect) in cases {
            let w = whittaker_w(k, m, x).unwrap();
            assert!((w - expect).abs() < 1e-12 * expect.abs(), "W_{{{k},{m}}}({x}) = {w} vs {expect}");
        }
    }

    #[test]
    fn even_in_mu() {
        for (k, m, x) in [(0.3, 0.2, 1.7), (-0.9, 0.45, 6.0), (1.1, 0.0, 0.8)] {
            let a = whittaker_w(k, re(m), x).unwrap();
            let b = whittaker_w(k, re(-m), x).unwrap();
            assert!((a - b).abs() < 1e-14 * a.abs());
        }
    }

    #[test]
    fn connection_route_agrees_at_moderate_x() {
        let cases = [
            (11.0 / 12.0, re(1.0 / 12.0)),
            (-1.0 / 12.0, re(1.0 / 12.0)),
            (0.5, Complex64::new(0.0, 1.5)),
            (0.3, re(0.35)),
        ];
        for (k, m) in cases {
            for x in [0.3, 1.0, 2.5, 6.0] {
                let a = whittaker_w(k, m, x).unwrap();
                let b = whittaker_w_connection(k, m, x).unwrap();
                assert!((a - b).abs() < 1e-8 * a.abs(), "k={k} mu={m} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn connection_route_at_integer_two_mu() {
        for (k, m) in [(0.2, 0.5), (-0.3, 0.0), (0.75, 1.0)] {
            for x in [0.3, 1.0, 2.5] {
                let a = whittaker_w(k, re(m), x).unwrap();
                let b = whittaker_w_connection(k, re(m), x).unwrap();
                assert!((a - b).abs() < 1e-8 * a.abs(), "k={k} mu={m} x={x}: {a} vs {b}");
            }
        }
        // mpmath reference values
        let w = whittaker_w(0.2, re(0.5), 0.3).unwrap();
        assert!((w - 0.842_025_354_875_787_4).abs() < 1e-13);
        let w = whittaker_w(-0.3, re(0.0), 0.3).unwrap();
        assert!((w - 0.614_624_641_854_889_2).abs() < 1e-13);
        let w = whittaker_w(0.75, re(1.0), 0.3).unwrap();
        assert!((w - 1.814_605_156_907_718_1).abs() < 1e-12);
    }

    #[test]
    fn connection_route_refuses_large_x() {
        let r = whittaker_w_connection(0.1, re(0.3), 60.0);
        assert!(matches!(r, Err(Error::Precision { .. })), "{r:?}");
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(whittaker_w(0.1, re(0.2), 0.0), Err(Error::Domain(_))));
        assert!(matches!(whittaker_w(0.1, Complex64::new(0.1, 0.1), 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn ode_residual() {
        // y'' = (1/4 - kappa/x + (mu^2 - 1/4)/x^2) y, five-point second differences
        let cases = [(11.0 / 12.0, re(1.0 / 12.0)), (-1.0 / 12.0, re(1.0 / 12.0)), (0.5, Complex64::new(0.0, 1.5)), (0.2, re(0.5))];
        for (k, m) in cases {
            let mu2 = (m * m).re;
            let mut x: f64 = 0.5;
            while x <= 20.0 {
                let h = 0.02 * x.min(1.0);
                let y = |t: f64| whittaker_w(k, m, t).unwrap();
                let y0 = y(x);
                let d2 = (-y(x + 2.0 * h) + 16.0 * y(x + h) - 30.0 * y0 + 16.0 * y(x - h) - y(x - 2.0 * h)) / (12.0 * h * h);
                let rhs = (0.25 - k / x + (mu2 - 0.25) / (x * x)) * y0;
                assert!((d2 - rhs).abs() <= 1e-5 * (d2.abs() + rhs.abs()), "k={k} mu={m} x={x}: {d2} vs {rhs}");
                x += 0.75;
            }
        }
    }

    #[test]
    fn large_x_asymptotics() {
        for (k, m) in [(0.3, re(0.25)), (0.5, Complex64::new(0.0, 0.2)), (0.0, re(0.5))] {
            let x: f64 = 50.0;
            let ratio = whittaker_w(k, m, x).unwrap() / (x.powf(k) * (-0.5 * x).exp());
            assert!((ratio - 1.0).abs() <= 1e-3, "k={k} mu={m}: {ratio}");
        }
    }
}
