//! Gauss hypergeometric function `F(a, b; c; w)` at `w = xi / (xi - 1)`.
//!
//! For `xi` in (0, 1) the argument `w` is negative and may have `|w| >= 1`, so the
//! direct series is useless in general. Every evaluation goes through the Pfaff
//! transformation
//!
//! ```text
//! F(a, b; c; w) = (1 - w)^(-a) F(a, c - b; c; w / (w - 1)),   w / (w - 1) = xi,
//! ```
//!
//! whose series converges geometrically with ratio tending to `xi`. Terminating
//! cases (`a` or `b` a nonpositive integer) are summed exactly in `w`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative size of the last retained term.
pub const TAIL_REL_TOL: f64 = 1e-17;

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 500_000;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Value of a hypergeometric series together with bookkeeping about its summation.
#[derive(Clone, Copy, Debug)]
pub struct SeriesSum {
    pub value: Complex64,
    /// Certified bound on the discarded tail (zero for terminating series).
    pub tail_bound: f64,
    pub terms: usize,
}

/// Returns `n` when `a` equals `-n` for a nonnegative integer `n`.
pub fn nonpositive_integer(a: Complex64) -> Option<u64> {
    if a.im == 0.0 && a.re <= 0.0 && a.re == a.re.round() && a.re > -1e15 {
        Some((-a.re) as u64)
    } else {
        None
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi > 0.0 && xi < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("xi = {xi} must lie in (0, 1)")))
    }
}

/// `w = xi / (xi - 1)`.
pub fn w_of_xi(xi: f64) -> f64 {
    xi / (xi - 1.0)
}

/// Direct series `sum (a)_m (b)_m / ((c)_m m!) x^m` for real `|x| < 1`.
///
/// Summation stops once a term drops below [`TAIL_REL_TOL`] times the partial sum
/// while the term ratio is inside the geometric regime; the discarded tail is then
/// bounded by `|term| r / (1 - r)`.
pub fn series(a: Complex64, b: Complex64, c: Complex64, x: f64) -> Result<SeriesSum> {
    if x.abs() >= 1.0 {
        return Err(Error::Domain(format!("direct series needs |x| < 1, got {x}")));
    }
    let terminating = nonpositive_integer(a).into_iter().chain(nonpositive_integer(b)).min();
    if let Some(m) = nonpositive_integer(c) {
        if terminating.is_none_or(|n| n > m) {
            return Err(Error::Pole(format!("lower parameter c = {c} is a nonpositive integer")));
        }
    }
    let r_max = 0.5 * (1.0 + x.abs());
    let mut sum = ONE;
    let mut term = ONE;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        let ratio = (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * x;
        term *= ratio;
        if term == ZERO {
            return Ok(SeriesSum { value: sum, tail_bound: 0.0, terms: m + 1 });
        }
        sum += term;
        let r = ratio.norm();
        if term.norm() <= TAIL_REL_TOL * sum.norm() && r < r_max {
            let next = ((a + mf + 1.0) * (b + mf + 1.0) / ((c + mf + 1.0) * (mf + 2.0))).norm() * x.abs();
            let rb = next.max(r).min(r_max);
            return Ok(SeriesSum {
                value: sum,
                tail_bound: term.norm() * rb / (1.0 - rb),
                terms: m + 2,
            });
        }
    }
    Err(Error::NonConvergence { what: "hypergeometric series", terms: MAX_TERMS })
}

fn terminating_in_w(a: Complex64, b: Complex64, c: Complex64, w: f64, n: u64) -> Result<Complex64> {
    if let Some(m) = nonpositive_integer(c) {
        if m < n {
            return Err(Error::Pole(format!(
                "lower parameter c = {c} hits zero before the series terminates"
            )));
        }
    }
    let mut sum = ONE;
    let mut term = ONE;
    for m in 0..n {
        let mf = m as f64;
        term *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * w;
        sum += term;
    }
    Ok(sum)
}

/// `F(a, b; c; xi/(xi-1))` with the summation details.
pub fn gauss_2f1_w_detailed(a: Complex64, b: Complex64, c: Complex64, xi: f64) -> Result<SeriesSum> {
    check_xi(xi)?;
    if a == ZERO || b == ZERO {
        return Ok(SeriesSum { value: ONE, tail_bound: 0.0, terms: 1 });
    }
    let w = w_of_xi(xi);
    let terminating = nonpositive_integer(a).into_iter().chain(nonpositive_integer(b)).min();
    if let Some(n) = terminating {
        let value = terminating_in_w(a, b, c, w, n)?;
        return Ok(SeriesSum { value, tail_bound: 0.0, terms: n as usize + 1 });
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::Pole(format!("lower parameter c = {c} is a nonpositive integer")));
    }
    let prefactor = (a * (1.0 - xi).ln()).exp();
    let inner = series(a, c - b, c, xi)?;
    Ok(SeriesSum {
        value: prefactor * inner.value,
        tail_bound: prefactor.norm() * inner.tail_bound,
        terms: inner.terms,
    })
}

/// `F(a, b; c; w)` at `w = xi / (xi - 1)`, `0 < xi < 1`.
pub fn gauss_2f1_w(a: Complex64, b: Complex64, c: Complex64, xi: f64) -> Result<Complex64> {
    gauss_2f1_w_detailed(a, b, c, xi).map(|s| s.value)
}

/// `d/dc F(a, b; c; xi/(xi-1))`.
///
/// Differentiates the Pfaff-transformed series term by term. Since the transformed
/// upper parameter `c - b` moves with `c`, the logarithmic derivative of the m-th
/// term is `sum_{j<m} [1/(c-b+j) - 1/(c+j)]`. When `c - b` sits on a nonpositive
/// integer the symmetric Pfaff form (pulling out `b` instead of `a`) is used.
pub fn gauss_2f1_w_dc(a: Complex64, b: Complex64, c: Complex64, xi: f64) -> Result<Complex64> {
    check_xi(xi)?;
    if a == ZERO || b == ZERO {
        return Ok(ZERO);
    }
    let w = w_of_xi(xi);
    let terminating = nonpositive_integer(a).into_iter().chain(nonpositive_integer(b)).min();
    if let Some(n) = terminating {
        if let Some(m) = nonpositive_integer(c) {
            if m <= n {
                return Err(Error::Pole(format!("lower parameter c = {c} is a nonpositive integer")));
            }
        }
        let mut sum = ZERO;
        let mut term = ONE;
        let mut dlog = ZERO;
        for m in 0..n {
            let mf = m as f64;
            term *= (a + mf) * (b + mf) / ((c + mf) * (mf + 1.0)) * w;
            dlog -= (c + mf).inv();
            sum += term * dlog;
        }
        return Ok(sum);
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::Pole(format!("lower parameter c = {c} is a nonpositive integer")));
    }
    let near_int = |v: Complex64| v.im.abs() < 1e-12 && v.re <= 0.0 && (v.re - v.re.round()).abs() < 1e-12;
    // F(a,b;c;w) = (1-xi)^pull * sum_m (pull)_m (c-other)_m / ((c)_m m!) xi^m
    let (pull, other) = if near_int(c - b) {
        if near_int(c - a) {
            return Err(Error::Pole(format!(
                "both c - a and c - b are nonpositive integers (a={a}, b={b}, c={c})"
            )));
        }
        (b, a)
    } else {
        (a, b)
    };
    let upper = c - other;
    let r_max = 0.5 * (1.0 + xi);
    let mut value = ONE;
    let mut deriv = ZERO;
    let mut term = ONE;
    let mut dlog = ZERO;
    for m in 0..MAX_TERMS {
        let mf = m as f64;
        let ratio = (pull + mf) * (upper + mf) / ((c + mf) * (mf + 1.0)) * xi;
        term *= ratio;
        dlog += (upper + mf).inv() - (c + mf).inv();
        let contrib = term * dlog;
        value += term;
        deriv += contrib;
        let small = term.norm() <= TAIL_REL_TOL * value.norm()
            && contrib.norm() <= TAIL_REL_TOL * deriv.norm().max(f64::MIN_POSITIVE);
        if (term == ZERO || small) && ratio.norm() < r_max {
            let prefactor = (pull * (1.0 - xi).ln()).exp();
            return Ok(prefactor * deriv);
        }
    }
    Err(Error::NonConvergence { what: "c-derivative of the hypergeometric series", terms: MAX_TERMS })
}
