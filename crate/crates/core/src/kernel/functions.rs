//! The functions `psi`, `R`, `S`, `P`, `Q` on `Z_+` (and at real arguments) from
//! which the L-operator and the hypergeometric kernel are assembled.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measure::GrandParams;
use crate::partition::Sign;
use crate::specfun::gamma::{ln_gamma, rgamma};
use crate::specfun::hyp2f1::nonpositive_integer;
use crate::specfun::{gauss_2f1_w, realize};

/// `psi(k) < DECAY_EPS * max psi` marks the end of a [`FunctionTable`].
pub const DECAY_EPS: f64 = 1e-16;
/// Hard stop for the decay search.
pub const DECAY_MAX_INDEX: u64 = 10_000_000;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `t^(1/2) xi^(1/2) / (1 - xi)`, the constant in front of `S`.
pub fn s_constant(gp: &GrandParams) -> f64 {
    (gp.t() * gp.xi).sqrt() / (1.0 - gp.xi)
}

/// `ln psi(0) = ln[t^(1/2) xi^(1/2) (1-xi)^(+-s)]`.
fn ln_psi0(gp: &GrandParams, sign: Sign) -> f64 {
    0.5 * gp.t().ln() + 0.5 * gp.xi.ln() + sign.as_f64() * gp.zp.s() * (-gp.xi).ln_1p()
}

/// `(k + e z)(k + e z') = k^2 + e k s + t`, the factor taking `psi(k-1)` to `psi(k)`.
fn pair_factor(gp: &GrandParams, sign: Sign, k: u64) -> f64 {
    let kf = k as f64;
    kf * kf + sign.as_f64() * kf * gp.zp.s() + gp.t()
}

/// `psi(k+1) / psi(k) = xi (k+1+e z)(k+1+e z') / (k+1)^2`.
pub fn psi_ratio(gp: &GrandParams, sign: Sign, k: u64) -> f64 {
    let k1 = (k + 1) as f64;
    gp.xi * pair_factor(gp, sign, k + 1) / (k1 * k1)
}

/// `ln psi(k)`; `-inf` where a Pochhammer factor vanishes (Meixner mode only).
pub fn ln_psi(gp: &GrandParams, sign: Sign, k: u64) -> Result<f64> {
    let pair = gp.zp.ln_pair_pochhammer(1.0, sign, k)?;
    let fact = crate::specfun::gamma::ln_factorial(k);
    Ok(ln_psi0(gp, sign) + k as f64 * gp.xi.ln() + pair - 2.0 * fact)
}

/// `psi(k) = t^(1/2) xi^(k+1/2) (1-xi)^(+-s) (1+-z)_k (1+-z')_k / k!^2`.
pub fn psi(gp: &GrandParams, sign: Sign, k: u64) -> Result<f64> {
    Ok(ln_psi(gp, sign, k)?.exp())
}

/// `psi(u)` at real `u` through Gamma functions. Negative values are possible
/// for negative `u`; the result is zero where `Gamma(u+1)` has a pole.
pub fn psi_at(gp: &GrandParams, sign: Sign, u: f64) -> Result<f64> {
    let (a, b) = gp.zp.signed(sign);
    let ua = u + 1.0 + a;
    let ub = u + 1.0 + b;
    if nonpositive_integer(ua).is_some() || nonpositive_integer(ub).is_some() {
        return Err(Error::Pole(format!("psi at u = {u}: Gamma(u + 1 +- z) has a pole")));
    }
    let w = ln_gamma(ua) + ln_gamma(ub) - ln_gamma(ONE + a) - ln_gamma(ONE + b);
    let ratio = realize(w.exp())?;
    let inv_fact = rgamma(Complex64::new(u + 1.0, 0.0)).re;
    let pre = (0.5 * gp.t().ln() + (u + 0.5) * gp.xi.ln() + sign.as_f64() * gp.zp.s() * (-gp.xi).ln_1p()).exp();
    Ok(pre * ratio * inv_fact * inv_fact)
}

/// `F(-e z, -e z'; u+1; w)` and `F(1-e z, 1-e z'; u+2; w)`.
pub fn hyper_factors(gp: &GrandParams, sign: Sign, u: f64) -> Result<(f64, f64)> {
    let (a, b) = gp.zp.signed(sign);
    let f1 = gauss_2f1_w(-a, -b, Complex64::new(u + 1.0, 0.0), gp.xi)?;
    let f2 = gauss_2f1_w(ONE - a, ONE - b, Complex64::new(u + 2.0, 0.0), gp.xi)?;
    Ok((realize(f1)?, realize(f2)?))
}

/// `(R(u), S(u))` at real `u`, through [`psi_at`].
pub fn rs_at(gp: &GrandParams, sign: Sign, u: f64) -> Result<(f64, f64)> {
    if u + 1.0 == 0.0 {
        return Err(Error::Pole("S(u) at u = -1".into()));
    }
    let p = psi_at(gp, sign, u)?;
    let (f1, f2) = hyper_factors(gp, sign, u)?;
    Ok((p * f1, s_constant(gp) * p * f2 / (u + 1.0)))
}

/// Everything known about one sign at one point `k` of `Z_+`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionValues {
    pub k: u64,
    pub ln_psi: f64,
    pub psi: f64,
    /// `F(-e z, -e z'; k+1; w)`
    pub f1: f64,
    /// `F(1-e z, 1-e z'; k+2; w)`
    pub f2: f64,
    pub r: f64,
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl FunctionValues {
    fn assemble(gp: &GrandParams, k: u64, ln_psi: f64, f1: f64, f2: f64) -> Self {
        let psi = ln_psi.exp();
        let root = (0.5 * ln_psi).exp();
        let c = s_constant(gp) / (k + 1) as f64;
        Self { k, ln_psi, psi, f1, f2, r: psi * f1, s: c * psi * f2, p: root * f1, q: c * root * f2 }
    }

    /// Values at `k`; `P = psi^(1/2) F1` and `Q` are finite even where `psi` vanishes.
    pub fn compute(gp: &GrandParams, sign: Sign, k: u64) -> Result<Self> {
        let lp = ln_psi(gp, sign, k)?;
        let (f1, f2) = hyper_factors(gp, sign, k as f64)?;
        Ok(Self::assemble(gp, k, lp, f1, f2))
    }
}

/// `psi` is below [`DECAY_EPS`] times its running maximum from `index` on and
/// the ratio `psi(k+1)/psi(k)` stays below `ratio_bound < 1` there.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayCertificate {
    pub index: u64,
    pub ratio_bound: f64,
    pub max_psi: f64,
}

/// Upper bound for `psi(k+1)/psi(k)` over `k >= k0`. The ratio is
/// `xi g(m)` with `g(m) = 1 + e s/m + t/m^2`, `m = k + 1`, which has one
/// critical point, so its supremum over `m >= m0` is attained at `m0`, at the
/// critical point or at infinity.
fn ratio_sup(gp: &GrandParams, sign: Sign, k0: u64) -> f64 {
    let es = sign.as_f64() * gp.zp.s();
    let t = gp.t();
    let g = |m: f64| 1.0 + es / m + t / (m * m);
    let m0 = (k0 + 1) as f64;
    let mut sup = g(m0).max(1.0);
    let crit = -2.0 * t / es;
    if es != 0.0 && crit > m0 {
        sup = sup.max(g(crit));
    }
    gp.xi * sup
}

/// First index at which `psi` has decayed for good, see [`DecayCertificate`].
pub fn decay_index(gp: &GrandParams, sign: Sign) -> Result<DecayCertificate> {
    let mut ln_p = ln_psi0(gp, sign);
    let mut ln_max = ln_p;
    let threshold = DECAY_EPS.ln();
    for k in 0..DECAY_MAX_INDEX {
        if ln_p == f64::NEG_INFINITY {
            return Ok(DecayCertificate { index: k, ratio_bound: 0.0, max_psi: ln_max.exp() });
        }
        if ln_p - ln_max < threshold {
            let r = ratio_sup(gp, sign, k);
            if r < 1.0 {
                return Ok(DecayCertificate { index: k, ratio_bound: r, max_psi: ln_max.exp() });
            }
        }
        let f = pair_factor(gp, sign, k + 1);
        ln_p = if f <= 0.0 {
            f64::NEG_INFINITY
        } else {
            ln_p + gp.xi.ln() + f.ln() - 2.0 * ((k + 1) as f64).ln()
        };
        ln_max = ln_max.max(ln_p);
    }
    Err(Error::NonConvergence { what: "psi decay search", terms: DECAY_MAX_INDEX as usize })
}

/// Values of one sign on `0..=decay index`.
#[derive(Clone, Debug)]
pub struct FunctionTable {
    pub sign: Sign,
    pub values: Vec<FunctionValues>,
    pub certificate: DecayCertificate,
}

impl FunctionTable {
    pub fn build(gp: &GrandParams, sign: Sign) -> Result<Self> {
        use rayon::prelude::*;
        let certificate = decay_index(gp, sign)?;
        let values = (0..=certificate.index)
            .into_par_iter()
            .map(|k| FunctionValues::compute(gp, sign, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { sign, values, certificate })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, k: u64) -> Option<&FunctionValues> {
        self.values.get(k as usize)
    }

    /// `sum_j R(j) / (u+j+1)^power` and the same for `S`, over the table, plus a
    /// bound on the neglected tail from the decay certificate.
    pub fn weighted_sums(&self, u: f64, power: i32) -> (f64, f64, f64) {
        let mut r_sum = 0.0;
        let mut s_sum = 0.0;
        for v in &self.values {
            let den = (u + v.k as f64 + 1.0).powi(power);
            r_sum += v.r / den;
            s_sum += v.s / den;
        }
        let tail = match self.values.last() {
            Some(last) if self.certificate.ratio_bound > 0.0 => {
                let r = self.certificate.ratio_bound;
                let den = (u + last.k as f64 + 2.0).abs().powi(power);
                (last.r.abs() + last.s.abs()) * r / (1.0 - r) / den
            }
            _ => 0.0,
        };
        (r_sum, s_sum, tail)
    }
}
