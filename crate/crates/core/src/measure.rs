//! z-measures on `Y_n`, the negative-binomial mixture over `n`, and the
//! Plancherel limit.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ADMISSIBILITY_RULES};
use crate::linalg;
use crate::partition::{Sign, YoungDiagram};
use crate::specfun::gamma::{ln_factorial, ln_pochhammer, ln_pochhammer_real};
use crate::specfun::realize_ln;

/// Number of Pochhammer factors checked for positivity at construction.
pub const K_CHECK: u64 = 50;

/// Relative agreement demanded between the two routes of [`mixed_measure`].
pub const ROUTE_AGREEMENT: f64 = 1e-10;

/// Tolerance for recognising `z' = conj(z)` and real inputs.
const PAIR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamKind {
    /// `z' = conj(z)`, `z` not an integer.
    ComplexPair,
    /// `z, z'` real in a common open interval `(m, m+1)`.
    RealPair,
    /// `z = N + alpha`, `z' = N`: only the Meixner-mode kernel accepts these.
    Meixner { n: u32 },
}

/// An admissible pair `(z, z')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZParams {
    z: Complex64,
    zp: Complex64,
    kind: ParamKind,
}

impl ZParams {
    pub fn new(z: Complex64, zp: Complex64) -> Result<Self> {
        let scale = z.norm().max(zp.norm()).max(1.0);
        let kind = if z.im == 0.0 && zp.im == 0.0 {
            let (a, b) = (z.re, zp.re);
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Admissibility(format!("non-finite parameters z = {a}, z' = {b}")));
            }
            if a == a.floor() || b == b.floor() {
                return Err(Error::Admissibility(format!(
                    "real z = {a}, z' = {b}: neither may be an integer"
                )));
            }
            if a.floor() != b.floor() {
                return Err(Error::Admissibility(format!(
                    "real z = {a}, z' = {b} do not lie in a common interval (m, m+1)"
                )));
            }
            ParamKind::RealPair
        } else {
            if (zp - z.conj()).norm() > PAIR_TOL * scale {
                return Err(Error::Admissibility(format!(
                    "complex z = {z}, z' = {zp}: z' must equal conj(z)"
                )));
            }
            ParamKind::ComplexPair
        };
        let zp = if kind == ParamKind::ComplexPair { z.conj() } else { zp };
        let params = Self { z, zp, kind };
        params.check_positivity()?;
        Ok(params)
    }

    pub fn real(z: f64, zp: f64) -> Result<Self> {
        Self::new(Complex64::new(z, 0.0), Complex64::new(zp, 0.0))
    }

    /// `z = a + bi`, `z' = a - bi`.
    pub fn conjugate_pair(re: f64, im: f64) -> Result<Self> {
        let z = Complex64::new(re, im);
        Self::new(z, z.conj())
    }

    /// The degenerate pair `z = n + alpha`, `z' = n` with `alpha > -1`, `n >= 1`.
    pub fn meixner(n: u32, alpha: f64) -> Result<Self> {
        if n == 0 || !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Admissibility(format!("Meixner mode needs N >= 1 and alpha > -1, got N = {n}, alpha = {alpha}")));
        }
        let nf = f64::from(n);
        Ok(Self {
            z: Complex64::new(nf + alpha, 0.0),
            zp: Complex64::new(nf, 0.0),
            kind: ParamKind::Meixner { n },
        })
    }

    fn check_positivity(&self) -> Result<()> {
        let t = self.t();
        if !(t > 0.0) {
            return Err(Error::Admissibility(format!("t = z z' = {t} is not positive")));
        }
        let s = self.s();
        for j in 0..K_CHECK {
            let jf = j as f64;
            // (z+j)(z'+j) = j^2 + j s + t and (-z+j)(-z'+j) = j^2 - j s + t
            let plus = jf * jf + jf * s + t;
            let minus = jf * jf - jf * s + t;
            if !(plus > 0.0 && minus > 0.0) {
                return Err(Error::Admissibility(format!(
                    "(z)_k (z')_k or (-z)_k (-z')_k changes sign at k = {}",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn zp(&self) -> Complex64 {
        self.zp
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn is_meixner(&self) -> bool {
        matches!(self.kind, ParamKind::Meixner { .. })
    }

    /// `t = z z'`, real and positive.
    pub fn t(&self) -> f64 {
        (self.z * self.zp).re
    }

    /// `s = z + z'`, real.
    pub fn s(&self) -> f64 {
        (self.z + self.zp).re
    }

    /// `(e z, e z')` for the sign `e`.
    pub fn signed(&self, sign: Sign) -> (Complex64, Complex64) {
        match sign {
            Sign::Plus => (self.z, self.zp),
            Sign::Minus => (-self.z, -self.zp),
        }
    }

    /// `ln[(a + e z)_k (a + e z')_k]`, real because the two factors are conjugate
    /// or both real with the same sign. `-inf` when a factor vanishes.
    pub fn ln_pair_pochhammer(&self, a: f64, sign: Sign, k: u64) -> Result<f64> {
        let (u, v) = self.signed(sign);
        let w = ln_pochhammer(u + a, k) + ln_pochhammer(v + a, k);
        if w.re == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        realize_ln(w)
    }

    fn require_general(&self) -> Result<()> {
        if self.is_meixner() {
            return Err(Error::Admissibility(format!(
                "{self} is a Meixner-mode pair; the z-measures are not positive there\n{ADMISSIBILITY_RULES}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ZParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z = {}, z' = {}", self.z, self.zp)
    }
}

/// `(z, z')` together with `xi` in `(0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrandParams {
    pub zp: ZParams,
    pub xi: f64,
}

impl GrandParams {
    pub fn new(zp: ZParams, xi: f64) -> Result<Self> {
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::Admissibility(format!("xi = {xi} is not in (0, 1)")));
        }
        Ok(Self { zp, xi })
    }

    pub fn t(&self) -> f64 {
        self.zp.t()
    }
}

/// `ln M^(n)(lambda)` through `dim^2 / n!`:
/// `M = dim^2/n! * t^d/(t)_n * prod (z+1)_p (z'+1)_p (1-z)_q (1-z')_q`.
pub fn ln_z_measure_n(lambda: &YoungDiagram, zp: &ZParams) -> Result<f64> {
    zp.require_general()?;
    if lambda.is_empty() {
        return Ok(0.0);
    }
    let n = u64::from(lambda.n());
    let t = zp.t();
    let (p, q) = lambda.frobenius();
    let mut acc = 2.0 * lambda.ln_dimension() - ln_factorial(n) - ln_pochhammer_real(t, n)
        + lambda.depth() as f64 * t.ln();
    for (&pi, &qi) in p.iter().zip(q) {
        acc += zp.ln_pair_pochhammer(1.0, Sign::Plus, u64::from(pi))?;
        acc += zp.ln_pair_pochhammer(1.0, Sign::Minus, u64::from(qi))?;
    }
    Ok(acc)
}

/// `M^(n)_{z,z'}(lambda)` with `n = |lambda|`.
pub fn z_measure_n(lambda: &YoungDiagram, zp: &ZParams) -> Result<f64> {
    Ok(ln_z_measure_n(lambda, zp)?.exp())
}

/// `ln pi(n) = t ln(1-xi) + ln (t)_n - ln n! + n ln xi`.
pub fn ln_neg_binomial_weight(n: u64, t: f64, xi: f64) -> f64 {
    t * (-xi).ln_1p() + ln_pochhammer_real(t, n) - ln_factorial(n) + n as f64 * xi.ln()
}

/// `pi_{t,xi}(n) = (1-xi)^t (t)_n / n! xi^n`.
pub fn neg_binomial_weight(n: u64, t: f64, xi: f64) -> f64 {
    ln_neg_binomial_weight(n, t, xi).exp()
}

/// Upper bound on `sum_{n > n_max} pi(n)` from the ratio test:
/// `pi(n+1)/pi(n) = xi (t+n)/(n+1)` is bounded by `r = max(xi, xi (t+m)/(m+1))`
/// for `n >= m = n_max + 1`, so the tail is at most `pi(m) / (1 - r)`.
pub fn neg_binomial_tail_bound(n_max: u64, t: f64, xi: f64) -> Result<f64> {
    let m = n_max + 1;
    let r = xi.max(xi * (t + m as f64) / (m as f64 + 1.0));
    if r >= 1.0 {
        return Err(Error::Domain(format!("ratio bound {r} >= 1 at n = {m}; raise n_max")));
    }
    Ok(neg_binomial_weight(m, t, xi) / (1.0 - r))
}

/// `ln M_{z,z',xi}(lambda)` straight from the grand-canonical product formula
/// `(1-xi)^t xi^n t^d prod[...]/(p!^2 q!^2) det^2[1/(p_i+q_j+1)]`, with a
/// floating-point determinant.
pub fn ln_mixed_measure_direct(lambda: &YoungDiagram, gp: &GrandParams) -> Result<f64> {
    let zp = &gp.zp;
    zp.require_general()?;
    let t = zp.t();
    let (p, q) = lambda.frobenius();
    let d = lambda.depth();
    let cauchy = DMatrix::from_fn(d, d, |i, j| 1.0 / f64::from(p[i] + q[j] + 1));
    let det = linalg::determinant(&cauchy);
    let mut acc = t * (-gp.xi).ln_1p() + f64::from(lambda.n()) * gp.xi.ln() + d as f64 * t.ln();
    for (&pi, &qi) in p.iter().zip(q) {
        acc += zp.ln_pair_pochhammer(1.0, Sign::Plus, u64::from(pi))?;
        acc += zp.ln_pair_pochhammer(1.0, Sign::Minus, u64::from(qi))?;
        acc -= 2.0 * (ln_factorial(u64::from(pi)) + ln_factorial(u64::from(qi)));
    }
    Ok(acc + 2.0 * det.abs().ln())
}

/// `M_{z,z',xi}(lambda) = M^(n)(lambda) pi(n)`. Computed as that product and
/// from the direct formula; the two must agree to [`ROUTE_AGREEMENT`].
pub fn mixed_measure(lambda: &YoungDiagram, gp: &GrandParams) -> Result<f64> {
    let factored = ln_z_measure_n(lambda, &gp.zp)? + ln_neg_binomial_weight(u64::from(lambda.n()), gp.t(), gp.xi);
    let direct = ln_mixed_measure_direct(lambda, gp)?;
    let (a, b) = (factored.exp(), direct.exp());
    if (a - b).abs() > ROUTE_AGREEMENT * a.abs().max(b.abs()) {
        return Err(Error::Consistency(format!("mixed measure of {lambda}: {a:e} vs {b:e}")));
    }
    Ok(a)
}

/// `dim^2 lambda / |lambda|!`.
pub fn plancherel_measure(lambda: &YoungDiagram) -> f64 {
    (2.0 * lambda.ln_dimension() - ln_factorial(u64::from(lambda.n()))).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::enumerate_partitions;
    use proptest::prelude::*;

    fn yd(parts: &[u32]) -> YoungDiagram {
        YoungDiagram::new(parts.to_vec()).unwrap()
    }

    fn base() -> ZParams {
        ZParams::real(0.5, 1.0 / 3.0).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(ZParams::real(0.5, 1.0 / 3.0).is_ok());
        assert!(ZParams::real(-0.4, -0.7).is_ok());
        assert!(ZParams::real(2.2, 2.9).is_ok());
        assert!(ZParams::conjugate_pair(0.5, 1.5).is_ok());
        assert!(ZParams::conjugate_pair(3.0, 0.1).is_ok());
        assert!(ZParams::real(0.5, 1.5).is_err());
        assert!(ZParams::real(1.0, 1.5).is_err());
        assert!(ZParams::real(0.5, -0.5).is_err());
        assert!(ZParams::new(Complex64::new(0.5, 1.0), Complex64::new(0.5, 2.0)).is_err());
        assert!(GrandParams::new(base(), 1.0).is_err());
        assert!(GrandParams::new(base(), 0.0).is_err());
        let m = ZParams::meixner(3, 0.5).unwrap();
        assert!(z_measure_n(&yd(&[1]), &m).is_err());
        assert_eq!(m.t(), 10.5);
    }

    #[test]
    fn spot_values() {
        let zp = base();
        assert!((z_measure_n(&yd(&[1]), &zp).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(z_measure_n(&YoungDiagram::empty(), &zp).unwrap(), 1.0);
        assert!((z_measure_n(&yd(&[2]), &zp).unwrap() - 6.0 / 7.0).abs() < 1e-14);
        assert!((z_measure_n(&yd(&[1, 1]), &zp).unwrap() - 1.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn normalization_small_n() {
        for zp in [base(), ZParams::real(-0.4, -0.7).unwrap(), ZParams::conjugate_pair(0.5, 1.5).unwrap()] {
            for n in 1..=12 {
                let total: f64 = enumerate_partitions(n).unwrap().iter().map(|l| z_measure_n(l, &zp).unwrap()).sum();
                assert!((total - 1.0).abs() < 1e-12, "{zp}, n={n}: {total}");
            }
        }
    }

    #[test]
    fn transposition_symmetry() {
        let zp = ZParams::conjugate_pair(0.3, 0.8).unwrap();
        let neg = ZParams::conjugate_pair(-0.3, -0.8).unwrap();
        for n in 1..=10 {
            for l in enumerate_partitions(n).unwrap() {
                let a = z_measure_n(&l, &zp).unwrap();
                let b = z_measure_n(&l.transpose(), &neg).unwrap();
                assert!((a - b).abs() <= 1e-12 * a, "{l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn negative_binomial() {
        let (t, xi) = (1.0 / 6.0, 0.2);
        assert!((neg_binomial_weight(0, t, xi) - 0.8f64.powf(t)).abs() < 1e-16);
        let expect = 0.8f64.powf(t) * (t * (t + 1.0) / 2.0) * 0.04;
        assert!((neg_binomial_weight(2, t, xi) - expect).abs() < 1e-16);
        let sum: f64 = (0..=200).map(|n| neg_binomial_weight(n, 2.0, 0.5)).sum();
        assert!((1.0 - sum).abs() <= 1e-12);
        let tail_exact: f64 = (31..400).map(|n| neg_binomial_weight(n, 2.0, 0.5)).sum();
        let bound = neg_binomial_tail_bound(30, 2.0, 0.5).unwrap();
        assert!(bound >= tail_exact && bound < 3.0 * tail_exact);
        assert!(neg_binomial_tail_bound(1, 30.0, 0.5).is_err());
    }

    #[test]
    fn mixed_measure_examples() {
        let gp = GrandParams::new(base(), 0.2).unwrap();
        let t = gp.t();
        assert!((mixed_measure(&YoungDiagram::empty(), &gp).unwrap() - 0.8f64.powf(t)).abs() < 1e-15);
        let expect = 0.8f64.powf(t) * 0.2 * t;
        assert!((mixed_measure(&yd(&[1]), &gp).unwrap() - expect).abs() < 1e-15);
        // both routes, all |lambda| <= 15
        for n in 0..=15 {
            for l in enumerate_partitions(n).unwrap() {
                mixed_measure(&l, &gp).unwrap();
            }
        }
    }

    #[test]
    fn mixed_total_mass() {
        let gp = GrandParams::new(base(), 0.2).unwrap();
        let total: f64 = (0..=25)
            .flat_map(|n| enumerate_partitions(n).unwrap())
            .map(|l| mixed_measure(&l, &gp).unwrap())
            .sum();
        let tail = neg_binomial_tail_bound(25, gp.t(), gp.xi).unwrap();
        assert!(tail < 1e-15);
        assert!((1.0 - total).abs() <= tail + 1e-14, "{total}");
    }

    #[test]
    fn plancherel_examples() {
        assert_eq!(plancherel_measure(&yd(&[1])), 1.0);
        assert!((plancherel_measure(&yd(&[2, 1])) - 2.0 / 3.0).abs() < 1e-15);
        let total: f64 = enumerate_partitions(9).unwrap().iter().map(plancherel_measure).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn complex_pairs_normalize(re in -3.0f64..3.0, im in 0.05f64..3.0, n in 1u32..9) {
            let zp = ZParams::conjugate_pair(re, im).unwrap();
            let mut total = 0.0;
            for l in enumerate_partitions(n).unwrap() {
                let v = z_measure_n(&l, &zp).unwrap();
                prop_assert!(v > 0.0);
                total += v;
            }
            prop_assert!((total - 1.0).abs() < 1e-11);
        }

        #[test]
        fn real_pairs_normalize(m in -4i32..4, a in 0.01f64..0.99, b in 0.01f64..0.99, n in 1u32..9) {
            let zp = ZParams::real(f64::from(m) + a, f64::from(m) + b).unwrap();
            let total: f64 = enumerate_partitions(n).unwrap().iter().map(|l| z_measure_n(l, &zp).unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-11);
        }
    }
}
