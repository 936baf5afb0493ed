//! Gauss-function identities behind the kernel: the two series decompositions,
//! the product relation summing to one, and their kernel-level forms.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Case, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::functions::{psi_at, rs_at};
use crate::kernel::HyperKernel;
use crate::measure::GrandParams;
use crate::partition::Sign;
use crate::specfun::hyp2f1::{w_of_xi, MAX_TERMS};
use crate::specfun::{gauss_2f1_w, realize};

/// Tolerance of the Gauss-function identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance of the kernel-level forms, which go through Gamma ratios.
pub const KERNEL_IDENTITY_TOL: f64 = 1e-11;
/// Grid points must stay this far from the integers.
pub const POLE_DISTANCE: f64 = 1e-3;
pub const DEFAULT_U_GRID: [f64; 5] = [-2.7, -0.35, 0.4, 2.3, 3.7];

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const SERIES_REL_TOL: f64 = 1e-17;

fn check_pole(u: f64) -> Result<()> {
    let nearest = u.round();
    if (u - nearest).abs() < POLE_DISTANCE {
        return Err(Error::Pole(format!("u = {u} is within {POLE_DISTANCE} of the integer {nearest}")));
    }
    Ok(())
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `sum_k (a)_k (b)_k xi^k / k!^2 * term(k)` with the coefficient updated by its
/// ratio. Summation stops once the coefficient ratio is below `(1+xi)/2` and the
/// geometric tail from there is below [`SERIES_REL_TOL`] of the sum.
fn coefficient_series<T>(a: Complex64, b: Complex64, xi: f64, mut term: T) -> Result<Complex64>
where
    T: FnMut(u64, Complex64) -> Result<Complex64>,
{
    let cap = (1.0 + xi) / 2.0;
    let mut coeff = ONE;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..MAX_TERMS as u64 {
        let t = term(k, coeff)?;
        sum += t;
        let kf = k as f64;
        let ratio = ((a + kf) * (b + kf)).norm() * xi / ((kf + 1.0) * (kf + 1.0));
        if ratio < cap && t.norm() * cap / (1.0 - cap) <= SERIES_REL_TOL * sum.norm() {
            return Ok(sum);
        }
        coeff *= (a + kf) * (b + kf) * xi / ((kf + 1.0) * (kf + 1.0));
        if coeff == Complex64::new(0.0, 0.0) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { what: "decomposition series", terms: MAX_TERMS })
}

/// Both sides of
/// `F(a,b;u+1;w)/u = sum_k (a)_k(b)_k xi^k (1-xi)^(a+b-1) / (k!^2 (u+k)) F(1-a,1-b;k+1;w)`.
pub fn decomposition_first(a: Complex64, b: Complex64, u: f64, xi: f64) -> Result<(Complex64, Complex64)> {
    check_pole(u)?;
    let lhs = gauss_2f1_w(a, b, c(u + 1.0), xi)? / u;
    let pre = ((a + b - 1.0) * (-xi).ln_1p()).exp();
    let sum = coefficient_series(a, b, xi, |k, coeff| {
        let kf = k as f64;
        Ok(coeff * gauss_2f1_w(ONE - a, ONE - b, c(kf + 1.0), xi)? / (u + kf))
    })?;
    Ok((lhs, pre * sum))
}

/// Both sides of
/// `1 - F(a,b;u;w) = sum_k (a)_{k+1}(b)_{k+1} xi^{k+1} (1-xi)^(a+b-1) / (k!^2 (u+k)) F(1-a,1-b;k+2;w)/(k+1)`.
pub fn decomposition_second(a: Complex64, b: Complex64, u: f64, xi: f64) -> Result<(Complex64, Complex64)> {
    check_pole(u)?;
    let lhs = ONE - gauss_2f1_w(a, b, c(u), xi)?;
    let pre = ((a + b - 1.0) * (-xi).ln_1p()).exp();
    // (a)_{k+1} (b)_{k+1} xi^{k+1} / k!^2 = (a)_k (b)_k xi^k / k!^2 * (a+k)(b+k) xi
    let sum = coefficient_series(a, b, xi, |k, coeff| {
        let kf = k as f64;
        let f = gauss_2f1_w(ONE - a, ONE - b, c(kf + 2.0), xi)?;
        Ok(coeff * (a + kf) * (b + kf) * xi * f / ((u + kf) * (kf + 1.0)))
    })?;
    Ok((lhs, pre * sum))
}

/// `F(-z,-z';u+1;w) F(z,z';-u;w) + t w (1-w) F(1-z,1-z';u+2;w)/(u+1) F(1+z,1+z';1-u;w)/u`,
/// which equals one.
pub fn appendix_product(gp: &GrandParams, u: f64) -> Result<f64> {
    check_pole(u)?;
    let (z, zp) = (gp.zp.z(), gp.zp.zp());
    let xi = gp.xi;
    let w = w_of_xi(xi);
    let first = gauss_2f1_w(-z, -zp, c(u + 1.0), xi)? * gauss_2f1_w(z, zp, c(-u), xi)?;
    let second = gauss_2f1_w(ONE - z, ONE - zp, c(u + 2.0), xi)? / (u + 1.0)
        * gauss_2f1_w(ONE + z, ONE + zp, c(1.0 - u), xi)?
        / u;
    realize(first + z * zp * w * (1.0 - w) * second)
}

fn cases_at(gp: &GrandParams, kernel: &HyperKernel, u: f64) -> Result<Vec<Case>> {
    let mut out = Vec::new();
    let (z, zp) = (gp.zp.z(), gp.zp.zp());
    out.push(Case::abs(format!("product relation, u = {u}"), appendix_product(gp, u)?, 1.0, IDENTITY_TOL));
    for (label, a, b) in [("(-z,-z')", -z, -zp), ("(z,z')", z, zp)] {
        let (l, r) = decomposition_first(a, b, u, gp.xi)?;
        out.push(Case::rel(format!("first decomposition {label}, u = {u}"), realize(l)?, realize(r)?, IDENTITY_TOL));
        let (l, r) = decomposition_second(a, b, u, gp.xi)?;
        out.push(Case::rel(format!("second decomposition {label}, u = {u}"), realize(l)?, realize(r)?, IDENTITY_TOL));
    }
    for sign in [Sign::Plus, Sign::Minus] {
        let (rhat, shat, _) = kernel.rhat_shat(sign, u)?;
        let other = sign.flip();
        let p = psi_at(gp, other, u)?;
        let (r, s) = rs_at(gp, other, u)?;
        out.push(Case::rel(format!("Rhat{sign}(u) = S{other}(u)/psi{other}(u), u = {u}"), rhat, s / p, KERNEL_IDENTITY_TOL));
        out.push(Case::rel(
            format!("Shat{sign}(u) = 1 - R{other}(u)/psi{other}(u), u = {u}"),
            shat,
            1.0 - r / p,
            KERNEL_IDENTITY_TOL,
        ));
    }
    let (rp, sp) = rs_at(gp, Sign::Plus, u)?;
    let (rm, sm) = rs_at(gp, Sign::Minus, -u - 1.0)?;
    let rhs = psi_at(gp, Sign::Plus, u)? * psi_at(gp, Sign::Minus, -u - 1.0)?;
    out.push(Case::rel(format!("R+(u)R-(-u-1) + S+(u)S-(-u-1) = psi+(u)psi-(-u-1), u = {u}"), rp * rm + sp * sm, rhs, KERNEL_IDENTITY_TOL));
    Ok(out)
}

/// The identities at every point of `u_grid`.
pub fn identity_suite(gp: &GrandParams, u_grid: &[f64]) -> Result<VerificationReport> {
    for &u in u_grid {
        check_pole(u)?;
    }
    let kernel = HyperKernel::new(*gp);
    let per_u: Vec<Vec<Case>> = u_grid.par_iter().map(|&u| cases_at(gp, &kernel, u)).collect::<Result<_>>()?;
    let mut report = ReportBuilder::new("identities", IDENTITY_TOL);
    report.extend(per_u.into_iter().flatten());
    Ok(report.finish())
}
