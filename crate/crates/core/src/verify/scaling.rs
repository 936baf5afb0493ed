//! Convergence of the hypergeometric kernel to the Whittaker kernel as `xi -> 1`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Case, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::functions::psi;
use crate::kernel::{Block, HyperKernel, WhittakerKernel};
use crate::measure::{GrandParams, ZParams};
use crate::partition::Sign;
use crate::specfun::{gauss_2f1_w, realize, rgamma, whittaker_w};

/// Added before taking the floor of `x / (1 - xi)`, so that exact products such as
/// `1.0 / (1 - 0.9)` land on the intended integer.
pub const FLOOR_EPS: f64 = 1e-9;

/// `floor(x / (1 - xi))`.
pub fn lattice_index(x: f64, xi: f64) -> u64 {
    (x / (1.0 - xi) + FLOOR_EPS).floor() as u64
}

/// For each block, `(1-xi)^-1 K(floor(u/(1-xi)), floor(v/(1-xi)))` against the
/// Whittaker kernel at `(u, v)`, over increasing `xi`. The relative error must
/// strictly decrease and end below `final_tol`.
pub fn scaling_limit_check(zp: &ZParams, u: f64, v: f64, xi_list: &[f64], final_tol: f64) -> Result<VerificationReport> {
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::Domain(format!("scaling limit needs u, v > 0, got {u}, {v}")));
    }
    if xi_list.windows(2).any(|w| w[0] >= w[1]) || xi_list.is_empty() {
        return Err(Error::Domain("xi list must be nonempty and increasing".into()));
    }
    let limit = WhittakerKernel::new(*zp)?;
    let rows: Vec<(Block, Vec<(f64, f64)>, f64)> = Block::ALL
        .par_iter()
        .map(|&block| {
            let target = limit.block_entry(block, u, v)?;
            let values = xi_list
                .iter()
                .map(|&xi| {
                    let kernel = HyperKernel::new(GrandParams::new(*zp, xi)?);
                    let (k, l) = (lattice_index(u, xi), lattice_index(v, xi));
                    Ok((xi, kernel.block_entry(block, k, l)? / (1.0 - xi)))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((block, values, target))
        })
        .collect::<Result<_>>()?;
    let mut report = ReportBuilder::new("scaling", final_tol);
    for (block, values, target) in rows {
        let mut previous: Option<f64> = None;
        for (i, &(xi, value)) in values.iter().enumerate() {
            let input = format!("block {block}, (u, v) = ({u}, {v}), xi = {xi}");
            let case = if i + 1 == values.len() {
                Case::rel(input.clone(), value, target, final_tol)
            } else {
                Case::info(input.clone(), value, target)
            };
            let err = case.rel_err;
            report.push(case);
            if let Some(p) = previous {
                report.push(Case::decrease(format!("{input}: error decreases"), err, p));
            }
            previous = Some(err);
        }
    }
    Ok(report.finish())
}

/// `psi(k)^(1/2)` at `k = floor(x/(1-xi))` against
/// `(t^(1/2) e^-x x^(+-s) / (Gamma(1+-z) Gamma(1+-z')))^(1/2)`.
pub fn psi_prefactor_check(zp: &ZParams, x: f64, xi: f64, tol: f64) -> Result<VerificationReport> {
    let gp = GrandParams::new(*zp, xi)?;
    let k = lattice_index(x, xi);
    let mut report = ReportBuilder::new("psi prefactor", tol);
    for sign in [Sign::Plus, Sign::Minus] {
        let (a, b) = zp.signed(sign);
        let one = Complex64::new(1.0, 0.0);
        let inv = realize(rgamma(one + a) * rgamma(one + b))?;
        let limit = (zp.t().sqrt() * (-x).exp() * x.powf(sign.as_f64() * zp.s()) * inv).sqrt();
        let value = psi(&gp, sign, k)?.sqrt();
        report.push(Case::rel(format!("sqrt psi{sign}(k), k = {k}, x = {x}, xi = {xi}"), value, limit, tol));
    }
    Ok(report.finish())
}

/// `F(a, b; u; 1 - u/x)` against `x^((a+b-1)/2) e^(x/2) W_{(1-a-b)/2, (a-b)/2}(x)`
/// at each `x`. The argument `1 - u/x` is `w` at `xi = 1 - x/u`.
pub fn limit_relation_check(a: f64, b: f64, u: f64, xs: &[f64], tol: f64) -> Result<VerificationReport> {
    let mut report = ReportBuilder::new("gauss-whittaker limit", tol);
    let cases: Vec<Case> = xs
        .par_iter()
        .map(|&x| {
            if !(x > 0.0 && x < u) {
                return Err(Error::Domain(format!("need 0 < x < u, got x = {x}, u = {u}")));
            }
            let xi = 1.0 - x / u;
            let f = gauss_2f1_w(Complex64::new(a, 0.0), Complex64::new(b, 0.0), Complex64::new(u, 0.0), xi)?.re;
            let w = whittaker_w(0.5 * (1.0 - a - b), Complex64::new(0.5 * (a - b), 0.0), x)?;
            let limit = x.powf(0.5 * (a + b - 1.0)) * (0.5 * x).exp() * w;
            Ok(Case::rel(format!("(a, b) = ({a}, {b}), u = {u}, x = {x}"), f, limit, tol))
        })
        .collect::<Result<_>>()?;
    report.extend(cases);
    Ok(report.finish())
}

/// Block convergence at `(1, 2)`, the prefactor limit at `x = 1.5` and the
/// Gauss-Whittaker limit at `u = 2000`.
pub fn scaling_suite(zp: &ZParams) -> Result<VerificationReport> {
    let mut report = ReportBuilder::new("scaling", 5e-2);
    report.absorb(scaling_limit_check(zp, 1.0, 2.0, &[0.9, 0.99, 0.999], 5e-2)?);
    report.absorb(psi_prefactor_check(zp, 1.5, 0.999, 2e-2)?);
    report.absorb(limit_relation_check(-0.5, -1.0 / 3.0, 2000.0, &[0.5, 1.5, 5.0], 1e-2)?);
    Ok(report.finish())
}
