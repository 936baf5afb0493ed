//! Normalization, Fredholm, Meixner and Plancherel checks, and the named suites.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::identities::{identity_suite, DEFAULT_U_GRID};
use super::oracle::{oracle_suite, ORACLE_N_MAX, ORACLE_TAIL_TOL};
use super::scaling::scaling_suite;
use super::{Case, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::functions::decay_index;
use crate::kernel::{meixner_kernel, Block, HyperKernel};
use crate::linalg;
use crate::measure::{plancherel_measure, z_measure_n, GrandParams, ZParams};
use crate::partition::{enumerate_partitions, Sign};

/// LU pivots smaller than this fraction of the largest one draw a warning.
pub const PIVOT_WARNING: f64 = 1e-10;

/// `sum_{lambda in Y_n} M^(n)(lambda) = 1` for each parameter set and `n`.
pub fn normalization_check(params: &[ZParams], ns: std::ops::RangeInclusive<u32>, tol: f64) -> Result<VerificationReport> {
    let jobs: Vec<(ZParams, u32)> = params.iter().flat_map(|&zp| ns.clone().map(move |n| (zp, n))).collect();
    let cases: Vec<Case> = jobs
        .par_iter()
        .map(|&(zp, n)| {
            let total: f64 = enumerate_partitions(n)?.iter().map(|l| z_measure_n(l, &zp)).sum::<Result<f64>>()?;
            Ok(Case::abs(format!("{zp}, n = {n}"), total, 1.0, tol))
        })
        .collect::<Result<_>>()?;
    let mut report = ReportBuilder::new("normalization", tol);
    report.extend(cases);
    Ok(report.finish())
}

/// `max_{lambda in Y_n} |M^(n)_{z,z}(lambda) - dim^2 lambda / n!|` for each `z` in
/// increasing order: below `tol` at the first, strictly decreasing after.
pub fn plancherel_check(n: u32, zs: &[f64], tol: f64) -> Result<VerificationReport> {
    let diagrams = enumerate_partitions(n)?;
    let mut report = ReportBuilder::new("plancherel", tol);
    let mut previous: Option<f64> = None;
    for &z in zs {
        let zp = ZParams::real(z, z)?;
        let mut dist: f64 = 0.0;
        for l in &diagrams {
            dist = dist.max((z_measure_n(l, &zp)? - plancherel_measure(l)).abs());
        }
        let input = format!("n = {n}, z = z' = {z}: max deviation");
        match previous {
            None => report.push(Case::abs(input, dist, 0.0, tol)),
            Some(p) => report.push(Case::decrease(input, dist, p)),
        };
        previous = Some(dist);
    }
    Ok(report.finish())
}

/// `det(1 + L)` on an `n + n` truncation against `(1-xi)^-t`, and against the
/// one-block form `det(1 + D^T D)` with `D = Psi-^(1/2) W Psi+^(1/2)`.
pub fn fredholm_check(gp: &GrandParams, trunc: usize) -> Result<VerificationReport> {
    let needed = decay_index(gp, Sign::Plus)?.index.max(decay_index(gp, Sign::Minus)?.index);
    if (trunc as u64) < needed {
        return Err(Error::Domain(format!("truncation {trunc} is below the decay index {needed}")));
    }
    let kernel = HyperKernel::new(*gp);
    let mut report = ReportBuilder::new("fredholm", 1e-10);
    let l = kernel.l_matrix(trunc)?;
    let (det_l, pivots) = linalg::determinant_with_pivot_ratio(&(DMatrix::identity(2 * trunc, 2 * trunc) + l));
    let d = kernel.d_matrix(trunc)?;
    let (det_d, pivots_d) = linalg::determinant_with_pivot_ratio(&(DMatrix::identity(trunc, trunc) + d.transpose() * &d));
    for (name, p) in [("1 + L", pivots), ("1 + D^T D", pivots_d)] {
        if p < PIVOT_WARNING {
            report.warn(format!("LU of {name}: smallest/largest pivot {p:e}"));
        }
    }
    let t = gp.t();
    let input = format!("{}, xi = {}, trunc = {trunc}", gp.zp, gp.xi);
    report.push(Case::abs(format!("det(1 + L) (1-xi)^t, {input}"), det_l * (1.0 - gp.xi).powf(t), 1.0, 1e-10));
    report.push(Case::rel(format!("det(1 + D^T D) vs det(1 + L), {input}"), det_d, det_l, 1e-11));
    Ok(report.finish())
}

/// At `z = N + alpha`, `z' = N` the `++` block equals the shifted Meixner kernel
/// on `k, l <= kmax`; on `0..trunc` the Meixner kernel has trace `N` and is idempotent.
pub fn meixner_check(n: u32, alpha: f64, xi: f64, kmax: u64, trunc: usize) -> Result<VerificationReport> {
    let gp = GrandParams::new(ZParams::meixner(n, alpha)?, xi)?;
    let kernel = HyperKernel::new(gp);
    let mut report = ReportBuilder::new("meixner", 1e-10);
    let shift = u64::from(n);
    let pairs: Vec<(u64, u64)> = (0..=kmax).flat_map(|k| (0..=kmax).map(move |l| (k, l))).collect();
    let cases: Vec<Case> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let lhs = kernel.block_entry(Block::PP, k, l)?;
            let rhs = meixner_kernel(n, alpha, xi, k + shift, l + shift)?;
            Ok(Case::rel(format!("K++({k},{l}) vs M_{n}({},{})", k + shift, l + shift), lhs, rhs, 1e-10))
        })
        .collect::<Result<_>>()?;
    report.extend(cases);
    let entries: Vec<f64> = (0..trunc * trunc)
        .into_par_iter()
        .map(|i| meixner_kernel(n, alpha, xi, (i / trunc) as u64, (i % trunc) as u64))
        .collect::<Result<_>>()?;
    let m = DMatrix::from_row_slice(trunc, trunc, &entries);
    report.push(Case::abs(format!("trace of M_{n} on 0..{trunc}"), m.trace(), f64::from(n), 1e-8));
    report.push(Case::abs(format!("max |M^2 - M| on 0..{trunc}"), linalg::max_abs_diff(&(&m * &m), &m), 0.0, 1e-8));
    Ok(report.finish())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Normalization,
    Oracle,
    Fredholm,
    Identities,
    Meixner,
    Scaling,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] =
        [Suite::Normalization, Suite::Oracle, Suite::Fredholm, Suite::Identities, Suite::Meixner, Suite::Scaling];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::Normalization => "normalization",
            Suite::Oracle => "oracle",
            Suite::Fredholm => "fredholm",
            Suite::Identities => "identities",
            Suite::Meixner => "meixner",
            Suite::Scaling => "scaling",
            Suite::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Parameters for [`run_suite`]; the Meixner suite uses its own `(N, alpha)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub gp: GrandParams,
    pub u_grid: Vec<f64>,
    pub max_n: u32,
    pub meixner_n: u32,
    pub meixner_alpha: f64,
}

impl SuiteConfig {
    pub fn new(gp: GrandParams) -> Self {
        Self { gp, u_grid: DEFAULT_U_GRID.to_vec(), max_n: 18, meixner_n: 3, meixner_alpha: 0.5 }
    }
}

fn run_one(suite: Suite, cfg: &SuiteConfig) -> Result<VerificationReport> {
    let gp = &cfg.gp;
    match suite {
        Suite::Normalization => {
            let mut report = ReportBuilder::new("normalization", 1e-11);
            report.absorb(normalization_check(&[gp.zp], 1..=cfg.max_n, 1e-11)?);
            report.absorb(plancherel_check(6, &[100.5, 1000.5], 0.05)?);
            Ok(report.finish())
        }
        Suite::Oracle => oracle_suite(gp, ORACLE_N_MAX, ORACLE_TAIL_TOL, 1e-6),
        Suite::Fredholm => {
            let needed = decay_index(gp, Sign::Plus)?.index.max(decay_index(gp, Sign::Minus)?.index);
            fredholm_check(gp, (needed as usize).max(60))
        }
        Suite::Identities => identity_suite(gp, &cfg.u_grid),
        Suite::Meixner => meixner_check(cfg.meixner_n, cfg.meixner_alpha, gp.xi, 10, 100),
        Suite::Scaling => scaling_suite(&gp.zp),
        Suite::All => unreachable!(),
    }
}

/// Runs one suite, or each of them in order for [`Suite::All`].
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    match suite {
        Suite::All => Suite::EACH.iter().map(|&s| run_one(s, cfg)).collect(),
        s => Ok(vec![run_one(s, cfg)?]),
    }
}
