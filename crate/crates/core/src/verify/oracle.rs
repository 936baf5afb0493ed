//! Correlation functions by brute force over diagrams and by kernel minors.

use rayon::prelude::*;

use super::{Case, ReportBuilder, VerificationReport};
use crate::error::{Error, Result};
use crate::kernel::HyperKernel;
use crate::measure::{mixed_measure, neg_binomial_tail_bound, GrandParams};
use crate::partition::{enumerate_partitions, partition_counts, Configuration, HalfInt, DEFAULT_PARTITION_CAP};

pub const ORACLE_N_MAX: u32 = 26;
pub const ORACLE_TAIL_TOL: f64 = 1e-15;

/// A brute-force value together with the certified bound on what was left out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub tail_bound: f64,
}

/// Every diagram with at most `n_max` boxes, as a configuration, with its
/// mixed-measure weight. Build once, query many times.
#[derive(Clone, Debug)]
pub struct OracleTable {
    entries: Vec<(Configuration, f64)>,
    tail_bound: f64,
}

impl OracleTable {
    pub fn build(gp: &GrandParams, n_max: u32, tail_tol: f64) -> Result<Self> {
        let tail_bound = neg_binomial_tail_bound(u64::from(n_max), gp.t(), gp.xi)?;
        if !(tail_bound < tail_tol) {
            return Err(Error::TailBudget { bound: tail_bound, budget: tail_tol });
        }
        let counts = partition_counts(n_max).ok_or(Error::ResourceCap {
            what: "partition count",
            count: u128::MAX,
            cap: DEFAULT_PARTITION_CAP,
        })?;
        let total: u128 = counts.iter().sum();
        if total > DEFAULT_PARTITION_CAP {
            return Err(Error::ResourceCap { what: "diagrams below the oracle size", count: total, cap: DEFAULT_PARTITION_CAP });
        }
        let per_n: Vec<Vec<(Configuration, f64)>> = (0..=n_max)
            .into_par_iter()
            .map(|n| {
                enumerate_partitions(n)?
                    .iter()
                    .map(|l| Ok((l.to_configuration(), mixed_measure(l, gp)?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(Self { entries: per_n.into_iter().flatten().collect(), tail_bound })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum` of the weights of diagrams whose configuration contains `x`.
    pub fn correlation(&self, x: &Configuration) -> OracleValue {
        let value = self.entries.iter().filter(|(c, _)| x.is_subset(c)).map(|(_, w)| w).sum();
        OracleValue { value, tail_bound: self.tail_bound }
    }
}

/// `rho(X)` as the total mixed-measure weight of diagrams with `|lambda| <= n_max`
/// containing `X`. Refuses when the negative-binomial tail is not below `tail_tol`.
pub fn correlation_oracle(x: &Configuration, gp: &GrandParams, n_max: u32, tail_tol: f64) -> Result<OracleValue> {
    Ok(OracleTable::build(gp, n_max, tail_tol)?.correlation(x))
}

/// `rho(X) = det K_X`.
pub fn correlation_det(x: &Configuration, gp: &GrandParams) -> Result<f64> {
    HyperKernel::new(*gp).correlation(x)
}

/// All subsets of size at most 3 of `{+-1/2, ..., +-7/2}`.
fn small_configurations() -> Vec<Configuration> {
    let ground: Vec<HalfInt> = (0..4).flat_map(|k| [HalfInt::positive(k), HalfInt::negative(k)]).collect();
    let mut out = vec![Configuration::empty()];
    for i in 0..ground.len() {
        out.push(Configuration::new([ground[i]]));
        for j in i + 1..ground.len() {
            out.push(Configuration::new([ground[i], ground[j]]));
            for k in j + 1..ground.len() {
                out.push(Configuration::new([ground[i], ground[j], ground[k]]));
            }
        }
    }
    out
}

/// `det K_X` against the brute-force sum for every `X` of size `<= 3` in
/// `{+-1/2, ..., +-7/2}`.
pub fn oracle_suite(gp: &GrandParams, n_max: u32, tail_tol: f64, tol: f64) -> Result<VerificationReport> {
    let mut report = ReportBuilder::new("oracle", tol);
    let table = OracleTable::build(gp, n_max, tail_tol)?;
    let kernel = HyperKernel::new(*gp);
    let configs = small_configurations();
    let cases: Vec<Case> = configs
        .par_iter()
        .map(|x| {
            let det = kernel.correlation(x)?;
            let oracle = table.correlation(x);
            Ok(Case::rel(format!("X = {x}, xi = {}", gp.xi), det, oracle.value, tol))
        })
        .collect::<Result<_>>()?;
    report.extend(cases);
    report.warn(format!("{} diagrams enumerated, certified tail {:e}", table.len(), table.tail_bound));
    Ok(report.finish())
}
