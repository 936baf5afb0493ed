//! Oracles and identity suites. Every check produces a [`VerificationReport`].

use std::time::Instant;

use serde::{Deserialize, Serialize};

mod identities;
mod oracle;
mod scaling;
mod suites;

pub use identities::{
    appendix_product, decomposition_first, decomposition_second, identity_suite, DEFAULT_U_GRID, IDENTITY_TOL,
    POLE_DISTANCE,
};
pub use oracle::{correlation_det, correlation_oracle, oracle_suite, OracleTable, OracleValue, ORACLE_N_MAX, ORACLE_TAIL_TOL};
pub use scaling::{
    lattice_index, limit_relation_check, psi_prefactor_check, scaling_limit_check, scaling_suite, FLOOR_EPS,
};
pub use suites::{
    fredholm_check, meixner_check, normalization_check, plancherel_check, run_suite, Suite, SuiteConfig,
};

/// Version of the JSON shape of reports and CLI rows.
pub const SCHEMA_VERSION: u32 = 1;

/// How a case is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|lhs - rhs| <= tolerance`
    Abs,
    /// `|lhs - rhs| <= tolerance |rhs|`
    Rel,
    /// `lhs < rhs`: an error sequence that must strictly decrease
    Decrease,
    /// recorded, never fails
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub input: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub check: Check,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Case {
    fn build(input: impl Into<String>, lhs: f64, rhs: f64, check: Check, tolerance: Option<f64>) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if rhs != 0.0 { abs_err / rhs.abs() } else { abs_err };
        let pass = match (check, tolerance) {
            (Check::Abs, Some(t)) => abs_err <= t,
            (Check::Rel, Some(t)) => rel_err <= t,
            (Check::Decrease, _) => lhs < rhs,
            (Check::Info, _) => true,
            _ => false,
        };
        Self { input: input.into(), lhs, rhs, abs_err, rel_err, check, tolerance, pass }
    }

    pub fn abs(input: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(input, lhs, rhs, Check::Abs, Some(tol))
    }

    pub fn rel(input: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::build(input, lhs, rhs, Check::Rel, Some(tol))
    }

    /// Passes when `current < previous`.
    pub fn decrease(input: impl Into<String>, current: f64, previous: f64) -> Self {
        Self::build(input, current, previous, Check::Decrease, None)
    }

    pub fn info(input: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::build(input, lhs, rhs, Check::Info, None)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    /// Headline tolerance; individual cases carry their own.
    pub tolerance: f64,
    pub cases: Vec<Case>,
    pub pass: bool,
    pub runtime_seconds: f64,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    /// Largest error among cases judged by the given check.
    pub fn max_error(&self, check: Check) -> f64 {
        self.cases
            .iter()
            .filter(|c| c.check == check)
            .map(|c| if check == Check::Rel { c.rel_err } else { c.abs_err })
            .fold(0.0, f64::max)
    }
}

/// Collects cases and stamps the runtime on [`ReportBuilder::finish`].
#[derive(Debug)]
pub struct ReportBuilder {
    suite: String,
    tolerance: f64,
    cases: Vec<Case>,
    warnings: Vec<String>,
    start: Instant,
}

impl ReportBuilder {
    pub fn new(suite: impl Into<String>, tolerance: f64) -> Self {
        Self { suite: suite.into(), tolerance, cases: Vec::new(), warnings: Vec::new(), start: Instant::now() }
    }

    pub fn push(&mut self, case: Case) -> &mut Self {
        self.cases.push(case);
        self
    }

    pub fn extend<I: IntoIterator<Item = Case>>(&mut self, cases: I) -> &mut Self {
        self.cases.extend(cases);
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) -> &mut Self {
        self.warnings.push(msg.into());
        self
    }

    pub fn absorb(&mut self, report: VerificationReport) -> &mut Self {
        self.cases.extend(report.cases);
        self.warnings.extend(report.warnings);
        self
    }

    pub fn finish(self) -> VerificationReport {
        let pass = !self.cases.is_empty() && self.cases.iter().all(|c| c.pass);
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: self.suite,
            tolerance: self.tolerance,
            cases: self.cases,
            pass,
            runtime_seconds: self.start.elapsed().as_secs_f64(),
            warnings: self.warnings,
        }
    }
}
