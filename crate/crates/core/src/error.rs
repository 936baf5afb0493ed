use thiserror::Error;

/// Admissibility rules for the parameter pair, printed with parameter errors.
pub const ADMISSIBILITY_RULES: &str = "\
admissible (z, z') pairs:
  - z' = conj(z) with z not an integer, or
  - z, z' real with m < z, z' < m + 1 for a common integer m
in both cases t = z z' > 0 and (z)_k (z')_k, (-z)_k (-z')_k are positive for every k >= 1;
xi must lie strictly between 0 and 1";

#[derive(Debug, Error)]
pub enum Error {
    #[error("inadmissible parameters: {0}")]
    Admissibility(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("{what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("{what} exceeds the configured cap ({count} > {cap})")]
    ResourceCap { what: &'static str, count: u128, cap: u128 },

    #[error("certified tail bound {bound:e} exceeds the budget {budget:e}")]
    TailBudget { bound: f64, budget: f64 },

    #[error("precision loss in {what}: {detail}")]
    Precision { what: &'static str, detail: String },

    #[error("value expected to be real has imaginary part {im:e} (real part {re:e})")]
    NotReal { re: f64, im: f64 },

    #[error("block {0} is not available for degenerate (Meixner-mode) parameters")]
    DegenerateBlock(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
