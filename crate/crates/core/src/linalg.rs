//! Dense LU helpers on top of nalgebra.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Determinant by LU with partial pivoting.
pub fn determinant(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// Determinant together with `min |U_ii| / max |U_ii|` of the LU factor, a cheap
/// conditioning indicator.
pub fn determinant_with_pivot_ratio(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (1.0, 1.0);
    }
    let lu = m.clone().lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..u.nrows()).map(|i| u[(i, i)].abs()).collect();
    let max = diag.iter().copied().fold(0.0, f64::max);
    let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    (lu.determinant(), ratio)
}

/// Solves `a x = b`.
pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    a.clone()
        .lu()
        .solve(b)
        .ok_or_else(|| Error::Precision { what: "LU solve", detail: "singular matrix".into() })
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
