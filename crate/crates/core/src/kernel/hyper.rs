//! The L-operator and the hypergeometric kernel `K = L (1 + L)^-1` on `Z'`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions::{s_constant, FunctionTable, FunctionValues};
use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::GrandParams;
use crate::partition::{Configuration, HalfInt, Sign};
use crate::specfun::{gauss_2f1_w, gauss_2f1_w_dc, realize};

/// One of the four blocks `++`, `+-`, `-+`, `--`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Block(pub Sign, pub Sign);

impl Block {
    pub const PP: Block = Block(Sign::Plus, Sign::Plus);
    pub const PM: Block = Block(Sign::Plus, Sign::Minus);
    pub const MP: Block = Block(Sign::Minus, Sign::Plus);
    pub const MM: Block = Block(Sign::Minus, Sign::Minus);
    pub const ALL: [Block; 4] = [Block::PP, Block::PM, Block::MP, Block::MM];

    pub fn is_diagonal(self) -> bool {
        self.0 == self.1
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.0, self.1)
    }
}

impl FromStr for Block {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let sign = |c: char| match c {
            '+' => Ok(Sign::Plus),
            '-' => Ok(Sign::Minus),
            _ => Err(Error::Parse(format!("bad block {s:?}; expected ++, +-, -+ or --"))),
        };
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a), Some(b), None) => Ok(Block(sign(a)?, sign(b)?)),
            _ => Err(Error::Parse(format!("bad block {s:?}; expected ++, +-, -+ or --"))),
        }
    }
}

impl TryFrom<String> for Block {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Block> for String {
    fn from(b: Block) -> Self {
        b.to_string()
    }
}

/// A truncated `n x n` piece of one block, indices `0..n` on both sides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelBlock {
    pub block: Block,
    pub truncation: usize,
    pub params: GrandParams,
    #[serde(with = "matrix_rows")]
    pub entries: DMatrix<f64>,
}

impl KernelBlock {
    pub fn max_asymmetry(&self) -> f64 {
        linalg::max_abs_diff(&self.entries, &self.entries.transpose())
    }
}

mod matrix_rows {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(serde::de::Error::custom("ragged matrix"));
        }
        Ok(DMatrix::from_fn(n, m, |i, j| rows[i][j]))
    }
}

/// `L(x, y)`: zero on same-sign pairs, `psi+(k)^(1/2) psi-(l)^(1/2) / (k+l+1)` on
/// `(+, -)` and minus that (with roles swapped) on `(-, +)`.
pub fn l_entry(x: HalfInt, y: HalfInt, gp: &GrandParams) -> Result<f64> {
    use super::functions::psi;
    let (k, l) = (u64::from(x.index()), u64::from(y.index()));
    let den = (k + l + 1) as f64;
    match (x.sign(), y.sign()) {
        (Sign::Plus, Sign::Minus) => Ok((psi(gp, Sign::Plus, k)? * psi(gp, Sign::Minus, l)?).sqrt() / den),
        (Sign::Minus, Sign::Plus) => Ok(-(psi(gp, Sign::Minus, k)? * psi(gp, Sign::Plus, l)?).sqrt() / den),
        _ => Ok(0.0),
    }
}

/// The hypergeometric kernel for fixed `(z, z', xi)`. Function tables for the
/// diagonal series are built on first use.
#[derive(Debug)]
pub struct HyperKernel {
    gp: GrandParams,
    tables: [OnceLock<Result<FunctionTable>>; 2],
}

fn slot(sign: Sign) -> usize {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

impl HyperKernel {
    pub fn new(gp: GrandParams) -> Self {
        Self { gp, tables: [OnceLock::new(), OnceLock::new()] }
    }

    pub fn params(&self) -> &GrandParams {
        &self.gp
    }

    fn check_block(&self, block: Block) -> Result<()> {
        if self.gp.zp.is_meixner() && block != Block::PP {
            return Err(Error::DegenerateBlock(block.to_string()));
        }
        Ok(())
    }

    pub fn table(&self, sign: Sign) -> Result<&FunctionTable> {
        let cell = &self.tables[slot(sign)];
        match cell.get_or_init(|| FunctionTable::build(&self.gp, sign)) {
            Ok(t) => Ok(t),
            Err(e) => Err(Error::Consistency(format!("function table {sign}: {e}"))),
        }
    }

    /// Values at `k`, from the table when it has been built and covers `k`.
    pub fn values(&self, sign: Sign, k: u64) -> Result<FunctionValues> {
        if let Some(Ok(t)) = self.tables[slot(sign)].get() {
            if let Some(v) = t.get(k) {
                return Ok(*v);
            }
        }
        FunctionValues::compute(&self.gp, sign, k)
    }

    fn values_range(&self, sign: Sign, n: usize) -> Result<Vec<FunctionValues>> {
        (0..n as u64).into_par_iter().map(|k| self.values(sign, k)).collect()
    }

    /// Off-diagonal entries by the closed forms; `a`, `b` are the values at `k`, `l`.
    fn closed_form(block: Block, a: &FunctionValues, b: &FunctionValues) -> f64 {
        let (k, l) = (a.k as f64, b.k as f64);
        match block {
            Block(Sign::Plus, Sign::Minus) => (a.p * b.p + a.q * b.q) / (k + l + 1.0),
            Block(Sign::Minus, Sign::Plus) => -(a.p * b.p + a.q * b.q) / (k + l + 1.0),
            _ => (a.p * b.q - a.q * b.p) / (k - l),
        }
    }

    /// `K_ee(k, k)` as the convergent series `(CD)(k,k)` or `(DC)(k,k)`:
    /// `psi_e(k)^(1/2) [P_e(k) sum_j R_f(j)/(k+j+1)^2 + Q_e(k) sum_j S_f(j)/(k+j+1)^2]`
    /// with `f` the opposite sign.
    pub fn diagonal_series(&self, sign: Sign, k: u64) -> Result<f64> {
        Ok(self.diagonal_series_with_tail(sign, k)?.0)
    }

    /// [`HyperKernel::diagonal_series`] and a bound on its truncation error.
    pub fn diagonal_series_with_tail(&self, sign: Sign, k: u64) -> Result<(f64, f64)> {
        let v = self.values(sign, k)?;
        let other = self.table(sign.flip())?;
        let (r_sum, s_sum, tail) = other.weighted_sums(k as f64, 2);
        let root = v.psi.sqrt();
        let value = root * (v.p * r_sum + v.q * s_sum);
        Ok((value, root * (v.p.abs() + v.q.abs()) * tail))
    }

    /// `K_ee(k, k)` by L'Hospital's rule on the closed form:
    /// `c psi(k) [(F1' F2 - F1 F2')/(k+1) + F1 F2/(k+1)^2]`, where the primes are
    /// derivatives in the lower parameter of the Gauss functions.
    pub fn diagonal_derivative(&self, sign: Sign, k: u64) -> Result<f64> {
        let gp = &self.gp;
        let (a, b) = gp.zp.signed(sign);
        let one = Complex64::new(1.0, 0.0);
        let c1 = Complex64::new(k as f64 + 1.0, 0.0);
        let c2 = c1 + 1.0;
        let f1 = gauss_2f1_w(-a, -b, c1, gp.xi)?;
        let f2 = gauss_2f1_w(one - a, one - b, c2, gp.xi)?;
        let d1 = gauss_2f1_w_dc(-a, -b, c1, gp.xi)?;
        let d2 = gauss_2f1_w_dc(one - a, one - b, c2, gp.xi)?;
        let k1 = k as f64 + 1.0;
        let bracket = (d1 * f2 - f1 * d2) / k1 + f1 * f2 / (k1 * k1);
        let v = self.values(sign, k)?;
        Ok(s_constant(gp) * v.psi * realize(bracket)?)
    }

    /// `K_block(k, l)`.
    pub fn block_entry(&self, block: Block, k: u64, l: u64) -> Result<f64> {
        self.check_block(block)?;
        if block.is_diagonal() && k == l {
            return self.diagonal_series(block.0, k);
        }
        let a = self.values(block.0, k)?;
        let b = self.values(block.1, l)?;
        Ok(Self::closed_form(block, &a, &b))
    }

    /// `K(x, y)` with `+-(k + 1/2)` identified with index `k` of the `+-` copy of `Z_+`.
    pub fn entry(&self, x: HalfInt, y: HalfInt) -> Result<f64> {
        self.block_entry(Block(x.sign(), y.sign()), u64::from(x.index()), u64::from(y.index()))
    }

    /// The `n x n` truncation of one block.
    pub fn block_matrix(&self, block: Block, n: usize) -> Result<KernelBlock> {
        self.check_block(block)?;
        let rows = self.values_range(block.0, n)?;
        let cols = if block.0 == block.1 { rows.clone() } else { self.values_range(block.1, n)? };
        let diag: Vec<f64> = if block.is_diagonal() {
            (0..n as u64).into_par_iter().map(|k| self.diagonal_series(block.0, k)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let entries = DMatrix::from_fn(n, n, |i, j| {
            if block.is_diagonal() && i == j {
                diag[i]
            } else {
                Self::closed_form(block, &rows[i], &cols[j])
            }
        });
        Ok(KernelBlock { block, truncation: n, params: self.gp, entries })
    }

    /// `[[K++, K+-], [K-+, K--]]` truncated to `n` on each side.
    pub fn k_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for block in Block::ALL {
            let b = self.block_matrix(block, n)?;
            let (r0, c0) = (offset(block.0, n), offset(block.1, n));
            m.view_mut((r0, c0), (n, n)).copy_from(&b.entries);
        }
        Ok(m)
    }

    /// `[[0, L+-], [L-+, 0]]` truncated to `n` on each side.
    pub fn l_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        let d = self.d_matrix(n)?;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        m.view_mut((0, n), (n, n)).copy_from(&d.transpose());
        m.view_mut((n, 0), (n, n)).copy_from(&(-d));
        Ok(m)
    }

    /// `D = Psi-^(1/2) W Psi+^(1/2)`, i.e. `-L-+`.
    pub fn d_matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        let plus = self.values_range(Sign::Plus, n)?;
        let minus = self.values_range(Sign::Minus, n)?;
        Ok(DMatrix::from_fn(n, n, |k, l| (minus[k].psi * plus[l].psi).sqrt() / (k + l + 1) as f64))
    }

    /// `[K(x_i, x_j)]` for the points of `X` in increasing order.
    pub fn correlation_matrix(&self, x: &Configuration) -> Result<DMatrix<f64>> {
        let pts: Vec<HalfInt> = x.points().collect();
        let n = pts.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.entry(pts[i], pts[j])?;
            }
        }
        Ok(m)
    }

    /// `rho(X) = det K_X`.
    pub fn correlation(&self, x: &Configuration) -> Result<f64> {
        Ok(linalg::determinant(&self.correlation_matrix(x)?))
    }

    /// `(R^(u), S^(u)) = sum_k (R(k), S(k)) / (u + k + 1)`, with a tail bound.
    pub fn rhat_shat(&self, sign: Sign, u: f64) -> Result<(f64, f64, f64)> {
        let nearest = u.round();
        if nearest <= -1.0 && (u - nearest).abs() < 1e-8 {
            return Err(Error::Pole(format!("u = {u} is within 1e-8 of the pole {nearest}")));
        }
        Ok(self.table(sign)?.weighted_sums(u, 1))
    }
}

fn offset(sign: Sign, n: usize) -> usize {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::ZParams;

    fn kernel(xi: f64) -> HyperKernel {
        HyperKernel::new(GrandParams::new(ZParams::real(0.5, 1.0 / 3.0).unwrap(), xi).unwrap())
    }

    #[test]
    fn block_parsing() {
        for (s, b) in [("++", Block::PP), ("+-", Block::PM), ("-+", Block::MP), ("--", Block::MM)] {
            assert_eq!(s.parse::<Block>().unwrap(), b);
            assert_eq!(b.to_string(), s);
        }
        assert!("+".parse::<Block>().is_err());
        assert!("+x".parse::<Block>().is_err());
    }

    #[test]
    fn l_entries() {
        let k = kernel(0.2);
        let gp = k.params();
        use super::super::functions::psi;
        assert_eq!(l_entry(HalfInt::positive(1), HalfInt::positive(3), gp).unwrap(), 0.0);
        let v = l_entry(HalfInt::positive(0), HalfInt::negative(0), gp).unwrap();
        let expect = (psi(gp, Sign::Plus, 0).unwrap() * psi(gp, Sign::Minus, 0).unwrap()).sqrt();
        assert!((v - expect).abs() < 1e-16);
        for a in 0..=10 {
            for b in 0..=10 {
                let pm = l_entry(HalfInt::positive(a), HalfInt::negative(b), gp).unwrap();
                let mp = l_entry(HalfInt::negative(b), HalfInt::positive(a), gp).unwrap();
                assert_eq!(pm, -mp);
            }
        }
    }

    #[test]
    fn symmetries() {
        let k = kernel(0.3);
        let pp = k.block_matrix(Block::PP, 12).unwrap();
        let mm = k.block_matrix(Block::MM, 12).unwrap();
        assert!(pp.max_asymmetry() < 1e-15);
        assert!(mm.max_asymmetry() < 1e-15);
        let pm = k.block_matrix(Block::PM, 12).unwrap();
        let mp = k.block_matrix(Block::MP, 12).unwrap();
        assert!(linalg::max_abs_diff(&mp.entries, &(-pm.entries.transpose())) == 0.0);
    }

    #[test]
    fn one_point_function_in_unit_interval() {
        let k = kernel(0.2);
        for i in 0..=20 {
            for sign in [Sign::Plus, Sign::Minus] {
                let v = k.entry(HalfInt::new(sign, i), HalfInt::new(sign, i)).unwrap();
                assert!((0.0..=1.0).contains(&v), "{sign}{i}: {v}");
            }
        }
    }

    #[test]
    fn diagonal_routes_agree() {
        for zp in [ZParams::real(0.5, 1.0 / 3.0).unwrap(), ZParams::conjugate_pair(0.5, 1.5).unwrap()] {
            let k = HyperKernel::new(GrandParams::new(zp, 0.3).unwrap());
            for sign in [Sign::Plus, Sign::Minus] {
                for i in 0..=10 {
                    let a = k.diagonal_series(sign, i).unwrap();
                    let b = k.diagonal_derivative(sign, i).unwrap();
                    assert!((a - b).abs() <= 1e-7 * a.abs(), "{sign}{i}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn meixner_mode_exposes_only_pp() {
        let gp = GrandParams::new(ZParams::meixner(3, 0.5).unwrap(), 0.4).unwrap();
        let k = HyperKernel::new(gp);
        assert!(k.block_entry(Block::PP, 1, 2).is_ok());
        assert!(matches!(k.block_entry(Block::PM, 1, 2), Err(Error::DegenerateBlock(_))));
        assert!(matches!(k.block_matrix(Block::MM, 3), Err(Error::DegenerateBlock(_))));
    }

    #[test]
    fn serde_shape() {
        let k = kernel(0.2);
        let b = k.block_matrix(Block::PM, 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&b).unwrap();
        assert_eq!(v["block"], "+-");
        assert_eq!(v["entries"].as_array().unwrap().len(), 2);
        let back: KernelBlock = serde_json::from_value(v).unwrap();
        assert_eq!(back, b);
    }

    fn gp_of(zp: ZParams, xi: f64) -> GrandParams {
        GrandParams::new(zp, xi).unwrap()
    }

    #[test]
    fn meixner_degeneration() {
        let k = HyperKernel::new(gp_of(ZParams::meixner(3, 0.5).unwrap(), 0.4));
        for a in 0..=10u64 {
            for b in 0..=10u64 {
                let lhs = k.block_entry(Block::PP, a, b).unwrap();
                let rhs = super::super::meixner_kernel(3, 0.5, 0.4, a + 3, b + 3).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "({a},{b}): {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn resolvent_of_l() {
        for zp in [ZParams::real(0.5, 1.0 / 3.0).unwrap(), ZParams::conjugate_pair(0.5, 1.5).unwrap()] {
            let k = HyperKernel::new(gp_of(zp, 0.3));
            let n = 80;
            let l = k.l_matrix(n).unwrap();
            let one_plus = DMatrix::identity(2 * n, 2 * n) + &l;
            // K (1 + L) = L, i.e. (1 + L)^T K^T = L^T
            let kt = linalg::solve(&one_plus.transpose(), &l.transpose()).unwrap();
            let diff = linalg::max_abs_diff(&k.k_matrix(n).unwrap(), &kt.transpose());
            assert!(diff <= 1e-8, "{zp}: {diff}");
        }
    }

    #[test]
    fn block_relations() {
        let k = kernel(0.3);
        let n = 80;
        let c = k.block_matrix(Block::PM, n).unwrap().entries;
        let d = k.d_matrix(n).unwrap();
        let pp = k.block_matrix(Block::PP, n).unwrap().entries;
        let mm = k.block_matrix(Block::MM, n).unwrap().entries;
        let mp = k.block_matrix(Block::MP, n).unwrap().entries;
        assert!(linalg::max_abs_diff(&pp, &(&c * &d)) <= 1e-8);
        assert!(linalg::max_abs_diff(&mm, &(&d * &c)) <= 1e-8);
        assert!(linalg::max_abs_diff(&mp, &(&d * &c * &d - &d)) <= 1e-8);
    }

    #[test]
    fn nw_closed_form() {
        // N(k,l) = (R+(k) R-(l) + S+(k) S-(l)) / (k+l+1), summed against W
        let k = kernel(0.3);
        let plus = k.table(Sign::Plus).unwrap();
        let minus = k.table(Sign::Minus).unwrap();
        for a in 0..=15u64 {
            for b in 0..=15u64 {
                let va = plus.get(a).unwrap();
                let nw: f64 = minus
                    .values
                    .iter()
                    .map(|vj| {
                        let j = vj.k as f64;
                        (va.r * vj.r + va.s * vj.s) / ((a as f64 + j + 1.0) * (j + b as f64 + 1.0))
                    })
                    .sum();
                let expect = if a == b {
                    k.diagonal_derivative(Sign::Plus, a).unwrap()
                } else {
                    let vb = plus.get(b).unwrap();
                    (va.r * vb.s - va.s * vb.r) / (a as f64 - b as f64) / vb.psi
                };
                assert!((nw - expect).abs() <= 1e-7 * expect.abs().max(1e-3), "({a},{b}): {nw} vs {expect}");
            }
        }
    }

    #[test]
    fn hat_series_identities() {
        use super::super::functions::{psi_at, rs_at};
        for zp in [ZParams::real(0.5, 1.0 / 3.0).unwrap(), ZParams::conjugate_pair(0.5, 1.5).unwrap()] {
            let k = HyperKernel::new(gp_of(zp, 0.2));
            let gp = *k.params();
            for u in [2.3, 0.4, -0.35, -2.7, 5.1] {
                for sign in [Sign::Plus, Sign::Minus] {
                    let (rhat, shat, tail) = k.rhat_shat(sign, u).unwrap();
                    assert!(tail < 1e-15);
                    let other = sign.flip();
                    let p = psi_at(&gp, other, u).unwrap();
                    let (r, s) = rs_at(&gp, other, u).unwrap();
                    assert!((rhat - s / p).abs() <= 1e-11 * rhat.abs(), "{sign} u={u}: {rhat} vs {}", s / p);
                    assert!((shat - (1.0 - r / p)).abs() <= 1e-11 * shat.abs().max(1e-2), "{sign} u={u}");
                }
            }
            assert!(matches!(k.rhat_shat(Sign::Plus, -2.0 + 1e-10), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn reflected_product() {
        use super::super::functions::{psi_at, rs_at};
        let gp = gp_of(ZParams::real(0.5, 1.0 / 3.0).unwrap(), 0.2);
        for u in [3.7, 0.25, -0.6] {
            let (rp, sp) = rs_at(&gp, Sign::Plus, u).unwrap();
            let (rm, sm) = rs_at(&gp, Sign::Minus, -u - 1.0).unwrap();
            let lhs = rp * rm + sp * sm;
            let rhs = psi_at(&gp, Sign::Plus, u).unwrap() * psi_at(&gp, Sign::Minus, -u - 1.0).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs(), "u={u}: {lhs} vs {rhs}");
        }
    }
}
