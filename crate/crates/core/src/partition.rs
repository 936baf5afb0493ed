//! Young diagrams, Frobenius coordinates, dimensions and the embedding of a
//! diagram into a finite configuration on the half-integer lattice.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma::ln_factorial;

/// Default cap on the number of diagrams [`enumerate_partitions`] will build.
pub const DEFAULT_PARTITION_CAP: u128 = 10_000_000;

/// A partition `lambda_1 >= lambda_2 >= ... > 0` together with its Frobenius
/// coordinates `p_i = lambda_i - i`, `q_i = lambda'_i - i` (0-based `i` here).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct YoungDiagram {
    parts: Vec<u32>,
    n: u32,
    p: Vec<u32>,
    q: Vec<u32>,
}

impl YoungDiagram {
    pub fn empty() -> Self {
        Self { parts: Vec::new(), n: 0, p: Vec::new(), q: Vec::new() }
    }

    /// Builds a diagram from weakly decreasing positive parts.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Domain(format!("parts must be positive: {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!("parts must be weakly decreasing: {parts:?}")));
        }
        Ok(Self::from_valid_parts(parts))
    }

    fn from_valid_parts(parts: Vec<u32>) -> Self {
        let n = parts.iter().sum();
        let conj = conjugate_parts(&parts);
        let d = parts.iter().enumerate().take_while(|&(i, &l)| l as usize > i).count();
        let p = (0..d).map(|i| parts[i] - 1 - i as u32).collect();
        let q = (0..d).map(|i| conj[i] - 1 - i as u32).collect();
        Self { parts, n, p, q }
    }

    /// Inverse of [`YoungDiagram::frobenius`]: both lists strictly decreasing, same length.
    pub fn from_frobenius(p: &[u32], q: &[u32]) -> Result<Self> {
        if p.len() != q.len() {
            return Err(Error::Domain(format!("Frobenius lists differ in length: {p:?} | {q:?}")));
        }
        if p.windows(2).any(|w| w[0] <= w[1]) || q.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Domain(format!("Frobenius lists must strictly decrease: {p:?} | {q:?}")));
        }
        let d = p.len() as u32;
        let mut parts: Vec<u32> = p.iter().enumerate().map(|(i, &pi)| pi + i as u32 + 1).collect();
        // rows below the diagonal square: lambda_i = #{j : lambda'_j >= i}
        let cols: Vec<u32> = q.iter().enumerate().map(|(j, &qj)| qj + j as u32 + 1).collect();
        let mut row = d + 1;
        loop {
            let len = cols.iter().filter(|&&c| c >= row).count() as u32;
            if len == 0 {
                break;
            }
            parts.push(len);
            row += 1;
        }
        let diagram = Self::new(parts)?;
        if diagram.p != p || diagram.q != q {
            return Err(Error::Domain(format!("({p:?} | {q:?}) are not Frobenius coordinates")));
        }
        Ok(diagram)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of boxes.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of diagonal boxes `d`.
    pub fn depth(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `(p, q)`, both strictly decreasing.
    pub fn frobenius(&self) -> (&[u32], &[u32]) {
        (&self.p, &self.q)
    }

    pub fn transpose(&self) -> Self {
        Self { parts: conjugate_parts(&self.parts), n: self.n, p: self.q.clone(), q: self.p.clone() }
    }

    /// Hook lengths row by row.
    pub fn hooks(&self) -> Vec<u32> {
        let conj = conjugate_parts(&self.parts);
        let mut out = Vec::with_capacity(self.n as usize);
        for (i, &row) in self.parts.iter().enumerate() {
            for j in 0..row as usize {
                out.push(row - j as u32 + conj[j] - i as u32 - 1);
            }
        }
        out
    }

    /// Number of standard tableaux, by the hook-length formula.
    pub fn dimension(&self) -> BigUint {
        let mut num = factorial(self.n);
        let den = self.hooks().into_iter().fold(BigUint::one(), |acc, h| acc * h);
        num /= den;
        num
    }

    /// Number of standard tableaux as `n! det[1/(p_i + q_j + 1)] / prod p_i! q_i!`,
    /// in exact rationals.
    pub fn dimension_det(&self) -> BigUint {
        let d = self.depth();
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| BigRational::new(BigInt::one(), BigInt::from(self.p[i] + self.q[j] + 1)))
                    .collect()
            })
            .collect();
        let det = rational_det(&mut m);
        let fact_pq = self.p.iter().chain(&self.q).fold(BigUint::one(), |acc, &k| acc * factorial(k));
        let value = det * BigRational::new(BigInt::from(factorial(self.n)), BigInt::from(fact_pq));
        debug_assert!(value.is_integer());
        value.to_integer().magnitude().clone()
    }

    /// Both dimension routes; an error if they disagree.
    pub fn dimension_checked(&self) -> Result<BigUint> {
        let hook = self.dimension();
        let det = self.dimension_det();
        if hook != det {
            return Err(Error::Consistency(format!("dim {:?}: hook {hook} vs det {det}", self.parts)));
        }
        Ok(hook)
    }

    /// `ln dim`, from the hook lengths.
    pub fn ln_dimension(&self) -> f64 {
        ln_factorial(u64::from(self.n)) - self.hooks().iter().map(|&h| f64::from(h).ln()).sum::<f64>()
    }

    /// `{p_i + 1/2} U {-q_i - 1/2}`.
    pub fn to_configuration(&self) -> Configuration {
        let pos = self.p.iter().map(|&k| HalfInt::positive(k));
        let neg = self.q.iter().map(|&k| HalfInt::negative(k));
        Configuration { points: pos.chain(neg).collect() }
    }
}

impl TryFrom<Vec<u32>> for YoungDiagram {
    type Error = Error;
    fn try_from(parts: Vec<u32>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<YoungDiagram> for Vec<u32> {
    fn from(d: YoungDiagram) -> Self {
        d.parts
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "()");
        }
        let body: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", body.join(","))
    }
}

fn conjugate_parts(parts: &[u32]) -> Vec<u32> {
    let first = parts.first().copied().unwrap_or(0);
    (1..=first).map(|j| parts.iter().take_while(|&&l| l >= j).count() as u32).collect()
}

fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Gaussian elimination over the rationals; consumes `m`.
fn rational_det(m: &mut [Vec<BigRational>]) -> BigRational {
    let d = m.len();
    let mut det = BigRational::one();
    for col in 0..d {
        let Some(piv) = (col..d).find(|&r| !m[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        for r in col + 1..d {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..d {
                let delta = &factor * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    det
}

/// Partition numbers `p(0..=n)` by Euler's pentagonal recurrence; `None` on overflow.
pub fn partition_counts(n: u32) -> Option<Vec<u128>> {
    let n = n as usize;
    let mut p = vec![0u128; n + 1];
    p[0] = 1;
    for m in 1..=n {
        let (mut plus, mut minus) = (0u128, 0u128);
        for k in 1.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let g2 = k * (3 * k + 1) / 2;
            let mut term = p[m - g1];
            if g2 <= m {
                term = term.checked_add(p[m - g2])?;
            }
            if k % 2 == 1 {
                plus = plus.checked_add(term)?;
            } else {
                minus = minus.checked_add(term)?;
            }
        }
        p[m] = plus - minus;
    }
    Some(p)
}

/// `p(n)`, saturating at `u128::MAX`.
pub fn partition_count(n: u32) -> u128 {
    partition_counts(n).map_or(u128::MAX, |v| v[n as usize])
}

/// Partitions of `n` in lexicographically descending order, starting at `(n)`.
#[derive(Clone, Debug)]
pub struct Partitions {
    current: Option<Vec<u32>>,
}

impl Partitions {
    pub fn new(n: u32) -> Self {
        Self { current: Some(if n == 0 { Vec::new() } else { vec![n] }) }
    }
}

impl Iterator for Partitions {
    type Item = YoungDiagram;

    fn next(&mut self) -> Option<YoungDiagram> {
        let cur = self.current.take()?;
        // successor: lower the last part > 1 by one and refill greedily
        if let Some(pos) = cur.iter().rposition(|&x| x > 1) {
            let mut next = cur[..pos].to_vec();
            let v = cur[pos] - 1;
            let mut rest: u32 = cur[pos + 1..].iter().sum::<u32>() + 1;
            next.push(v);
            while rest > 0 {
                let take = rest.min(v);
                next.push(take);
                rest -= take;
            }
            self.current = Some(next);
        }
        Some(YoungDiagram::from_valid_parts(cur))
    }
}

/// All partitions of `n` in lexicographically descending order.
pub fn enumerate_partitions(n: u32) -> Result<Vec<YoungDiagram>> {
    enumerate_partitions_capped(n, DEFAULT_PARTITION_CAP)
}

pub fn enumerate_partitions_capped(n: u32, cap: u128) -> Result<Vec<YoungDiagram>> {
    let count = partition_count(n);
    if count > cap {
        return Err(Error::ResourceCap { what: "partition count", count, cap });
    }
    Ok(Partitions::new(n).collect())
}

/// Side of the lattice a point lies on: `+(k + 1/2)` or `-(k + 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A point of `Z + 1/2`, stored as twice its value (always odd).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HalfInt(i64);

impl HalfInt {
    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice % 2 == 0 {
            return Err(Error::Domain(format!("{twice}/2 is not a half-integer")));
        }
        Ok(Self(twice))
    }

    /// `k + 1/2`.
    pub fn positive(k: u32) -> Self {
        Self(2 * i64::from(k) + 1)
    }

    /// `-(k + 1/2)`.
    pub fn negative(k: u32) -> Self {
        Self(-2 * i64::from(k) - 1)
    }

    pub fn new(sign: Sign, k: u32) -> Self {
        match sign {
            Sign::Plus => Self::positive(k),
            Sign::Minus => Self::negative(k),
        }
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn sign(self) -> Sign {
        if self.0 > 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// The index `k` with `self = +-(k + 1/2)`.
    pub fn index(self) -> u32 {
        ((self.0.abs() - 1) / 2) as u32
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2", self.0)
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    /// Accepts `"k/2"` with odd `k`, or a decimal such as `"-1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            let twice: i64 = num.trim().parse().map_err(|_| Error::Parse(format!("bad half-integer {s:?}")))?;
            return Self::from_twice(twice);
        }
        let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad half-integer {s:?}")))?;
        let twice = 2.0 * v;
        if twice != twice.round() || twice.abs() > 1e15 {
            return Err(Error::Parse(format!("{s:?} is not a half-integer")));
        }
        Self::from_twice(twice as i64)
    }
}

impl TryFrom<String> for HalfInt {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<HalfInt> for String {
    fn from(h: HalfInt) -> Self {
        h.to_string()
    }
}

/// A finite subset of `Z + 1/2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration {
    points: BTreeSet<HalfInt>,
}

impl Configuration {
    pub fn new<I: IntoIterator<Item = HalfInt>>(points: I) -> Self {
        Self { points: points.into_iter().collect() }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Points in increasing order.
    pub fn points(&self) -> impl Iterator<Item = HalfInt> + '_ {
        self.points.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: HalfInt) -> bool {
        self.points.contains(&x)
    }

    pub fn is_subset(&self, other: &Configuration) -> bool {
        self.points.is_subset(&other.points)
    }

    /// Indices `k` of the points `k + 1/2`, decreasing.
    pub fn positive_indices(&self) -> Vec<u32> {
        self.points.iter().rev().filter(|x| x.sign() == Sign::Plus).map(|x| x.index()).collect()
    }

    /// Indices `k` of the points `-(k + 1/2)`, decreasing.
    pub fn negative_indices(&self) -> Vec<u32> {
        self.points.iter().filter(|x| x.sign() == Sign::Minus).map(|x| x.index()).collect()
    }

    /// Equal numbers of positive and negative points: exactly the images of diagrams.
    pub fn is_balanced(&self) -> bool {
        let pos = self.points.iter().filter(|x| x.sign() == Sign::Plus).count();
        2 * pos == self.points.len()
    }

    /// The diagram whose configuration this is.
    pub fn to_diagram(&self) -> Result<YoungDiagram> {
        if !self.is_balanced() {
            return Err(Error::Domain(format!("configuration {self} is not balanced")));
        }
        YoungDiagram::from_frobenius(&self.positive_indices(), &self.negative_indices())
    }
}

impl FromIterator<HalfInt> for Configuration {
    fn from_iter<I: IntoIterator<Item = HalfInt>>(iter: I) -> Self {
        Self::new(iter)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.points.iter().map(HalfInt::to_string).collect();
        write!(f, "{{{}}}", body.join(", "))
    }
}

/// Rough size of a `BigUint` as an `f64`, for reporting.
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}
