//! The Whittaker kernel on `R \ {0}`, the `xi -> 1` limit of the hypergeometric
//! kernel after scaling by `1 - xi`.

use num_complex::Complex64;

use super::hyper::Block;
use crate::error::{Error, Result};
use crate::measure::ZParams;
use crate::partition::Sign;
use crate::specfun::{realize, rgamma, whittaker_w};

/// Relative step of the symmetric differences used on the diagonal.
pub const DIAGONAL_STEP: f64 = 1e-2;
/// Tolerance on the diagonal limit, judged by two Richardson levels.
pub const DIAGONAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct WhittakerKernel {
    zp: ZParams,
    mu: Complex64,
    /// `1 / (Gamma(1+e z) Gamma(1+e z'))` for `e = +, -`
    inv_norm: [f64; 2],
}

fn slot(sign: Sign) -> usize {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

impl WhittakerKernel {
    pub fn new(zp: ZParams) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let norm = |sign: Sign| -> Result<f64> {
            let (a, b) = zp.signed(sign);
            let v = realize(rgamma(one + a) * rgamma(one + b))?;
            if v < 0.0 {
                return Err(Error::Admissibility(format!("Gamma(1{sign}z) Gamma(1{sign}z') < 0 for {zp}")));
            }
            Ok(v)
        };
        let inv_norm = [norm(Sign::Plus)?, norm(Sign::Minus)?];
        Ok(Self { zp, mu: 0.5 * (zp.z() - zp.zp()), inv_norm })
    }

    pub fn params(&self) -> &ZParams {
        &self.zp
    }

    /// `mu = (z - z')/2`, real or purely imaginary.
    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    fn prefactor(&self, sign: Sign, power: f64, x: f64) -> f64 {
        self.zp.t().powf(power) * (self.inv_norm[slot(sign)] / x).sqrt()
    }

    /// `P_e(x) = t^(1/4) (Gamma(1+e z) Gamma(1+e z') x)^(-1/2) W_{(e s + 1)/2, mu}(x)`.
    pub fn script_p(&self, sign: Sign, x: f64) -> Result<f64> {
        let kappa = 0.5 * (sign.as_f64() * self.zp.s() + 1.0);
        Ok(self.prefactor(sign, 0.25, x) * whittaker_w(kappa, self.mu, x)?)
    }

    /// `Q_e(x) = t^(3/4) (Gamma(1+e z) Gamma(1+e z') x)^(-1/2) W_{(e s - 1)/2, mu}(x)`.
    pub fn script_q(&self, sign: Sign, x: f64) -> Result<f64> {
        let kappa = 0.5 * (sign.as_f64() * self.zp.s() - 1.0);
        Ok(self.prefactor(sign, 0.75, x) * whittaker_w(kappa, self.mu, x)?)
    }

    fn pq(&self, sign: Sign, x: f64) -> Result<(f64, f64)> {
        Ok((self.script_p(sign, x)?, self.script_q(sign, x)?))
    }

    /// `K_block(x, y)` for `x, y > 0`.
    pub fn block_entry(&self, block: Block, x: f64, y: f64) -> Result<f64> {
        if !(x > 0.0 && y > 0.0) {
            return Err(Error::Domain(format!("Whittaker kernel block arguments must be positive: {x}, {y}")));
        }
        if block.is_diagonal() && x == y {
            return self.diagonal(block.0, x);
        }
        let (px, qx) = self.pq(block.0, x)?;
        let (py, qy) = self.pq(block.1, y)?;
        Ok(match block {
            Block(Sign::Plus, Sign::Minus) => (px * py + qx * qy) / (x + y),
            Block(Sign::Minus, Sign::Plus) => -(px * py + qx * qy) / (x + y),
            _ => (px * qy - qx * py) / (x - y),
        })
    }

    /// `K(u, v)` on `R \ {0}`, dispatched to the blocks by the signs of `u`, `v`.
    pub fn entry(&self, u: f64, v: f64) -> Result<f64> {
        if u == 0.0 || v == 0.0 {
            return Err(Error::Domain("the Whittaker kernel lives on R \\ {0}".into()));
        }
        let sign = |a: f64| if a > 0.0 { Sign::Plus } else { Sign::Minus };
        self.block_entry(Block(sign(u), sign(v)), u.abs(), v.abs())
    }

    /// `K_ee(x, x) = Q(x) P'(x) - P(x) Q'(x)`, with the derivatives from symmetric
    /// differences and one Richardson step. Fails with a precision error when two
    /// successive Richardson levels differ by more than [`DIAGONAL_TOL`].
    pub fn diagonal(&self, sign: Sign, x: f64) -> Result<f64> {
        let h = DIAGONAL_STEP * x.min(1.0);
        let diff = |step: f64| -> Result<(f64, f64)> {
            let (p1, q1) = self.pq(sign, x + step)?;
            let (p0, q0) = self.pq(sign, x - step)?;
            Ok(((p1 - p0) / (2.0 * step), (q1 - q0) / (2.0 * step)))
        };
        let d1 = diff(h)?;
        let d2 = diff(h / 2.0)?;
        let d4 = diff(h / 4.0)?;
        let rich = |a: (f64, f64), b: (f64, f64)| ((4.0 * b.0 - a.0) / 3.0, (4.0 * b.1 - a.1) / 3.0);
        let r1 = rich(d1, d2);
        let r2 = rich(d2, d4);
        let (p, q) = self.pq(sign, x)?;
        let value = |d: (f64, f64)| q * d.0 - p * d.1;
        let (v1, v2) = (value(r1), value(r2));
        let scale = (q * r2.0).abs() + (p * r2.1).abs();
        if (v1 - v2).abs() > DIAGONAL_TOL * scale.max(v2.abs()) {
            return Err(Error::Precision {
                what: "Whittaker kernel diagonal",
                detail: format!("Richardson levels {v1:e} and {v2:e} at x = {x}"),
            });
        }
        Ok(v2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_symmetry() {
        let k = WhittakerKernel::new(ZParams::real(0.5, 1.0 / 3.0).unwrap()).unwrap();
        let grid = [-2.5, -1.0, -0.3, 0.4, 1.2, 3.0];
        for &u in &grid {
            for &v in &grid {
                if u == v {
                    continue;
                }
                let a = k.entry(u, v).unwrap();
                let b = u.signum() * v.signum() * k.entry(v, u).unwrap();
                assert!((a - b).abs() < 1e-13 * a.abs().max(1e-300), "({u},{v}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn swapping_z_and_zp() {
        let a = WhittakerKernel::new(ZParams::real(0.5, 1.0 / 3.0).unwrap()).unwrap();
        let b = WhittakerKernel::new(ZParams::real(1.0 / 3.0, 0.5).unwrap()).unwrap();
        for (u, v) in [(1.0, 2.0), (-0.5, 1.5), (-1.0, -3.0), (0.7, -0.2)] {
            let x = a.entry(u, v).unwrap();
            let y = b.entry(u, v).unwrap();
            assert!((x - y).abs() < 1e-13 * x.abs());
        }
        let c = WhittakerKernel::new(ZParams::conjugate_pair(0.5, 1.5).unwrap()).unwrap();
        assert!(c.mu().re == 0.0);
        assert!(c.entry(1.0, 2.0).unwrap().is_finite());
    }

    #[test]
    fn diagonal_is_a_density() {
        let k = WhittakerKernel::new(ZParams::real(0.5, 1.0 / 3.0).unwrap()).unwrap();
        for x in [0.2, 1.0, 2.0, 5.0] {
            for sign in [Sign::Plus, Sign::Minus] {
                let d = k.diagonal(sign, x).unwrap();
                assert!(d > 0.0, "{sign}{x}: {d}");
                // continuity of the closed form towards the diagonal
                let near = k.block_entry(Block(sign, sign), x, x * (1.0 + 1e-4)).unwrap();
                assert!((near - d).abs() < 1e-3 * d);
            }
        }
    }
}
