//! Log-gamma on the complex plane and Pochhammer symbols.
//!
//! `ln_gamma` uses upward recurrence into the Stirling region (|z| >= 15) and the
//! reflection formula for `Re z < 1/2`. The imaginary part of the result is only
//! defined modulo `2 pi`; callers either exponentiate or take real parts.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Values of `z` with `|z|` at least this large go straight to the Stirling series.
const STIRLING_MIN: f64 = 15.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..8.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this many factors the log-Pochhammer is accumulated factor by factor.
const POCHHAMMER_DIRECT_MAX: u64 = 64;

/// `sin(pi z)` with exact argument reduction of the real part.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let a = z.re - 2.0 * (z.re / 2.0).round();
    let b = PI * z.im;
    let (s, c) = if a == a.round() {
        (0.0, if a == 0.0 { 1.0 } else { -1.0 })
    } else {
        (PI * a).sin_cos()
    };
    Complex64::new(s * b.cosh(), c * b.sinh())
}

fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + LN_SQRT_2PI + series
}

/// Principal-ish `ln Gamma(z)`; returns `+inf` real part at the poles.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = sin_pi(z);
        if s.norm() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    if z.norm() >= STIRLING_MIN {
        return ln_gamma_stirling(z);
    }
    let mut shifted = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while shifted.norm() < STIRLING_MIN {
        prod *= shifted;
        shifted += 1.0;
    }
    ln_gamma_stirling(shifted) - prod.ln()
}

/// `ln |Gamma(x)|` for real `x`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

/// `ln k!`.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        return 0.0;
    }
    if k <= POCHHAMMER_DIRECT_MAX {
        return (2..=k).map(|j| (j as f64).ln()).sum();
    }
    ln_gamma_real(k as f64 + 1.0)
}

/// `1 / Gamma(z)`, exactly zero at the poles.
pub fn rgamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // 1/Gamma(z) = Gamma(1 - z) sin(pi z) / pi
        let s = sin_pi(z);
        if s.norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        return ln_gamma(Complex64::new(1.0, 0.0) - z).exp() * s / PI;
    }
    (-ln_gamma(z)).exp()
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`, `(a)_0 = 1`.
pub fn pochhammer(a: Complex64, k: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for j in 0..k {
        acc *= a + j as f64;
    }
    acc
}

/// `ln (a)_k`. Small `k` sums the logs of the factors, large `k` goes through
/// [`ln_gamma`]. A zero factor yields `-inf` real part.
pub fn ln_pochhammer(a: Complex64, k: u64) -> Complex64 {
    if k == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let hits_zero = a.im == 0.0 && a.re <= 0.0 && a.re == a.re.round() && (-a.re) < k as f64;
    if hits_zero {
        return Complex64::new(f64::NEG_INFINITY, 0.0);
    }
    if k <= POCHHAMMER_DIRECT_MAX {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..k {
            acc += (a + j as f64).ln();
        }
        return acc;
    }
    ln_gamma(a + k as f64) - ln_gamma(a)
}

/// `ln (a)_k` for real `a` with all factors positive.
pub fn ln_pochhammer_real(a: f64, k: u64) -> f64 {
    ln_pochhammer(Complex64::new(a, 0.0), k).re
}
