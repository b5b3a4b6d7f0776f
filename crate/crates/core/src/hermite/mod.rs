//! Hermite polynomials `H_n` and the normalized Hermite functions
//!
//! ```text
//! ψ_n(x) = H_n(x) e^{-x²/2} / sqrt(2ⁿ n! √π)
//! ```
//!
//! Floating-point values are produced by the normalized three-term recurrence
//! and never form `H_n` and the Gaussian separately, so high orders neither
//! overflow nor lose the Gaussian to underflow prematurely. Exact polynomials
//! use arbitrary-precision integer coefficients.

mod gauss_hermite;

pub use gauss_hermite::{gauss_hermite_rule, GaussHermiteRule, DEFAULT_HERMITE_NODES};

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// `π^{-1/4}`, the value of `ψ_0(0)`.
pub const PI_POW_NEG_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Physicists' Hermite polynomial with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitePolyExact {
    degree: usize,
    // coeffs[k] multiplies x^k
    coeffs: Vec<BigInt>,
}

impl HermitePolyExact {
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients in increasing powers of `x`.
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading_coefficient(&self) -> &BigInt {
        &self.coeffs[self.degree]
    }

    /// Exact value at an integer argument.
    pub fn eval_int(&self, x: i64) -> BigInt {
        let x = BigInt::from(x);
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * &x + c)
    }

    /// Horner evaluation in floating point; only sensible for modest degree.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }
}

/// `H_n` from `H_{k+1} = 2x H_k − 2k H_{k−1}`, `H_0 = 1`, `H_1 = 2x`.
pub fn hermite_poly_exact(n: usize) -> HermitePolyExact {
    hermite_family_exact(n).pop().expect("family is never empty")
}

/// `H_0, …, H_{n_max}` in one pass of the recurrence.
pub fn hermite_family_exact(n_max: usize) -> Vec<HermitePolyExact> {
    let mut family = Vec::with_capacity(n_max + 1);
    family.push(HermitePolyExact {
        degree: 0,
        coeffs: vec![BigInt::from(1)],
    });
    for k in 0..n_max {
        let cur = &family[k].coeffs;
        let mut next = vec![BigInt::zero(); k + 2];
        for (p, c) in cur.iter().enumerate() {
            next[p + 1] += c * 2;
        }
        if k > 0 {
            let two_k = BigInt::from(2 * k);
            for (p, c) in family[k - 1].coeffs.iter().enumerate() {
                next[p] -= c * &two_k;
            }
        }
        family.push(HermitePolyExact {
            degree: k + 1,
            coeffs: next,
        });
    }
    family
}

const RESCALE_THRESHOLD: f64 = 1e150;
// 2^-498, so rescaling is exact
const RESCALE_FACTOR: f64 = f64::from_bits((1023 - 498) << 52);

/// Fill `out[k] = ψ_k(x)` for `k = 0..out.len()`.
///
/// The recurrence runs on values divided by `π^{-1/4} e^{-x²/2}`; when those
/// grow large they are rescaled by a power of two and the accumulated log
/// scale is folded into the Gaussian exponent before a single `exp`.
pub fn psi_upto(x: f64, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    let gauss_log = -0.5 * x * x;
    let mut scale_log = 0.0f64;
    let mut seg_start = 0;
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    out[0] = cur;
    for k in 0..len - 1 {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        out[k + 1] = cur;
        if cur.abs() > RESCALE_THRESHOLD {
            let factor = PI_POW_NEG_QUARTER * (scale_log + gauss_log).exp();
            for v in &mut out[seg_start..=k + 1] {
                *v *= factor;
            }
            seg_start = k + 2;
            cur *= RESCALE_FACTOR;
            prev *= RESCALE_FACTOR;
            scale_log -= RESCALE_FACTOR.ln();
        }
    }
    let factor = PI_POW_NEG_QUARTER * (scale_log + gauss_log).exp();
    for v in &mut out[seg_start..] {
        *v *= factor;
    }
}

/// `ψ_n(x)`.
pub fn psi(n: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    psi_upto(x, &mut buf);
    buf[n]
}

/// `ψ'_n(x) = √(2n) ψ_{n−1}(x) − x ψ_n(x)`.
pub fn psi_derivative(n: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; n + 1];
    psi_upto(x, &mut buf);
    derivative_from_family(&buf, n, x)
}

/// Derivative of order `n` given `family[k] = ψ_k(x)` for `k ≤ n`.
pub(crate) fn derivative_from_family(family: &[f64], n: usize, x: f64) -> f64 {
    if n == 0 {
        -x * family[0]
    } else {
        (2.0 * n as f64).sqrt() * family[n - 1] - x * family[n]
    }
}

/// Values (and optionally derivatives) of one Hermite function on a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteValueSet {
    pub degree: usize,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    pub derivatives: Option<Vec<f64>>,
}

pub fn psi_values(n: usize, points: &[f64]) -> HermiteValueSet {
    let mut buf = vec![0.0; n + 1];
    let values = points
        .iter()
        .map(|&x| {
            psi_upto(x, &mut buf);
            buf[n]
        })
        .collect();
    HermiteValueSet {
        degree: n,
        points: points.to_vec(),
        values,
        derivatives: None,
    }
}

pub fn psi_derivative_values(n: usize, points: &[f64]) -> HermiteValueSet {
    let mut buf = vec![0.0; n + 1];
    let mut values = Vec::with_capacity(points.len());
    let mut derivatives = Vec::with_capacity(points.len());
    for &x in points {
        psi_upto(x, &mut buf);
        values.push(buf[n]);
        derivatives.push(derivative_from_family(&buf, n, x));
    }
    HermiteValueSet {
        degree: n,
        points: points.to_vec(),
        values,
        derivatives: Some(derivatives),
    }
}

/// `ln(n!)` by direct summation.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// The normalization `sqrt(2ⁿ n! √π)` relating `H_n e^{-x²/2}` to `ψ_n`.
pub fn hermite_normalization(n: usize) -> f64 {
    (0.5 * (n as f64 * std::f64::consts::LN_2 + ln_factorial(n) + 0.5 * std::f64::consts::PI.ln()))
        .exp()
}
