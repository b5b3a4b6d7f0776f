//! Periodized Hermite functions `𝔠_n(φ) = Σ_k ψ_n(φ + 2kπ)` and the
//! circle-side operators.
//!
//! Every series is cut at `|k| ≤ K` where `K` is the smallest halfwidth whose
//! tail majorant
//!
//! ```text
//! 2 (2π)^{2n+a} e^π (n+1)! Σ_{k≥K} e^{-(k+1)} (k+1)^{n+a}
//! ```
//!
//! drops below the requested tolerance (`a` is the power of the position
//! weight, zero for `𝔠_n` itself). The bound is loose but certified.
//!
//! Operator conventions, all in normalized weights:
//!
//! ```text
//! Φ 𝔠_n = √(n/2) 𝔠_{n-1} + √((n+1)/2) 𝔠_{n+1}
//! D 𝔠_n = √(n/2) 𝔠_{n-1} − √((n+1)/2) 𝔠_{n+1}
//! A⁺ = (Φ − D)/√2,  A⁻ = (Φ + D)/√2
//! ```

use std::f64::consts::PI;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::hermite::{ln_factorial, psi_upto};
use crate::io::{read_csv_columns, write_csv};
use crate::{Error, Result, C64};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_GRID: usize = 1024;

const TWO_PI: f64 = 2.0 * PI;

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 && tol < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// `ln Σ_{j≥start} e^{-j} j^p`, summed until the terms are past their peak
/// and negligible.
fn ln_tail_series(start: usize, p: f64) -> f64 {
    let term = |j: usize| -(j as f64) + p * (j as f64).ln();
    let mut peak = f64::NEG_INFINITY;
    let mut logs = Vec::new();
    let mut j = start.max(1);
    loop {
        let t = term(j);
        peak = peak.max(t);
        logs.push(t);
        if j as f64 > p && t < peak - 50.0 {
            break;
        }
        j += 1;
    }
    peak + logs.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
}

/// Natural log of the tail majorant at halfwidth `k` with position power `a`.
pub fn ln_tail_majorant(n: usize, a: u32, k: usize) -> f64 {
    let p = (n + a as usize) as f64;
    2f64.ln() + (2.0 * n as f64 + a as f64) * TWO_PI.ln() + PI + ln_factorial(n + 1) + ln_tail_series(k + 1, p)
}

/// Smallest `K ≥ 1` with tail majorant `< tol`.
pub fn truncation_halfwidth(n: usize, tol: f64) -> Result<usize> {
    truncation_halfwidth_weighted(n, 0, tol)
}

/// As [`truncation_halfwidth`] for the series weighted by `(φ + 2kπ)^a`.
pub fn truncation_halfwidth_weighted(n: usize, a: u32, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    let target = tol.ln();
    // the majorant is decreasing in K: bracket, then bisect
    let mut hi = 1usize;
    while ln_tail_majorant(n, a, hi) >= target {
        hi *= 2;
    }
    if hi == 1 {
        return Ok(1);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if ln_tail_majorant(n, a, mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodizationSpec {
    pub degree: usize,
    pub tol: f64,
    pub halfwidth: usize,
}

impl PeriodizationSpec {
    pub fn new(degree: usize, tol: f64) -> Result<Self> {
        Ok(Self {
            degree,
            tol,
            halfwidth: truncation_halfwidth(degree, tol)?,
        })
    }

    /// Tail majorant at the chosen halfwidth.
    pub fn majorant(&self) -> f64 {
        ln_tail_majorant(self.degree, 0, self.halfwidth).exp()
    }
}

/// Reduce to `[-π, π)`.
pub fn wrap_angle(phi: f64) -> f64 {
    let t = (phi + PI).rem_euclid(TWO_PI) - PI;
    if t >= PI {
        -PI
    } else {
        t
    }
}

/// Beyond this distance past the turning point every `ψ_k`, `k ≤ n`, and its
/// polynomial weights underflow to zero in f64.
fn negligible_beyond(n: usize) -> f64 {
    (2.0 * n as f64 + 1.0).sqrt() + 40.0
}

/// Shifts `φ + 2kπ` for `|k| ≤ K`, outermost first, dropping the ones whose
/// contribution is below underflow.
fn shifts(phi: f64, halfwidth: usize, n: usize) -> impl Iterator<Item = f64> {
    let cut = negligible_beyond(n);
    sequence_of_shifts(phi, halfwidth).filter(move |x| x.abs() <= cut)
}

/// `Σ_{|k|≤K} w(x_k) g(family(x_k))` where `family` holds `ψ_0..ψ_{top}`.
fn series<F>(phi: f64, halfwidth: usize, top: usize, f: F) -> f64
where
    F: Fn(f64, &[f64]) -> f64,
{
    let mut family = vec![0.0; top + 1];
    let mut total = 0.0;
    for x in shifts(phi, halfwidth, top) {
        psi_upto(x, &mut family);
        total += f(x, &family);
    }
    total
}

/// `𝔠_n(φ)` to absolute accuracy `tol`.
pub fn evaluate_c(n: usize, phi: f64, tol: f64) -> Result<f64> {
    let k = truncation_halfwidth(n, tol)?;
    Ok(series(wrap_angle(phi), k, n, |_, fam| fam[n]))
}

/// `x + 2πk` for `|k| ≤ m`, outermost first.
pub(crate) fn sequence_of_shifts(x: f64, m: usize) -> impl Iterator<Item = f64> {
    (0..=m as i64).rev().flat_map(move |j| {
        let pair = if j == 0 { vec![x] } else { vec![x - TWO_PI * j as f64, x + TWO_PI * j as f64] };
        pair.into_iter()
    })
}

/// `𝔠_n(x; m) = Σ_{k=-m}^{m} ψ_n(x + 2πk)`, no wrapping.
pub fn evaluate_c_partial(n: usize, x: f64, m: usize) -> f64 {
    let mut family = vec![0.0; n + 1];
    sequence_of_shifts(x, m)
        .map(|s| {
            psi_upto(s, &mut family);
            family[n]
        })
        .sum()
}

/// `Φ 𝔠_n(φ) = Σ (φ+2kπ) ψ_n(φ+2kπ)`.
pub fn apply_position(n: usize, phi: f64, tol: f64) -> Result<f64> {
    let k = truncation_halfwidth_weighted(n, 1, tol)?;
    Ok(series(wrap_angle(phi), k, n, |x, fam| x * fam[n]))
}

/// `Φ^a 𝔠_n(φ) = Σ (φ+2kπ)^a ψ_n(φ+2kπ)` for integer `a ≥ 1`.
pub fn apply_position_power(n: usize, phi: f64, a: f64, tol: f64) -> Result<f64> {
    if !(a >= 1.0 && a.fract() == 0.0 && a <= 64.0) {
        return Err(Error::UnsupportedExponent(a));
    }
    let a = a as u32;
    let k = truncation_halfwidth_weighted(n, a, tol)?;
    Ok(series(wrap_angle(phi), k, n, |x, fam| x.powi(a as i32) * fam[n]))
}

/// `D_φ 𝔠_n(φ) = Σ ψ′_n(φ+2kπ)`.
pub fn apply_derivative(n: usize, phi: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    // ψ′_n = √(2n) ψ_{n-1} − x ψ_n: split the budget between both tails
    let share = tol / (1.0 + (2.0 * n as f64).sqrt());
    let k = truncation_halfwidth_weighted(n, 1, share)?;
    Ok(series(wrap_angle(phi), k, n, |x, fam| {
        let lower = if n == 0 { 0.0 } else { (2.0 * n as f64).sqrt() * fam[n - 1] };
        lower - x * fam[n]
    }))
}

/// `A⁺ 𝔠_n = √(n+1) 𝔠_{n+1}`.
pub fn ladder_raise(n: usize, phi: f64, tol: f64) -> Result<f64> {
    Ok(((n + 1) as f64).sqrt() * evaluate_c(n + 1, phi, tol)?)
}

/// `A⁻ 𝔠_n = √n 𝔠_{n-1}`, zero for `n = 0`.
pub fn ladder_lower(n: usize, phi: f64, tol: f64) -> Result<f64> {
    if n == 0 {
        check_tol(tol)?;
        return Ok(0.0);
    }
    Ok((n as f64).sqrt() * evaluate_c(n - 1, phi, tol)?)
}

/// Uniform samples on `φ_j = -π + 2πj/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSamples {
    values: Vec<C64>,
}

pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::GridSize(n))
    }
}

pub fn grid_point(j: usize, n: usize) -> f64 {
    -PI + TWO_PI * j as f64 / n as f64
}

impl CircleSamples {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        check_grid_size(values.len())?;
        Ok(Self { values })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| C64::from(v)).collect())
    }

    pub fn from_fn<F: Fn(f64) -> C64>(n: usize, f: F) -> Result<Self> {
        check_grid_size(n)?;
        Ok(Self {
            values: (0..n).map(|j| f(grid_point(j, n))).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| grid_point(j, self.len())).collect()
    }

    /// `⟨f|g⟩ = (1/2π) ∫ f* g dφ` by the trapezoid rule.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.len(), other.len(), "grids differ");
        let s: C64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        s / self.len() as f64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.len() as f64
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "grids differ");
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let n = self.len();
        write_csv(
            writer,
            &["phi", "value_re", "value_im"],
            self.values.iter().enumerate().map(|(j, v)| [grid_point(j, n), v.re, v.im]),
        )
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let cols = read_csv_columns(reader, &["phi", "value_re", "value_im"])?;
        let n = cols[0].len();
        check_grid_size(n)?;
        for (j, &phi) in cols[0].iter().enumerate() {
            if (phi - grid_point(j, n)).abs() > 1e-12 {
                return Err(Error::Input(format!("row {j}: phi = {phi} is off the uniform grid")));
            }
        }
        Self::new(cols[1].iter().zip(&cols[2]).map(|(&re, &im)| C64::new(re, im)).collect())
    }
}

#[derive(Debug, Clone)]
pub struct CircleBasisElement {
    pub spec: PeriodizationSpec,
    pub samples: CircleSamples,
}

/// `𝔠_n` on the `N`-point grid.
pub fn sample_basis(n: usize, grid: usize, tol: f64) -> Result<CircleBasisElement> {
    Ok(sample_basis_family(n, grid, tol)?.pop().expect("family is non-empty"))
}

/// `𝔠_0..𝔠_{n_max}` on one grid, sharing the Hermite recurrence per shift.
pub fn sample_basis_family(n_max: usize, grid: usize, tol: f64) -> Result<Vec<CircleBasisElement>> {
    check_grid_size(grid)?;
    let k = truncation_halfwidth(n_max, tol)?;
    let rows: Vec<Vec<f64>> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let mut family = vec![0.0; n_max + 1];
            let mut acc = vec![0.0; n_max + 1];
            for x in shifts(grid_point(j, grid), k, n_max) {
                psi_upto(x, &mut family);
                for (a, f) in acc.iter_mut().zip(&family) {
                    *a += f;
                }
            }
            acc
        })
        .collect();
    (0..=n_max)
        .map(|n| {
            Ok(CircleBasisElement {
                spec: PeriodizationSpec {
                    degree: n,
                    tol,
                    halfwidth: k,
                },
                samples: CircleSamples::new(rows.iter().map(|r| C64::from(r[n])).collect())?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{psi, PI_POW_NEG_QUARTER};

    const TOL: f64 = 1e-12;

    fn direct_majorant(n: usize, k: usize) -> f64 {
        let fact: f64 = (1..=n + 1).map(|i| i as f64).product();
        let tail: f64 = (k..k + 2000).map(|j| (-(j as f64 + 1.0)).exp() * (j as f64 + 1.0).powi(n as i32)).sum();
        2.0 * TWO_PI.powi(2 * n as i32) * PI.exp() * fact * tail
    }

    #[test]
    fn majorant_matches_direct_evaluation() {
        for n in [0, 1, 3, 6] {
            for k in [1, 5, 30, 80] {
                let a = ln_tail_majorant(n, 0, k).exp();
                let b = direct_majorant(n, k);
                assert!((a - b).abs() <= 1e-10 * b, "n={n} k={k} {a} {b}");
            }
        }
    }

    #[test]
    fn halfwidth_is_smallest_admissible() {
        for n in [0, 2, 10, 20] {
            for tol in [0.5, 1e-6, 1e-12] {
                let k = truncation_halfwidth(n, tol).unwrap();
                assert!(ln_tail_majorant(n, 0, k) < tol.ln());
                if k > 1 {
                    assert!(ln_tail_majorant(n, 0, k - 1) >= tol.ln());
                }
            }
        }
        let k = truncation_halfwidth(0, 0.5).unwrap();
        assert_eq!(k, 4);
        assert!(direct_majorant(0, 4) < 0.5 && direct_majorant(0, 3) >= 0.5);
        assert!(truncation_halfwidth(10, 1e-10).unwrap() >= truncation_halfwidth(0, 1e-10).unwrap());
    }

    #[test]
    fn bad_tolerance_rejected() {
        for tol in [0.0, -1.0, 1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(truncation_halfwidth(0, tol), Err(Error::InvalidTolerance(_))));
        }
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate_c(1, 0.0, TOL).unwrap(), 0.0);
        let c0 = evaluate_c(0, 0.0, TOL).unwrap();
        assert!((c0 - PI_POW_NEG_QUARTER).abs() < 1e-8);
        let direct: f64 = (-5..=5).map(|k| psi(0, TWO_PI * k as f64)).sum();
        assert!((c0 - direct).abs() < 1e-15);
        let phi = 0.37;
        assert_eq!(evaluate_c(3, phi, TOL).unwrap(), evaluate_c(3, phi - TWO_PI + TWO_PI, TOL).unwrap());
    }

    #[test]
    fn enlarging_halfwidth_changes_nothing() {
        for n in [0, 4, 11] {
            let k = truncation_halfwidth(n, TOL).unwrap();
            for phi in [-3.0, -0.2, 1.1, 2.9] {
                let a = series(phi, k, n, |_, f| f[n]);
                let b = series(phi, k + 3, n, |_, f| f[n]);
                assert!((a - b).abs() < TOL);
            }
        }
    }

    #[test]
    fn partial_sums() {
        assert_eq!(evaluate_c_partial(5, 0.8, 0), psi(5, 0.8));
        let want = psi(0, 0.0) + 2.0 * psi(0, TWO_PI);
        assert!((evaluate_c_partial(0, 0.0, 1) - want).abs() < 1e-16);
        for n in [0, 3, 8] {
            let k = truncation_halfwidth(n, TOL).unwrap();
            let phi = 0.6;
            let full = evaluate_c(n, phi, TOL).unwrap();
            assert!((evaluate_c_partial(n, phi, k) - full).abs() < TOL);
        }
    }

    #[test]
    fn position_examples() {
        assert!(apply_position(0, 0.0, TOL).unwrap().abs() < TOL);
        let phi = 1.0;
        let want = 0.5f64.sqrt() * evaluate_c(0, phi, TOL).unwrap() + evaluate_c(2, phi, TOL).unwrap();
        assert!((apply_position(1, phi, TOL).unwrap() - want).abs() < 2.0 * TOL);
        for phi in [0.3, 1.7, 2.8] {
            let a = apply_position(0, phi, TOL).unwrap();
            let b = apply_position(0, -phi, TOL).unwrap();
            assert!((a + b).abs() < 2.0 * TOL);
        }
        assert_eq!(apply_position_power(2, 0.4, 1.0, TOL).unwrap(), apply_position(2, 0.4, TOL).unwrap());
    }

    #[test]
    fn position_power_matches_composition() {
        // Φ² 𝔠_n through the recurrence, written out
        let c = |k: usize, phi: f64| evaluate_c(k, phi, TOL).unwrap();
        for n in [0usize, 1, 4] {
            for phi in [0.0, 0.9, -2.2] {
                let nf = n as f64;
                let mut want = (nf + 0.5) * c(n, phi) + ((nf + 1.0) * (nf + 2.0)).sqrt() / 2.0 * c(n + 2, phi);
                if n >= 2 {
                    want += (nf * (nf - 1.0)).sqrt() / 2.0 * c(n - 2, phi);
                }
                let got = apply_position_power(n, phi, 2.0, TOL).unwrap();
                assert!((got - want).abs() < 4.0 * TOL, "n={n} phi={phi}");
            }
        }
        assert!(matches!(apply_position_power(0, 0.0, 1.5, TOL), Err(Error::UnsupportedExponent(_))));
        assert!(matches!(apply_position_power(0, 0.0, 0.0, TOL), Err(Error::UnsupportedExponent(_))));
    }

    #[test]
    fn derivative_examples() {
        assert!(apply_derivative(0, 0.0, TOL).unwrap().abs() < TOL);
        let h = 1e-5;
        let fd = (evaluate_c(2, 0.7 + h, TOL).unwrap() - evaluate_c(2, 0.7 - h, TOL).unwrap()) / (2.0 * h);
        assert!((apply_derivative(2, 0.7, TOL).unwrap() - fd).abs() < 1e-7);
        for n in 0..=15usize {
            for j in 0..64 {
                let phi = grid_point(j, 64);
                let d = apply_derivative(n, phi, TOL).unwrap();
                let p = apply_position(n, phi, TOL).unwrap();
                let lower = if n == 0 { 0.0 } else { (2.0 * n as f64).sqrt() * evaluate_c(n - 1, phi, TOL).unwrap() };
                assert!((d + p - lower).abs() < 2.0 * TOL, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn ladder_examples() {
        assert_eq!(ladder_lower(0, 1.2, TOL).unwrap(), 0.0);
        assert_eq!(ladder_raise(0, 1.2, TOL).unwrap(), evaluate_c(1, 1.2, TOL).unwrap());
        let r2 = 2f64.sqrt();
        for n in 0..=8usize {
            for phi in [-2.5, 0.1, 1.9] {
                let p = apply_position(n, phi, TOL).unwrap();
                let d = apply_derivative(n, phi, TOL).unwrap();
                assert!(((p - d) / r2 - ladder_raise(n, phi, TOL).unwrap()).abs() < 2.0 * TOL);
                assert!(((p + d) / r2 - ladder_lower(n, phi, TOL).unwrap()).abs() < 2.0 * TOL);
                // [A⁻, A⁺] 𝔠_n = 𝔠_n: (n+1)𝔠_n − n𝔠_n
                let up_down = (n as f64 + 1.0).sqrt() * ladder_lower(n + 1, phi, TOL).unwrap();
                let down_up = if n == 0 { 0.0 } else { (n as f64).sqrt() * ladder_raise(n - 1, phi, TOL).unwrap() };
                assert!((up_down - down_up - evaluate_c(n, phi, TOL).unwrap()).abs() < 3.0 * TOL);
            }
        }
    }

    #[test]
    fn sampling() {
        let e = sample_basis(0, 8, TOL).unwrap();
        assert_eq!(e.samples.len(), 8);
        // Cramér bound plus the periodization tail 2ψ_0(2π)
        let bound = PI_POW_NEG_QUARTER + 2.0 * psi(0, TWO_PI);
        assert!(e.samples.values().iter().all(|v| v.re.abs() <= bound + 1e-15));
        let e = sample_basis(4, 64, TOL).unwrap();
        for j in 1..64 {
            let (a, b) = (e.samples.values()[j], e.samples.values()[64 - j]);
            assert!((a - b).norm() < 2.0 * TOL);
        }
        let norm = sample_basis(0, DEFAULT_GRID, TOL).unwrap().samples.norm_sqr();
        let oracle: f64 = (-10..=10).map(|m| psi(0, m as f64).powi(2)).sum::<f64>() / TWO_PI;
        assert!((norm - oracle).abs() < 1e-6);
        assert!((norm - 0.159172).abs() < 1e-6);
        assert!(matches!(sample_basis(0, 12, TOL), Err(Error::GridSize(12))));
    }

    #[test]
    fn family_agrees_with_pointwise() {
        let fam = sample_basis_family(6, 16, TOL).unwrap();
        for (n, e) in fam.iter().enumerate() {
            for (j, v) in e.samples.values().iter().enumerate() {
                assert!((v.re - evaluate_c(n, grid_point(j, 16), TOL).unwrap()).abs() < 2.0 * TOL);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let s = sample_basis(2, 8, TOL).unwrap().samples;
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("phi,value_re,value_im\n-3.141592653589793,"));
        assert_eq!(text.lines().count(), 9);
        assert_eq!(CircleSamples::read_csv(buf.as_slice()).unwrap(), s);
    }
}
