//! Fourier coefficients on the circle and the bridge to the lattice.
//!
//! Analysis and synthesis use
//!
//! ```text
//! c_m  = (2π)^{-1/2} ∫ e^{imφ} f(φ) dφ
//! f(φ) = (2π)^{-1/2} Σ_m c_m e^{-imφ}
//! ```
//!
//! under which the periodized Hermite functions have `c_m = iⁿ ψ_n(m)`.

use std::f64::consts::PI;
use std::io::Write;

use rustfft::FftPlanner;

use crate::hermite::{psi, psi_upto};
use crate::io::write_csv;
use crate::periodized::{check_grid_size, evaluate_c, sequence_of_shifts, CircleSamples};
use crate::realline::GaussLegendre;
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoefficientSet {
    m_max: usize,
    coeffs: Vec<C64>,
    provenance: Provenance,
}

impl FourierCoefficientSet {
    pub fn new(m_max: usize, coeffs: Vec<C64>, provenance: Provenance) -> Result<Self> {
        if coeffs.len() != 2 * m_max + 1 {
            return Err(Error::Input(format!("{} coefficients for m_max = {m_max}", coeffs.len())));
        }
        Ok(Self {
            m_max,
            coeffs,
            provenance,
        })
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Coefficients for `m = -m_max..=m_max`.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `c_m`, zero beyond `m_max`.
    pub fn at(&self, m: i64) -> C64 {
        if m.unsigned_abs() as usize > self.m_max {
            C64::default()
        } else {
            self.coeffs[(m + self.m_max as i64) as usize]
        }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.m_max as i64)..=self.m_max as i64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_csv(
            writer,
            &["m", "c_re", "c_im"],
            self.indices().map(|m| {
                let c = self.at(m);
                [m as f64, c.re, c.im]
            }),
        )
    }
}

/// Trapezoid-rule coefficients through one inverse FFT of the samples.
pub fn coeffs_by_quadrature(f: &CircleSamples, m_max: usize) -> Result<FourierCoefficientSet> {
    let n = f.len();
    if m_max >= n / 2 {
        return Err(Error::Aliasing { m_max, half: n / 2 });
    }
    let mut buf = f.values().to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    // φ_j = -π + 2πj/N gives e^{imφ_j} = (-1)^m e^{2πimj/N}
    let scale = (2.0 * PI).sqrt() / n as f64;
    let coeffs = (-(m_max as i64)..=m_max as i64)
        .map(|m| {
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buf[m.rem_euclid(n as i64) as usize] * (sign * scale)
        })
        .collect();
    FourierCoefficientSet::new(m_max, coeffs, Provenance::Quadrature)
}

/// `c_m = iⁿ ψ_n(m)`.
pub fn coeffs_closed_form(n: usize, m_max: usize) -> FourierCoefficientSet {
    let phase = C64::i().powu(n as u32 % 4);
    let coeffs = (-(m_max as i64)..=m_max as i64).map(|m| phase * psi(n, m as f64)).collect();
    FourierCoefficientSet {
        m_max,
        coeffs,
        provenance: Provenance::ClosedForm,
    }
}

/// `(2π)^{-1/2} Σ_m c_m e^{-imφ}`.
pub fn synthesize(coeffs: &FourierCoefficientSet, phi: f64) -> C64 {
    let s: C64 = coeffs.indices().map(|m| coeffs.at(m) * C64::from_polar(1.0, -(m as f64) * phi)).sum();
    s / (2.0 * PI).sqrt()
}

/// Synthesis on the `N`-point circle grid.
pub fn synthesize_samples(coeffs: &FourierCoefficientSet, grid: usize) -> Result<CircleSamples> {
    check_grid_size(grid)?;
    if coeffs.m_max >= grid / 2 {
        return Err(Error::Aliasing {
            m_max: coeffs.m_max,
            half: grid / 2,
        });
    }
    // f_j = (2π)^{-1/2} Σ_m (-1)^m c_m e^{-2πimj/N}
    let mut buf = vec![C64::default(); grid];
    for m in coeffs.indices() {
        let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        buf[m.rem_euclid(grid as i64) as usize] += coeffs.at(m) * sign;
    }
    FftPlanner::new().plan_fft_forward(grid).process(&mut buf);
    let scale = 1.0 / (2.0 * PI).sqrt();
    CircleSamples::new(buf.into_iter().map(|v| v * scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletKernelValue {
    pub order: usize,
    pub argument: f64,
    pub value: f64,
}

/// `D_m(t) = Σ_{|k|≤m} e^{ikt} = sin((m+½)t) / sin(t/2)`, `2m+1` on `2πℤ`.
pub fn dirichlet_kernel(m: usize, t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    let half = (0.5 * r).sin();
    if r == 0.0 || half.abs() < 1e-300 {
        return 2.0 * m as f64 + 1.0;
    }
    ((m as f64 + 0.5) * r).sin() / half
}

pub fn dirichlet_kernel_value(m: usize, t: f64) -> DirichletKernelValue {
    DirichletKernelValue {
        order: m,
        argument: t,
        value: dirichlet_kernel(m, t),
    }
}

/// Half-width of the window that carries `𝔠_n(·; m)` on the line.
fn finite_window(n: usize, m: usize) -> f64 {
    let spread = 2.0 * PI * m as f64 + (2.0 * n as f64 + 1.0).sqrt() + 10.0;
    spread.max((2 * m + 3) as f64 * PI)
}

/// `FT[𝔠_n(·; m)](y)` by 2048-node Gauss–Legendre on a window outside which
/// the integrand is negligible.
pub fn finite_ft(n: usize, m: usize, y: f64) -> C64 {
    finite_ft_with(n, m, &[y], &GaussLegendre::new(2048))[0]
}

fn finite_ft_with(n: usize, m: usize, ys: &[f64], rule: &GaussLegendre) -> Vec<C64> {
    let w = finite_window(n, m);
    let (xs, ws) = rule.scaled(-w, w);
    let mut family = vec![0.0; n + 1];
    let weighted: Vec<f64> = xs
        .iter()
        .zip(&ws)
        .map(|(&x, &wt)| {
            let v: f64 = sequence_of_shifts(x, m)
                .map(|s| {
                    psi_upto(s, &mut family);
                    family[n]
                })
                .sum();
            v * wt
        })
        .collect();
    let norm = 1.0 / (2.0 * PI).sqrt();
    ys.iter()
        .map(|&y| {
            let s: C64 = xs.iter().zip(&weighted).map(|(&x, &v)| C64::from_polar(v, x * y)).sum();
            s * norm
        })
        .collect()
}

/// `max_y |FT[𝔠_n(·; m)](y) − iⁿ D_m(2πy) ψ_n(y)|`.
pub fn verify_finite_ft(n: usize, m: usize, ys: &[f64]) -> f64 {
    let rule = GaussLegendre::new(2048);
    let phase = C64::i().powu(n as u32 % 4);
    finite_ft_with(n, m, ys, &rule)
        .into_iter()
        .zip(ys)
        .map(|(ft, &y)| (ft - phase * dirichlet_kernel(m, 2.0 * PI * y) * psi(n, y)).norm())
        .fold(0.0, f64::max)
}

/// `max_φ |𝔠_n(φ) − (iⁿ/√(2π)) Σ_{|m|≤M} ψ_n(m) e^{-imφ}|` with `M` large
/// enough that the lattice tail is below `tol`.
pub fn periodization_residual(n: usize, phis: &[f64], tol: f64) -> Result<f64> {
    let m_max = crate::sequences::sequence_halfwidth(n, tol)?;
    let coeffs = coeffs_closed_form(n, m_max);
    phis.iter().try_fold(0.0f64, |acc, &phi| {
        let direct = evaluate_c(n, phi, tol)?;
        Ok(acc.max((synthesize(&coeffs, phi) - direct).norm()))
    })
}
