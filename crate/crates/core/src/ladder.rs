//! Finite combinations `Σ a_n e_n` of basis indices and the tridiagonal
//! operators acting on them.
//!
//! The same matrices act on both sides of the bridge: `e_n` stands for `𝔠_n`
//! on the circle (position `Φ`, derivative `D_φ`) and for `χ_n` on the
//! lattice (`M`, `D`).

use crate::periodized::evaluate_c;
use crate::sequences::{chi_with_halfwidth, sequence_halfwidth, IntegerSequence};
use crate::{Result, C64};

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Combination {
    coeffs: Vec<C64>,
}

impl Combination {
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![C64::default(); n + 1];
        coeffs[n] = C64::from(1.0);
        Self { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> C64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Highest index carried (possibly with a zero coefficient).
    pub fn top(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self {
            coeffs: (0..len).map(|n| self.coeff(n) + other.coeff(n)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::from(-1.0)))
    }

    /// `e_n ↦ α_n e_{n-1} + β_n e_{n+1}`.
    fn tridiagonal(&self, down: impl Fn(usize) -> f64, up: impl Fn(usize) -> f64) -> Self {
        let mut out = vec![C64::default(); self.coeffs.len() + 1];
        for (n, &a) in self.coeffs.iter().enumerate() {
            if n > 0 {
                out[n - 1] += a * down(n);
            }
            out[n + 1] += a * up(n);
        }
        Self { coeffs: out }
    }

    /// `Φ e_n = √(n/2) e_{n-1} + √((n+1)/2) e_{n+1}`.
    pub fn position(&self) -> Self {
        self.tridiagonal(|n| (n as f64 / 2.0).sqrt(), |n| ((n + 1) as f64 / 2.0).sqrt())
    }

    /// `D e_n = √(n/2) e_{n-1} − √((n+1)/2) e_{n+1}`.
    pub fn derivative(&self) -> Self {
        self.tridiagonal(|n| (n as f64 / 2.0).sqrt(), |n| -((n + 1) as f64 / 2.0).sqrt())
    }

    /// `A⁺ e_n = √(n+1) e_{n+1}`.
    pub fn raise(&self) -> Self {
        self.tridiagonal(|_| 0.0, |n| ((n + 1) as f64).sqrt())
    }

    /// `A⁻ e_n = √n e_{n-1}`.
    pub fn lower(&self) -> Self {
        self.tridiagonal(|n| (n as f64).sqrt(), |_| 0.0)
    }

    /// `A⁺A⁻ e_n = n e_n`.
    pub fn number(&self) -> Self {
        self.lower().raise()
    }

    /// `½(Φ² − D²)`.
    pub fn oscillator(&self) -> Self {
        let p2 = self.position().position();
        let d2 = self.derivative().derivative();
        p2.sub(&d2).scale(C64::from(0.5))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).map(|n| (self.coeff(n) - other.coeff(n)).norm()).fold(0.0, f64::max)
    }

    /// `Σ a_n 𝔠_n(φ)`.
    pub fn on_circle(&self, phi: f64, tol: f64) -> Result<C64> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() != 0.0)
            .try_fold(C64::default(), |acc, (n, &a)| Ok(acc + a * evaluate_c(n, phi, tol)?))
    }

    /// `Σ a_n χ_n` on the halfwidth certified for the top index.
    pub fn on_lattice(&self, tol: f64) -> Result<IntegerSequence> {
        let h = sequence_halfwidth(self.top(), tol)?;
        let mut out = IntegerSequence::from_fn(h, tol, |_| C64::default());
        for (n, &a) in self.coeffs.iter().enumerate().filter(|(_, a)| a.norm() != 0.0) {
            out = out.add(&chi_with_halfwidth(n, h, tol).scale(a));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodized::{apply_derivative, apply_position, grid_point};
    use crate::sequences::{apply_d_seq, apply_m, chi_build};

    const TOL: f64 = 1e-12;

    #[test]
    fn ladder_identities_in_coefficients() {
        let r2 = C64::from(2f64.sqrt());
        for n in 0..=12 {
            let e = Combination::basis(n);
            let raise = e.position().sub(&e.derivative()).scale(1.0 / r2);
            let lower = e.position().add(&e.derivative()).scale(1.0 / r2);
            assert!(raise.max_abs_diff(&e.raise()) < 1e-15);
            assert!(lower.max_abs_diff(&e.lower()) < 1e-15);
            assert!(e.number().max_abs_diff(&e.scale(C64::from(n as f64))) < 1e-14);
            let comm = e.raise().lower().sub(&e.lower().raise());
            assert!(comm.max_abs_diff(&e) < 1e-14);
            let osc = e.oscillator();
            assert!(osc.max_abs_diff(&e.scale(C64::from(n as f64 + 0.5))) < 1e-14);
        }
    }

    #[test]
    fn recurrences_match_direct_series_on_circle() {
        for n in 0..=6 {
            let e = Combination::basis(n);
            for j in (0..64).step_by(9) {
                let phi = grid_point(j, 64);
                let p = e.position().on_circle(phi, TOL).unwrap();
                assert!((p.re - apply_position(n, phi, TOL).unwrap()).abs() < 3.0 * TOL);
                let d = e.derivative().on_circle(phi, TOL).unwrap();
                assert!((d.re - apply_derivative(n, phi, TOL).unwrap()).abs() < 3.0 * TOL);
            }
        }
    }

    #[test]
    fn recurrences_match_sequence_operators() {
        for n in 0..=8 {
            let e = Combination::basis(n);
            let m_chi = apply_m(&chi_build(n, TOL).unwrap());
            assert!(e.position().on_lattice(TOL).unwrap().max_abs_diff(&m_chi) < 1e-12);
            let d_chi = apply_d_seq(n, TOL).unwrap();
            assert!(e.derivative().on_lattice(TOL).unwrap().max_abs_diff(&d_chi) < 1e-12);
        }
    }
}
