//! The lattice sequences `χ_n = {ψ_n(m)}_{m∈ℤ}` and the sequence-side
//! operators `M`, `D`, `B±`.
//!
//! Values are stored as they are; the scalar product carries the weight:
//! `(A, B) = (1/2π) Σ_m a_m* b_m`.

use std::f64::consts::PI;
use std::io::{Read, Write};

use crate::hermite::{ln_factorial, psi, psi_derivative, psi_upto};
use crate::io::{read_csv_columns, write_csv};
use crate::periodized::check_tol;
use crate::{Error, Result, C64};

/// A truncated element of `l₂(ℤ)` supported on `-M..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerSequence {
    degree: Option<usize>,
    halfwidth: usize,
    values: Vec<C64>,
    tol: f64,
}

/// `ln Σ_{m>M} e^{-m²} m^{2p}`.
fn ln_lattice_tail(halfwidth: usize, p: f64) -> f64 {
    let term = |m: f64| -m * m + 2.0 * p * m.ln();
    let mut peak = f64::NEG_INFINITY;
    let mut logs = Vec::new();
    let mut m = halfwidth as f64 + 1.0;
    loop {
        let t = term(m);
        peak = peak.max(t);
        logs.push(t);
        if m * m > p && t < peak - 50.0 {
            break;
        }
        m += 1.0;
    }
    peak + logs.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
}

/// `ln` of `2 · 2ⁿ (n+1) (n+1)! Σ_{m>M} e^{-m²} m^{2n}`, the two-sided bound on
/// the dropped `Σ |ψ_n(m)|²`.
pub fn ln_sequence_tail(n: usize, halfwidth: usize) -> f64 {
    let nf = n as f64;
    2f64.ln() + nf * 2f64.ln() + (nf + 1.0).ln() + ln_factorial(n + 1) + ln_lattice_tail(halfwidth, nf)
}

/// `ln` of `2 · 2^{2n} ((n+1)!)² Σ_{m>M} e^{-m²} m^{2(n+a)}`, bounding the
/// dropped `Σ |m^a ψ_n(m)|²`.
pub fn ln_moment_tail(n: usize, a: u32, halfwidth: usize) -> f64 {
    let nf = n as f64;
    2f64.ln() + 2.0 * nf * 2f64.ln() + 2.0 * ln_factorial(n + 1) + ln_lattice_tail(halfwidth, nf + a as f64)
}

fn smallest_passing<F: Fn(usize) -> bool>(start: usize, ok: F) -> usize {
    let mut m = start.max(1);
    while !ok(m) {
        m += 1;
    }
    m
}

/// `ceil(√(2n+1)) + ceil(√(2 ln(1/tol))) + 2`, enlarged until the tail
/// bound drops below `tol²`.
pub fn sequence_halfwidth(n: usize, tol: f64) -> Result<usize> {
    check_tol(tol)?;
    let base = (2.0 * n as f64 + 1.0).sqrt().ceil() as usize + (2.0 * (1.0 / tol).ln()).sqrt().ceil() as usize + 2;
    let target = 2.0 * tol.ln();
    Ok(smallest_passing(base, |m| ln_sequence_tail(n, m) < target))
}

/// Halfwidth certifying `m^a χ_n` to `tol`.
pub fn moment_halfwidth(n: usize, a: u32, tol: f64) -> Result<usize> {
    let base = sequence_halfwidth(n, tol)?;
    let target = 2.0 * tol.ln();
    Ok(smallest_passing(base, |m| ln_moment_tail(n, a, m) < target))
}

impl IntegerSequence {
    pub fn from_values(halfwidth: usize, values: Vec<C64>, tol: f64) -> Result<Self> {
        if values.len() != 2 * halfwidth + 1 {
            return Err(Error::Input(format!(
                "{} values for halfwidth {halfwidth} (expected {})",
                values.len(),
                2 * halfwidth + 1
            )));
        }
        Ok(Self {
            degree: None,
            halfwidth,
            values,
            tol,
        })
    }

    pub fn from_fn<F: Fn(i64) -> C64>(halfwidth: usize, tol: f64, f: F) -> Self {
        let m = halfwidth as i64;
        Self {
            degree: None,
            halfwidth,
            values: (-m..=m).map(f).collect(),
            tol,
        }
    }

    pub fn zero(tol: f64) -> Self {
        Self::from_fn(0, tol, |_| C64::default())
    }

    /// Basis index, or `None` for derived sequences.
    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn halfwidth(&self) -> usize {
        self.halfwidth
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Values for `m = -M..=M`.
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        -(self.halfwidth as i64)..=self.halfwidth as i64
    }

    /// Value at `m`, zero off the support.
    pub fn at(&self, m: i64) -> C64 {
        if m.unsigned_abs() as usize > self.halfwidth {
            C64::default()
        } else {
            self.values[(m + self.halfwidth as i64) as usize]
        }
    }

    fn derived(&self, halfwidth: usize, f: impl Fn(i64) -> C64) -> Self {
        Self::from_fn(halfwidth, self.tol, f)
    }

    pub fn scale(&self, c: C64) -> Self {
        self.derived(self.halfwidth, |m| self.at(m) * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        let h = self.halfwidth.max(other.halfwidth);
        let mut out = self.derived(h, |m| self.at(m) + other.at(m));
        out.tol = self.tol.max(other.tol);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::from(-1.0)))
    }

    pub fn norm_sqr(&self) -> f64 {
        seq_inner(self, self).re
    }

    /// `max_m |a_m − b_m|` over the union of supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let h = self.halfwidth.max(other.halfwidth) as i64;
        (-h..=h).map(|m| (self.at(m) - other.at(m)).norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_csv(
            writer,
            &["m", "value_re", "value_im"],
            self.indices().map(|m| {
                let v = self.at(m);
                [m as f64, v.re, v.im]
            }),
        )
    }

    /// Reads a sequence on a contiguous symmetric index range.
    pub fn read_csv<R: Read>(reader: R, tol: f64) -> Result<Self> {
        let cols = read_csv_columns(reader, &["m", "value_re", "value_im"])?;
        let len = cols[0].len();
        if len % 2 == 0 {
            return Err(Error::Input("expected an odd number of rows m = -M..M".into()));
        }
        let h = len / 2;
        for (j, &m) in cols[0].iter().enumerate() {
            if m != j as f64 - h as f64 {
                return Err(Error::Input(format!("row {j}: index {m} breaks the range -{h}..{h}")));
            }
        }
        Self::from_values(h, cols[1].iter().zip(&cols[2]).map(|(&re, &im)| C64::new(re, im)).collect(), tol)
    }
}

/// `χ_n` on its certified halfwidth.
pub fn chi_build(n: usize, tol: f64) -> Result<IntegerSequence> {
    Ok(chi_with_halfwidth(n, sequence_halfwidth(n, tol)?, tol))
}

/// `χ_n` on an explicit support `-M..=M`.
pub fn chi_with_halfwidth(n: usize, halfwidth: usize, tol: f64) -> IntegerSequence {
    let mut out = IntegerSequence::from_fn(halfwidth, tol, |m| C64::from(psi(n, m as f64)));
    out.degree = Some(n);
    out
}

/// `χ_0..χ_{n_max}` on the common halfwidth of the top index.
pub fn chi_family(n_max: usize, tol: f64) -> Result<Vec<IntegerSequence>> {
    let h = sequence_halfwidth(n_max, tol)?;
    Ok(chi_family_with_halfwidth(n_max, h, tol))
}

pub fn chi_family_with_halfwidth(n_max: usize, halfwidth: usize, tol: f64) -> Vec<IntegerSequence> {
    let m = halfwidth as i64;
    let mut cols = vec![Vec::with_capacity(2 * halfwidth + 1); n_max + 1];
    let mut family = vec![0.0; n_max + 1];
    for k in -m..=m {
        psi_upto(k as f64, &mut family);
        for (col, &v) in cols.iter_mut().zip(&family) {
            col.push(C64::from(v));
        }
    }
    cols.into_iter()
        .enumerate()
        .map(|(n, values)| IntegerSequence {
            degree: Some(n),
            halfwidth,
            values,
            tol,
        })
        .collect()
}

/// `(A, B) = (1/2π) Σ_m conj(a_m) b_m`, shorter sequence zero-padded.
pub fn seq_inner(a: &IntegerSequence, b: &IntegerSequence) -> C64 {
    let h = a.halfwidth.min(b.halfwidth) as i64;
    let s: C64 = (-h..=h).map(|m| a.at(m).conj() * b.at(m)).sum();
    s / (2.0 * PI)
}

/// `M S`: multiply by `m`.
pub fn apply_m(s: &IntegerSequence) -> IntegerSequence {
    apply_m_power(s, 1).expect("power 1 is supported")
}

/// `M^a S` for integer `a ≥ 1`. Basis sequences are rebuilt on a halfwidth
/// that certifies the moment tail; derived ones keep their support.
pub fn apply_m_power(s: &IntegerSequence, a: u32) -> Result<IntegerSequence> {
    if a == 0 {
        return Err(Error::UnsupportedExponent(0.0));
    }
    let (h, src) = match s.degree {
        Some(n) => {
            let h = moment_halfwidth(n, a, s.tol)?.max(s.halfwidth);
            (h, chi_with_halfwidth(n, h, s.tol))
        }
        None => (s.halfwidth, s.clone()),
    };
    Ok(src.derived(h, |m| src.at(m) * (m as f64).powi(a as i32)))
}

/// Support certifying both `Dχ_n` routes.
fn derivative_halfwidth(n: usize, tol: f64) -> Result<usize> {
    Ok(moment_halfwidth(n, 1, tol)?.max(sequence_halfwidth(n.saturating_sub(1), tol)?))
}

/// `D χ_n = {ψ′_n(m)}`.
pub fn apply_d_seq(n: usize, tol: f64) -> Result<IntegerSequence> {
    let h = derivative_halfwidth(n, tol)?;
    Ok(IntegerSequence::from_fn(h, tol, |m| C64::from(psi_derivative(n, m as f64))))
}

/// `D χ_n = √(2n) χ_{n-1} − M χ_n` from the sequence operations.
pub fn apply_d_seq_by_recurrence(n: usize, tol: f64) -> Result<IntegerSequence> {
    let h = derivative_halfwidth(n, tol)?;
    let m_chi = apply_m(&chi_with_halfwidth(n, h, tol));
    if n == 0 {
        return Ok(m_chi.scale(C64::from(-1.0)));
    }
    let lower = chi_with_halfwidth(n - 1, h, tol).scale(C64::from((2.0 * n as f64).sqrt()));
    Ok(lower.sub(&m_chi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// `B⁺ χ_n = √(n+1) χ_{n+1}`, `B⁻ χ_n = √n χ_{n-1}`.
pub fn ladder_b(n: usize, direction: Ladder, tol: f64) -> Result<IntegerSequence> {
    match direction {
        Ladder::Raise => Ok(chi_build(n + 1, tol)?.scale(C64::from(((n + 1) as f64).sqrt()))),
        Ladder::Lower if n == 0 => {
            check_tol(tol)?;
            Ok(IntegerSequence::zero(tol))
        }
        Ladder::Lower => Ok(chi_build(n - 1, tol)?.scale(C64::from((n as f64).sqrt()))),
    }
}

/// `B± χ_n = (M ∓ D) χ_n / √2`.
pub fn ladder_b_by_operators(n: usize, direction: Ladder, tol: f64) -> Result<IntegerSequence> {
    let h = derivative_halfwidth(n, tol)?;
    let m_chi = apply_m(&chi_with_halfwidth(n, h, tol));
    let d_chi = apply_d_seq(n, tol)?;
    let combined = match direction {
        Ladder::Raise => m_chi.sub(&d_chi),
        Ladder::Lower => m_chi.add(&d_chi),
    };
    Ok(combined.scale(C64::from(0.5f64.sqrt())))
}

/// `max_m |½(M² − D²) χ_n − (n + ½) χ_n|` with `ψ″_n(m) = (m² − 2n − 1) ψ_n(m)`.
pub fn number_check(n: usize, tol: f64) -> Result<f64> {
    let h = moment_halfwidth(n, 2, tol)?;
    let target = n as f64 + 0.5;
    Ok((-(h as i64)..=h as i64)
        .map(|m| {
            let x = m as f64;
            let v = psi(n, x);
            let m2 = x * x * v;
            let d2 = (x * x - 2.0 * n as f64 - 1.0) * v;
            (0.5 * (m2 - d2) - target * v).abs()
        })
        .fold(0.0, f64::max))
}
