//! Gram matrix of the periodized family and its parity-split Gram–Schmidt
//! orthonormalization.
//!
//! By Parseval the circle functions `𝔠_k` and their coefficient sequences
//! `a_k = iᵏ χ_k` have the same scalar products, `⟨𝔠_n|𝔠_m⟩ = (a_n, a_m)`.
//! The process runs on the `a_k`: the triangular matrices come out of
//! modified Gram–Schmidt with one reorthogonalization pass, and the
//! orthonormal functions `Ĉ_n` are carried by their own coefficient vectors
//! rather than rebuilt as `Σ C_nk 𝔠_k`. The family is badly conditioned
//! (the smallest Gram eigenvalue is near 1e-18 at size 17), so the
//! recombination would lose every digit the process gained.

use std::io::Write;

use rayon::prelude::*;

use crate::fourier::{synthesize_samples, FourierCoefficientSet, Provenance};
use crate::io::write_csv;
use crate::periodized::{sample_basis_family, CircleSamples};
use crate::sequences::{chi_family_with_halfwidth, seq_inner, sequence_halfwidth, IntegerSequence};
use crate::{Error, Result, C64};

/// Largest family the pivot guard admits at the default tolerance.
pub const DEFAULT_N_MAX: usize = 16;
/// Relative pivot below which the family counts as numerically dependent.
pub const PIVOT_GUARD: f64 = 1e-13;

fn i_pow(k: i64) -> C64 {
    C64::i().powu(k.rem_euclid(4) as u32)
}

#[derive(Debug, Clone)]
pub struct GramMatrix {
    entries: Vec<Vec<C64>>,
    images: Vec<IntegerSequence>,
}

impl GramMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn n_max(&self) -> usize {
        self.size() - 1
    }

    pub fn get(&self, n: usize, m: usize) -> C64 {
        self.entries[n][m]
    }

    pub fn entries(&self) -> &[Vec<C64>] {
        &self.entries
    }

    /// Coefficient sequences `a_k = iᵏ χ_k` the entries were computed from.
    pub fn images(&self) -> &[IntegerSequence] {
        &self.images
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.size();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| (self.get(a, b) - self.get(b, a).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|G_nm|` with `n + m` odd.
    pub fn parity_defect(&self) -> f64 {
        let n = self.size();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|(a, b)| (a + b) % 2 == 1)
            .map(|(a, b)| self.get(a, b).norm())
            .fold(0.0, f64::max)
    }
}

/// `G_nm = i^{m-n} (χ_n, χ_m)` for `n, m ≤ n_max`.
pub fn gram_matrix(n_max: usize, tol: f64) -> Result<GramMatrix> {
    let h = sequence_halfwidth(n_max, tol)?;
    gram_matrix_with_halfwidth(n_max, h, tol)
}

pub fn gram_matrix_with_halfwidth(n_max: usize, halfwidth: usize, tol: f64) -> Result<GramMatrix> {
    let images: Vec<IntegerSequence> = chi_family_with_halfwidth(n_max, halfwidth, tol)
        .into_iter()
        .enumerate()
        .map(|(k, chi)| chi.scale(i_pow(k as i64)))
        .collect();
    let entries = (0..=n_max)
        .into_par_iter()
        .map(|n| (0..=n_max).map(|m| seq_inner(&images[n], &images[m])).collect())
        .collect();
    Ok(GramMatrix { entries, images })
}

/// `⟨𝔠_n|𝔠_m⟩ = (1/2π) ∫ 𝔠_n 𝔠_m dφ` by the trapezoid rule on `grid` points.
pub fn gram_matrix_by_quadrature(n_max: usize, grid: usize, tol: f64) -> Result<Vec<Vec<C64>>> {
    let family = sample_basis_family(n_max, grid, tol)?;
    Ok((0..=n_max)
        .into_par_iter()
        .map(|n| (0..=n_max).map(|m| family[n].samples.inner(&family[m].samples)).collect())
        .collect())
}

#[derive(Debug, Clone)]
pub struct GramSchmidtResult {
    gram: GramMatrix,
    unit_lower: Vec<Vec<f64>>,
    norms: Vec<f64>,
    coefficients: Vec<Vec<f64>>,
    vectors: Vec<IntegerSequence>,
    residual: f64,
}

impl GramSchmidtResult {
    pub fn n_max(&self) -> usize {
        self.norms.len() - 1
    }

    pub fn gram(&self) -> &GramMatrix {
        &self.gram
    }

    /// `𝔇_n = Σ_k R_nk 𝔠_k` with `R_nn = 1`.
    pub fn unit_lower(&self) -> &[Vec<f64>] {
        &self.unit_lower
    }

    /// `⟨𝔇_n|𝔇_n⟩`.
    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    /// `Ĉ_n = Σ_k C_nk 𝔠_k`, `C_nk = R_nk / √⟨𝔇_n|𝔇_n⟩`.
    pub fn coefficients(&self) -> &[Vec<f64>] {
        &self.coefficients
    }

    /// Fourier coefficient sequences of `Ĉ_n`.
    pub fn vectors(&self) -> &[IntegerSequence] {
        &self.vectors
    }

    /// `max |(Ĉ_n, Ĉ_m) − δ_nm|` over the explicit coefficient vectors.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// The lattice family `χ̂_n` absorbs the phase `iⁿ`, making it real.
    pub fn phase_absorbed(&self) -> bool {
        true
    }

    pub fn write_coefficients_csv<W: Write>(&self, writer: W) -> Result<()> {
        let size = self.coefficients.len();
        let names: Vec<String> = std::iter::once("n".to_string()).chain((0..size).map(|k| format!("c{k}"))).collect();
        let header: Vec<&str> = names.iter().map(String::as_str).collect();
        write_csv(
            writer,
            &header,
            self.coefficients.iter().enumerate().map(|(n, row)| {
                std::iter::once(n as f64).chain(row.iter().copied()).collect::<Vec<f64>>()
            }),
        )
    }
}

fn orthonormality_defect(vectors: &[IntegerSequence]) -> f64 {
    let n = vectors.len();
    (0..n)
        .into_par_iter()
        .map(|a| {
            (0..n)
                .map(|b| {
                    let want = if a == b { 1.0 } else { 0.0 };
                    (seq_inner(&vectors[a], &vectors[b]) - want).norm()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// Parity-split Gram–Schmidt with the default pivot guard.
pub fn gram_schmidt(gram: &GramMatrix) -> Result<GramSchmidtResult> {
    gram_schmidt_with_guard(gram, PIVOT_GUARD)
}

pub fn gram_schmidt_with_guard(gram: &GramMatrix, guard: f64) -> Result<GramSchmidtResult> {
    let size = gram.size();
    let threshold = guard * gram.get(0, 0).re;

    // a_n = Σ_k r_nk q_k, so G = R Rᵀ and the pivots r_nn² certify that G is
    // positive definite. Factoring the rounded entries of G directly loses
    // positivity from index 15 on.
    let mut r = vec![vec![0.0; size]; size];
    let mut q: Vec<Option<IntegerSequence>> = vec![None; size];
    for parity in 0..2 {
        let chain: Vec<usize> = (parity..size).step_by(2).collect();
        for (pos, &n) in chain.iter().enumerate() {
            let mut v = gram.images[n].clone();
            for _pass in 0..2 {
                for &k in &chain[..pos] {
                    let qk = q[k].as_ref().expect("earlier chain member");
                    let proj = seq_inner(qk, &v);
                    r[n][k] += proj.re;
                    v = v.sub(&qk.scale(proj));
                }
            }
            let pivot = v.norm_sqr();
            if pivot.is_nan() || pivot < threshold {
                return Err(Error::DependentFamily { index: n, pivot, threshold });
            }
            r[n][n] = pivot.sqrt();
            q[n] = Some(v.scale(C64::from(1.0 / r[n][n])));
        }
    }
    let vectors: Vec<IntegerSequence> = q.into_iter().map(|v| v.expect("every index processed")).collect();

    // C = R⁻¹ by forward substitution, parity blocks never mix
    let mut c = vec![vec![0.0; size]; size];
    for n in 0..size {
        c[n][n] = 1.0 / r[n][n];
        for k in (0..n).rev().filter(|k| (n - k) % 2 == 0) {
            let s: f64 = (k + 1..n).filter(|j| (j - k) % 2 == 0).map(|j| r[n][j] * c[j][k]).sum::<f64>() + r[n][k] * c[k][k];
            c[n][k] = -s / r[n][n];
        }
    }
    let norms: Vec<f64> = (0..size).map(|n| r[n][n] * r[n][n]).collect();
    let unit_lower = (0..size)
        .map(|n| {
            let mut row: Vec<f64> = c[n].iter().map(|v| v * r[n][n]).collect();
            row[n] = 1.0;
            row
        })
        .collect();
    let residual = orthonormality_defect(&vectors);
    Ok(GramSchmidtResult {
        gram: gram.clone(),
        unit_lower,
        norms,
        coefficients: c,
        vectors,
        residual,
    })
}

/// `Ĉ_0..Ĉ_{n_max}` sampled on the `grid`-point circle.
pub fn orthonormal_samples(result: &GramSchmidtResult, grid: usize) -> Result<Vec<CircleSamples>> {
    result
        .vectors
        .par_iter()
        .map(|v| {
            let set = FourierCoefficientSet::new(v.halfwidth(), v.values().to_vec(), Provenance::Quadrature)?;
            synthesize_samples(&set, grid)
        })
        .collect()
}

/// `χ̂_n = (-i)ⁿ × (coefficient sequence of Ĉ_n)`, a real orthonormal family
/// in `l₂(ℤ)` with `⟨Ĉ_n|Ĉ_m⟩ = i^{m-n} (χ̂_n, χ̂_m)`.
pub fn orthonormal_sequences(result: &GramSchmidtResult) -> Vec<IntegerSequence> {
    result
        .vectors
        .iter()
        .enumerate()
        .map(|(n, v)| v.scale(i_pow(-(n as i64))))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Expansion {
    pub coefficients: Vec<C64>,
    pub image: IntegerSequence,
}

/// `f̂_n = ⟨Ĉ_n|f⟩` by circle quadrature and `Uf = Σ f̂_n χ̂_n`.
pub fn expand_and_map(f: &CircleSamples, result: &GramSchmidtResult) -> Result<Expansion> {
    let basis = orthonormal_samples(result, f.len())?;
    let coefficients: Vec<C64> = basis.iter().map(|b| b.inner(f)).collect();
    let seqs = orthonormal_sequences(result);
    let tol = seqs[0].tol();
    let image = seqs
        .iter()
        .zip(&coefficients)
        .fold(IntegerSequence::zero(tol), |acc, (s, &a)| acc.add(&s.scale(a)));
    Ok(Expansion { coefficients, image })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodized::DEFAULT_GRID;
    use crate::sequences::chi_family;

    const TOL: f64 = 1e-12;

    fn result(n_max: usize) -> GramSchmidtResult {
        gram_schmidt(&gram_matrix(n_max, TOL).unwrap()).unwrap()
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(8, TOL).unwrap();
        assert!(g.get(0, 1).norm() < 1e-14);
        assert!((g.get(0, 0).re - 0.1591716).abs() < 1e-6);
        assert!(g.hermiticity_defect() < 1e-14);
        assert!(g.parity_defect() < 1e-14);
        // every entry is real: iⁿ phases cancel within a parity class
        for row in g.entries() {
            assert!(row.iter().all(|v| v.im.abs() < 1e-15));
        }
    }

    #[test]
    fn gram_agrees_with_circle_quadrature() {
        let g = gram_matrix(8, TOL).unwrap();
        let q = gram_matrix_by_quadrature(8, DEFAULT_GRID, TOL).unwrap();
        for n in 0..=8 {
            for m in 0..=8 {
                assert!((g.get(n, m) - q[n][m]).norm() < 1e-9, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn first_step_and_block_structure() {
        let res = result(9);
        let g00 = res.gram().get(0, 0).re;
        assert!((res.coefficients()[0][0] - 1.0 / g00.sqrt()).abs() < 1e-12 / g00.sqrt());
        assert!(res.coefficients()[0][1..].iter().all(|&v| v == 0.0));
        for n in 0..=9 {
            assert_eq!(res.unit_lower()[n][n], 1.0);
            for k in 0..=9 {
                if (n + k) % 2 == 1 || k > n {
                    assert_eq!(res.unit_lower()[n][k], 0.0, "n={n} k={k}");
                    assert_eq!(res.coefficients()[n][k], 0.0);
                }
            }
        }
        assert_eq!(res.unit_lower()[2][1], 0.0);
    }

    #[test]
    fn triangular_factors_reproduce_gram_at_small_size() {
        // C G Cᵀ = I is only testable where C stays moderate
        let res = result(6);
        let c = res.coefficients();
        let g = res.gram();
        for a in 0..=6 {
            for b in 0..=6 {
                let mut s = C64::default();
                for k in 0..=6 {
                    for l in 0..=6 {
                        s += c[a][k] * c[b][l] * g.get(k, l);
                    }
                }
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((s - want).norm() < 1e-7, "a={a} b={b} {s}");
            }
        }
    }

    #[test]
    fn residual_at_fifteen() {
        let res = result(15);
        assert!(res.residual() < 1e-8, "{}", res.residual());
        let seqs = orthonormal_sequences(&res);
        for s in &seqs {
            assert!(s.values().iter().all(|v| v.im == 0.0));
            assert!((s.norm_sqr() - 1.0).abs() < 1e-8);
        }
        assert!(seq_inner(&seqs[3], &seqs[5]).norm() < 1e-8);
        let g00 = res.gram().get(0, 0).re;
        let chi0 = &chi_family(15, TOL).unwrap()[0];
        assert!(seqs[0].max_abs_diff(&chi0.scale(C64::from(1.0 / g00.sqrt()))) < 1e-14);
    }

    #[test]
    fn lattice_family_is_gram_schmidt_of_chi() {
        // orthonormalizing χ_k directly gives the same real family
        let res = result(12);
        let chis = chi_family(12, TOL).unwrap();
        let mut basis: Vec<IntegerSequence> = Vec::new();
        let mut direct = vec![IntegerSequence::zero(TOL); 13];
        for parity in 0..2 {
            basis.clear();
            for n in (parity..=12).step_by(2) {
                let mut v = chis[n].clone();
                for _ in 0..2 {
                    for b in &basis {
                        v = v.sub(&b.scale(seq_inner(b, &v)));
                    }
                }
                let v = v.scale(C64::from(1.0 / v.norm_sqr().sqrt()));
                basis.push(v.clone());
                direct[n] = v;
            }
        }
        for (a, b) in orthonormal_sequences(&res).iter().zip(&direct) {
            assert!(a.max_abs_diff(b) < 1e-9);
        }
    }

    #[test]
    fn dependent_family_is_reported() {
        let g = gram_matrix(24, TOL).unwrap();
        match gram_schmidt(&g) {
            Err(Error::DependentFamily { index, .. }) => assert!(index > 15),
            other => panic!("expected dependence, got {other:?}"),
        }
        assert!(gram_schmidt(&gram_matrix(DEFAULT_N_MAX, TOL).unwrap()).is_ok());
    }

    #[test]
    fn expansion_examples() {
        let res = result(10);
        let samples = orthonormal_samples(&res, 128).unwrap();
        let seqs = orthonormal_sequences(&res);
        let e = expand_and_map(&samples[4], &res).unwrap();
        for (n, c) in e.coefficients.iter().enumerate() {
            let want = if n == 4 { 1.0 } else { 0.0 };
            assert!((c - want).norm() < 1e-9);
        }
        assert!(e.image.max_abs_diff(&seqs[4]) < 1e-8);

        let r = 0.5f64.sqrt();
        let f = samples[0].scale(C64::from(r)).add(&samples[2].scale(C64::from(r)));
        let e = expand_and_map(&f, &res).unwrap();
        for (n, c) in e.coefficients.iter().enumerate() {
            let want = if n == 0 || n == 2 { r } else { 0.0 };
            assert!((c - want).norm() < 1e-8);
        }
        let parseval: f64 = e.coefficients.iter().map(|c| c.norm_sqr()).sum();
        assert!((parseval - e.image.norm_sqr()).abs() < 1e-9);
    }
}
