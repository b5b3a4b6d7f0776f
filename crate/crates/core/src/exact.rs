//! Exact integer determinants of Hermite value matrices.
//!
//! ```text
//! A(m) = [H_n(k)]  n = 0..2m,  k = -m..m     (2m+1)×(2m+1)
//! B(m) = [H_n(k)]  n = 0..m,   k = 0..m      (m+1)×(m+1)
//! ```
//!
//! Both are nonzero for every `m`; the Gaussian factors `e^{-k²/2}` of the
//! Hermite functions only rescale columns and are left out.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::hermite::hermite_family_exact;
use crate::{Error, Result};

pub const DEFAULT_DET_M_MAX: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl ExactMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_rows(
            (0..dim)
                .map(|i| (0..dim).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim.max(1)).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let d = self.dim;
        Self::from_rows((0..d).map(|j| (0..d).map(|i| self.get(i, j).clone()).collect()).collect())
    }
}

fn hermite_value_matrix(degrees: usize, columns: impl Iterator<Item = i64> + Clone) -> ExactMatrix {
    let family = hermite_family_exact(degrees - 1);
    ExactMatrix::from_rows(family.iter().map(|h| columns.clone().map(|k| h.eval_int(k)).collect()).collect())
}

/// Rows `H_0..H_{2m}`, columns `k = -m..m`.
pub fn matrix_a(m: usize) -> ExactMatrix {
    let m_i = m as i64;
    hermite_value_matrix(2 * m + 1, -m_i..=m_i)
}

/// Rows `H_0..H_m`, columns `k = 0..m`.
pub fn matrix_b(m: usize) -> ExactMatrix {
    hermite_value_matrix(m + 1, 0..=m as i64)
}

/// Fraction-free Gaussian elimination with row pivoting.
pub fn exact_determinant(matrix: &ExactMatrix) -> BigInt {
    let d = matrix.dim;
    if d == 0 {
        return BigInt::one();
    }
    let mut a = matrix.rows();
    let mut prev = BigInt::one();
    let mut negate = false;
    for k in 0..d - 1 {
        let Some(p) = (k..d).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..d {
            for j in k + 1..d {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                // exact by Sylvester's identity
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[d - 1][d - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterminantRecord {
    pub family: char,
    pub m: usize,
    pub nonzero: bool,
    pub bit_length: u64,
    pub sign: i8,
    #[serde(skip)]
    pub value: BigInt,
}

fn record(family: char, m: usize, value: BigInt) -> DeterminantRecord {
    DeterminantRecord {
        family,
        m,
        nonzero: !value.is_zero(),
        bit_length: value.bits(),
        sign: match value.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        },
        value,
    }
}

/// Every determinant of both families for `m ≤ m_max`, computed in parallel.
/// Ordered by family, then `m`.
pub fn determinant_records(m_max: usize) -> Vec<DeterminantRecord> {
    let jobs: Vec<(char, usize)> = ['A', 'B']
        .into_iter()
        .flat_map(|f| (0..=m_max).map(move |m| (f, m)))
        .collect();
    jobs.into_par_iter()
        .map(|(family, m)| {
            let matrix = if family == 'A' { matrix_a(m) } else { matrix_b(m) };
            record(family, m, exact_determinant(&matrix))
        })
        .collect()
}

/// As [`determinant_records`], failing on the first zero determinant.
pub fn certify_nonzero(m_max: usize) -> Result<Vec<DeterminantRecord>> {
    let records = determinant_records(m_max);
    if let Some(r) = records.iter().find(|r| !r.nonzero) {
        return Err(Error::Counterexample { family: r.family, m: r.m });
    }
    Ok(records)
}

/// Magnitude in bits and sign only, for display.
pub fn describe(value: &BigInt) -> String {
    if value.abs() < BigInt::from(1u64 << 53) {
        value.to_string()
    } else {
        format!("{}2^{}", if value.is_negative() { "-" } else { "~" }, value.bits())
    }
}
