//! Gauss–Hermite quadrature for `∫ e^{-x²} f(x) dx`.
//!
//! Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix with
//! off-diagonal entries `√(k/2)` (Golub–Welsch), polished by one Newton step
//! on `ψ_Q`. Weights use the Christoffel identity
//! `w_i = e^{-x_i²} / Σ_{k<Q} ψ_k(x_i)²`, which equals `√π v_{0,i}²` for the
//! normalized eigenvectors but stays accurate for the outermost nodes whose
//! eigenvector components sit below rounding level.

use nalgebra::{DMatrix, SymmetricEigen};

use super::psi_upto;
use crate::{Error, Result};

pub const DEFAULT_HERMITE_NODES: usize = 128;

#[derive(Debug, Clone)]
pub struct GaussHermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // w_i e^{x_i²}, for integrands without the Gaussian factor
    scaled_weights: Vec<f64>,
}

impl GaussHermiteRule {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Quadrature("node count must be positive".into()));
        }
        let jacobi = DMatrix::from_fn(count, count, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let eigen = SymmetricEigen::try_new(jacobi, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Quadrature("eigen-solver did not converge".into()))?;
        let mut order: Vec<usize> = (0..count).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));

        let mut family = vec![0.0; count + 1];
        let mut nodes: Vec<f64> = order
            .iter()
            .map(|&i| {
                let x = eigen.eigenvalues[i];
                psi_upto(x, &mut family);
                let slope = (2.0 * count as f64).sqrt() * family[count - 1] - x * family[count];
                if slope != 0.0 && slope.is_finite() {
                    x - family[count] / slope
                } else {
                    x
                }
            })
            .collect();
        for i in 0..count / 2 {
            let half = 0.5 * (nodes[count - 1 - i] - nodes[i]);
            nodes[i] = -half;
            nodes[count - 1 - i] = half;
        }
        if count % 2 == 1 {
            nodes[count / 2] = 0.0;
        }

        let mut scaled_weights = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        let mut family = vec![0.0; count];
        for &x in &nodes {
            psi_upto(x, &mut family);
            let christoffel: f64 = family.iter().map(|v| v * v).sum();
            if !(christoffel > 0.0 && christoffel.is_finite()) {
                return Err(Error::Quadrature(format!("degenerate node {x}")));
            }
            scaled_weights.push(1.0 / christoffel);
            weights.push((-x * x).exp() / christoffel);
        }
        Ok(Self {
            nodes,
            weights,
            scaled_weights,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weights multiplied by `e^{x²}`; integrate a plain `f` over ℝ with these.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// `∫ e^{-x²} f(x) dx`.
    pub fn integrate_weighted<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `∫ f(x) dx` for `f` decaying like a Gaussian.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

pub fn gauss_hermite_rule(count: usize) -> Result<GaussHermiteRule> {
    GaussHermiteRule::new(count)
}
