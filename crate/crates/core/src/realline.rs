//! Real-line machinery shared by the Fourier checks and the eigenspace split:
//! Gauss–Legendre rules, reflection-closed grids and the numerical Fourier
//! transform `FT[f](y) = (2π)^{-1/2} ∫ e^{ixy} f(x) dx` restricted to such grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::{Error, Result, C64};

pub const DEFAULT_WINDOW: f64 = 16.0;
pub const DEFAULT_LINE_NODES: usize = 2048;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of `P_n` by Newton iteration from the Tricomi-style initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // descending cos guess: fill from the right end
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
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

    /// Nodes and weights mapped to `[a, b]`.
    pub fn scaled(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        (
            self.nodes.iter().map(|x| mid + half * x).collect(),
            self.weights.iter().map(|w| half * w).collect(),
        )
    }

    pub fn integrate<T, F>(&self, a: f64, b: f64, f: F) -> T
    where
        T: std::iter::Sum<T> + std::ops::Mul<f64, Output = T>,
        F: Fn(f64) -> T,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(mid + half * x) * (half * w))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `(2π)^{-1/2} ∫_{-w}^{w} e^{ixy} f(x) dx` with the given rule.
pub fn fourier_transform_at<F>(f: F, y: f64, half_width: f64, rule: &GaussLegendre) -> C64
where
    F: Fn(f64) -> C64,
{
    let integral: C64 = rule.integrate(-half_width, half_width, |x| C64::from_polar(1.0, x * y) * f(x));
    integral / (2.0 * PI).sqrt()
}

/// A reflection-closed point set on the line with symmetric quadrature weights.
#[derive(Debug, Clone)]
pub struct LineGrid {
    points: Vec<f64>,
    weights: Vec<f64>,
    reflection: Vec<usize>,
}

impl LineGrid {
    /// Gauss–Legendre nodes on `[-half_width, half_width]`.
    pub fn gauss_legendre(half_width: f64, nodes: usize) -> Self {
        let rule = GaussLegendre::new(nodes);
        let (points, weights) = rule.scaled(-half_width, half_width);
        let n = points.len();
        Self {
            points,
            weights,
            reflection: (0..n).rev().collect(),
        }
    }

    /// Arbitrary sorted-or-not points with composite trapezoid weights.
    ///
    /// Every point must have a mirror image `-x` in the set (to a relative
    /// tolerance of 1e-12 of the grid extent).
    pub fn from_points(points: &[f64]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Input("a line grid needs at least two points".into()));
        }
        if let Some(bad) = points.iter().find(|x| !x.is_finite()) {
            return Err(Error::Input(format!("non-finite grid point {bad}")));
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| points[i]).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input("duplicate grid points".into()));
        }
        let extent = sorted.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let n = sorted.len();
        let mut reflection = vec![0; n];
        for i in 0..n {
            let j = n - 1 - i;
            if (sorted[i] + sorted[j]).abs() > 1e-12 * extent {
                return Err(Error::GridNotReflectionClosed(sorted[i]));
            }
            reflection[i] = j;
        }
        let mut weights = vec![0.0; n];
        for i in 0..n - 1 {
            let h = sorted[i + 1] - sorted[i];
            weights[i] += 0.5 * h;
            weights[i + 1] += 0.5 * h;
        }
        // enforce exact weight symmetry
        for i in 0..n / 2 {
            let w = 0.5 * (weights[i] + weights[n - 1 - i]);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(Self {
            points: sorted,
            weights,
            reflection,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Index of `-x_j`.
    pub fn mirror(&self, j: usize) -> usize {
        self.reflection[j]
    }

    pub fn extent(&self) -> f64 {
        self.points.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Complex samples of a function on a [`LineGrid`].
#[derive(Debug, Clone)]
pub struct RealLineSamples {
    grid: Arc<LineGrid>,
    values: Vec<C64>,
}

impl RealLineSamples {
    pub fn new(grid: Arc<LineGrid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Input(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> C64>(grid: Arc<LineGrid>, f: F) -> Self {
        let values = grid.points().iter().map(|&x| f(x)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<LineGrid> {
        &self.grid
    }

    pub fn points(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn with_values(&self, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), self.grid.len());
        Self {
            grid: Arc::clone(&self.grid),
            values,
        }
    }

    /// `f(-x)` on the same grid.
    pub fn reflected(&self) -> Vec<C64> {
        (0..self.values.len())
            .map(|j| self.values[self.grid.mirror(j)])
            .collect()
    }

    /// Largest modulus on the outermost tenth of the grid, a cheap check that
    /// the window contains the function.
    pub fn edge_magnitude(&self) -> f64 {
        let cut = 0.9 * self.grid.extent();
        self.points()
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| x.abs() >= cut)
            .fold(0.0f64, |m, (_, v)| m.max(v.norm()))
    }
}

/// The numerical Fourier transform as an operator on one reflection-closed grid.
///
/// For each output point `x_i ≥ 0` and each input pair `±x_j`
///
/// ```text
/// g(±x_i) = (2π)^{-1/2} Σ_j w_j [cos(x_i x_j)(f_j + f_j') ± i sin(x_i x_j)(f_j − f_j')]
/// ```
///
/// so only the non-negative half of the kernel is tabulated.
#[derive(Debug, Clone)]
pub struct LineFourier {
    grid: Arc<LineGrid>,
    // indices with x > 0, and the x = 0 node if present
    positive: Vec<usize>,
    zero: Option<usize>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl LineFourier {
    pub fn new(grid: Arc<LineGrid>) -> Self {
        let positive: Vec<usize> = (0..grid.len()).filter(|&j| grid.points()[j] > 0.0).collect();
        let zero = (0..grid.len()).find(|&j| grid.points()[j] == 0.0);
        let p = positive.len();
        let mut cos = vec![0.0; p * p];
        let mut sin = vec![0.0; p * p];
        cos.par_chunks_mut(p)
            .zip(sin.par_chunks_mut(p))
            .enumerate()
            .for_each(|(a, (crow, srow))| {
                let xa = grid.points()[positive[a]];
                for (b, &jb) in positive.iter().enumerate() {
                    let (s, c) = (xa * grid.points()[jb]).sin_cos();
                    crow[b] = c;
                    srow[b] = s;
                }
            });
        Self {
            grid,
            positive,
            zero,
            cos,
            sin,
        }
    }

    /// Default: 2048 Gauss–Legendre nodes on `[-16, 16]`.
    pub fn default_grid() -> Self {
        Self::new(Arc::new(LineGrid::gauss_legendre(DEFAULT_WINDOW, DEFAULT_LINE_NODES)))
    }

    pub fn grid(&self) -> &Arc<LineGrid> {
        &self.grid
    }

    /// `FT[f]` sampled on the same grid.
    pub fn apply(&self, values: &[C64]) -> Vec<C64> {
        let grid = &self.grid;
        assert_eq!(values.len(), grid.len());
        let p = self.positive.len();
        let w = grid.weights();
        let even: Vec<C64> = self
            .positive
            .iter()
            .map(|&j| (values[j] + values[grid.mirror(j)]) * w[j])
            .collect();
        let odd: Vec<C64> = self
            .positive
            .iter()
            .map(|&j| (values[j] - values[grid.mirror(j)]) * w[j])
            .collect();
        let centre = self.zero.map(|j| values[j] * w[j]).unwrap_or_default();
        let norm = 1.0 / (2.0 * PI).sqrt();

        let mut out = vec![C64::default(); grid.len()];
        let halves: Vec<(C64, C64)> = (0..p)
            .into_par_iter()
            .map(|a| {
                let crow = &self.cos[a * p..(a + 1) * p];
                let srow = &self.sin[a * p..(a + 1) * p];
                let mut c_sum = C64::default();
                let mut s_sum = C64::default();
                for b in 0..p {
                    c_sum += even[b] * crow[b];
                    s_sum += odd[b] * srow[b];
                }
                let i_s = C64::new(-s_sum.im, s_sum.re);
                ((centre + c_sum + i_s) * norm, (centre + c_sum - i_s) * norm)
            })
            .collect();
        for (a, (plus, minus)) in halves.into_iter().enumerate() {
            let j = self.positive[a];
            out[j] = plus;
            out[grid.mirror(j)] = minus;
        }
        if let Some(j0) = self.zero {
            let total: C64 = even.iter().sum::<C64>() + centre;
            out[j0] = total * norm;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::psi;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1, 2, 5, 40, 2048] {
            let rule = GaussLegendre::new(n);
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n} sum={total}");
            for k in 0..(2 * n).min(30) {
                let got: f64 = rule.integrate(-1.0, 1.0, |x| x.powi(k as i32));
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn hermite_functions_are_fourier_eigenfunctions() {
        let rule = GaussLegendre::new(DEFAULT_LINE_NODES);
        for n in 0..=10 {
            let eig = C64::i().powu(n as u32);
            for &y in &[0.0, 0.7, -0.7, 1.9, -1.9] {
                let ft = fourier_transform_at(|x| C64::from(psi(n, x)), y, 20.0, &rule);
                assert!((ft - eig * psi(n, y)).norm() < 1e-8, "n={n} y={y}");
            }
        }
    }

    #[test]
    fn grid_from_points_requires_mirror_images() {
        assert!(LineGrid::from_points(&[-1.0, 0.0, 1.0]).is_ok());
        assert!(matches!(
            LineGrid::from_points(&[-1.0, 0.0, 1.5]),
            Err(Error::GridNotReflectionClosed(_))
        ));
        let g = LineGrid::from_points(&[1.0, -1.0, 0.5, -0.5]).unwrap();
        assert_eq!(g.points(), &[-1.0, -0.5, 0.5, 1.0]);
        assert_eq!(g.mirror(0), 3);
    }

    #[test]
    fn tabulated_transform_matches_direct_quadrature() {
        let grid = Arc::new(LineGrid::gauss_legendre(12.0, 256));
        let ft = LineFourier::new(Arc::clone(&grid));
        let f = |x: f64| C64::new((-(x - 0.4).powi(2)).exp(), 0.3 * x * (-x * x).exp());
        let samples = RealLineSamples::from_fn(Arc::clone(&grid), f);
        let g = ft.apply(samples.values());
        let rule = GaussLegendre::new(256);
        for (j, &y) in grid.points().iter().enumerate().step_by(17) {
            let direct = fourier_transform_at(f, y, 12.0, &rule);
            assert!((g[j] - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn odd_sized_grid_handles_centre_node() {
        let grid = Arc::new(LineGrid::gauss_legendre(12.0, 255));
        let ft = LineFourier::new(Arc::clone(&grid));
        let samples = RealLineSamples::from_fn(Arc::clone(&grid), |x| C64::from(psi(2, x)));
        let g = ft.apply(samples.values());
        for (j, &x) in grid.points().iter().enumerate() {
            assert!((g[j] + psi(2, x)).norm() < 1e-10);
        }
    }
}
