//! Splitting a function on the line into the four eigenspaces of the Fourier
//! transform, `f = f₊₁ + f₊ᵢ + f₋₁ + f₋ᵢ`.
//!
//! Two independent routes:
//!
//! * coefficients: `f_n = ∫ f ψ_n`, then partial sums over `n mod 4`;
//! * projectors: with `g = FT[f]` and `ř(x) = r(-x)`,
//!
//! ```text
//! f₊₁ = ¼(f + f̌ + g + ǧ)      f₋₁ = ¼(f + f̌ − g − ǧ)
//! f₊ᵢ = ¼(f − f̌ − i(g − ǧ))   f₋ᵢ = ¼(f − f̌ + i(g − ǧ))
//! ```

use std::io::{Read, Write};
use std::sync::Arc;

use rayon::prelude::*;

use crate::hermite::{gauss_hermite_rule, psi_upto, DEFAULT_HERMITE_NODES};
use crate::io::{read_csv_columns, write_csv};
use crate::realline::{LineFourier, LineGrid, RealLineSamples};
use crate::{Error, Result, C64};

pub const DEFAULT_SPLIT_N_MAX: usize = 48;
pub const TAIL_GUARD: f64 = 1e-10;
const TAIL_CHECKED: usize = 4;

pub const SPLIT_CSV_HEADER: [&str; 11] = [
    "x", "f_re", "f_im", "fp1_re", "fp1_im", "fpi_re", "fpi_im", "fm1_re", "fm1_im", "fmi_re", "fmi_im",
];

/// Eigenvalue class, ordered so that `ψ_n` lies in class `n mod 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenClass {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl EigenClass {
    pub const ALL: [EigenClass; 4] = [Self::PlusOne, Self::PlusI, Self::MinusOne, Self::MinusI];

    pub fn of_degree(n: usize) -> Self {
        Self::ALL[n % 4]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// `i^index`.
    pub fn eigenvalue(self) -> C64 {
        C64::i().powu(self.index() as u32)
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::PlusOne => "+1",
            Self::PlusI => "+i",
            Self::MinusOne => "-1",
            Self::MinusI => "-i",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitRoute {
    Coefficients,
    Projectors,
}

#[derive(Debug, Clone)]
pub struct C4Split {
    samples: RealLineSamples,
    components: [Vec<C64>; 4],
    route: SplitRoute,
}

impl C4Split {
    pub fn route(&self) -> SplitRoute {
        self.route
    }

    pub fn samples(&self) -> &RealLineSamples {
        &self.samples
    }

    pub fn component(&self, class: EigenClass) -> &[C64] {
        &self.components[class.index()]
    }

    fn pair_sum(&self, a: EigenClass, b: EigenClass) -> Vec<C64> {
        self.component(a).iter().zip(self.component(b)).map(|(x, y)| x + y).collect()
    }

    /// `f₊₁ + f₋₁`.
    pub fn even_part(&self) -> Vec<C64> {
        self.pair_sum(EigenClass::PlusOne, EigenClass::MinusOne)
    }

    /// `f₊ᵢ + f₋ᵢ`.
    pub fn odd_part(&self) -> Vec<C64> {
        self.pair_sum(EigenClass::PlusI, EigenClass::MinusI)
    }

    /// `max |Σ components − f|`.
    pub fn sum_defect(&self) -> f64 {
        (0..self.samples.values().len())
            .map(|j| {
                let s: C64 = self.components.iter().map(|c| c[j]).sum();
                (s - self.samples.values()[j]).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |c_k − d_k|` over all four components.
    pub fn max_difference(&self, other: &Self) -> f64 {
        max_diff_many(&self.components, &other.components)
    }

    /// Largest `|FT[f_c] − λ_c f_c|` over the classes.
    pub fn eigen_defect(&self, ft: &LineFourier) -> f64 {
        EigenClass::ALL
            .iter()
            .map(|&c| {
                let comp = self.component(c);
                let lam = c.eigenvalue();
                let scaled: Vec<C64> = comp.iter().map(|v| v * lam).collect();
                max_diff(&ft.apply(comp), &scaled)
            })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let rows = (0..self.samples.values().len()).map(|j| {
            let mut row = vec![self.samples.points()[j], self.samples.values()[j].re, self.samples.values()[j].im];
            for c in &self.components {
                row.push(c[j].re);
                row.push(c[j].im);
            }
            row
        });
        write_csv(writer, &SPLIT_CSV_HEADER, rows)
    }
}

pub(crate) fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_diff_many(a: &[Vec<C64>; 4], b: &[Vec<C64>; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| max_diff(x, y)).fold(0.0, f64::max)
}

/// `f_n = ∫ f ψ_n` by Gauss–Hermite quadrature with `e^{x²}`-compensated weights.
pub fn hermite_coefficients<F>(f: F, n_max: usize) -> Result<Vec<C64>>
where
    F: Fn(f64) -> C64,
{
    let rule = gauss_hermite_rule(DEFAULT_HERMITE_NODES)?;
    let mut out = vec![C64::default(); n_max + 1];
    let mut family = vec![0.0; n_max + 1];
    for (&x, &w) in rule.nodes().iter().zip(rule.scaled_weights()) {
        psi_upto(x, &mut family);
        let fx = f(x) * w;
        for (o, p) in out.iter_mut().zip(&family) {
            *o += fx * *p;
        }
    }
    Ok(out)
}

/// `f_n = Σ_j w_j f(x_j) ψ_n(x_j)` with the grid's own weights.
pub fn hermite_coefficients_sampled(f: &RealLineSamples, n_max: usize) -> Vec<C64> {
    let grid = f.grid();
    let mut out = vec![C64::default(); n_max + 1];
    let mut family = vec![0.0; n_max + 1];
    for ((&x, &w), v) in grid.points().iter().zip(grid.weights()).zip(f.values()) {
        psi_upto(x, &mut family);
        let fx = v * w;
        for (o, p) in out.iter_mut().zip(&family) {
            *o += fx * *p;
        }
    }
    out
}

fn check_tail(coeffs: &[C64]) -> Result<()> {
    let start = coeffs.len().saturating_sub(TAIL_CHECKED);
    for (index, c) in coeffs.iter().enumerate().skip(start) {
        if c.norm() >= TAIL_GUARD {
            return Err(Error::InsufficientOrder {
                index,
                magnitude: c.norm(),
                guard: TAIL_GUARD,
            });
        }
    }
    Ok(())
}

/// Class partial sums of given coefficients, evaluated on the sample grid.
pub fn split_from_coefficients(f: &RealLineSamples, coeffs: &[C64]) -> Result<C4Split> {
    check_tail(coeffs)?;
    let n_max = coeffs.len() - 1;
    let rows: Vec<[C64; 4]> = f
        .points()
        .par_iter()
        .map(|&x| {
            let mut family = vec![0.0; n_max + 1];
            psi_upto(x, &mut family);
            let mut acc = [C64::default(); 4];
            for (n, (c, p)) in coeffs.iter().zip(&family).enumerate() {
                acc[n % 4] += c * p;
            }
            acc
        })
        .collect();
    let components = std::array::from_fn(|k| rows.iter().map(|r| r[k]).collect());
    Ok(C4Split {
        samples: f.clone(),
        components,
        route: SplitRoute::Coefficients,
    })
}

/// Coefficient route for sampled input, coefficients by grid quadrature.
pub fn split_by_coefficients(f: &RealLineSamples, n_max: usize) -> Result<C4Split> {
    split_from_coefficients(f, &hermite_coefficients_sampled(f, n_max))
}

/// Coefficient route for a callable, coefficients by Gauss–Hermite quadrature.
pub fn split_by_coefficients_fn<F>(f: F, grid: Arc<LineGrid>, n_max: usize) -> Result<C4Split>
where
    F: Fn(f64) -> C64,
{
    let coeffs = hermite_coefficients(&f, n_max)?;
    split_from_coefficients(&RealLineSamples::from_fn(grid, f), &coeffs)
}

/// `P_c f` on the grid of `f`; `ft` must be built on that same grid.
pub fn apply_projector(class: EigenClass, f: &[C64], ft: &LineFourier) -> Vec<C64> {
    let grid = ft.grid();
    let g = ft.apply(f);
    let half = 0.25;
    (0..f.len())
        .map(|j| {
            let r = grid.mirror(j);
            let (fe, fo) = (f[j] + f[r], f[j] - f[r]);
            let (ge, go) = (g[j] + g[r], g[j] - g[r]);
            let i = C64::i();
            half * match class {
                EigenClass::PlusOne => fe + ge,
                EigenClass::MinusOne => fe - ge,
                EigenClass::PlusI => fo - i * go,
                EigenClass::MinusI => fo + i * go,
            }
        })
        .collect()
}

/// Projector route.
pub fn split_by_projectors(f: &RealLineSamples, ft: &LineFourier) -> Result<C4Split> {
    if !Arc::ptr_eq(f.grid(), ft.grid()) && f.grid().points() != ft.grid().points() {
        return Err(Error::Input("samples and transform use different grids".into()));
    }
    let components = EigenClass::ALL.map(|c| apply_projector(c, f.values(), ft));
    Ok(C4Split {
        samples: f.clone(),
        components,
        route: SplitRoute::Projectors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorReport {
    /// `max_c |P_c P_c f − P_c f|`
    pub idempotency: f64,
    /// `max_{a≠b} |P_b P_a f|`
    pub annihilation: f64,
    /// `|Σ_c P_c f − f|`
    pub resolution: f64,
    /// `|(P₊₁ + P₋₁) f − ½(f + f̌)|`
    pub even_recombination: f64,
    /// `|(P₊ᵢ + P₋ᵢ) f − ½(f − f̌)|`
    pub odd_recombination: f64,
}

impl ProjectorReport {
    pub fn max(&self) -> f64 {
        [
            self.idempotency,
            self.annihilation,
            self.resolution,
            self.even_recombination,
            self.odd_recombination,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn verify_projector_algebra(f: &RealLineSamples, ft: &LineFourier) -> ProjectorReport {
    let vals = f.values();
    let once = EigenClass::ALL.map(|c| apply_projector(c, vals, ft));
    let mut idempotency = 0.0f64;
    let mut annihilation = 0.0f64;
    for a in EigenClass::ALL {
        for b in EigenClass::ALL {
            let twice = apply_projector(b, &once[a.index()], ft);
            if a == b {
                idempotency = idempotency.max(max_diff(&twice, &once[a.index()]));
            } else {
                annihilation = annihilation.max(twice.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
    }
    let total: Vec<C64> = (0..vals.len()).map(|j| once.iter().map(|c| c[j]).sum()).collect();
    let refl = f.reflected();
    let even: Vec<C64> = vals.iter().zip(&refl).map(|(a, b)| 0.5 * (a + b)).collect();
    let odd: Vec<C64> = vals.iter().zip(&refl).map(|(a, b)| 0.5 * (a - b)).collect();
    let sum2 = |a: usize, b: usize| -> Vec<C64> { once[a].iter().zip(&once[b]).map(|(x, y)| x + y).collect() };
    ProjectorReport {
        idempotency,
        annihilation,
        resolution: max_diff(&total, vals),
        even_recombination: max_diff(&sum2(0, 2), &even),
        odd_recombination: max_diff(&sum2(1, 3), &odd),
    }
}

/// `Σ a_k exp(-(x − s_k)²/(2σ_k²) + iκ_k x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    pub packets: Vec<(C64, f64, f64, f64)>,
}

impl GaussianMixture {
    pub fn eval(&self, x: f64) -> C64 {
        self.packets
            .iter()
            .map(|&(a, s, w, k)| a * C64::from_polar((-(x - s).powi(2) / (2.0 * w * w)).exp(), k * x))
            .sum()
    }
}

/// Deterministic family of smooth, rapidly decaying test functions whose
/// Hermite coefficients fall below the tail guard well before index 48.
pub fn smooth_corpus(count: usize) -> Vec<GaussianMixture> {
    let frac = |v: f64| v - v.floor();
    (0..count)
        .map(|i| {
            let t = i as f64 + 1.0;
            let packet = |salt: f64| {
                let amp = C64::from_polar(0.5 + frac(t * 0.618_034 + salt), std::f64::consts::TAU * frac(t * 0.414_214 + salt));
                let shift = 1.5 * (2.0 * frac(t * 0.732_051 + salt) - 1.0);
                let width = 0.8 + 0.45 * frac(t * 0.236_068 + salt);
                let freq = 0.8 * (2.0 * frac(t * 0.302_776 + salt) - 1.0);
                (amp, shift, width, freq)
            };
            GaussianMixture {
                packets: vec![packet(0.0), packet(0.5)],
            }
        })
        .collect()
}

/// Reads `x,f_re[,f_im]` with trapezoid weights on the given abscissae.
pub fn read_line_samples<R: Read>(reader: R) -> Result<RealLineSamples> {
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text)?;
    let has_im = text.lines().next().map(|h| h.split(',').any(|c| c.trim() == "f_im")).unwrap_or(false);
    let (xs, re, im) = if has_im {
        let cols = read_csv_columns(text.as_bytes(), &["x", "f_re", "f_im"])?;
        let [x, r, i]: [Vec<f64>; 3] = cols.try_into().expect("three columns");
        (x, r, i)
    } else {
        let cols = match read_csv_columns(text.as_bytes(), &["x", "f"]) {
            Ok(c) => c,
            Err(_) => read_csv_columns(text.as_bytes(), &["x", "f_re"])?,
        };
        let [x, r]: [Vec<f64>; 2] = cols.try_into().expect("two columns");
        let zeros = vec![0.0; x.len()];
        (x, r, zeros)
    };
    let grid = Arc::new(LineGrid::from_points(&xs)?);
    // the grid sorts its points; carry values along
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let values = order.iter().map(|&j| C64::new(re[j], im[j])).collect();
    RealLineSamples::new(grid, values)
}
