//! Verification suites. Each check is self-contained so a suite can run its
//! items in parallel.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use periharm::C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use periharm::eigensplit::{
    smooth_corpus, split_by_coefficients, split_by_projectors, verify_projector_algebra, DEFAULT_SPLIT_N_MAX,
};
use periharm::exact::{exact_determinant, matrix_a, matrix_b};
use periharm::fourier::{
    coeffs_by_quadrature, coeffs_closed_form, dirichlet_kernel, periodization_residual, synthesize_samples,
    verify_finite_ft, FourierCoefficientSet, Provenance,
};
use periharm::hermite::psi;
use periharm::ladder::Combination;
use periharm::orthonormal::{
    expand_and_map, gram_matrix, gram_matrix_by_quadrature, gram_matrix_with_halfwidth, gram_schmidt,
    orthonormal_samples, orthonormal_sequences, GramSchmidtResult,
};
use periharm::periodized::{
    apply_derivative, apply_position, evaluate_c, evaluate_c_partial, grid_point, ladder_lower, ladder_raise,
    sample_basis_family, truncation_halfwidth, CircleSamples,
};
use periharm::realline::{fourier_transform_at, GaussLegendre, LineFourier, RealLineSamples};
use periharm::sequences::{
    apply_d_seq, apply_d_seq_by_recurrence, ladder_b, ladder_b_by_operators, number_check, seq_inner,
    sequence_halfwidth, Ladder,
};

use crate::report::{Check, Item, Report};

pub const SUITES: [&str; 6] = ["bridge", "operators", "gram", "split", "det", "all"];

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: f64,
    pub grid: usize,
    pub n_max: Option<usize>,
    pub m_max: Option<usize>,
}

fn check<F>(f: F) -> Check
where
    F: Fn() -> Item + Send + Sync + 'static,
{
    Box::new(f)
}

fn max_over<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

/// Worst error of a fallible computation; a library error fails the item.
fn item(identity: &str, label: &str, tolerance: f64, f: impl FnOnce() -> periharm::Result<f64>) -> Item {
    match f() {
        Ok(e) => Item::bounded(identity, label, e, tolerance),
        Err(_) => Item::failed(identity, label, tolerance),
    }
}

pub fn run(suite: &str, s: Settings) -> Report {
    match suite {
        "bridge" => Report::run("bridge", bridge(s)),
        "operators" => Report::run("operators", operators(s)),
        "gram" => Report::run("gram", gram(s)),
        "split" => Report::run("split", split(s)),
        "det" => Report::run("det", det(s)),
        "all" => Report::merge(
            "all",
            ["bridge", "operators", "gram", "split", "det"].iter().map(|name| run(name, s)).collect(),
        ),
        other => unreachable!("suite {other} is validated by the caller"),
    }
}

fn bridge(s: Settings) -> Vec<Check> {
    let Settings { tol, grid, .. } = s;
    let n_top = s.n_max.unwrap_or(20);
    let m_top = s.m_max.unwrap_or(10);
    vec![
        check(move || {
            item("fourier coefficients of c_n equal i^n psi_n(m)", "Eq5.9", 1e-10, || {
                let family = sample_basis_family(n_top, grid, tol)?;
                let mut worst = 0.0f64;
                for (n, e) in family.iter().enumerate() {
                    let q = coeffs_by_quadrature(&e.samples, m_top)?;
                    let exact = coeffs_closed_form(n, m_top);
                    worst = worst.max(max_over(q.indices().map(|m| (q.at(m) - exact.at(m)).norm())));
                }
                Ok(worst)
            })
        }),
        check(move || {
            item("periodization equals lattice Fourier series", "Eq38", 1e-8, || {
                let phis: Vec<f64> = (0..32).map(|j| -PI + 2.0 * PI * (j as f64 + 0.37) / 32.0).collect();
                (0..=10).try_fold(0.0f64, |acc, n| Ok(acc.max(periodization_residual(n, &phis, tol)?)))
            })
        }),
        check(move || {
            item("Parseval for bandlimited samples", "Eq5.2", 1e-10, || {
                let mut rng = StdRng::seed_from_u64(52);
                let mut worst = 0.0f64;
                for _ in 0..5 {
                    let coeffs: Vec<C64> = (0..41).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                    let set = FourierCoefficientSet::new(20, coeffs, Provenance::Quadrature)?;
                    let samples = synthesize_samples(&set, grid)?;
                    worst = worst.max((set.norm_sqr() - 2.0 * PI * samples.norm_sqr()).abs());
                }
                Ok(worst)
            })
        }),
        check(|| {
            let rule = GaussLegendre::new(2048);
            let worst = max_over((0..=10).flat_map(|n| {
                let rule = &rule;
                [0.0, 0.7, -0.7, 1.9, -1.9].into_iter().map(move |y| {
                    let ft = fourier_transform_at(|x| C64::from(psi(n, x)), y, 20.0, rule);
                    (ft - C64::i().powu(n as u32) * psi(n, y)).norm()
                })
            }));
            Item::bounded("psi_n are Fourier eigenfunctions", "Eq2.3", worst, 1e-8)
        }),
        check(|| {
            let ys: Vec<f64> = (0..16).map(|j| -1.9 + 0.25 * j as f64).collect();
            let worst = max_over((0..=8).flat_map(|n| {
                let ys = &ys;
                (0..=3).map(move |m| verify_finite_ft(n, m, ys))
            }));
            Item::bounded("finite periodization transforms to Dirichlet kernel", "Eq4.4", worst, 1e-6)
        }),
        check(|| {
            let mut rng = StdRng::seed_from_u64(45);
            let args: Vec<f64> = (0..100).map(|_| rng.random_range(-20.0..20.0)).collect();
            let worst = max_over((0..=20usize).flat_map(|m| {
                let args = &args;
                args.iter().map(move |&t| {
                    // powers of e^{it} avoid rounding k·t
                    let w = C64::from_polar(1.0, t);
                    let (mut z, mut direct) = (C64::from(1.0), 1.0);
                    for _ in 0..m {
                        z *= w;
                        direct += 2.0 * z.re;
                    }
                    (dirichlet_kernel(m, t) - direct).abs()
                })
            }));
            Item::bounded("Dirichlet kernel closed form", "Eq4.5", worst, 1e-12)
        }),
        check(move || {
            item("enlarging K by 4 leaves c_n unchanged", "Eq3.9", tol, || {
                let mut worst = 0.0f64;
                for n in 0..=n_top {
                    let k = truncation_halfwidth(n, tol)?;
                    for j in 0..32 {
                        let phi = grid_point(j, 32);
                        let a = evaluate_c(n, phi, tol)?;
                        let b = evaluate_c_partial(n, phi, k + 4);
                        worst = worst.max((a - b).abs());
                    }
                }
                Ok(worst)
            })
        }),
    ]
}

fn operators(s: Settings) -> Vec<Check> {
    let tol = s.tol;
    let n_top = s.n_max.unwrap_or(12);
    let phis: Arc<Vec<f64>> = Arc::new((0..64).map(|j| grid_point(j, 64)).collect());
    let r2 = 2f64.sqrt();
    let p1 = Arc::clone(&phis);
    let p2 = Arc::clone(&phis);
    let p3 = Arc::clone(&phis);
    vec![
        check(move || {
            item("(Phi -+ D)/sqrt2 are the circle ladder operators", "Eq6.9", 1e-8, || {
                let mut worst = 0.0f64;
                for n in 0..=n_top {
                    for &phi in p1.iter() {
                        let p = apply_position(n, phi, tol)?;
                        let d = apply_derivative(n, phi, tol)?;
                        worst = worst.max(((p - d) / r2 - ladder_raise(n, phi, tol)?).abs());
                        worst = worst.max(((p + d) / r2 - ladder_lower(n, phi, tol)?).abs());
                    }
                }
                Ok(worst)
            })
        }),
        check(move || {
            item("circle oscillator 1/2(Phi^2 - D^2) = N + 1/2", "Eq6.13", 1e-8, || {
                let mut worst = 0.0f64;
                for n in 0..=n_top {
                    let e = Combination::basis(n);
                    let lhs = e.oscillator();
                    for &phi in p2.iter() {
                        let l = lhs.on_circle(phi, tol)?;
                        let r = (n as f64 + 0.5) * evaluate_c(n, phi, tol)?;
                        worst = worst.max((l - r).norm());
                    }
                }
                Ok(worst)
            })
        }),
        check(move || {
            item("(M -+ D)/sqrt2 are the lattice ladder operators", "Eq6.20", 1e-8, || {
                let mut worst = 0.0f64;
                for n in 0..=n_top {
                    for dir in [Ladder::Raise, Ladder::Lower] {
                        worst = worst.max(ladder_b(n, dir, tol)?.max_abs_diff(&ladder_b_by_operators(n, dir, tol)?));
                    }
                }
                Ok(worst)
            })
        }),
        check(move || {
            item("lattice oscillator 1/2(M^2 - D^2) = N + 1/2", "Eq6.25", 1e-8, || {
                (0..=n_top).try_fold(0.0f64, |acc, n| Ok(acc.max(number_check(n, tol)?)))
            })
        }),
        check(move || {
            item("derivative: series, recurrence and finite difference agree", "Eq6.7", 1e-7, || {
                let h = 1e-5;
                let mut worst = 0.0f64;
                for n in 0..=n_top {
                    let rec = Combination::basis(n).derivative();
                    for &phi in p3.iter().step_by(4) {
                        let series = apply_derivative(n, phi, tol)?;
                        let by_rec = rec.on_circle(phi, tol)?.re;
                        let fd = (evaluate_c(n, phi + h, tol)? - evaluate_c(n, phi - h, tol)?) / (2.0 * h);
                        worst = worst.max((series - by_rec).abs()).max((series - fd).abs());
                    }
                }
                Ok(worst)
            })
        }),
        check(move || {
            item("lattice derivative: values and recurrence agree", "Eq6.18", 1e-7, || {
                (0..=n_top).try_fold(0.0f64, |acc, n| {
                    Ok(acc.max(apply_d_seq(n, tol)?.max_abs_diff(&apply_d_seq_by_recurrence(n, tol)?)))
                })
            })
        }),
    ]
}

fn i_pow(k: i64) -> C64 {
    C64::i().powu(k.rem_euclid(4) as u32)
}

type Shared = Arc<OnceLock<Option<GramSchmidtResult>>>;

/// Orthonormalizes once per suite run; every check that needs it shares the result.
fn orthonormal_result(shared: &Shared, n_max: usize, tol: f64) -> Option<&GramSchmidtResult> {
    shared.get_or_init(|| gram_matrix(n_max, tol).and_then(|g| gram_schmidt(&g)).ok()).as_ref()
}

fn gram(s: Settings) -> Vec<Check> {
    let Settings { tol, grid, .. } = s;
    let g_top = s.n_max.unwrap_or(periharm::orthonormal::DEFAULT_N_MAX);
    let o_top = s.n_max.unwrap_or(15);
    let shared: Shared = Arc::new(OnceLock::new());
    let (r1, r2, r3, r4) = (shared.clone(), shared.clone(), shared.clone(), shared);
    vec![
        check(move || {
            item("circle Gram equals i^(m-n) lattice products", "Eq8.30", 1e-9, || {
                let g = gram_matrix(g_top, tol)?;
                let q = gram_matrix_by_quadrature(g_top, grid, tol)?;
                Ok(max_over((0..=g_top).flat_map(|n| {
                    let (g, q) = (&g, &q);
                    (0..=g_top).map(move |m| (g.get(n, m) - q[n][m]).norm())
                })))
            })
        }),
        check(move || {
            item("opposite-parity Gram entries vanish", "Eq8.31", 1e-14, || Ok(gram_matrix(g_top, tol)?.parity_defect()))
        }),
        check(move || {
            item("enlarging M by 4 leaves the Gram matrix unchanged", "Eq8.21", tol, || {
                let h = sequence_halfwidth(g_top, tol)?;
                let a = gram_matrix_with_halfwidth(g_top, h, tol)?;
                let b = gram_matrix_with_halfwidth(g_top, h + 4, tol)?;
                Ok(max_over((0..=g_top).flat_map(|n| {
                    let (a, b) = (&a, &b);
                    (0..=g_top).map(move |m| (a.get(n, m) - b.get(n, m)).norm())
                })))
            })
        }),
        check(move || {
            let Some(res) = orthonormal_result(&r1, o_top, tol) else {
                return Item::failed("orthonormalized circle family by quadrature", "Eq8.35", 1e-8);
            };
            item("orthonormalized circle family by quadrature", "Eq8.35", 1e-8, || {
                let samples = orthonormal_samples(res, grid)?;
                Ok(identity_defect(samples.len(), |a, b| samples[a].inner(&samples[b])))
            })
        }),
        check(move || {
            let Some(res) = orthonormal_result(&r2, o_top, tol) else {
                return Item::failed("orthonormalized lattice family", "Eq8.37", 1e-8);
            };
            let seqs = orthonormal_sequences(res);
            Item::bounded(
                "orthonormalized lattice family",
                "Eq8.37",
                identity_defect(seqs.len(), |a, b| seq_inner(&seqs[a], &seqs[b])),
                1e-8,
            )
        }),
        check(move || {
            let Some(res) = orthonormal_result(&r3, o_top, tol) else {
                return Item::failed("orthonormal families are bridge-coherent", "Eq8.30", 1e-8);
            };
            item("orthonormal families are bridge-coherent", "Eq8.30", 1e-8, || {
                let samples = orthonormal_samples(res, grid)?;
                let seqs = orthonormal_sequences(res);
                let size = seqs.len();
                Ok(max_over((0..size).flat_map(|n| {
                    let (samples, seqs) = (&samples, &seqs);
                    (0..size).map(move |m| {
                        let circle = samples[n].inner(&samples[m]);
                        let lattice = i_pow(m as i64 - n as i64) * seq_inner(&seqs[n], &seqs[m]);
                        (circle - lattice).norm()
                    })
                })))
            })
        }),
        check(move || {
            let Some(res) = orthonormal_result(&r4, o_top, tol) else {
                return Item::failed("U preserves norms on the span", "Eq8.40", 1e-9);
            };
            item("U preserves norms on the span", "Eq8.40", 1e-9, || {
                let basis = orthonormal_samples(res, grid)?;
                let mut rng = StdRng::seed_from_u64(840);
                let mut worst = 0.0f64;
                for _ in 0..5 {
                    let f = basis.iter().fold(CircleSamples::from_fn(grid, |_| C64::default())?, |acc, b| {
                        acc.add(&b.scale(C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
                    });
                    let e = expand_and_map(&f, res)?;
                    worst = worst.max((e.image.norm_sqr().sqrt() - f.norm_sqr().sqrt()).abs());
                }
                Ok(worst)
            })
        }),
    ]
}

fn identity_defect(size: usize, inner: impl Fn(usize, usize) -> C64) -> f64 {
    max_over((0..size).flat_map(|a| {
        let inner = &inner;
        (0..size).map(move |b| (inner(a, b) - if a == b { 1.0 } else { 0.0 }).norm())
    }))
}

fn line_fourier() -> &'static LineFourier {
    static FT: OnceLock<LineFourier> = OnceLock::new();
    FT.get_or_init(LineFourier::default_grid)
}

fn corpus_samples() -> Vec<RealLineSamples> {
    let ft = line_fourier();
    smooth_corpus(10)
        .into_iter()
        .map(|g| RealLineSamples::from_fn(Arc::clone(ft.grid()), move |x| g.eval(x)))
        .collect()
}

fn split(s: Settings) -> Vec<Check> {
    let n_max = s.n_max.unwrap_or(DEFAULT_SPLIT_N_MAX);
    vec![
        check(move || {
            item("coefficient and projector routes agree", "Eq2.31", 1e-7, || {
                corpus_samples().iter().try_fold(0.0f64, |acc, f| {
                    let a = split_by_coefficients(f, n_max)?;
                    let b = split_by_projectors(f, line_fourier())?;
                    Ok(acc.max(a.max_difference(&b)))
                })
            })
        }),
        check(|| {
            let worst = max_over(corpus_samples().iter().map(|f| {
                let r = verify_projector_algebra(f, line_fourier());
                r.resolution.max(r.idempotency).max(r.annihilation)
            }));
            Item::bounded("projectors resolve the identity and are idempotent", "Eq2.37", worst, 1e-9)
        }),
        check(move || {
            item("split components are Fourier eigenvectors", "Eq2.12", 1e-7, || {
                corpus_samples().iter().try_fold(0.0f64, |acc, f| {
                    let a = split_by_coefficients(f, n_max)?.eigen_defect(line_fourier());
                    let b = split_by_projectors(f, line_fourier())?.eigen_defect(line_fourier());
                    Ok(acc.max(a).max(b))
                })
            })
        }),
        check(move || {
            item("even part from reflection equals even-index partial sum", "Eq2.33", 1e-9, || {
                corpus_samples().iter().try_fold(0.0f64, |acc, f| {
                    let split = split_by_coefficients(f, n_max)?;
                    let refl = f.reflected();
                    let even: Vec<f64> = split
                        .even_part()
                        .iter()
                        .zip(f.values().iter().zip(&refl))
                        .map(|(e, (a, b))| (e - 0.5 * (a + b)).norm())
                        .collect();
                    Ok(acc.max(max_over(even)))
                })
            })
        }),
    ]
}

fn det(s: Settings) -> Vec<Check> {
    let m_max = s.m_max.unwrap_or(12);
    let mut checks: Vec<Check> = Vec::new();
    for family in ['A', 'B'] {
        for m in 1..=m_max {
            checks.push(check(move || {
                let matrix = if family == 'A' { matrix_a(m) } else { matrix_b(m) };
                let nonzero = exact_determinant(&matrix) != 0.into();
                let mut it = Item::bounded(&format!("det {family}({m}) is nonzero"), "Eq8.15", 0.0, 0.0);
                it.pass = nonzero;
                it
            }));
        }
    }
    checks.push(check(|| {
        let d = exact_determinant(&matrix_a(1));
        let err = if d == 16.into() { 0.0 } else { 1.0 };
        Item::bounded("det A(1) = 16", "Eq8.15", err, 0.0)
    }));
    checks.push(check(|| {
        let d = exact_determinant(&matrix_b(1));
        let err = if d == 2.into() { 0.0 } else { 1.0 };
        Item::bounded("det B(1) = 2", "Eq8.15", err, 0.0)
    }));
    checks
}
