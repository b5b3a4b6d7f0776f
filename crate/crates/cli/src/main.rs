use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use periharm::eigensplit::{
    read_line_samples, split_by_coefficients, split_by_coefficients_fn, split_by_projectors, C4Split,
    DEFAULT_SPLIT_N_MAX,
};
use periharm::fourier::{coeffs_by_quadrature, FourierCoefficientSet};
use periharm::hermite::{psi, psi_derivative_values};
use periharm::io::{read_csv_columns, write_csv};
use periharm::orthonormal::{
    gram_matrix, gram_schmidt, orthonormal_samples, orthonormal_sequences, GramSchmidtResult, DEFAULT_N_MAX,
};
use periharm::periodized::{sample_basis, sample_basis_family, CircleBasisElement, DEFAULT_GRID, DEFAULT_TOL};
use periharm::realline::{LineFourier, RealLineSamples};
use periharm::sequences::seq_inner;
use periharm::{Error, C64};

mod report;
mod suites;

#[derive(Parser)]
#[command(name = "periharm", version, about = "Periodized Hermite functions: evaluation, bases and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate psi_n and its derivative at points on the line.
    Psi {
        #[arg(long)]
        n: usize,
        /// Comma-separated evaluation points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<f64>,
        /// CSV file with an `x` column.
        #[arg(long)]
        points_file: Option<PathBuf>,
        /// `start:end:count`, inclusive of both ends.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a verification suite and print its JSON report.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Split a function on the line into its four Fourier eigencomponents.
    Split {
        /// CSV with columns x,f or x,f_re,f_im on a reflection-closed grid.
        #[arg(long, conflicts_with = "builtin", required_unless_present = "builtin")]
        input: Option<PathBuf>,
        /// `gaussian`, `psiN` or `mixtureK`.
        #[arg(long)]
        builtin: Option<String>,
        #[arg(long, value_enum, default_value_t = Route::Coeffs)]
        route: Route,
        #[arg(long, default_value_t = DEFAULT_SPLIT_N_MAX)]
        n_max: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit periodized basis samples, their Fourier coefficients, or the orthonormalized family.
    Basis {
        #[arg(long, value_enum, default_value_t = What::Raw)]
        what: What,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        m_max: usize,
        /// File for a single table, or a directory for per-degree files.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Route {
    Coeffs,
    Projectors,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum What {
    Raw,
    Orthonormal,
    Coeffs,
}

enum Failure {
    Usage(String),
    Data(String),
    Verification(String),
    /// The reader closed standard output early.
    Closed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(ref io) if io.kind() == io::ErrorKind::BrokenPipe => Failure::Closed,
            Error::InvalidTolerance(_) | Error::UnsupportedExponent(_) | Error::GridSize(_) | Error::Aliasing { .. } => {
                Failure::Usage(msg)
            }
            Error::GridNotReflectionClosed(_)
            | Error::Input(_)
            | Error::Csv(_)
            | Error::Io(_)
            | Error::InsufficientOrder { .. } => Failure::Data(msg),
            Error::DependentFamily { .. } | Error::Counterexample { .. } | Error::Quadrature(_) => {
                Failure::Verification(msg)
            }
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Data(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(f) = configure_threads() {
        return report_failure(f);
    }
    let outcome = match cli.command {
        Command::Psi { n, points, points_file, range, format, output } => {
            cmd_psi(n, points, points_file, range, format, output.as_deref())
        }
        Command::Verify { suite, tol, grid, n_max, m_max, format, output } => {
            cmd_verify(&suite, suites::Settings { tol, grid, n_max, m_max }, format, output.as_deref())
        }
        Command::Split { input, builtin, route, n_max, output } => {
            cmd_split(input.as_deref(), builtin.as_deref(), route, n_max, output.as_deref())
        }
        Command::Basis { what, n, n_max, grid, tol, m_max, output } => {
            cmd_basis(what, n, n_max, grid, tol, m_max, output.as_deref())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    let (code, msg) = match f {
        Failure::Verification(m) => (1, m),
        Failure::Usage(m) => (2, m),
        Failure::Data(m) => (3, m),
        Failure::Closed => return ExitCode::SUCCESS,
    };
    if !msg.is_empty() {
        eprintln!("error: {msg}");
    }
    ExitCode::from(code)
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("PERIHARM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Usage(format!("PERIHARM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn sink(output: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_range(spec: &str) -> std::result::Result<Vec<f64>, Failure> {
    let bad = || Failure::Usage(format!("--range expects start:end:count, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let count: usize = c.trim().parse().map_err(|_| bad())?;
    if !a.is_finite() || !b.is_finite() || count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![a]);
    }
    Ok((0..count).map(|j| a + (b - a) * j as f64 / (count - 1) as f64).collect())
}

#[derive(Serialize)]
struct PsiRow {
    x: f64,
    psi: f64,
    dpsi: f64,
}

fn cmd_psi(
    n: usize,
    mut points: Vec<f64>,
    points_file: Option<PathBuf>,
    range: Option<String>,
    format: Format,
    output: Option<&Path>,
) -> Outcome {
    if let Some(path) = points_file {
        let file = File::open(&path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
        let cols = read_csv_columns(file, &["x"])?;
        points.extend(&cols[0]);
    }
    if let Some(r) = range {
        points.extend(parse_range(&r)?);
    }
    if points.is_empty() {
        return Err(Failure::Usage("one of --points, --points-file or --range is required".into()));
    }
    if points.iter().any(|x| !x.is_finite()) {
        return Err(Failure::Usage("evaluation points must be finite".into()));
    }
    let set = psi_derivative_values(n, &points);
    let (values, derivs) = (&set.values, set.derivatives.as_deref().unwrap_or_default());
    let mut out = sink(output)?;
    match format {
        Format::Csv => {
            let rows = (0..points.len()).map(|j| [points[j], values[j], derivs[j]]);
            write_csv(&mut out, &["x", "psi", "dpsi"], rows)?;
        }
        Format::Json => {
            let rows: Vec<PsiRow> = (0..points.len())
                .map(|j| PsiRow { x: points[j], psi: values[j], dpsi: derivs[j] })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_verify(suite: &str, settings: suites::Settings, format: Format, output: Option<&Path>) -> Outcome {
    if !suites::SUITES.contains(&suite) {
        return Err(Failure::Usage(format!(
            "unknown suite {suite:?}; expected one of {}",
            suites::SUITES.join(", ")
        )));
    }
    if !(settings.tol > 0.0 && settings.tol < 1.0) {
        return Err(Error::InvalidTolerance(settings.tol).into());
    }
    periharm::periodized::check_grid_size(settings.grid)?;
    let report = suites::run(suite, settings);
    let mut out = sink(output)?;
    match format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Csv => write!(out, "{}", report.to_csv())?,
    }
    out.flush()?;
    if report.pass {
        Ok(())
    } else {
        let failed: Vec<&str> = report.items.iter().filter(|i| !i.pass).map(|i| i.identity.as_str()).collect();
        Err(Failure::Verification(format!("failed: {}", failed.join("; "))))
    }
}

fn builtin_function(name: &str) -> std::result::Result<Box<dyn Fn(f64) -> C64 + Send + Sync>, Failure> {
    if name == "gaussian" {
        return Ok(Box::new(|x: f64| C64::from((-0.5 * x * x).exp())));
    }
    if let Some(k) = name.strip_prefix("psi").and_then(|d| d.parse::<usize>().ok()) {
        return Ok(Box::new(move |x| C64::from(psi(k, x))));
    }
    if let Some(k) = name.strip_prefix("mixture").and_then(|d| d.parse::<usize>().ok()) {
        let g = periharm::eigensplit::smooth_corpus(k + 1).swap_remove(k);
        return Ok(Box::new(move |x| g.eval(x)));
    }
    Err(Failure::Usage(format!("unknown builtin {name:?}; expected gaussian, psiN or mixtureK")))
}

fn cmd_split(
    input: Option<&Path>,
    builtin: Option<&str>,
    route: Route,
    n_max: usize,
    output: Option<&Path>,
) -> Outcome {
    let split: C4Split = match (input, builtin) {
        (Some(path), _) => {
            let file = File::open(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            let samples = read_line_samples(file)?;
            match route {
                Route::Coeffs => split_by_coefficients(&samples, n_max)?,
                Route::Projectors => split_by_projectors(&samples, &LineFourier::new(Arc::clone(samples.grid())))?,
            }
        }
        (None, Some(name)) => {
            let f = builtin_function(name)?;
            let ft = LineFourier::default_grid();
            match route {
                Route::Coeffs => split_by_coefficients_fn(f, Arc::clone(ft.grid()), n_max)?,
                Route::Projectors => split_by_projectors(&RealLineSamples::from_fn(Arc::clone(ft.grid()), f), &ft)?,
            }
        }
        (None, None) => return Err(Failure::Usage("one of --input or --builtin is required".into())),
    };
    let mut out = sink(output)?;
    split.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct OrthonormalReport {
    n_max: usize,
    grid: usize,
    residual: f64,
    circle_identity_defect: f64,
    lattice_identity_defect: f64,
    phase_absorbed: bool,
}

fn identity_defect(size: usize, inner: impl Fn(usize, usize) -> C64) -> f64 {
    (0..size)
        .flat_map(|a| (0..size).map(move |b| (a, b)))
        .map(|(a, b)| (inner(a, b) - if a == b { 1.0 } else { 0.0 }).norm())
        .fold(0.0, f64::max)
}

fn orthonormal_report(result: &GramSchmidtResult, grid: usize) -> periharm::Result<OrthonormalReport> {
    let samples = orthonormal_samples(result, grid)?;
    let seqs = orthonormal_sequences(result);
    Ok(OrthonormalReport {
        n_max: result.n_max(),
        grid,
        residual: result.residual(),
        circle_identity_defect: identity_defect(samples.len(), |a, b| samples[a].inner(&samples[b])),
        lattice_identity_defect: identity_defect(seqs.len(), |a, b| seq_inner(&seqs[a], &seqs[b])),
        phase_absorbed: result.phase_absorbed(),
    })
}

fn write_elements(elements: &[CircleBasisElement], output: Option<&Path>) -> Outcome {
    match output {
        Some(dir) if elements.len() > 1 || dir.is_dir() => {
            std::fs::create_dir_all(dir)?;
            for e in elements {
                let path = dir.join(format!("c_{}.csv", e.spec.degree));
                e.samples.write_csv(BufWriter::new(File::create(path)?))?;
            }
            Ok(())
        }
        _ if elements.len() == 1 => {
            let mut out = sink(output)?;
            elements[0].samples.write_csv(&mut out)?;
            out.flush()?;
            Ok(())
        }
        _ => {
            let mut out = sink(output)?;
            let rows = elements.iter().flat_map(|e| {
                let n = e.spec.degree as f64;
                e.samples.points().into_iter().zip(e.samples.values()).map(move |(phi, v)| [n, phi, v.re, v.im])
            });
            write_csv(&mut out, &["n", "phi", "value_re", "value_im"], rows)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_coefficient_sets(sets: &[(usize, FourierCoefficientSet)], output: Option<&Path>) -> Outcome {
    let mut out = sink(output)?;
    if let [(_, set)] = sets {
        set.write_csv(&mut out)?;
    } else {
        let rows = sets.iter().flat_map(|(n, set)| {
            let n = *n as f64;
            set.indices().map(move |m| [n, m as f64, set.at(m).re, set.at(m).im])
        });
        write_csv(&mut out, &["n", "m", "c_re", "c_im"], rows)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_basis(
    what: What,
    n: Option<usize>,
    n_max: Option<usize>,
    grid: usize,
    tol: f64,
    m_max: usize,
    output: Option<&Path>,
) -> Outcome {
    if n.is_some() && n_max.is_some() {
        return Err(Failure::Usage("--n and --n-max are mutually exclusive".into()));
    }
    match what {
        What::Raw | What::Coeffs => {
            let elements = match (n, n_max) {
                (Some(n), _) => vec![sample_basis(n, grid, tol)?],
                (None, n_max) => sample_basis_family(n_max.unwrap_or(0), grid, tol)?,
            };
            if what == What::Raw {
                return write_elements(&elements, output);
            }
            let sets = elements
                .iter()
                .map(|e| Ok((e.spec.degree, coeffs_by_quadrature(&e.samples, m_max)?)))
                .collect::<periharm::Result<Vec<_>>>()?;
            write_coefficient_sets(&sets, output)
        }
        What::Orthonormal => {
            if n.is_some() {
                return Err(Failure::Usage("--what orthonormal takes --n-max".into()));
            }
            periharm::periodized::check_grid_size(grid)?;
            let result = gram_schmidt(&gram_matrix(n_max.unwrap_or(DEFAULT_N_MAX), tol)?)?;
            let mut out = sink(output)?;
            result.write_coefficients_csv(&mut out)?;
            out.flush()?;
            let side = serde_json::to_string_pretty(&orthonormal_report(&result, grid)?).expect("report serializes");
            match output {
                Some(p) => std::fs::write(p.with_extension("report.json"), side + "\n")?,
                None => eprintln!("{side}"),
            }
            Ok(())
        }
    }
}
