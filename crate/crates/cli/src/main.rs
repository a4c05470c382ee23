//! `ncross`: batch front end for the generalized cross product library.
//!
//! Exit codes: 0 ok, 1 tolerance failure, 2 usage, precondition or budget
//! error, 3 malformed field file, 4 Riesz support precondition.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ncross::algebra::identities::{identity_suite, oracle_suite};
use ncross::calculus::{self, Backend, Operators, SymbolOperator};
use ncross::divcurl::{self, DemoConfig};
use ncross::field::{BandLimited, Field, FieldKind};
use ncross::grid::Grid;
use ncross::helmholtz::{self, RieszOptions};
use ncross::random::DEFAULT_SEED;
use ncross::{field_io, Error};

use report::Report;

#[derive(Parser)]
#[command(name = "ncross", version, about = "Generalized cross product identities, operators and decompositions")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, env = "NCROSS_THREADS", global = true)]
    threads: Option<usize>,

    /// Emit CSV instead of key=value lines.
    #[arg(long, global = true)]
    csv: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomised residuals of the algebraic identities.
    Identities(IdentitiesArgs),
    /// Helmholtz decomposition of a vector field file.
    Decompose(DecomposeArgs),
    /// Laplacian decompositions, integration by parts and operator kernels.
    LaplacianCheck(LaplacianArgs),
    /// Weak convergence of oscillating div/curl families.
    DivcurlDemo(DivcurlArgs),
    /// 3D Nye round trip and general-n linear determinacy.
    NyeCheck(NyeArgs),
    /// Symbol report of a first-order operator.
    Ellipticity(EllipticityArgs),
    /// Write a synthetic vector field file.
    Synth(SynthArgs),
}

#[derive(Args)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Tolerance for the comparison with the coordinate formula.
    #[arg(long, default_value_t = 1e-14)]
    oracle_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spectral,
    Riesz,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
    method: MethodArg,
    /// Writes PREFIX.curlfree.field and PREFIX.divfree.field.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative tolerance; defaults to 1e-10 (spectral) or 5e-2 (riesz).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = RieszOptions::default().support_tol)]
    support_tol: f64,
    #[arg(long, default_value_t = RieszOptions::default().margin)]
    margin: f64,
}

#[derive(Args)]
struct LaplacianArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 16)]
    shape: usize,
    #[arg(long, default_value_t = Backend::Spectral)]
    backend: Backend,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct DivcurlArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 128)]
    shape: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 8, 16, 32])]
    k: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Oscillation axis, 1-based.
    #[arg(long, default_value_t = 1)]
    axis: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Bound on the deviation at the largest k.
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    /// Largest accepted decay exponent.
    #[arg(long, default_value_t = -0.9, allow_negative_numbers = true)]
    max_exponent: f64,
}

#[derive(Args)]
struct NyeArgs {
    #[arg(long, default_value_t = 16)]
    shape: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Dimension of the linear-determinacy check.
    #[arg(long, default_value_t = 4)]
    determinacy_n: usize,
    #[arg(long, default_value_t = 8)]
    determinacy_shape: usize,
    #[arg(long, default_value_t = 1)]
    determinacy_band: usize,
    #[arg(long, default_value_t = 1e-8)]
    determinacy_tol: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Expectation {
    Elliptic,
    NonElliptic,
}

#[derive(Args)]
struct EllipticityArgs {
    #[arg(long, default_value_t = SymbolOperator::AdjointCurl)]
    operator: SymbolOperator,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Exit 1 unless the classification matches.
    #[arg(long, value_enum)]
    expect: Option<Expectation>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    GradientBump,
    DivfreeBump,
    Random,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    shape: usize,
    /// Width of the Gaussian bump.
    #[arg(long, default_value_t = 0.4)]
    sigma: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

/// Failure of a subcommand, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

type Outcome = Result<(Report, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: thread count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Identities(a) => identities(a),
        Command::Decompose(a) => decompose(a),
        Command::LaplacianCheck(a) => laplacian_check(a),
        Command::DivcurlDemo(a) => return divcurl_demo(a, cli.csv),
        Command::NyeCheck(a) => nye_check(a),
        Command::Ellipticity(a) => ellipticity(a),
        Command::Synth(a) => synth(a),
    };
    finish(outcome.map(|(r, pass)| (r.render(cli.csv), pass)))
}

fn finish(outcome: Result<(String, bool), Failure>) -> ExitCode {
    match outcome {
        Ok((text, pass)) => {
            print!("{text}");
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn identities(a: &IdentitiesArgs) -> Outcome {
    if !(2..=64).contains(&a.n) {
        return Err(usage(format!("--n must lie in 2..=64, got {}", a.n)));
    }
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut r = Report::default();
    r.text("n", a.n).text("trials", a.trials).text("seed", a.seed);
    let mut pass = true;
    for (suite, tol) in [(oracle_suite(a.n, a.trials, a.seed)?, a.oracle_tol), (identity_suite(a.n, a.trials, a.seed)?, a.tol)] {
        for e in suite {
            pass &= e.max_rel_residual <= tol;
            r.num(e.name, e.max_rel_residual);
        }
    }
    r.status(pass);
    Ok((r, pass))
}

fn decompose(a: &DecomposeArgs) -> Outcome {
    let field = field_io::load(&a.input)?;
    let n = field.n();
    field.expect_kind(FieldKind::Vector(n))?;
    let ops = Operators::spectral(field.grid())?;
    let (result, tol) = match a.method {
        MethodArg::Spectral => (helmholtz::spectral_decompose(&ops, &field)?, a.tol.unwrap_or(1e-10)),
        MethodArg::Riesz => {
            let opts = RieszOptions { support_tol: a.support_tol, margin: a.margin };
            let result = helmholtz::riesz_decompose(&ops, &field, &opts).map_err(|e| match e {
                Error::Precondition(m) => Failure { code: 4, message: format!("precondition failed: {m}") },
                other => other.into(),
            })?;
            (result, a.tol.unwrap_or(5e-2))
        }
    };
    let d = result.diagnostics;
    let scale = d.max_abs_input.max(f64::MIN_POSITIVE);
    let rel = [d.sum_residual / scale, d.div_divfree / scale, d.curl_curlfree / scale];
    let pass = rel.iter().all(|v| *v <= tol);

    let mut r = Report::default();
    r.text("input", a.input.display())
        .text("n", n)
        .text("shape", shape_text(field.grid()))
        .text("method", result.method)
        .list("mean_mode", &result.mean_mode);
    for (key, value) in [
        ("sum_residual", d.sum_residual),
        ("div_divfree", d.div_divfree),
        ("curl_curlfree", d.curl_curlfree),
        ("max_abs_input", d.max_abs_input),
        ("max_abs_curlfree", d.max_abs_curlfree),
        ("max_abs_divfree", d.max_abs_divfree),
    ] {
        r.num(key, value);
    }
    r.num("tolerance", tol);
    if let Some(prefix) = &a.output {
        let cf = with_suffix(prefix, "curlfree.field");
        let df = with_suffix(prefix, "divfree.field");
        field_io::save(&cf, &result.a_curlfree)?;
        field_io::save(&df, &result.a_divfree)?;
        r.text("curlfree_file", cf.display()).text("divfree_file", df.display());
    }
    r.status(pass);
    Ok((r, pass))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn shape_text(g: &Grid) -> String {
    let parts: Vec<String> = g.shape().iter().map(|m| m.to_string()).collect();
    parts.join(",")
}

/// Smooth trigonometric fields that are resolved by every grid with at least
/// 8 points per axis, used for the finite-difference order check.
fn smooth_vector(g: &Grid) -> Result<Field, Error> {
    let n = g.n();
    Field::sample(g, FieldKind::Vector(n), |x, out| {
        for (c, o) in out.iter_mut().enumerate() {
            let phase: f64 = x.iter().enumerate().map(|(i, xi)| ((i + c) % 3 + 1) as f64 * xi).sum();
            *o = phase.sin() + 0.5 * (x[c] + x[(c + 1) % n]).cos();
        }
    })
}

fn smooth_matrix(g: &Grid) -> Result<Field, Error> {
    let n = g.n();
    Field::sample(g, FieldKind::Matrix { rows: n, cols: n }, |x, out| {
        for (e, o) in out.iter_mut().enumerate() {
            let (r, c) = (e / n, e % n);
            *o = (x[r] + 2.0 * x[c]).sin() * x[(r + c) % n].cos();
        }
    })
}

fn laplacian_check(a: &LaplacianArgs) -> Outcome {
    if !(2..=5).contains(&a.n) {
        return Err(usage(format!("--n must lie in 2..=5, got {}", a.n)));
    }
    let grid = Grid::uniform(a.n, a.shape)?;
    let ops = Operators::new(&grid, a.backend)?;
    let n = a.n;
    let big = n * (n - 1) / 2;
    let mut r = Report::default();
    r.text("n", n).text("shape", shape_text(&grid)).text("backend", a.backend).text("seed", a.seed);

    let random = |kind, stream| {
        let mut opts = BandLimited::new(a.seed).stream(stream);
        if a.backend == Backend::Central2 {
            opts = opts.band(2.min(a.shape / 4), n);
        }
        Field::random_band_limited(&grid, kind, &opts)
    };
    let f = random(FieldKind::Scalar, 0)?;
    let x = random(FieldKind::Cross, 1)?;
    let v = random(FieldKind::Vector(n), 2)?;
    let p = random(FieldKind::Matrix { rows: n, cols: n }, 3)?;
    let q = random(FieldKind::Matrix { rows: n, cols: big }, 4)?;

    let kernels = calculus::kernel_residuals(&ops, &f, &x, &v)?;
    let exact = [
        ("integration_by_parts", calculus::integration_by_parts_residual(&ops, &v, &x)?),
        ("matrix_integration_by_parts", calculus::matrix_integration_by_parts_residual(&ops, &p, &q)?),
        ("curl_grad", kernels.curl_grad),
        ("div_adjoint_curl", kernels.div_adjoint_curl),
        ("curl_jacobian", kernels.curl_jacobian),
        ("inc_jacobian", kernels.inc_jacobian),
        ("inc_sym_jacobian", kernels.inc_sym_jacobian),
    ];
    let mut pass = true;
    for (key, value) in exact {
        pass &= value <= a.tol;
        r.num(key, value);
    }
    match a.backend {
        Backend::Spectral => {
            let split = [
                ("vector_laplacian", calculus::vector_laplacian_decomposition(&ops, &v)?.residual),
                ("matrix_laplacian", calculus::matrix_laplacian_decomposition(&ops, &p)?),
                ("curl_adjoint_curl", calculus::curl_adjoint_curl_identity_residual(&ops, &v)?),
            ];
            for (key, value) in split {
                pass &= value <= a.tol;
                r.num(key, value);
            }
        }
        Backend::Central2 => {
            let fine_grid = grid.refined(2)?;
            let fine = Operators::new(&fine_grid, Backend::Central2)?;
            let coarse_res = calculus::vector_laplacian_decomposition(&ops, &smooth_vector(&grid)?)?.residual;
            let fine_res = calculus::vector_laplacian_decomposition(&fine, &smooth_vector(&fine_grid)?)?.residual;
            let coarse_m = calculus::matrix_laplacian_decomposition(&ops, &smooth_matrix(&grid)?)?;
            let fine_m = calculus::matrix_laplacian_decomposition(&fine, &smooth_matrix(&fine_grid)?)?;
            let ratio = coarse_res / fine_res;
            let ratio_m = coarse_m / fine_m;
            pass &= (3.5..=4.5).contains(&ratio);
            r.num("vector_laplacian", coarse_res)
                .num("vector_laplacian_refined", fine_res)
                .num("vector_laplacian_ratio", ratio)
                .num("matrix_laplacian", coarse_m)
                .num("matrix_laplacian_refined", fine_m)
                .num("matrix_laplacian_ratio", ratio_m);
        }
    }
    r.num("tolerance", a.tol).status(pass);
    Ok((r, pass))
}

fn divcurl_demo(a: &DivcurlArgs, csv: bool) -> ExitCode {
    let cfg = DemoConfig {
        n: a.n,
        shape: a.shape,
        k_values: a.k.clone(),
        amplitude: a.amplitude,
        axis: a.axis,
        seed: a.seed,
        ..DemoConfig::default()
    };
    let outcome = divcurl::run_demo(&cfg).map_err(Failure::from).map(|demo| {
        let p = &demo.pairing;
        let final_ok = p.final_deviation() <= a.tol;
        let decay_ok = match p.decay_exponent {
            Some(e) => e <= a.max_exponent,
            None => p.deviations.iter().all(|d| *d <= a.tol),
        };
        let pass = final_ok && decay_ok;
        if csv {
            return (p.csv(), pass);
        }
        let mut r = Report::default();
        r.text("n", cfg.n).text("shape", cfg.shape).text("axis", cfg.axis).num("amplitude", cfg.amplitude);
        r.text("seed", cfg.seed).num("limit_value", p.limit_value);
        for ((k, v), d) in p.k_values.iter().zip(&p.pairing_values).zip(&p.deviations) {
            r.num(&format!("pairing_k{k}"), *v).num(&format!("deviation_k{k}"), *d);
        }
        r.opt("decay_exponent", p.decay_exponent)
            .text("non_increasing_from_k8", p.non_increasing_from(8))
            .num("div_drift", demo.div_drift)
            .num("curl_drift", demo.curl_drift)
            .num("commutation_div", demo.commutation_div)
            .num("commutation_curl", demo.commutation_curl)
            .num("split_residual", demo.split_residual)
            .status(pass);
        (r.render(false), pass)
    });
    finish(outcome)
}

fn nye_check(a: &NyeArgs) -> Outcome {
    let grid = Grid::uniform(3, a.shape)?;
    let ops = Operators::spectral(&grid)?;
    let field = Field::random_band_limited(&grid, FieldKind::Vector(3), &BandLimited::new(a.seed))?;
    let nye = calculus::nye_check(&ops, &field)?;
    let dgrid = Grid::uniform(a.determinacy_n, a.determinacy_shape)?;
    let dops = Operators::spectral(&dgrid)?;
    let det = calculus::linear_determinacy(&dops, a.determinacy_band, a.seed)?;
    let pass = nye.curl_identity_residual <= a.tol
        && nye.roundtrip_residual <= a.tol
        && nye.generalized_link_residual <= a.tol
        && det.max_residual <= a.determinacy_tol;
    let mut r = Report::default();
    r.text("shape", shape_text(&grid))
        .text("seed", a.seed)
        .num("curl_identity_residual", nye.curl_identity_residual)
        .num("roundtrip_residual", nye.roundtrip_residual)
        .num("generalized_link_residual", nye.generalized_link_residual)
        .text("determinacy_n", det.n)
        .text("determinacy_shape", shape_text(&dgrid))
        .text("determinacy_modes", det.modes)
        .num("determinacy_max_residual", det.max_residual)
        .status(pass);
    Ok((r, pass))
}

fn ellipticity(a: &EllipticityArgs) -> Outcome {
    let rep = calculus::ellipticity_report(a.operator, a.n, a.trials, a.seed)?;
    let pass = match a.expect {
        Some(Expectation::Elliptic) => rep.elliptic,
        Some(Expectation::NonElliptic) => !rep.elliptic,
        None => true,
    };
    let mut r = Report::default();
    r.text("operator", rep.operator)
        .text("n", rep.n)
        .text("trials", rep.trials)
        .text("seed", a.seed)
        .num("min_singular_value", rep.min_singular_value)
        .text("max_nullity", rep.max_nullity)
        .text("elliptic", rep.elliptic)
        .list("b", &rep.b);
    match &rep.witness {
        Some(w) => r.list("witness", w),
        None => r.text("witness", "none"),
    };
    r.opt("witness_residual", rep.witness_residual)
        .opt("explicit_witness_residual", rep.explicit_witness_residual)
        .status(pass);
    Ok((r, pass))
}

fn synth(a: &SynthArgs) -> Outcome {
    let grid = Grid::uniform(a.n, a.shape)?;
    let ops = Operators::spectral(&grid)?;
    if a.sigma.is_nan() || a.sigma <= 0.0 {
        return Err(usage("--sigma must be positive"));
    }
    let (field, name) = match a.kind {
        SynthKind::GradientBump => (helmholtz::bump_gradient(&ops, a.sigma)?, "gradient-bump"),
        SynthKind::DivfreeBump => (helmholtz::bump_divfree(&ops, a.sigma)?, "divfree-bump"),
        SynthKind::Random => {
            let opts = BandLimited::new(a.seed);
            (Field::random_band_limited(&grid, FieldKind::Vector(a.n), &opts)?, "random")
        }
    };
    field_io::save(&a.output, &field)?;
    let mut r = Report::default();
    r.text("kind", name)
        .text("n", a.n)
        .text("shape", shape_text(&grid))
        .text("output", a.output.display())
        .num("max_abs", field.max_abs())
        .status(true);
    Ok((r, true))
}
