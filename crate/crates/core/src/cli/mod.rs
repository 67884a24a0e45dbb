//! The `wproj` command line.
//!
//! Exit codes: 0 on success, 1 when a check fails or a computation errors,
//! 2 on usage errors.

mod config;
mod report;

pub use config::{expand_config, parse_config};
pub use report::{config_pairs, render, Format};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{find_p_threshold, Discretization, GapEvaluator};
use crate::measures::{rad_ball, GridSpec, Measure};
use crate::ot::{wasserstein, wasserstein_1d, CostExponent, QuantileFn};
use crate::proj1d::{projection_1d, ProjectionSpec1D, DEFAULT_CELLS};
use crate::projnd::{project_atoms_analytic, project_capacitated, CapacitatedInstance};
use crate::props::{run_suite, CheckConfig, CheckReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "wproj", version, about = "Projections onto density-capped measures in Wasserstein space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Project a 1-D measure file onto densities bounded by lambda.
    Project1d(Project1dArgs),
    /// Project a discrete measure in R^d, on a grid or in closed form.
    Projectnd(ProjectndArgs),
    /// W_p distance between two discrete measure files.
    Wp(WpArgs),
    /// Run the property suite on seeded random instances.
    Verify(VerifyArgs),
    /// Gap curves of the two-ball counterexample.
    Counterexample(CounterexampleArgs),
    /// Bisect for the exponent where the counterexample gap changes sign.
    Threshold(ThresholdArgs),
}

fn parse_p(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err(format!("p must be a finite number >= 1, got {s}"))
    }
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ReportArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Leave the timestamp out of the report header.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct Project1dArgs {
    /// Discrete 1-D measure file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0, value_parser = parse_p)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub lambda: f64,
    /// Number of level cells.
    #[arg(long, default_value_t = DEFAULT_CELLS)]
    pub cells: usize,
    /// Output measure file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Capacitated transport onto a grid.
    Grid,
    /// Disjoint balls around the atoms; only valid when they do not overlap.
    Analytic,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ProjectndArgs {
    /// Discrete measure file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0, value_parser = parse_p)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub lambda: f64,
    #[arg(long, value_enum, default_value_t = Method::Grid)]
    pub method: Method,
    /// Grid spacing.
    #[arg(long, default_value_t = 0.05, value_parser = parse_positive)]
    pub spacing: f64,
    /// Output measure file (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct WpArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 2.0, value_parser = parse_p)]
    pub p: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 2.0, value_parser = parse_p)]
    pub p: f64,
    /// Number of random instances.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// First seed; instance k uses seed + k.
    #[arg(long, env = "WPROJ_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    pub lambda: f64,
    /// Grid spacing for d >= 2.
    #[arg(long, default_value_t = 0.05, value_parser = parse_positive)]
    pub spacing: f64,
    /// Level cells for d = 1.
    #[arg(long, default_value_t = DEFAULT_CELLS)]
    pub cells: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sample,
    Grid,
    Axisym,
}

#[derive(Debug, Args, Serialize)]
pub struct DiscretizationArgs {
    #[arg(long, value_enum, default_value_t = Mode::Sample)]
    pub mode: Mode,
    /// Samples per measure in sample mode.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    /// Lattice spacing in grid and axisym modes.
    #[arg(long, default_value_t = 0.04, value_parser = parse_positive)]
    pub spacing: f64,
    /// Midpoint subsamples per cell and axis.
    #[arg(long, default_value_t = 6)]
    pub subsamples: usize,
}

impl DiscretizationArgs {
    fn resolve(&self) -> Discretization {
        match self.mode {
            Mode::Sample => Discretization::Sample { n: self.n },
            Mode::Grid => Discretization::Grid {
                spacing: self.spacing,
                subsamples: self.subsamples,
            },
            Mode::Axisym => Discretization::Axisym {
                spacing: self.spacing,
                subsamples: self.subsamples,
            },
        }
    }
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct CounterexampleArgs {
    /// Dimensions, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub d: Vec<usize>,
    /// Exponents, comma separated (default 1.00 to 2.00 in steps of 0.05).
    #[arg(long, value_delimiter = ',', value_parser = parse_p)]
    pub p: Vec<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub discretization: DiscretizationArgs,
    /// Number of seeds per dimension.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, env = "WPROJ_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

#[derive(Debug, Args, Serialize)]
#[command(args_override_self = true)]
pub struct ThresholdArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
    pub d: Vec<usize>,
    /// Bisection stops once the bracket is this narrow.
    #[arg(long, default_value_t = 0.01, value_parser = parse_positive)]
    pub tol_p: f64,
    #[arg(long, value_enum, default_value_t = Mode::Axisym)]
    pub mode: Mode,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 0.04, value_parser = parse_positive)]
    pub spacing: f64,
    #[arg(long, default_value_t = 6)]
    pub subsamples: usize,
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    #[arg(long, env = "WPROJ_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub report: ReportArgs,
}

impl ThresholdArgs {
    fn discretization(&self) -> Discretization {
        DiscretizationArgs {
            mode: self.mode,
            n: self.n,
            spacing: self.spacing,
            subsamples: self.subsamples,
        }
        .resolve()
    }
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(msg) = check_paths(&cli.command) {
        eprintln!("error: {msg}");
        return EXIT_USAGE;
    }
    match dispatch(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn check_paths(cmd: &Command) -> std::result::Result<(), String> {
    let (inputs, output): (Vec<&Path>, Option<&Path>) = match cmd {
        Command::Project1d(a) => (vec![&a.input], a.output.as_deref()),
        Command::Projectnd(a) => (vec![&a.input], a.output.as_deref()),
        Command::Wp(a) => (vec![&a.a, &a.b], a.report.output.as_deref()),
        _ => return Ok(()),
    };
    match output {
        Some(out) if inputs.contains(&out) => {
            Err(format!("output {} would overwrite an input", out.display()))
        }
        _ => Ok(()),
    }
}

fn dispatch(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Project1d(a) => project1d(a),
        Command::Projectnd(a) => projectnd(a),
        Command::Wp(a) => wp(a),
        Command::Verify(a) => verify(a),
        Command::Counterexample(a) => counterexample(a),
        Command::Threshold(a) => threshold(a),
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Solver(format!("thread pool: {e}")))
}

fn write_measure(m: &Measure, output: Option<&Path>) -> Result<()> {
    let mut text = m.to_json()?;
    text.push('\n');
    report::emit(text.as_bytes(), output)
}

fn project1d(a: &Project1dArgs) -> Result<i32> {
    let mu = Measure::read(&a.input)?.to_discrete()?;
    let spec = ProjectionSpec1D::new(a.p, a.lambda, a.cells)?;
    let proj = projection_1d(&mu, &spec)?;
    write_measure(&Measure::Grid(proj.to_grid_measure()?), a.output.as_deref())?;
    let dist = QuantileFn::from_discrete(&mu)?.lp_distance(&proj.quantile, spec.p);
    eprintln!("W_{}(mu, P[mu]) = {dist}", a.p);
    Ok(EXIT_OK)
}

fn projectnd(a: &ProjectndArgs) -> Result<i32> {
    let mu = Measure::read(&a.input)?.to_discrete()?;
    let out = match a.method {
        Method::Analytic => Measure::BallUnion(project_atoms_analytic(&mu, a.lambda)?),
        Method::Grid => {
            let (lo, hi) = mu.bounding_box();
            let pad = rad_ball(mu.dim(), 1.0 / a.lambda) + 2.0 * a.spacing;
            let lo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
            let hi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
            let grid = GridSpec::covering(&lo, &hi, a.spacing)?;
            let inst = CapacitatedInstance::new(mu, grid, a.lambda, CostExponent::for_projection(a.p)?)?;
            let proj = project_capacitated(&inst)?;
            eprintln!("W_{}(mu, P[mu]) = {}", a.p, proj.distance());
            Measure::Grid(proj.measure)
        }
    };
    write_measure(&out, a.output.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct WpRow {
    p: f64,
    wp: f64,
}

fn wp(a: &WpArgs) -> Result<i32> {
    let mu = Measure::read(&a.a)?.to_discrete()?;
    let nu = Measure::read(&a.b)?.to_discrete()?;
    let p = CostExponent::new(a.p)?;
    let w = if mu.dim() == 1 && nu.dim() == 1 {
        wasserstein_1d(&mu, &nu, p)?
    } else {
        wasserstein(&mu, &nu, p)?
    };
    let pairs = config_pairs("wp", a)?;
    let bytes = render(a.report.format, &pairs, !a.report.no_timestamp, &[WpRow { p: a.p, wp: w }])?;
    report::emit(&bytes, a.report.output.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct VerifyRow {
    seed: u64,
    name: String,
    d: usize,
    p: f64,
    lhs: f64,
    rhs: f64,
    slack: f64,
    tolerance: f64,
    pass: bool,
    asserted: bool,
    metadata: String,
}

impl VerifyRow {
    fn new(seed: u64, r: CheckReport) -> Self {
        Self {
            seed,
            name: r.name,
            d: r.d,
            p: r.p,
            lhs: r.lhs,
            rhs: r.rhs,
            slack: r.slack,
            tolerance: r.tolerance,
            pass: r.pass,
            asserted: r.asserted,
            metadata: r.metadata,
        }
    }
}

fn verify(a: &VerifyArgs) -> Result<i32> {
    if a.d == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let p = CostExponent::new(a.p)?;
    let cfg = CheckConfig {
        lambda: a.lambda,
        spacing: a.spacing,
        cells_1d: a.cells,
    };
    let seeds: Vec<u64> = (0..a.seeds).map(|k| a.seed.wrapping_add(k)).collect();
    let results: Vec<Result<Vec<CheckReport>>> =
        pool(a.jobs)?.install(|| seeds.par_iter().map(|&s| run_suite(a.d, p, s, &cfg)).collect());
    let mut rows = Vec::new();
    for (seed, res) in seeds.iter().zip(results) {
        rows.extend(res?.into_iter().map(|r| VerifyRow::new(*seed, r)));
    }
    let failed = rows.iter().filter(|r| r.asserted && !r.pass).count();
    let pairs = config_pairs("verify", a)?;
    let bytes = render(a.report.format, &pairs, !a.report.no_timestamp, &rows)?;
    report::emit(&bytes, a.report.output.as_deref())?;
    eprintln!("{} checks, {} asserted failures", rows.len(), failed);
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

#[derive(Debug, Serialize)]
struct GapRow {
    d: usize,
    p: f64,
    /// Samples per measure, or atoms of the discretized `rho` on lattices.
    n: usize,
    seed: u64,
    mode: &'static str,
    spacing: Option<f64>,
    wp_mu_nu: f64,
    wp_rho_sigma: f64,
    gap: f64,
}

fn default_p_grid() -> Vec<f64> {
    (0..=20).map(|k| 1.0 + 0.05 * k as f64).collect()
}

fn counterexample(a: &CounterexampleArgs) -> Result<i32> {
    let disc = a.discretization.resolve();
    let ps = if a.p.is_empty() { default_p_grid() } else { a.p.clone() };
    let jobs: Vec<(usize, u64)> = a
        .d
        .iter()
        .flat_map(|&d| (0..a.seeds).map(move |k| (d, a.seed.wrapping_add(k))))
        .collect();
    let results: Vec<Result<Vec<GapRow>>> = pool(a.jobs)?.install(|| {
        jobs.par_iter()
            .map(|&(d, seed)| {
                let eval = GapEvaluator::new(d, disc, seed)?;
                let n = eval.sizes().0;
                let spacing = match disc {
                    Discretization::Sample { .. } => None,
                    _ => Some(disc.resolution()),
                };
                ps.iter()
                    .map(|&p| {
                        let g = eval.gap(p)?;
                        Ok(GapRow {
                            d,
                            p,
                            n,
                            seed,
                            mode: disc.mode(),
                            spacing,
                            wp_mu_nu: g.wp_mu_nu,
                            wp_rho_sigma: g.wp_rho_sigma,
                            gap: g.gap,
                        })
                    })
                    .collect()
            })
            .collect()
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let mut pairs = config_pairs("counterexample", a)?;
    if a.p.is_empty() {
        pairs.push(("p_grid".into(), "1.00:0.05:2.00".into()));
    }
    let bytes = render(a.report.format, &pairs, !a.report.no_timestamp, &rows)?;
    report::emit(&bytes, a.report.output.as_deref())?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct ThresholdRow {
    d: usize,
    p_hat: f64,
    p_hat_sd: f64,
    p_hat_min: f64,
    p_hat_max: f64,
    tol_p: f64,
    mode: &'static str,
    n: usize,
    spacing: Option<f64>,
    seeds: u64,
    /// Seeds where the gap did not change sign on `[1, 2]`.
    failures: usize,
}

/// Mean and sample standard deviation.
fn mean_sd(v: &[f64]) -> (f64, f64) {
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    if v.len() < 2 {
        return (m, 0.0);
    }
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64;
    (m, var.sqrt())
}

fn threshold(a: &ThresholdArgs) -> Result<i32> {
    let disc = a.discretization();
    let jobs: Vec<(usize, u64)> = a
        .d
        .iter()
        .flat_map(|&d| (0..a.seeds).map(move |k| (d, a.seed.wrapping_add(k))))
        .collect();
    let results: Vec<Result<f64>> = pool(a.jobs)?.install(|| {
        jobs.par_iter()
            .map(|&(d, seed)| find_p_threshold(d, a.tol_p, disc, seed).map(|t| t.p_hat))
            .collect()
    });
    let mut rows = Vec::new();
    let mut any_failed = false;
    let mut results = results.into_iter();
    for &d in &a.d {
        let mut hats = Vec::new();
        let mut failures = 0;
        for (j, r) in results.by_ref().take(a.seeds as usize).enumerate() {
            match r {
                Ok(v) => hats.push(v),
                Err(e @ Error::NoSignChange { .. }) => {
                    eprintln!("d={d} seed={}: {e}", a.seed.wrapping_add(j as u64));
                    failures += 1;
                }
                Err(e) => return Err(e),
            }
        }
        any_failed |= failures > 0;
        let (m, sd) = mean_sd(&hats);
        let n = match disc {
            Discretization::Sample { n } => n,
            _ => GapEvaluator::new(d, disc, a.seed)?.sizes().0,
        };
        rows.push(ThresholdRow {
            d,
            p_hat: m,
            p_hat_sd: sd,
            p_hat_min: hats.iter().cloned().fold(f64::NAN, f64::min),
            p_hat_max: hats.iter().cloned().fold(f64::NAN, f64::max),
            tol_p: a.tol_p,
            mode: disc.mode(),
            n,
            spacing: match disc {
                Discretization::Sample { .. } => None,
                _ => Some(disc.resolution()),
            },
            seeds: a.seeds,
            failures,
        });
    }
    let pairs = config_pairs("threshold", a)?;
    let bytes = render(a.report.format, &pairs, !a.report.no_timestamp, &rows)?;
    report::emit(&bytes, a.report.output.as_deref())?;
    Ok(if any_failed { EXIT_FAILURE } else { EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(Cli::try_parse_from(["wproj", "wp", "--a", "x", "--b", "y", "--p", "0.5"]).is_err());
        assert!(Cli::try_parse_from(["wproj", "wp", "--a", "x", "--b", "y", "--p", "1"]).is_ok());
        assert!(Cli::try_parse_from(["wproj", "verify", "--lambda=-1"]).is_err());
    }

    #[test]
    fn later_flags_override_earlier_ones() {
        let cli = Cli::try_parse_from(["wproj", "verify", "--p", "3", "--p", "2"]).unwrap();
        let Command::Verify(v) = cli.command else { panic!() };
        assert_eq!(v.p, 2.0);
    }

    #[test]
    fn default_grid_runs_from_one_to_two() {
        let g = default_p_grid();
        assert_eq!(g.len(), 21);
        assert_eq!(g[0], 1.0);
        assert!((g[20] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mean_and_sd() {
        let (m, s) = mean_sd(&[1.0, 2.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        assert!(mean_sd(&[]).0.is_nan());
    }
}
