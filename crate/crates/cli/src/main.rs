use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlin_core::oracle::{check_instance, compare_relaxations, enumerate_optimum, CheckOptions, CompareOptions};
use qlin_core::{
    add_cuts, build_model, compute_bound_set, format_g12, generate_random, read_instance, save_instance,
    solve_milp_logged, write_lp_text, write_mps, BoundOptions, BoundSet64, ConditionalBounds, CutFamily,
    GeneratorConfig, GridConfig, LinearModel64, MilpConfig, MilpStatus, ModelVariant, OracleStatus, RowBounds,
    ThetaMode,
};

#[derive(Parser)]
#[command(name = "qlin", version, about = "Linearizations of zero-one quadratic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Gen(GenArgs),
    /// Print the bound parameters of an instance.
    Bounds(BoundArgs),
    /// Write a model in MPS or LP text form.
    Emit(EmitArgs),
    /// Solve a model by branch-and-bound.
    Solve(SolveArgs),
    /// Tabulate LP bounds and optima of every model as CSV.
    Compare(CompareArgs),
    /// Enumerate every binary point.
    Oracle(InputArgs),
    /// Run the invariant suite on an instance.
    Check(CheckArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Instance file (JSON).
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long, default_value_t = 5)]
    coeff_range: i64,
    #[arg(long)]
    cardinality: Option<usize>,
    #[arg(long)]
    knapsack: bool,
    /// Add a quadratic constraint satisfied by a random point.
    #[arg(long)]
    quad: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaArg {
    Frobenius,
    Grid,
    Fixed,
}

#[derive(Args)]
struct BoundFlags {
    /// Compute bounds with the row's own variable fixed.
    #[arg(long)]
    conditional: bool,
    /// Tighten conditional bounds over the enhanced region.
    #[arg(long)]
    enhanced: bool,
    #[arg(long, value_enum, default_value_t = ThetaArg::Frobenius)]
    theta_mode: ThetaArg,
    /// Multiplier for `--theta-mode fixed`.
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
}

impl BoundFlags {
    fn options(&self, force_conditional: bool) -> Result<BoundOptions, String> {
        let theta_mode = match (self.theta_mode, self.theta) {
            (ThetaArg::Fixed, Some(t)) => ThetaMode::Fixed(t),
            (ThetaArg::Fixed, None) => return Err("--theta-mode fixed needs --theta".into()),
            (_, Some(_)) => return Err("--theta applies only to --theta-mode fixed".into()),
            (ThetaArg::Frobenius, None) => ThetaMode::Frobenius,
            (ThetaArg::Grid, None) => ThetaMode::Grid(GridConfig::default()),
        };
        Ok(BoundOptions {
            conditional: self.conditional || self.enhanced || force_conditional,
            enhanced: self.enhanced,
            theta_mode,
            eps: self.eps,
        })
    }
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    bounds: BoundFlags,
}

#[derive(Args)]
struct ModelArgs {
    #[command(flatten)]
    input: InputArgs,
    /// bp, bp-compact, bp-bar, small or nbp-bar.
    #[arg(long, default_value = "bp-bar")]
    variant: ModelVariant,
    /// none, base, cond or theta.
    #[arg(long, default_value = "none")]
    cuts: String,
    #[command(flatten)]
    bounds: BoundFlags,
}

impl ModelArgs {
    fn cut_family(&self) -> Result<Option<CutFamily>, String> {
        match self.cuts.as_str() {
            "none" => Ok(None),
            other => other.parse().map(Some).map_err(|e: qlin_core::Error| e.to_string()),
        }
    }

    fn model(&self) -> Result<LinearModel64, String> {
        let inst = load(&self.input.input)?;
        let cuts = self.cut_family()?;
        let force = self.variant.needs_conditional() || cuts.is_some_and(|c| c != CutFamily::Base);
        let bounds: BoundSet64 = compute_bound_set(&inst, &self.bounds.options(force)?).map_err(|e| e.to_string())?;
        let model = build_model(&inst, &bounds, self.variant).map_err(|e| e.to_string())?;
        match cuts {
            Some(family) => add_cuts(&model, &inst, &bounds, family).map_err(|e| e.to_string()),
            None => Ok(model),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Mps,
    Lp,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum, default_value_t = Format::Mps)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Write one line per branch-and-bound node here.
    #[arg(long)]
    log: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    node_limit: usize,
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    bounds: BoundFlags,
    /// Fill the millis column; the output then varies between runs.
    #[arg(long)]
    timing: bool,
    /// Value of the instance_id column; the file stem by default.
    #[arg(long)]
    id: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    bounds: BoundFlags,
}

enum Failure {
    Flags,
    Input(String),
}

impl From<qlin_core::Error> for Failure {
    fn from(e: qlin_core::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Input(e)
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let result = match &cli.command {
        Command::Gen(a) => gen(a),
        Command::Bounds(a) => bounds(a),
        Command::Emit(a) => emit(a),
        Command::Solve(a) => solve(a),
        Command::Compare(a) => compare(a),
        Command::Oracle(a) => oracle(a),
        Command::Check(a) => check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Flags) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// `QLIN_THREADS` caps the worker pool; 0 or unset leaves the default.
fn configure_threads() -> Result<(), String> {
    let Ok(text) = std::env::var("QLIN_THREADS") else { return Ok(()) };
    let threads: usize = text.trim().parse().map_err(|_| format!("QLIN_THREADS must be a count, got `{text}`"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn load(path: &Path) -> Result<qlin_core::ProblemInstance, String> {
    read_instance(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn gen(a: &GenArgs) -> Outcome {
    let cfg = GeneratorConfig {
        n: a.n,
        density: a.density,
        coeff_range: a.coeff_range,
        cardinality: a.cardinality,
        knapsack: a.knapsack,
        with_quad_constraint: a.quad,
        seed: a.seed,
    };
    let inst = generate_random(&cfg)?;
    let mut out = output(a.out.as_deref())?;
    out.write_all(save_instance(&inst).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn bounds(a: &BoundArgs) -> Outcome {
    let inst = load(&a.input.input)?;
    let b: BoundSet64 = compute_bound_set(&inst, &a.bounds.options(false)?)?;
    let mut out = output(None)?;
    writeln!(out, "theta {}", b.theta.map_or("NA".to_string(), format_g12))?;
    let forced: Vec<String> = b.forced.iter().map(|(i, v)| format!("x{}={v}", i + 1)).collect();
    writeln!(out, "forced {}", if forced.is_empty() { "none".to_string() } else { forced.join(" ") })?;
    print_rows(&mut out, "gamma", Some(&b.gamma))?;
    print_rows(&mut out, "lambda", b.lambda.as_ref())?;
    print_rows(&mut out, "w", b.w.as_ref())?;
    print_conditional(&mut out, "gamma", b.gamma_cond.as_ref())?;
    print_conditional(&mut out, "lambda", b.lambda_cond.as_ref())?;
    print_conditional(&mut out, "w", b.w_cond.as_ref())?;
    print_conditional(&mut out, "w_theta", b.w_theta.as_ref())?;
    out.flush()?;
    Ok(())
}

fn values(v: &[f64]) -> String {
    v.iter().map(|&x| format_g12(x)).collect::<Vec<_>>().join(" ")
}

fn print_rows(out: &mut dyn Write, name: &str, b: Option<&RowBounds<f64>>) -> io::Result<()> {
    if let Some(b) = b {
        writeln!(out, "{name}.min {}", values(&b.min))?;
        writeln!(out, "{name}.max {}", values(&b.max))?;
    }
    Ok(())
}

fn print_conditional(out: &mut dyn Write, name: &str, b: Option<&ConditionalBounds<f64>>) -> io::Result<()> {
    if let Some(b) = b {
        writeln!(out, "{name}.max_at_zero {}", values(&b.max_at_zero))?;
        writeln!(out, "{name}.min_at_one {}", values(&b.min_at_one))?;
        writeln!(out, "{name}.max_at_one {}", values(&b.max_at_one))?;
        writeln!(out, "{name}.min_at_zero {}", values(&b.min_at_zero))?;
    }
    Ok(())
}

fn emit(a: &EmitArgs) -> Outcome {
    let model = a.model.model()?;
    let text = match a.format {
        Format::Mps => write_mps(&model),
        Format::Lp => write_lp_text(&model),
    };
    let mut out = output(a.out.as_deref())?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn solve(a: &SolveArgs) -> Outcome {
    let model = a.model.model()?;
    let config = MilpConfig { gap: a.gap, node_limit: a.node_limit };
    let mut log: Box<dyn Write> = match &a.log {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::sink()),
    };
    let sol = solve_milp_logged(&model, &config, &mut log)?;
    log.flush()?;
    let mut out = output(None)?;
    let status = match sol.status {
        MilpStatus::Optimal => "optimal",
        MilpStatus::Infeasible => "infeasible",
        MilpStatus::NodeLimit => "node-limit",
    };
    writeln!(out, "status {status}")?;
    if let Some(v) = sol.objective {
        writeln!(out, "objective {}", format_g12(v))?;
    }
    if let Some(x) = &sol.x {
        writeln!(out, "x {}", point_text(x))?;
    }
    writeln!(out, "root_bound {}", sol.root_bound.map_or("inf".to_string(), format_g12))?;
    writeln!(out, "nodes {}", sol.nodes)?;
    out.flush()?;
    Ok(())
}

fn point_text(x: &[u8]) -> String {
    let parts: Vec<String> = x.iter().map(u8::to_string).collect();
    format!("({})", parts.join(","))
}

fn instance_id(path: &Path) -> String {
    path.file_stem().map_or("instance".to_string(), |s| s.to_string_lossy().into_owned())
}

fn compare(a: &CompareArgs) -> Outcome {
    let inst = load(&a.input.input)?;
    let options = CompareOptions {
        bounds: a.bounds.options(false)?,
        milp: MilpConfig::default(),
        instance_id: a.id.clone().unwrap_or_else(|| instance_id(&a.input.input)),
        timing: a.timing,
    };
    let report = compare_relaxations(&inst, &options)?;
    let mut out = output(a.out.as_deref())?;
    out.write_all(report.to_csv().as_bytes())?;
    out.flush()?;
    for flag in &report.flags {
        eprintln!("flag: {flag}");
    }
    if report.flags.is_empty() {
        Ok(())
    } else {
        Err(Failure::Flags)
    }
}

fn oracle(a: &InputArgs) -> Outcome {
    let inst = load(&a.input)?;
    let r = enumerate_optimum(&inst)?;
    let mut out = output(None)?;
    match (r.status, &r.objective) {
        (OracleStatus::Optimal, Some(v)) => {
            writeln!(out, "optimal {}", format_g12(qlin_core::Scalar::as_f64(v)))?;
            for x in &r.argmins {
                writeln!(out, "argmin {}", point_text(x))?;
            }
        }
        _ => writeln!(out, "infeasible")?,
    }
    writeln!(out, "feasible_points {}", r.feasible_count)?;
    out.flush()?;
    Ok(())
}

fn check(a: &CheckArgs) -> Outcome {
    let inst = load(&a.input.input)?;
    let options = CheckOptions {
        bounds: a.bounds.options(true)?,
        milp: MilpConfig::default(),
        instance_id: instance_id(&a.input.input),
    };
    let report = check_instance(&inst, &options)?;
    let mut out = output(None)?;
    writeln!(out, "feasible_points {}", report.feasible_points)?;
    writeln!(out, "identity_failures {}", report.identity_failures.len())?;
    writeln!(out, "dominance_failures {}", report.dominance_failures.len())?;
    writeln!(out, "comparison_flags {}", report.comparison.flags.len())?;
    for line in report.identity_failures.iter().chain(&report.dominance_failures) {
        writeln!(out, "flag: {line}")?;
    }
    for flag in &report.comparison.flags {
        writeln!(out, "flag: {flag}")?;
    }
    writeln!(out, "{}", if report.passed() { "PASS" } else { "FAIL" })?;
    out.flush()?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Flags)
    }
}
