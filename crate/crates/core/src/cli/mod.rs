//! Command-line frontend: figure grids, single-point queries, validation.
//!
//! Exit codes: 0 success, 1 validation failure (or runtime error),
//! 2 configuration error, 3 partial non-convergence (output still written).

pub mod figures;
pub mod output;
pub mod range;
pub mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic::EtsParams;
use crate::ensemble::{linear_entropy, Family, DEFAULT_ORDER, MIN_ENTROPY_SAMPLES};
use crate::error::Error;
use crate::inequalities::{
    chsh_max, chsh_optimizer, leggett_script_max, phi_optimizer, Backend, LeggettGate,
    LeggettOptions, PhiMode, PAPER_PHI,
};
use crate::numerics::OptimizerConfig;

pub use output::{Format, Meta, Table};
pub use range::Range;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "COARSE_BELL_THREADS";

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NONCONVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "coarse-bell",
    version,
    about = "Bell-CHSH and Leggett tests for entangled thermal states under coarse-grained homodyne detection",
    after_help = "Ranges: a single number, or lo:hi:count for `count` inclusive evenly spaced values;\n\
                  append (log) anywhere for logarithmic spacing, e.g. --v '1:1000(log):15'."
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimized |B| over a (V, d, η) grid (Fig. 1).
    BellSurface(BellSurfaceArgs),
    /// Optimized |B| and its angles at one point.
    BellMax(BellMaxArgs),
    /// Optimized |B| and the Leggett function 𝓛 along a grid (Fig. 2).
    LeggettScan(LeggettScanArgs),
    /// Monte-Carlo linear entropy S(V, d) of the qubit ETS.
    Entropy(EntropyArgs),
    /// Cross-backend agreement and physics invariants.
    Validate(ValidateArgs),
    /// Preset grid reproducing one paper figure.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    /// Closed form (qubit family only).
    Analytic,
    /// Gauss-Hermite average of the coherent engine.
    Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Qubit,
    Alt,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Qubit => Family::Qubit,
            FamilyArg::Alt => Family::Alt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GateArg {
    Sequence,
    Ideal,
}

/// Backend and optimizer options shared by the optimizing commands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// ETS family.
    #[arg(long, value_enum, default_value = "qubit")]
    pub family: FamilyArg,
    /// Correlation backend (default: analytic for qubit, ensemble for alt).
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    /// Gauss-Hermite order per real dimension for the ensemble backend.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Random restarts of the CHSH optimizer (structured starts are always added).
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Nelder-Mead iteration cap per start.
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    /// Nelder-Mead simplex tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl SolverArgs {
    pub fn backend(&self) -> Result<Backend, Error> {
        let family: Family = self.family.into();
        match (self.backend, family) {
            (Some(BackendKind::Analytic), Family::Alt) => {
                Err(Error::Config("the analytic backend covers the qubit family only".into()))
            }
            (Some(BackendKind::Analytic), _) | (None, Family::Qubit) => Ok(Backend::Analytic),
            _ => {
                if !(1..=crate::numerics::MAX_ORDER).contains(&self.order) {
                    return Err(Error::QuadratureOrder(self.order));
                }
                Ok(Backend::Ensemble {
                    family,
                    order: self.order,
                })
            }
        }
    }

    pub fn chsh_optimizer(&self) -> Result<OptimizerConfig, Error> {
        let o = chsh_optimizer(self.seed)
            .with_restarts(self.restarts)
            .with_max_iters(self.max_iters)
            .with_tolerance(self.tolerance);
        o.validate()?;
        Ok(o)
    }
}

/// Output destination shared by every grid command.
#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BellSurfaceArgs {
    /// Thermal variance V (>= 1): number or range.
    #[arg(long = "v", default_value = "1")]
    pub v: Range,
    /// Displacement d (> 0): number or range.
    #[arg(long = "d")]
    pub d: Range,
    /// Homodyne efficiency η in (0, 1]: number or range.
    #[arg(long, default_value = "1")]
    pub eta: Range,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BellMaxArgs {
    #[arg(long = "v", default_value_t = 1.0)]
    pub v: f64,
    #[arg(long = "d")]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LeggettScanArgs {
    #[arg(long = "v", default_value = "1")]
    pub v: Range,
    #[arg(long = "d")]
    pub d: Range,
    #[arg(long, default_value = "1")]
    pub eta: Range,
    /// Coefficient c in 𝓛 = L − 8 + c|sin(φ/2)|.
    #[arg(long, default_value_t = 2.0)]
    pub sine_coefficient: f64,
    /// Leggett gate: the printed sequence, or the exact rotation it approximates.
    #[arg(long, value_enum, default_value = "sequence")]
    pub gate: GateArg,
    /// Feed Bob's gate the azimuth as printed instead of mirrored.
    #[arg(long)]
    pub no_mirror: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

impl LeggettScanArgs {
    pub fn leggett_options(&self) -> LeggettOptions {
        LeggettOptions {
            sine_coefficient: self.sine_coefficient,
            mirror_bob_azimuth: !self.no_mirror,
            gate: match self.gate {
                GateArg::Sequence => LeggettGate::Sequence,
                GateArg::Ideal => LeggettGate::IdealRotation,
            },
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long = "v")]
    pub v: Range,
    #[arg(long = "d")]
    pub d: Range,
    /// Monte-Carlo sample pairs per point.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(value_enum, default_value = "quick")]
    pub suite: validate::Suite,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    pub id: figures::FigureId,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Outcome of a command before it is turned into an exit code.
pub enum Outcome {
    Ok,
    NotConverged,
    ValidationFailed,
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter { .. } | Error::Config(_) | Error::QuadratureOrder(_) => EXIT_CONFIG,
        _ => EXIT_VALIDATION,
    }
}

/// Parses `std::env::args` and runs; the whole binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(&cli.command) {
        Ok(Outcome::Ok) => ExitCode::from(EXIT_OK),
        Ok(Outcome::NotConverged) => {
            eprintln!("warning: some cells did not converge (flagged in the output)");
            ExitCode::from(EXIT_NONCONVERGED)
        }
        Ok(Outcome::ValidationFailed) => ExitCode::from(EXIT_VALIDATION),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

pub fn run(command: &Command) -> Result<Outcome, Error> {
    match command {
        Command::BellSurface(a) => {
            let t = bell_surface(a)?;
            finish(&t, &a.out)
        }
        Command::BellMax(a) => {
            let grid = BellSurfaceArgs {
                v: Range::single(a.v),
                d: Range::single(a.d),
                eta: Range::single(a.eta),
                solver: a.solver.clone(),
                out: a.out.clone(),
            };
            let mut t = bell_surface(&grid)?;
            t.meta = Meta::new("bell-max", a.solver.seed, a);
            finish(&t, &a.out)
        }
        Command::LeggettScan(a) => {
            let t = leggett_scan(a)?;
            finish(&t, &a.out)
        }
        Command::Entropy(a) => {
            let t = entropy(a)?;
            finish(&t, &a.out)
        }
        Command::Validate(a) => {
            let checks = validate::run_suite(a.suite);
            let mut failed = 0;
            for c in &checks {
                println!(
                    "[{}] {}: {:.3e} (tolerance {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
                failed += usize::from(!c.passed);
            }
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(if failed == 0 { Outcome::Ok } else { Outcome::ValidationFailed })
        }
        Command::Figure(a) => {
            let t = figures::run(a.id)?;
            finish(&t, &a.out)
        }
    }
}

fn finish(t: &Table, out: &OutputArgs) -> Result<Outcome, Error> {
    t.write(out.format, out.output.as_deref())
        .map_err(|e| Error::Config(format!("cannot write output: {e}")))?;
    let converged_col = t.columns.iter().position(|c| *c == "converged");
    let all = converged_col.is_none_or(|i| t.rows.iter().all(|r| r[i] == json!(true)));
    Ok(if all { Outcome::Ok } else { Outcome::NotConverged })
}

/// Every `(V, d, η)` of the grid, validated before any work starts.
fn grid_points(v: &Range, d: &Range, eta: &Range) -> Result<Vec<EtsParams>, Error> {
    let mut out = Vec::new();
    for &vv in &v.values() {
        for &dd in &d.values() {
            for &ee in &eta.values() {
                out.push(EtsParams::new(vv, dd, ee)?);
            }
        }
    }
    Ok(out)
}

fn backend_label(b: Backend) -> String {
    match b {
        Backend::Analytic => "analytic".into(),
        Backend::Ensemble { family, order } => format!(
            "ensemble-{}-{}",
            match family {
                Family::Qubit => "qubit",
                Family::Alt => "alt",
            },
            order
        ),
    }
}

pub fn bell_surface(a: &BellSurfaceArgs) -> Result<Table, Error> {
    let backend = a.solver.backend()?;
    let opt = a.solver.chsh_optimizer()?;
    let points = grid_points(&a.v, &a.d, &a.eta)?;
    let results: Vec<_> = points.par_iter().map(|p| chsh_max(p, backend, &opt)).collect::<Result<_, _>>()?;
    let mut t = Table::new(
        Meta::new("bell-surface", a.solver.seed, a),
        vec!["V", "d", "eta", "B_max", "theta_A", "theta_B", "theta_A2", "theta_B2", "backend", "converged"],
    );
    let label = backend_label(backend);
    for (p, r) in points.iter().zip(results) {
        t.push(vec![
            json!(p.v),
            json!(p.d),
            json!(p.eta),
            json!(r.b_max),
            json!(r.angles.theta_a),
            json!(r.angles.theta_b),
            json!(r.angles.theta_a2),
            json!(r.angles.theta_b2),
            json!(label),
            json!(r.converged),
        ]);
    }
    Ok(t)
}

pub fn leggett_scan(a: &LeggettScanArgs) -> Result<Table, Error> {
    let backend = a.solver.backend()?;
    let opt = a.solver.chsh_optimizer()?;
    if !a.sine_coefficient.is_finite() {
        return Err(Error::Config("--sine-coefficient must be finite".into()));
    }
    let opts = a.leggett_options();
    if opts.gate == LeggettGate::IdealRotation && backend.family() == Family::Alt {
        return Err(Error::Config("--gate ideal is defined for the qubit family only".into()));
    }
    let points = grid_points(&a.v, &a.d, &a.eta)?;
    let phi_opt = phi_optimizer(a.solver.seed);
    let rows: Vec<_> = points
        .par_iter()
        .map(|p| {
            let b = chsh_max(p, backend, &opt)?;
            let l = leggett_script_max(p, PhiMode::Optimize, backend, &opts, &phi_opt)?;
            let fixed = leggett_script_max(p, PhiMode::Fixed(PAPER_PHI), backend, &opts, &phi_opt)?;
            Ok::<_, Error>((b, l, fixed))
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(
        Meta::new("leggett-scan", a.solver.seed, a),
        vec!["V", "d", "eta", "B_max", "L_script", "phi_used", "L_script_fixed_phi", "coexist", "converged"],
    );
    for (p, (b, l, fixed)) in points.iter().zip(rows) {
        t.push(vec![
            json!(p.v),
            json!(p.d),
            json!(p.eta),
            json!(b.b_max),
            json!(l.value),
            json!(l.phi),
            json!(fixed.value),
            json!(b.b_max > 2.0 && l.value <= 0.0),
            json!(b.converged && l.converged),
        ]);
    }
    Ok(t)
}

pub fn entropy(a: &EntropyArgs) -> Result<Table, Error> {
    if a.samples < MIN_ENTROPY_SAMPLES {
        return Err(Error::Config(format!("--samples must be at least {MIN_ENTROPY_SAMPLES}")));
    }
    let points = grid_points(&a.v, &a.d, &Range::single(1.0))?;
    let mut t = Table::new(Meta::new("entropy", a.seed, a), vec!["V", "d", "S", "stderr", "samples", "seed"]);
    for p in points {
        let e = linear_entropy(p.v, p.d, a.samples, a.seed)?;
        t.push(vec![json!(p.v), json!(p.d), json!(e.s), json!(e.stderr), json!(e.samples), json!(e.seed)]);
    }
    Ok(t)
}
