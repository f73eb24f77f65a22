//! Argument parsing for the `psslab` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pss_core::forms::ZcSign;
use pss_core::pss::VerifyMode;
use pss_core::symcore::DEFAULT_SEED;

use crate::commands::{self, ConfigSource, MetricInput, Source, DEFAULT_ORDER};
use crate::error::{LabError, Result};

#[derive(Parser, Debug)]
#[command(name = "psslab", version, about = "Pseudospherical-surface verifier and Camassa-Holm geometry lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the structure equations of a triad modulo a PDE.
    Verify(VerifyCmd),
    /// Check the zero-curvature condition of a matrix one-form modulo a PDE.
    ZeroCurv(ZeroCurvCmd),
    /// Integrate the Camassa-Holm equation from a config or preset.
    Solve(SolveCmd),
    /// Metric, degenerate locus, discs and curvature of a trajectory.
    Metric(MetricCmd),
    /// Consolidate a run directory into report.json and report.txt.
    Report(ReportCmd),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Catalog entry: sg, ch, sg-akns, sg-akns-printed, ch-akns.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Triad or matrix definition file.
    #[arg(long)]
    pub triad: Option<PathBuf>,
}

impl SourceArgs {
    fn source(&self) -> Source {
        match (&self.catalog, &self.triad) {
            (Some(c), _) => Source::Catalog(c.clone()),
            (None, Some(p)) => Source::File(p.clone()),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Auto,
    Multiplier,
    Substitution,
}

#[derive(Args, Debug)]
pub struct VerifyCmd {
    #[command(flatten)]
    pub source: SourceArgs,
    /// sg, ch, or a PDE file; defaults to the catalog entry's equation.
    #[arg(long)]
    pub pde: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    pub mode: ModeArg,
    /// Scale a coefficient before verifying, e.g. w3*2 or w1.dt*2.
    #[arg(long)]
    pub perturb: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "psslab-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ZeroCurvCmd {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub pde: Option<String>,
    /// Sign of the D_x T term.
    #[arg(long, default_value = "-", allow_hyphen_values = true)]
    pub sign: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value = "psslab-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["config", "preset"]))]
pub struct SolveCmd {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Bundled configuration: gaussian, gaussian_fine, steep, cosine or zero.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, default_value = "psslab-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["traj", "exact_sg"]))]
pub struct MetricCmd {
    /// Trajectory CSV written by `solve`.
    #[arg(long)]
    pub traj: Option<PathBuf>,
    /// Analyse the exact sine-Gordon kink instead, e.g. a=1.
    #[arg(long)]
    pub exact_sg: Option<String>,
    /// Spectral parameter; a comma-separated list runs a sweep.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub lambda: Vec<f64>,
    /// Absolute |W| threshold; defaults to 1e-3 max|W|.
    #[arg(long)]
    pub wmin: Option<f64>,
    /// Finite-difference order: 2, 4, 6 or 8.
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, default_value = "psslab-out")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ReportCmd {
    /// Run directory containing manifest.json.
    pub dir: PathBuf,
}

fn verify_mode(m: ModeArg) -> VerifyMode {
    match m {
        ModeArg::Auto => VerifyMode::Auto,
        ModeArg::Multiplier => VerifyMode::Multiplier,
        ModeArg::Substitution => VerifyMode::Substitution,
    }
}

pub fn dispatch(cli: Cli, argv: Vec<String>) -> Result<i32> {
    match cli.command {
        Command::Verify(c) => commands::verify(
            &commands::VerifyArgs {
                source: c.source.source(),
                pde: c.pde,
                mode: verify_mode(c.mode),
                perturb: c.perturb,
                seed: c.seed,
                out: c.out,
            },
            argv,
        ),
        Command::ZeroCurv(c) => {
            let sign = ZcSign::from_symbol(&c.sign)
                .ok_or_else(|| LabError::invalid(format!("--sign must be + or -, got `{}`", c.sign)))?;
            commands::zero_curv(
                &commands::ZeroCurvArgs { source: c.source.source(), pde: c.pde, sign, seed: c.seed, out: c.out },
                argv,
            )
        }
        Command::Solve(c) => {
            let config = match (c.config, c.preset) {
                (Some(p), _) => ConfigSource::File(p),
                (None, Some(n)) => ConfigSource::Preset(n),
                (None, None) => unreachable!("clap enforces one input"),
            };
            commands::solve(&commands::SolveArgs { config, out: c.out }, argv)
        }
        Command::Metric(c) => {
            let input = match (c.traj, c.exact_sg) {
                (Some(p), _) => MetricInput::Trajectory(p),
                (None, Some(s)) => MetricInput::ExactSg { a: commands::parse_exact_sg(&s)? },
                (None, None) => unreachable!("clap enforces one input"),
            };
            commands::metric(
                &commands::MetricArgs { input, lambdas: c.lambda, w_min: c.wmin, order: c.order, out: c.out },
                argv,
            )
        }
        Command::Report(c) => commands::report(&c.dir),
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("psslab".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
