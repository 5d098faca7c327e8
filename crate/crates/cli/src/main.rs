use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use localsgd_cli::commands::{self, Overrides};
use localsgd_cli::{CliError, Experiment};
use localsgd_core::bounds::{
    bound_fixed_interval, bound_general, bound_osa_leading, bound_theorem1, BoundInputs,
};
use localsgd_core::{beta_min, CommSchedule};

#[derive(Parser)]
#[command(name = "localsgd", version, about = "Local SGD simulator and bound calculator")]
struct Cli {
    /// Worker threads for replications (default: all cores).
    #[arg(long, global = true, env = "LOCALSGD_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every strategy of a config; writes per-strategy traces and a summary.
    Run(ExperimentArgs),
    /// Speed-up curves over a list of worker counts.
    Speedup(ExperimentArgs),
    /// Evaluate a convergence bound.
    Bound(BoundArgs),
    /// Validate a LIBSVM file and print its row count and dimension.
    ParseData {
        path: PathBuf,
        /// Force the dimension (indices above it are rejected).
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replications: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Theorem1,
    General,
    Fixed,
    Osa,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Growing,
    Fixed,
    Synchronized,
    OneShot,
}

#[derive(Args)]
struct BoundArgs {
    kind: BoundKind,
    #[arg(long)]
    mu: f64,
    /// Smoothness; defaults to mu.
    #[arg(long = "L")]
    smoothness: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    c: f64,
    #[arg(long)]
    sigma2: f64,
    #[arg(long = "N")]
    workers: usize,
    #[arg(long = "T")]
    horizon: usize,
    /// Communication rounds (theorem1, growing schedules).
    #[arg(long = "R")]
    rounds: Option<usize>,
    /// Step offset; defaults to the smallest value the theorem admits.
    #[arg(long)]
    beta: Option<f64>,
    /// Initial gap f(x0) - f*.
    #[arg(long, default_value_t = 0.0)]
    xi0: f64,
    /// Communication interval (fixed bound, fixed schedules).
    #[arg(long = "H")]
    interval: Option<usize>,
    /// Schedule for `general`.
    #[arg(long, value_enum, default_value = "growing")]
    schedule: ScheduleArg,
    /// Explicit communication times for `general` (overrides --schedule).
    #[arg(long, value_delimiter = ',')]
    taus: Option<Vec<usize>>,
}

/// Six significant figures, fixed notation where it is readable.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("--{flag} is required")))
}

fn bound(a: &BoundArgs) -> Result<(), CliError> {
    let cfg = |e: localsgd_core::Error| CliError::Config(e.to_string());
    let smoothness = a.smoothness.unwrap_or(a.mu);
    let schedule = match (a.kind, &a.taus) {
        (BoundKind::General, Some(taus)) => Some(CommSchedule::from_taus(taus.clone()).map_err(cfg)?),
        (BoundKind::General, None) => Some(
            match a.schedule {
                ScheduleArg::Growing => CommSchedule::growing(a.horizon, need(a.rounds, "R")?),
                ScheduleArg::Fixed => CommSchedule::fixed(a.horizon, need(a.interval, "H")?),
                ScheduleArg::Synchronized => CommSchedule::synchronized(a.horizon),
                ScheduleArg::OneShot => CommSchedule::one_shot(a.horizon),
            }
            .map_err(cfg)?,
        ),
        _ => None,
    };
    let rounds = match (a.kind, &schedule) {
        (_, Some(s)) => s.rounds(),
        (BoundKind::Theorem1, _) => need(a.rounds, "R")?,
        (BoundKind::Fixed, _) => a.horizon.div_ceil(need(a.interval, "H")?.max(1)),
        _ => a.rounds.unwrap_or(1),
    };
    let beta = match (a.beta, a.kind) {
        (Some(b), _) => b,
        (None, BoundKind::Osa) => 1.0,
        (None, _) => {
            if a.mu <= 0.0 {
                return Err(CliError::Config("mu must be > 0".into()));
            }
            beta_min(smoothness / a.mu, a.c, a.workers, a.horizon, rounds.max(1)).map_err(cfg)?
        }
    };
    let b = BoundInputs {
        mu: a.mu,
        smoothness,
        c: a.c,
        sigma2: a.sigma2,
        workers: a.workers,
        horizon: a.horizon,
        rounds,
        beta,
        xi0: a.xi0,
    };
    match a.kind {
        BoundKind::Theorem1 => println!("theorem1: {}", sig6(bound_theorem1(&b).map_err(cfg)?)),
        BoundKind::General => {
            let g = bound_general(&b, schedule.as_ref().expect("built above")).map_err(cfg)?;
            println!("general: {}", sig6(g.value));
            println!(
                "condition: {}",
                if g.condition_holds { "OK" } else { "VIOLATED" }
            );
        }
        BoundKind::Fixed => {
            let h = need(a.interval, "H")?;
            println!("fixed: {}", sig6(bound_fixed_interval(&b, h).map_err(cfg)?));
        }
        BoundKind::Osa => println!("osa: {}", sig6(bound_osa_leading(&b).map_err(cfg)?)),
    }
    Ok(())
}

fn load(args: &ExperimentArgs) -> Result<Experiment, CliError> {
    let mut exp = Experiment::load(&args.config)?;
    Overrides {
        seed: args.seed,
        replications: args.replications,
        output: args.output.clone(),
    }
    .apply(&mut exp);
    if exp.config.replications < 1 {
        return Err(CliError::Config("replications must be >= 1".into()));
    }
    Ok(exp)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Run(args) => commands::run(&load(&args)?).map(drop),
        Command::Speedup(args) => commands::speedup(&load(&args)?).map(drop),
        Command::Bound(args) => bound(&args),
        Command::ParseData { path, dim } => {
            let (m, d) = commands::parse_data(&path, dim)?;
            println!("M={m} d={d}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
