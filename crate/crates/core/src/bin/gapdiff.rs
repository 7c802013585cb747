use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gapdiff::cli::{run, Command, CommandConfig, GridSpec, Spacing};
use gapdiff::Convention;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Spectrum,
    Levy,
    Exponent,
    Oracle,
    Simulate,
    Refine,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConventionArg {
    Chain,
    Speed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpacingArg {
    Lin,
    Log,
}

/// Lévy measures of inverse local times for finite gap diffusions.
#[derive(Debug, Parser)]
#[command(name = "gapdiff", version)]
struct Args {
    command: Cmd,
    /// Chain or speed-measure JSON; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Main output file (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Destination for counts/summary/representation JSON.
    #[arg(long)]
    side_output: Option<PathBuf>,
    #[arg(long)]
    zmin: Option<f64>,
    #[arg(long)]
    zmax: Option<f64>,
    #[arg(long)]
    zn: Option<usize>,
    #[arg(long)]
    ymin: Option<f64>,
    #[arg(long)]
    ymax: Option<f64>,
    #[arg(long)]
    yn: Option<usize>,
    /// Grid spacing [default: log].
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1000)]
    replicas: usize,
    /// Local-time budget per simulated path.
    #[arg(long, default_value_t = 1.0)]
    budget: f64,
    #[arg(long, value_delimiter = ',', default_value = "25,50,100,200")]
    sizes: Vec<usize>,
    #[arg(long, value_enum, default_value = "chain")]
    convention: ConventionArg,
    /// Truncation of [0, l] for refinement.
    #[arg(long)]
    cutoff: Option<f64>,
}

/// A grid from whichever bounds were given, the rest from `default`.
fn grid(
    min: Option<f64>,
    max: Option<f64>,
    n: Option<usize>,
    spacing: Option<Spacing>,
    default: GridSpec,
) -> Option<GridSpec> {
    if min.is_none() && max.is_none() && n.is_none() && spacing.is_none() {
        return None;
    }
    Some(GridSpec {
        min: min.unwrap_or(default.min),
        max: max.unwrap_or(default.max),
        count: n.unwrap_or(default.count),
        spacing: spacing.unwrap_or(default.spacing),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    // numerical diagnostics (near-degenerate spectra and the like) go to stderr
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let command = match args.command {
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Levy => Command::Levy,
        Cmd::Exponent => Command::Exponent,
        Cmd::Oracle => Command::Oracle,
        Cmd::Simulate => Command::Simulate,
        Cmd::Refine => Command::Refine,
    };
    let spacing = args.spacing.map(|s| match s {
        SpacingArg::Lin => Spacing::Linear,
        SpacingArg::Log => Spacing::Log,
    });
    let mut config = CommandConfig::new(command, args.input);
    config.output = args.output;
    config.side_output = args.side_output;
    config.z_grid = grid(
        args.zmin,
        args.zmax,
        args.zn,
        spacing,
        CommandConfig::default_z_grid(command),
    );
    config.y_grid = grid(
        args.ymin,
        args.ymax,
        args.yn,
        spacing,
        CommandConfig::default_y_grid(command),
    );
    config.seed = args.seed;
    config.replicas = args.replicas;
    config.budget = args.budget;
    config.sizes = args.sizes;
    config.convention = match args.convention {
        ConventionArg::Chain => Convention::ChainUnits,
        ConventionArg::Speed => Convention::SpeedUnits,
    };
    config.cutoff = args.cutoff;

    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    match run(&config, &mut stdout.lock(), &mut stderr.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
