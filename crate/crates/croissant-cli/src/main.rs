//! `croissant`: render two-panel comparison stimuli, audit how geometric
//! reader strategies fare on them, and run the synthetic experiment end to
//! end. Exit codes: 0 on success, 2 for unusable flags or configuration,
//! 1 for runtime failures (I/O, refusing to overwrite, degenerate fits).

use std::error::Error as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use croissant::config::ToolConfig;
use croissant::oracle::{correctness_matrix, matrix_to_csv, InterEdgeMode, Strategy};
use croissant::scene::{Position, Scaling, StimulusSpec, VisKind};
use croissant::sim::{
    fit_logistic, simulate, trials_from_csv, trials_to_csv, ModelSpec, Observation, Referents,
    SimConfig,
};
use croissant::stimuli::{
    generate_factorial, generate_single, FactorialCell, SdPair, VisCondition, DEFAULT_MU,
    DEFAULT_THRESHOLD,
};
use croissant::{Error, Result};

#[derive(Parser)]
#[command(name = "croissant", version, about = "Two-panel distribution stimuli, reader-strategy audits, and a synthetic comparison experiment")]
struct Cli {
    /// TOML file overriding layout, style, oracle, and mixture defaults.
    #[arg(long, value_name = "PATH", global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the full stimulus factorial plus its manifest.
    Generate(GenerateArgs),
    /// Render one two-panel stimulus.
    Chart(ChartArgs),
    /// Tabulate every reader strategy against every factorial stimulus.
    Matrix(MatrixArgs),
    /// Simulate participants answering the factorial task.
    Simulate(SimulateArgs),
    /// Fit the logistic accuracy model to a trial table.
    Fit(FitArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Directory for the SVGs and manifest.json (created if missing).
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Restrict the batch to one chart condition
    /// (pdf, qdp-20, croissant-10, croissant-20).
    #[arg(long, value_name = "CONDITION")]
    vis: Option<String>,
}

#[derive(Args)]
struct ChartArgs {
    /// Chart kind: pdf, qdp, or croissant.
    #[arg(long)]
    vis: String,
    /// Quantile count; required for qdp and croissant, invalid for pdf.
    #[arg(long)]
    quantiles: Option<u32>,
    /// equal-area or equal-height.
    #[arg(long, default_value = "equal-area")]
    scaling: String,
    /// Narrow and wide standard deviations, e.g. 4.5,5
    #[arg(long, value_name = "NARROW,WIDE")]
    sigmas: String,
    /// Which panel holds the narrower distribution.
    #[arg(long, default_value = "narrow-top")]
    position: String,
    /// Shared mean of both panels.
    #[arg(long, default_value_t = DEFAULT_MU)]
    mu: f64,
    /// Comparison threshold (must exceed the mean).
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: f64,
    /// Output SVG path.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Replace the output file if it already exists.
    #[arg(long)]
    overwrite: bool,
}

#[derive(Args)]
struct MatrixArgs {
    /// Comma-separated strategies (default: all eight).
    #[arg(long, value_name = "LIST")]
    strategies: Option<String>,
    /// Tie threshold on the relative evidence difference.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Bisected-slice handling: geometric or exact-mass.
    #[arg(long, value_name = "MODE")]
    inter_edge: Option<String>,
    /// CSV destination (default: standard output).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Participants per between-subject cell.
    #[arg(long, default_value_t = 101)]
    n_per_cell: u32,
    /// RNG seed; fixing it fixes the whole trial table.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Tie threshold on the relative evidence difference.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Bisected-slice handling: geometric or exact-mass.
    #[arg(long, value_name = "MODE")]
    inter_edge: Option<String>,
    /// Trial CSV destination (default: standard output).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Trial CSV produced by the simulate subcommand.
    #[arg(long, value_name = "FILE")]
    trials: PathBuf,
    /// Chart condition absorbed into the intercept.
    #[arg(long, default_value = "pdf", value_name = "CONDITION")]
    referent_vis: String,
    /// Scaling absorbed into the intercept.
    #[arg(long, default_value = "equal-height", value_name = "SCALING")]
    referent_scaling: String,
    /// Sigma pair absorbed into the intercept.
    #[arg(long, default_value = "2v5", value_name = "PAIR")]
    referent_sd: String,
    /// Position absorbed into the intercept.
    #[arg(long, default_value = "narrow-top", value_name = "POSITION")]
    referent_position: String,
    /// JSON report destination (default: standard output).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = err.source();
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for errors the caller can fix by changing flags or config, 1 for
/// failures of the run itself.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidSigma(_)
        | Error::InvalidMu(_)
        | Error::ProbabilityOutOfRange(_)
        | Error::TooFewQuantiles { .. }
        | Error::MeanMismatch { .. }
        | Error::ThresholdNotAboveMean { .. }
        | Error::InvalidStimulus(_)
        | Error::InvalidConfig(_)
        | Error::NotAfforded { .. } => 2,
        Error::WouldOverwrite(_) | Error::Io { .. } | Error::InvalidTrials(_)
        | Error::FitFailed(_) => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = ToolConfig::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Generate(args) => generate(args, &config),
        Command::Chart(args) => chart(args, &config),
        Command::Matrix(args) => matrix(args, &config),
        Command::Simulate(args) => run_simulation(args, &config),
        Command::Fit(args) => fit(args),
    }
}

fn generate(args: GenerateArgs, config: &ToolConfig) -> Result<()> {
    let only = args.vis.as_deref().map(VisCondition::parse).transpose()?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::io("creating output directory", &args.out, e))?;
    let manifest = generate_factorial(&args.out, &config.layout, &config.style, only)?;
    println!(
        "wrote {} stimuli and manifest.json to {}",
        manifest.entries.len(),
        args.out.display()
    );
    Ok(())
}

fn chart(args: ChartArgs, config: &ToolConfig) -> Result<()> {
    let (narrow, wide) = args
        .sigmas
        .split_once(',')
        .ok_or_else(|| sigmas_err(&args.sigmas))?;
    let spec = StimulusSpec {
        vis: VisKind::parse(&args.vis)?,
        quantiles: args.quantiles,
        scaling: Scaling::parse(&args.scaling)?,
        sigma_narrow: narrow.trim().parse().map_err(|_| sigmas_err(&args.sigmas))?,
        sigma_wide: wide.trim().parse().map_err(|_| sigmas_err(&args.sigmas))?,
        position: Position::parse(&args.position)?,
        mu: args.mu,
        threshold: args.threshold,
    };
    generate_single(&spec, &config.layout, &config.style, &args.out, args.overwrite)?;
    // One-line record of what was drawn, for whoever is scripting this.
    println!("{}", serde_json::to_string(&spec).expect("spec serializes"));
    Ok(())
}

fn sigmas_err(got: &str) -> Error {
    Error::InvalidConfig(format!(
        "--sigmas expects two comma-separated numbers like 4.5,5 — got {got:?}"
    ))
}

fn matrix(args: MatrixArgs, config: &ToolConfig) -> Result<()> {
    let strategies = match args.strategies.as_deref() {
        None => Strategy::ALL.to_vec(),
        Some(list) => list
            .split(',')
            .map(|s| Strategy::parse(s.trim()))
            .collect::<Result<Vec<_>>>()?,
    };
    let mut oracle = config.oracle;
    if let Some(epsilon) = args.epsilon {
        oracle.epsilon = epsilon;
    }
    if let Some(mode) = args.inter_edge.as_deref() {
        oracle.inter_edge_mode = InterEdgeMode::parse(mode)?;
    }
    let specs: Vec<StimulusSpec> = FactorialCell::all().iter().map(|c| c.spec()).collect();
    let rows = correctness_matrix(&strategies, &specs, &config.layout, &oracle)?;
    write_text(args.out.as_deref(), &matrix_to_csv(&rows))
}

fn run_simulation(args: SimulateArgs, config: &ToolConfig) -> Result<()> {
    let mut oracle = config.oracle;
    if let Some(epsilon) = args.epsilon {
        oracle.epsilon = epsilon;
    }
    if let Some(mode) = args.inter_edge.as_deref() {
        oracle.inter_edge_mode = InterEdgeMode::parse(mode)?;
    }
    let sim = SimConfig {
        n_per_cell: args.n_per_cell,
        seed: args.seed,
        mixture: config.mixture.clone(),
        oracle,
        layout: config.layout.clone(),
    };
    let records = simulate(&sim)?;
    write_text(args.out.as_deref(), &trials_to_csv(&records))
}

fn fit(args: FitArgs) -> Result<()> {
    // Flags first, filesystem second, so bad flags always read as usage
    // errors no matter what is on disk.
    let spec = ModelSpec {
        referents: Referents {
            vis: VisCondition::parse(&args.referent_vis)?,
            scaling: Scaling::parse(&args.referent_scaling)?,
            sd_pair: SdPair::parse(&args.referent_sd)?,
            position: Position::parse(&args.referent_position)?,
        },
    };
    let text = std::fs::read_to_string(&args.trials)
        .map_err(|e| Error::io("reading trials", &args.trials, e))?;
    let records = trials_from_csv(&text)?;
    let observations: Vec<Observation> = records.iter().map(Observation::from).collect();
    let report = fit_logistic(&observations, &spec)?;
    let json = serde_json::to_string_pretty(&report).expect("fit serializes");
    write_text(args.out.as_deref(), &format!("{json}\n"))
}

fn write_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Error::io("writing output", path, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
