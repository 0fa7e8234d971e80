use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use lgae_cli::config::config_from_text_with_overrides;
use lgae_cli::experiment::run_experiment;
use lgae_cli::reference::{compare_against_reference, parse_reference};
use lgae_cli::report::{load_report, render_report, OutputFormat};

#[derive(Parser)]
#[command(
    name = "lgae",
    version,
    about = "Graph autoencoder benchmarks: linear and GCN encoders, link prediction and node clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a key-value config file
    Run(Box<RunArgs>),
    /// Compare report metrics against a reference file of expected values
    Check(CheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file (flat `key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Parallel repetitions
    #[arg(long)]
    jobs: Option<usize>,
    /// Output format
    #[arg(long, value_name = "json|csv|table")]
    format: Option<String>,
    /// Write the rendered report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override any config key, e.g. --set epochs=30 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// link-prediction | clustering
    #[arg(long)]
    task: Option<String>,
    /// Dataset name (drives per-dataset learning-rate defaults)
    #[arg(long)]
    dataset: Option<String>,
    /// linear | gcn
    #[arg(long)]
    encoder: Option<String>,
    /// Number of GCN layers (>= 2)
    #[arg(long)]
    depth: Option<usize>,
    /// Variational model (Gaussian posterior + KL)
    #[arg(long)]
    variational: Option<bool>,
    /// Feed node features as the input layer
    #[arg(long)]
    use_features: Option<bool>,
    /// Latent dimension d
    #[arg(long)]
    embedding_dim: Option<usize>,
    /// Full-batch gradient steps
    #[arg(long)]
    epochs: Option<usize>,
    /// Adam learning rate (default: per-dataset table)
    #[arg(long)]
    learning_rate: Option<f64>,
    /// Independent repetitions to aggregate
    #[arg(long)]
    repetitions: Option<usize>,
    /// Seed from which every repetition stream derives
    #[arg(long)]
    master_seed: Option<u64>,
    /// Fraction of edges held out for validation
    #[arg(long)]
    val_frac: Option<f64>,
    /// Fraction of edges held out for testing
    #[arg(long)]
    test_frac: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    /// Report JSON produced by `run` (repeatable)
    #[arg(long, required = true)]
    report: Vec<PathBuf>,
    /// Reference file: `key mean tolerance` lines
    #[arg(long)]
    reference: PathBuf,
}

fn collect_overrides(args: &RunArgs) -> Result<Vec<(String, String)>> {
    let mut overrides: Vec<(String, String)> = Vec::new();
    for set in &args.sets {
        let (k, v) = set
            .split_once('=')
            .with_context(|| format!("--set wants KEY=VALUE, got `{set}`"))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    macro_rules! push_flag {
        ($field:expr, $key:literal) => {
            if let Some(v) = &$field {
                overrides.push(($key.to_string(), v.to_string()));
            }
        };
    }
    push_flag!(args.task, "task");
    push_flag!(args.dataset, "dataset");
    push_flag!(args.encoder, "encoder");
    push_flag!(args.depth, "depth");
    push_flag!(args.variational, "variational");
    push_flag!(args.use_features, "use_features");
    push_flag!(args.embedding_dim, "embedding_dim");
    push_flag!(args.epochs, "epochs");
    push_flag!(args.learning_rate, "learning_rate");
    push_flag!(args.repetitions, "repetitions");
    push_flag!(args.master_seed, "master_seed");
    push_flag!(args.val_frac, "val_frac");
    push_flag!(args.test_frac, "test_frac");
    if let Some(jobs) = args.jobs {
        overrides.push(("jobs".to_string(), jobs.to_string()));
    }
    Ok(overrides)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading config {}", args.config.display()))?;
    let overrides = collect_overrides(&args)?;
    let cfg = config_from_text_with_overrides(&text, &overrides)?;

    let format = match &args.format {
        Some(f) => OutputFormat::parse(f)?,
        None => OutputFormat::Json,
    };
    let report = run_experiment(&cfg)?;
    let rendered = render_report(&report, format)?;

    let out_path = args.out.clone().or(cfg.output_path.clone());
    match out_path {
        Some(path) => {
            std::fs::write(&path, rendered)
                .with_context(|| format!("writing report {}", path.display()))?;
            eprintln!("report written to {}", path.display());
            // a short human summary on stdout either way
            print!("{}", render_report(&report, OutputFormat::Table)?);
        }
        None => print!("{rendered}"),
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<bool> {
    let reports = args
        .report
        .iter()
        .map(|p| load_report(p))
        .collect::<Result<Vec<_>>>()?;
    let text = std::fs::read_to_string(&args.reference)
        .with_context(|| format!("reading reference {}", args.reference.display()))?;
    let entries = parse_reference(&text)?;
    let verdicts = compare_against_reference(&reports, &entries)?;
    let mut all_pass = true;
    for v in &verdicts {
        println!(
            "{} {}: observed {:.2}, expected {:.2} ± {:.2}",
            if v.pass { "PASS" } else { "FAIL" },
            v.key,
            v.observed,
            v.expected,
            v.tolerance
        );
        all_pass &= v.pass;
    }
    Ok(all_pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(*args).map(|()| true),
        Command::Check(args) => cmd_check(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
