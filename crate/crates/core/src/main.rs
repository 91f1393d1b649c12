use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ctial::data::write_dataset;
use ctial::harness::{generate_synthetic_corpus, report, run_suite, CorpusConfig, ExperimentConfig};
use ctial::Dataset64;

#[derive(Parser)]
#[command(name = "ctial", version, about = "Cross-task active learning experiments for emotion recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic corpus as features.csv, labels.csv and schema.json.
    Generate {
        /// Corpus parameters (JSON); defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "corpus")]
        out: PathBuf,
        /// Overrides the corpus seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every configured strategy and seed.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Runs a single seed instead of the configured list.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute summary.json from a results directory's curves.csv.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

fn generate(config: Option<&Path>, out: &Path, seed: Option<u64>) -> ctial::Result<()> {
    let mut corpus: CorpusConfig = match config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)?,
        None => CorpusConfig::default(),
    };
    if let Some(s) = seed {
        corpus.seed = s;
    }
    let ds: Dataset64 = generate_synthetic_corpus(&corpus)?;
    fs::create_dir_all(out)?;
    let schema = write_dataset(&ds, &out.join("features.csv"), &out.join("labels.csv"))?;
    fs::write(out.join("schema.json"), serde_json::to_string_pretty(&schema)?)?;
    println!("wrote {} samples to {}", ds.n_rows(), out.display());
    Ok(())
}

fn run(config: &Path, out: Option<PathBuf>, seed: Option<u64>, jobs: Option<usize>) -> ctial::Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(dir) = out {
        cfg.output_dir = dir;
    }
    if let Some(s) = seed {
        cfg.seeds = vec![s];
    }
    let outcome = run_suite(&cfg, jobs)?;
    println!("{} curves written to {}", outcome.curves.len(), outcome.curves_path.display());
    println!("summary written to {}", outcome.summary_path.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate { config, out, seed } => generate(config.as_deref(), &out, seed),
        Command::Run { config, out, seed, jobs } => run(&config, out, seed, jobs),
        Command::Report { out } => report(&out).map(|s| {
            println!("summary of {} metrics written to {}", s.metrics.len(), out.display());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
