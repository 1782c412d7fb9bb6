//! `semweight`: train, apply and compare thesaurus-weighted text classifiers.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use semweight::ErrorKind;

use crate::config::{FormatArg, RunArgs};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] semweight::Error),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("internal: {0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        let kind = match self {
            CliError::Config(_) => ErrorKind::Config,
            CliError::Core(e) => e.kind(),
            CliError::Io { .. } => ErrorKind::Data,
            CliError::Internal(_) => ErrorKind::Internal,
        };
        match kind {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Internal => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "semweight", version, about)]
struct Cli {
    /// Worker threads; 1 gives a fully serial run. Defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a pipeline on a labeled corpus and write the model file.
    Train {
        #[command(flatten)]
        run: RunArgs,
        /// Model file to write.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Training log; defaults to the model path with a `.log` extension.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Classify unlabeled documents (jsonl of {id, text}).
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Output jsonl; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score a model on a labeled test set.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: FormatArg,
        /// Directory for report.txt and report.json.
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train and evaluate tf-idf, tf-idf + extension and the proposed
    /// weighting on one shared split.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        /// Directory for comparison.txt and comparison.json.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Run only the tf-idf configuration (no thesaurus needed).
        #[arg(long)]
        baseline_only: bool,
    },
    /// Write a seeded synthetic corpus, thesaurus and stop-word list.
    MakeToyData {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability that a training marker is written as its synonym.
        #[arg(long)]
        train_substitution: Option<f64>,
        /// Fraction of test markers written as synonyms.
        #[arg(long)]
        test_substitution: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(e.to_string()))?;
    }
    match cli.command {
        Command::Train { run, model, log } => commands::train(&run, model, log),
        Command::Predict {
            model,
            input,
            output,
        } => commands::predict(&model, &input, output.as_deref()),
        Command::Evaluate {
            model,
            input,
            format,
            out_dir,
        } => commands::evaluate(&model, &input, format, &out_dir),
        Command::Compare {
            run,
            out_dir,
            baseline_only,
        } => commands::compare(&run, out_dir, baseline_only),
        Command::MakeToyData {
            out_dir,
            seed,
            train_substitution,
            test_substitution,
        } => commands::make_toy_data(&out_dir, seed, train_substitution, test_substitution),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
