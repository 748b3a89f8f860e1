//! Command-line front end: configuration, stage commands and the full
//! pipeline with its manifest.

pub mod artifact;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use config::{Overrides, RunConfig};
pub use error::CliError;

/// Output file names inside `output-dir`.
pub mod files {
    pub const SCORES: &str = "scores.csv";
    pub const DAILY: &str = "daily_sentiment.csv";
    pub const MARKET: &str = "market.csv";
    pub const CORRELATIONS: &str = "correlations.csv";
    pub const HEATMAP: &str = "heatmap.txt";
    pub const GRANGER: &str = "granger.csv";
    pub const LDA_MODEL: &str = "lda_model.json";
    pub const TOPICS: &str = "topics.json";
    pub const FEATURES: &str = "topic_features.csv";
    pub const CLASSIFIER: &str = "classifier.json";
    pub const EVAL: &str = "eval.json";
    pub const REPORT: &str = "report.txt";
    pub const MANIFEST: &str = "manifest.json";
    pub const SYNTH_DOCUMENTS: &str = "documents.jsonl";
    pub const SYNTH_PRICES: &str = "prices.csv";
    pub const SYNTH_CONFIG: &str = "sentivol.toml";
}

#[derive(Debug, Parser)]
#[command(name = "sentivol", version, about = "Sentiment and topic signals for market volatility")]
pub struct Cli {
    /// TOML configuration file; flags override its keys
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    /// Headlines whose topics announce next-day volatility direction
    TopicDirection,
    /// Tweets whose mood moves against volatility
    Mood,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every document
    Score,
    /// Aggregate document scores per trading day
    Aggregate,
    /// Log returns, rolling volatility and direction labels
    Market,
    /// Sentiment/market correlation grid and text heatmap
    Correlate,
    /// Granger causality tests in both directions
    Granger,
    /// Train the LDA topic model
    TopicsTrain,
    /// Daily topic feature vectors from a trained model
    TopicsInfer,
    /// Train the direction classifier on topic features
    ClassifyTrain,
    /// Evaluate the classifier on the held-out split
    ClassifyEval,
    /// Run every stage and write a report and manifest
    Pipeline,
    /// Write a synthetic corpus, price file and config
    Synth {
        #[arg(long, value_enum, default_value_t = SynthKind::TopicDirection)]
        kind: SynthKind,
        /// Number of trading days
        #[arg(long)]
        days: Option<usize>,
    },
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.config.as_deref(), cli.overrides)?;
    let artifacts = match cli.command {
        Command::Score => commands::score(&cfg)?.artifacts,
        Command::Aggregate => commands::aggregate(&cfg)?.artifacts,
        Command::Market => commands::market(&cfg)?.artifacts,
        Command::Correlate => commands::correlate(&cfg)?.artifacts,
        Command::Granger => commands::granger(&cfg)?.artifacts,
        Command::TopicsTrain => commands::topics_train(&cfg)?.artifacts,
        Command::TopicsInfer => commands::topics_infer(&cfg)?.artifacts,
        Command::ClassifyTrain => commands::classify_train(&cfg)?.artifacts,
        Command::ClassifyEval => commands::classify_eval(&cfg)?.artifacts,
        Command::Pipeline => commands::pipeline(&cfg)?,
        Command::Synth { kind, days } => commands::synth(&cfg, kind, days)?,
    };
    for a in &artifacts {
        println!("{}\t{}", a.stage, a.path.display());
    }
    Ok(())
}
