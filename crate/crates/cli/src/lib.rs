//! Command-line driver for the opinion mining pipeline.
//!
//! Stages communicate only through files in the output directory, so each
//! one can be rerun on its own:
//!
//! ```text
//! ingest -> featurize -> train -> classify -> extract -> score -> evaluate
//! ```

pub mod config;
pub mod manifest;
pub mod stages;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{PipelineConfig, CONFIG_ENV};
use crate::stages::CliError;

#[derive(Debug, Parser)]
#[command(name = "opinion-miner", version, about = "Mine feature-opinion pairs from product reviews")]
struct Cli {
    /// Configuration file (`key = value` lines). Falls back to $OPINION_MINER_CONFIG.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(flatten)]
    settings: Settings,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Load the corpus, labels and parses.
    Ingest,
    /// Build feature vectors and rank attributes by information gain.
    Featurize,
    /// Fit the naive Bayes model.
    Train,
    /// Label target sentences as subjective or objective.
    Classify,
    /// Extract feature-opinion triples from subjective sentences.
    Extract,
    /// Score pairs and drop the unreliable ones.
    Score,
    /// Compare extracted pairs with gold pairs and report classifier metrics.
    Evaluate,
    /// Run every stage in order.
    Pipeline,
}

/// Per-run overrides of configuration keys.
#[derive(Debug, Default, Args)]
struct Settings {
    #[arg(long, global = true, value_name = "DIR")]
    corpus: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    labels: Option<String>,
    #[arg(long, global = true, value_name = "DIR")]
    train_corpus: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    train_labels: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    alias_map: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    stop_words: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    positive_seeds: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    negative_seeds: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    negation_words: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    modifier_words: Option<String>,
    #[arg(long, global = true, value_name = "FILE")]
    gold_pairs: Option<String>,
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<String>,
    /// Convergence threshold for hub/authority scoring.
    #[arg(long, global = true)]
    hits_eps: Option<String>,
    #[arg(long, global = true)]
    hits_max_iter: Option<String>,
    /// Reliability threshold below which pairs are dropped.
    #[arg(long, global = true)]
    tau: Option<String>,
    #[arg(long, global = true)]
    variance_floor: Option<String>,
    /// Class reported on a posterior tie (S or O).
    #[arg(long, global = true)]
    tie_class: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    /// Folds for optional cross-validation during `train` (0 = off).
    #[arg(long, global = true)]
    cv_folds: Option<String>,
    /// Characters that end a sentence.
    #[arg(long, global = true)]
    boundary_chars: Option<String>,
    /// Keep R1-secondary pairs when scoring and evaluating.
    #[arg(long, global = true)]
    include_secondary: Option<String>,
}

impl Settings {
    fn overrides(&self) -> Vec<(String, String)> {
        let fields: [(&str, &Option<String>); 21] = [
            ("corpus", &self.corpus),
            ("labels", &self.labels),
            ("train_corpus", &self.train_corpus),
            ("train_labels", &self.train_labels),
            ("alias_map", &self.alias_map),
            ("stop_words", &self.stop_words),
            ("positive_seeds", &self.positive_seeds),
            ("negative_seeds", &self.negative_seeds),
            ("negation_words", &self.negation_words),
            ("modifier_words", &self.modifier_words),
            ("gold_pairs", &self.gold_pairs),
            ("out_dir", &self.out_dir),
            ("hits_eps", &self.hits_eps),
            ("hits_max_iter", &self.hits_max_iter),
            ("tau", &self.tau),
            ("variance_floor", &self.variance_floor),
            ("tie_class", &self.tie_class),
            ("seed", &self.seed),
            ("cv_folds", &self.cv_folds),
            ("boundary_chars", &self.boundary_chars),
            ("include_secondary", &self.include_secondary),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

fn dispatch(command: Command, cfg: &PipelineConfig) -> Result<(), CliError> {
    match command {
        Command::Ingest => stages::ingest(cfg),
        Command::Featurize => stages::featurize(cfg),
        Command::Train => stages::train_model(cfg),
        Command::Classify => stages::classify(cfg),
        Command::Extract => stages::extract(cfg),
        Command::Score => stages::score(cfg),
        Command::Evaluate => stages::evaluate(cfg),
        Command::Pipeline => stages::pipeline(cfg),
    }
}

/// Parses `args` (program name first), runs the requested stage and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let config_file = cli
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let cfg = match PipelineConfig::resolve(config_file.as_deref(), &cli.settings.overrides()) {
        Ok(cfg) => cfg,
        Err(violations) => {
            eprintln!("error: {}", CliError::Config(violations));
            return 1;
        }
    };
    match dispatch(cli.command, &cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
