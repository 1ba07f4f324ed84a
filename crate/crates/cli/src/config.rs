//! Pipeline configuration: a `key = value` file, overridden by flags.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use opinion_miner::classifier::NbParams;
use opinion_miner::corpus::{Class, IngestOptions, Segmenter};
use opinion_miner::deps::AliasMap;
use opinion_miner::lexicon::{bundled, Lexicons, WordList};
use opinion_miner::reliability::{HitsParams, DEFAULT_EPSILON, DEFAULT_MAX_ITER, DEFAULT_THRESHOLD};
use sha2::{Digest, Sha256};

/// Consulted when no `--config` flag is given.
pub const CONFIG_ENV: &str = "OPINION_MINER_CONFIG";

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub train_corpus: Option<PathBuf>,
    pub train_labels: Option<PathBuf>,
    pub alias_map: Option<PathBuf>,
    pub stop_words: Option<PathBuf>,
    pub positive_seeds: Option<PathBuf>,
    pub negative_seeds: Option<PathBuf>,
    pub negation_words: Option<PathBuf>,
    pub modifier_words: Option<PathBuf>,
    pub gold_pairs: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub hits_eps: f64,
    pub hits_max_iter: usize,
    pub tau: f64,
    pub variance_floor: f64,
    pub tie_class: Class,
    pub seed: u64,
    pub cv_folds: usize,
    pub boundary_chars: String,
    pub include_secondary: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let nb = NbParams::default();
        PipelineConfig {
            corpus: None,
            labels: None,
            train_corpus: None,
            train_labels: None,
            alias_map: None,
            stop_words: None,
            positive_seeds: None,
            negative_seeds: None,
            negation_words: None,
            modifier_words: None,
            gold_pairs: None,
            out_dir: PathBuf::from("out"),
            hits_eps: DEFAULT_EPSILON,
            hits_max_iter: DEFAULT_MAX_ITER,
            tau: DEFAULT_THRESHOLD,
            variance_floor: nb.variance_floor,
            tie_class: nb.tie_class,
            seed: 0,
            cv_folds: 0,
            boundary_chars: ".!?".into(),
            include_secondary: true,
        }
    }
}

/// Splits a config file into `(key, value, line)` entries. Blank lines and
/// `#` comments are skipped.
pub fn parse_entries(text: &str, source: &Path) -> Result<Vec<(String, String, usize)>, Vec<String>> {
    let mut entries = Vec::new();
    let mut violations = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => {
                entries.push((k.trim().to_string(), v.trim().to_string(), i + 1))
            }
            _ => violations.push(format!("{}:{}: expected key = value", source.display(), i + 1)),
        }
    }
    if violations.is_empty() {
        Ok(entries)
    } else {
        Err(violations)
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

impl PipelineConfig {
    /// Sets one key from its textual value. Relative paths are joined onto
    /// `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<(), String> {
        let path = || Some(base.join(value));
        let number_err = |what: &str| format!("{key}: `{value}` is not {what}");
        match key {
            "corpus" => self.corpus = path(),
            "labels" => self.labels = path(),
            "train_corpus" => self.train_corpus = path(),
            "train_labels" => self.train_labels = path(),
            "alias_map" => self.alias_map = path(),
            "stop_words" => self.stop_words = path(),
            "positive_seeds" => self.positive_seeds = path(),
            "negative_seeds" => self.negative_seeds = path(),
            "negation_words" => self.negation_words = path(),
            "modifier_words" => self.modifier_words = path(),
            "gold_pairs" => self.gold_pairs = path(),
            "out_dir" => self.out_dir = base.join(value),
            "hits_eps" => self.hits_eps = value.parse().map_err(|_| number_err("a number"))?,
            "hits_max_iter" => self.hits_max_iter = value.parse().map_err(|_| number_err("a count"))?,
            "tau" => self.tau = value.parse().map_err(|_| number_err("a number"))?,
            "variance_floor" => self.variance_floor = value.parse().map_err(|_| number_err("a number"))?,
            "tie_class" => self.tie_class = value.parse().map_err(|e| format!("tie_class: {e}"))?,
            "seed" => self.seed = value.parse().map_err(|_| number_err("an unsigned integer"))?,
            "cv_folds" => self.cv_folds = value.parse().map_err(|_| number_err("a count"))?,
            "boundary_chars" => self.boundary_chars = value.to_string(),
            "include_secondary" => {
                self.include_secondary = parse_bool(value).ok_or_else(|| number_err("true or false"))?
            }
            _ => return Err(format!("unknown configuration key `{key}`")),
        }
        Ok(())
    }

    /// Builds the effective configuration: defaults, then the config file,
    /// then `overrides` (resolved against the working directory).
    pub fn resolve(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self, Vec<String>> {
        let mut cfg = PipelineConfig::default();
        let mut violations = Vec::new();
        if let Some(file) = file {
            let text = match fs::read_to_string(file) {
                Ok(t) => t,
                Err(e) => return Err(vec![format!("cannot read config {}: {e}", file.display())]),
            };
            let base = file.parent().unwrap_or(Path::new("")).to_path_buf();
            for (k, v, line) in parse_entries(&text, file)? {
                if let Err(e) = cfg.set(&k, &v, &base) {
                    violations.push(format!("{}:{line}: {e}", file.display()));
                }
            }
        }
        for (k, v) in overrides {
            if let Err(e) = cfg.set(k, v, Path::new("")) {
                violations.push(e);
            }
        }
        violations.extend(cfg.validate());
        if violations.is_empty() {
            Ok(cfg)
        } else {
            Err(violations)
        }
    }

    /// Range checks and existence of every referenced input path.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.hits_eps > 0.0 && self.hits_eps.is_finite()) {
            v.push(format!("hits_eps must be > 0, got {}", self.hits_eps));
        }
        if self.hits_max_iter == 0 {
            v.push("hits_max_iter must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.tau) {
            v.push(format!("tau must lie in [0, 1], got {}", self.tau));
        }
        if !(self.variance_floor > 0.0 && self.variance_floor.is_finite()) {
            v.push(format!("variance_floor must be > 0, got {}", self.variance_floor));
        }
        if self.cv_folds == 1 {
            v.push("cv_folds must be 0 (off) or at least 2".to_string());
        }
        if self.boundary_chars.is_empty() {
            v.push("boundary_chars must not be empty".to_string());
        }
        let inputs = [
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
        ];
        for (key, path) in inputs {
            if let Some(p) = path {
                if !p.exists() {
                    v.push(format!("{key}: {} does not exist", p.display()));
                }
            }
        }
        v
    }

    /// One `key=value` line per setting in a fixed order.
    pub fn canonical(&self) -> String {
        let opt = |p: &Option<PathBuf>| p.as_ref().map_or(String::new(), |p| p.display().to_string());
        let mut out = String::new();
        let rows: [(&str, String); 21] = [
            ("corpus", opt(&self.corpus)),
            ("labels", opt(&self.labels)),
            ("train_corpus", opt(&self.train_corpus)),
            ("train_labels", opt(&self.train_labels)),
            ("alias_map", opt(&self.alias_map)),
            ("stop_words", opt(&self.stop_words)),
            ("positive_seeds", opt(&self.positive_seeds)),
            ("negative_seeds", opt(&self.negative_seeds)),
            ("negation_words", opt(&self.negation_words)),
            ("modifier_words", opt(&self.modifier_words)),
            ("gold_pairs", opt(&self.gold_pairs)),
            ("out_dir", self.out_dir.display().to_string()),
            ("hits_eps", self.hits_eps.to_string()),
            ("hits_max_iter", self.hits_max_iter.to_string()),
            ("tau", self.tau.to_string()),
            ("variance_floor", self.variance_floor.to_string()),
            ("tie_class", self.tie_class.to_string()),
            ("seed", self.seed.to_string()),
            ("cv_folds", self.cv_folds.to_string()),
            ("boundary_chars", self.boundary_chars.clone()),
            ("include_secondary", self.include_secondary.to_string()),
        ];
        for (k, v) in rows {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn nb_params(&self) -> NbParams {
        NbParams {
            variance_floor: self.variance_floor,
            tie_class: self.tie_class,
        }
    }

    pub fn hits_params(&self) -> HitsParams {
        HitsParams {
            epsilon: self.hits_eps,
            max_iter: self.hits_max_iter,
        }
    }

    pub fn ingest_options(&self) -> opinion_miner::Result<IngestOptions> {
        Ok(IngestOptions {
            segmenter: Segmenter::new(self.boundary_chars.chars()),
            aliases: match &self.alias_map {
                Some(p) => AliasMap::load(p)?,
                None => AliasMap::default(),
            },
        })
    }

    pub fn lexicons(&self) -> opinion_miner::Result<Lexicons> {
        let load = |p: &Option<PathBuf>, fallback: fn() -> WordList| match p {
            Some(p) => WordList::load(p),
            None => Ok(fallback()),
        };
        Lexicons::new(
            load(&self.positive_seeds, bundled::positive_seeds)?,
            load(&self.negative_seeds, bundled::negative_seeds)?,
            load(&self.negation_words, bundled::negation_words)?,
            load(&self.modifier_words, bundled::modifier_words)?,
            load(&self.stop_words, bundled::stop_words)?,
        )
    }

    /// Paths of the lexicon and alias files actually in use.
    pub fn resource_files(&self) -> Vec<PathBuf> {
        [
            &self.alias_map,
            &self.stop_words,
            &self.positive_seeds,
            &self.negative_seeds,
            &self.negation_words,
            &self.modifier_words,
        ]
        .into_iter()
        .flatten()
        .cloned()
        .collect()
    }
}
