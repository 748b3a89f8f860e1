use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use sentivol_core::classify::{DEFAULT_EPOCHS, DEFAULT_L2, DEFAULT_LEARNING_RATE, DEFAULT_SPLIT_FRACTION};
use sentivol_core::corpus::Source;
use sentivol_core::market::DEFAULT_WINDOW;
use sentivol_core::stats::DEFAULT_GRANGER_LAGS;
use sentivol_core::topics::{
    FeatureMode, DEFAULT_BETA, DEFAULT_BURN_IN, DEFAULT_ITERATIONS, DEFAULT_MAX_DF_FRACTION, DEFAULT_MIN_DF,
    DEFAULT_SAMPLES, DEFAULT_TOPICS, DEFAULT_TOP_WORDS,
};

use crate::error::CliError;

/// Every setting of a run. File keys and command-line flags share names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default, deny_unknown_fields)]
pub struct RunConfig {
    pub documents: Option<PathBuf>,
    pub prices: Option<PathBuf>,
    /// Tab-separated lexicon; the bundled one when unset.
    pub lexicon: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub source: Option<Source>,
    pub window: usize,
    pub lags: Vec<usize>,
    pub topics: usize,
    /// Document-topic prior; `50 / topics` when unset.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub samples: usize,
    pub min_df: usize,
    pub max_df_fraction: f64,
    pub top_words: usize,
    pub feature_mode: FeatureMode,
    pub split_fraction: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    pub standardize: bool,
    pub seed: u64,
    /// Inputs of the later stages; default to the files earlier stages
    /// write into `output-dir`.
    pub lda_model: Option<PathBuf>,
    pub features: Option<PathBuf>,
    pub classifier: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            documents: None,
            prices: None,
            lexicon: None,
            output_dir: PathBuf::from("out"),
            source: None,
            window: DEFAULT_WINDOW,
            lags: DEFAULT_GRANGER_LAGS.to_vec(),
            topics: DEFAULT_TOPICS,
            alpha: None,
            beta: DEFAULT_BETA,
            iterations: DEFAULT_ITERATIONS,
            burn_in: DEFAULT_BURN_IN,
            samples: DEFAULT_SAMPLES,
            min_df: DEFAULT_MIN_DF,
            max_df_fraction: DEFAULT_MAX_DF_FRACTION,
            top_words: DEFAULT_TOP_WORDS,
            feature_mode: FeatureMode::default(),
            split_fraction: DEFAULT_SPLIT_FRACTION,
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: DEFAULT_EPOCHS,
            l2_lambda: DEFAULT_L2,
            standardize: true,
            seed: 0,
            lda_model: None,
            features: None,
            classifier: None,
        }
    }
}

/// Command-line overrides, one per config key.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON-lines document file
    #[arg(long, global = true)]
    pub documents: Option<PathBuf>,
    /// CSV of daily closes (date,close)
    #[arg(long, global = true)]
    pub prices: Option<PathBuf>,
    /// Tab-separated sentiment lexicon (token, valence, ...)
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// Keep only documents of this source (headline, tweet, story)
    #[arg(long, global = true)]
    pub source: Option<Source>,
    /// Rolling volatility window in trading days
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Granger lag orders, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub lags: Option<Vec<usize>>,
    /// Number of LDA topics
    #[arg(long, global = true)]
    pub topics: Option<usize>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Gibbs sweeps for training
    #[arg(long, global = true)]
    pub iterations: Option<usize>,
    #[arg(long, global = true)]
    pub burn_in: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long, global = true)]
    pub min_df: Option<usize>,
    #[arg(long, global = true)]
    pub max_df_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub top_words: Option<usize>,
    /// distribution or count
    #[arg(long, global = true)]
    pub feature_mode: Option<FeatureMode>,
    #[arg(long, global = true)]
    pub split_fraction: Option<f64>,
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub l2_lambda: Option<f64>,
    #[arg(long, global = true)]
    pub standardize: Option<bool>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub lda_model: Option<PathBuf>,
    #[arg(long, global = true)]
    pub features: Option<PathBuf>,
    #[arg(long, global = true)]
    pub classifier: Option<PathBuf>,
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),*; $($opt:ident),*) => {
        $(if let Some(v) = $o.$field { $cfg.$field = v; })*
        $(if $o.$opt.is_some() { $cfg.$opt = $o.$opt; })*
    };
}

impl RunConfig {
    /// Defaults, then the optional file, then flags.
    pub fn resolve(file: Option<&Path>, overrides: Overrides) -> Result<Self, CliError> {
        let mut cfg = match file {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        let o = overrides;
        apply!(cfg, o;
            output_dir, window, lags, topics, beta, iterations, burn_in, samples, min_df,
            max_df_fraction, top_words, feature_mode, split_fraction, learning_rate, epochs,
            l2_lambda, standardize, seed;
            documents, prices, lexicon, source, alpha, lda_model, features, classifier);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Relative paths in the file are taken relative to the file's directory.
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut cfg.documents,
            &mut cfg.prices,
            &mut cfg.lexicon,
            &mut cfg.lda_model,
            &mut cfg.features,
            &mut cfg.classifier,
        ]
        .into_iter()
        .flatten()
        {
            rebase(p);
        }
        rebase(&mut cfg.output_dir);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if self.window < 2 {
            return bad(format!("window must be at least 2, got {}", self.window));
        }
        if self.lags.is_empty() || self.lags.contains(&0) {
            return bad("lags must be a non-empty list of positive integers".into());
        }
        if self.topics == 0 {
            return bad("topics must be positive".into());
        }
        if self.alpha.is_some_and(|a| !(a > 0.0)) || !(self.beta > 0.0) {
            return bad("alpha and beta must be positive".into());
        }
        if self.iterations == 0 || self.samples == 0 {
            return bad("iterations and samples must be positive".into());
        }
        if !(self.max_df_fraction > 0.0 && self.max_df_fraction <= 1.0) {
            return bad(format!("max-df-fraction must be in (0, 1], got {}", self.max_df_fraction));
        }
        if self.top_words == 0 {
            return bad("top-words must be positive".into());
        }
        if !(self.split_fraction > 0.0 && self.split_fraction < 1.0) {
            return bad(format!("split-fraction must be in (0, 1), got {}", self.split_fraction));
        }
        if !(self.learning_rate > 0.0) || !(self.l2_lambda >= 0.0) {
            return bad("learning-rate must be positive and l2-lambda non-negative".into());
        }
        Ok(())
    }

    pub fn require_file<'a>(&self, key: &str, path: &'a Option<PathBuf>) -> Result<&'a Path, CliError> {
        let path = path
            .as_deref()
            .ok_or_else(|| CliError::Usage(format!("--{key} is required for this command")))?;
        if !path.is_file() {
            return Err(CliError::Usage(format!("{key} file {} does not exist", path.display())));
        }
        Ok(path)
    }

    pub fn lda_model_path(&self) -> PathBuf {
        self.lda_model.clone().unwrap_or_else(|| self.output_dir.join(crate::files::LDA_MODEL))
    }

    pub fn features_path(&self) -> PathBuf {
        self.features.clone().unwrap_or_else(|| self.output_dir.join(crate::files::FEATURES))
    }

    pub fn classifier_path(&self) -> PathBuf {
        self.classifier.clone().unwrap_or_else(|| self.output_dir.join(crate::files::CLASSIFIER))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_keys_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "window = 20\nseed = 7\ndocuments = \"docs.jsonl\"\nfeature-mode = \"count\"\n").unwrap();
        let cfg = RunConfig::resolve(
            Some(&path),
            Overrides {
                window: Some(5),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(cfg.window, 5);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.feature_mode, FeatureMode::Count);
        assert_eq!(cfg.documents, Some(dir.path().join("docs.jsonl")));
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "windw = 20\n").unwrap();
        assert!(matches!(RunConfig::resolve(Some(&path), Overrides::default()), Err(CliError::Usage(_))));
        let o = Overrides {
            split_fraction: Some(1.5),
            ..Default::default()
        };
        assert!(RunConfig::resolve(None, o).is_err());
    }

    #[test]
    fn every_key_serialises() {
        let text = toml::to_string(&RunConfig::default()).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, RunConfig::default());
    }
}
