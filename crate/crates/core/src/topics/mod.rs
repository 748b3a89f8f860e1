//! LDA topic model and daily topic feature vectors.

mod lda;
mod vocab;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::{DayBucket, Document};
use crate::error::{Error, Result};

pub use lda::{
    default_alpha, gibbs_train, infer_theta, perplexity, DocTopicDist, GibbsSampler, InferConfig, LdaConfig,
    LdaModel, TrainingDoc, DEFAULT_BETA, DEFAULT_BURN_IN, DEFAULT_ITERATIONS, DEFAULT_SAMPLES, DEFAULT_TOPICS,
};
pub use vocab::{analyze, build_vocab, english_stopwords, Vocabulary, DEFAULT_MAX_DF_FRACTION, DEFAULT_MIN_DF};

pub const DEFAULT_TOP_WORDS: usize = 10;
pub const MODEL_FORMAT: &str = "sentivol-lda";
pub const MODEL_VERSION: u32 = 1;

/// Encode documents against a vocabulary.
pub fn training_docs(docs: &[Document], vocab: &Vocabulary) -> Vec<TrainingDoc> {
    docs.iter()
        .map(|d| TrainingDoc {
            id: d.id.clone(),
            tokens: vocab.encode(&d.text),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    /// Mean of the day's document topic distributions.
    #[default]
    Distribution,
    /// Number of the day's documents whose most probable topic is each topic.
    Count,
}

impl FeatureMode {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureMode::Distribution => "distribution",
            FeatureMode::Count => "count",
        }
    }
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "distribution" => Ok(FeatureMode::Distribution),
            "count" => Ok(FeatureMode::Count),
            other => Err(Error::InvalidInput(format!(
                "unknown feature mode {other:?} (expected distribution or count)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayFeatureVector {
    pub trading_day: NaiveDate,
    pub features: Vec<f64>,
}

/// Topic features for one trading day.
///
/// Documents without in-vocabulary tokens carry no topic information and are
/// ignored in count mode; in distribution mode they contribute a uniform
/// vector like any other empty document.
pub fn day_feature_vector(
    model: &LdaModel,
    bucket: &DayBucket,
    mode: FeatureMode,
    infer: &InferConfig,
) -> DayFeatureVector {
    let k = model.k;
    let mut features = vec![0.0; k];
    match mode {
        FeatureMode::Distribution => {
            if bucket.documents.is_empty() {
                features = DocTopicDist::uniform(k).theta;
            } else {
                for doc in &bucket.documents {
                    let theta = infer_theta(model, &doc.id, &model.vocab.encode(&doc.text), infer);
                    for (f, t) in features.iter_mut().zip(&theta.theta) {
                        *f += t;
                    }
                }
                let n = bucket.documents.len() as f64;
                features.iter_mut().for_each(|f| *f /= n);
            }
        }
        FeatureMode::Count => {
            for doc in &bucket.documents {
                let tokens = model.vocab.encode(&doc.text);
                if tokens.is_empty() {
                    continue;
                }
                features[infer_theta(model, &doc.id, &tokens, infer).argmax()] += 1.0;
            }
        }
    }
    DayFeatureVector {
        trading_day: bucket.trading_day,
        features,
    }
}

pub fn day_feature_vectors(
    model: &LdaModel,
    buckets: &[DayBucket],
    mode: FeatureMode,
    infer: &InferConfig,
) -> Vec<DayFeatureVector> {
    buckets
        .iter()
        .map(|b| day_feature_vector(model, b, mode, infer))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: usize,
    pub top_words: Vec<(String, f64)>,
}

pub fn topic_report(model: &LdaModel, m: usize) -> Vec<TopicSummary> {
    (0..model.k)
        .map(|topic_id| TopicSummary {
            topic_id,
            top_words: model.top_words(topic_id, m),
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: LdaModel,
}

impl LdaModel {
    /// Versioned JSON container; floats round-trip exactly.
    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        };
        serde_json::to_string(&file).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported model file {} v{} (expected {MODEL_FORMAT} v{MODEL_VERSION})",
                file.format, file.version
            )));
        }
        let mut model = file.model;
        model.vocab.reindex();
        let (k, v) = (model.k, model.vocab.len());
        if model.topic_word_counts.len() != k * v || model.topic_totals.len() != k {
            return Err(Error::Serialization("model count tables do not match K and V".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
