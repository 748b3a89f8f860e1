use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

pub const DEFAULT_MIN_DF: usize = 2;
pub const DEFAULT_MAX_DF_FRACTION: f64 = 0.5;

/// The bundled English stopword list.
pub fn english_stopwords() -> BTreeSet<String> {
    BUNDLED_STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Lowercased runs of alphabetic characters.
pub fn analyze(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Dense token ids (assigned in lexicographic token order) with the
/// document frequencies and filters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    doc_freq: Vec<usize>,
    stopwords: BTreeSet<String>,
    min_df: usize,
    max_df_fraction: f64,
    #[serde(skip)]
    index: HashMap<String, u32>,
}

impl Vocabulary {
    fn from_parts(
        tokens: Vec<String>,
        doc_freq: Vec<usize>,
        stopwords: BTreeSet<String>,
        min_df: usize,
        max_df_fraction: f64,
    ) -> Self {
        let mut v = Self {
            tokens,
            doc_freq,
            stopwords,
            min_df,
            max_df_fraction,
            index: HashMap::new(),
        };
        v.reindex();
        v
    }

    /// Rebuild the lookup table (needed after deserialization).
    pub fn reindex(&mut self) {
        self.index = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn doc_freq(&self, id: u32) -> usize {
        self.doc_freq[id as usize]
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    pub fn max_df_fraction(&self) -> f64 {
        self.max_df_fraction
    }

    /// In-vocabulary token ids of `text`, in order; everything else is dropped.
    pub fn encode(&self, text: &str) -> Vec<u32> {
        analyze(text).iter().filter_map(|t| self.id(t)).collect()
    }
}

/// Build a vocabulary from a corpus. Tokens in fewer than `min_df` documents,
/// in more than `max_df_fraction` of documents, or in `stopwords` are dropped.
pub fn build_vocab<S: AsRef<str>>(
    docs: &[S],
    stopwords: &BTreeSet<String>,
    min_df: usize,
    max_df_fraction: f64,
) -> Result<Vocabulary> {
    if docs.is_empty() {
        return Err(Error::InvalidInput("cannot build a vocabulary from an empty corpus".into()));
    }
    if !(max_df_fraction > 0.0 && max_df_fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "max_df_fraction must be in (0, 1], got {max_df_fraction}"
        )));
    }
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<String> = analyze(doc.as_ref()).into_iter().collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let max_df = max_df_fraction * docs.len() as f64;
    let (tokens, doc_freq): (Vec<String>, Vec<usize>) = df
        .into_iter()
        .filter(|(t, n)| *n >= min_df && (*n as f64) <= max_df && !stopwords.contains(t))
        .unzip();
    if tokens.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    Ok(Vocabulary::from_parts(
        tokens,
        doc_freq,
        stopwords.clone(),
        min_df,
        max_df_fraction,
    ))
}
