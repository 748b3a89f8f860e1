//! Latent Dirichlet allocation by collapsed Gibbs sampling.
//!
//! Training documents are visited in id order and every document draws from
//! its own random substream keyed by its id, so a trained model depends only
//! on the set of documents and the seed, never on their input order.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, StreamRng};

use super::vocab::Vocabulary;

pub const DEFAULT_TOPICS: usize = 15;
pub const DEFAULT_BETA: f64 = 0.01;
pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_BURN_IN: usize = 50;
pub const DEFAULT_SAMPLES: usize = 20;

/// Default symmetric document-topic prior, `50 / K`.
pub fn default_alpha(k: usize) -> f64 {
    50.0 / k as f64
}

/// A document mapped to vocabulary ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingDoc {
    pub id: String,
    pub tokens: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaModel {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub vocab: Vocabulary,
    /// Row-major `K x V` topic-word counts.
    pub topic_word_counts: Vec<u32>,
    pub topic_totals: Vec<u64>,
    pub seed: u64,
    pub iterations: usize,
}

impl LdaModel {
    pub fn v(&self) -> usize {
        self.vocab.len()
    }

    pub fn count(&self, topic: usize, word: u32) -> u32 {
        self.topic_word_counts[topic * self.v() + word as usize]
    }

    /// `phi[k][w] = (n_kw + beta) / (n_k + V beta)`.
    pub fn phi(&self, topic: usize, word: u32) -> f64 {
        let v = self.v() as f64;
        (f64::from(self.count(topic, word)) + self.beta)
            / (self.topic_totals[topic] as f64 + v * self.beta)
    }

    pub fn phi_row(&self, topic: usize) -> Vec<f64> {
        (0..self.v() as u32).map(|w| self.phi(topic, w)).collect()
    }

    /// The `m` most probable words of `topic`; ties broken by token.
    pub fn top_words(&self, topic: usize, m: usize) -> Vec<(String, f64)> {
        let mut words: Vec<(u32, f64)> = (0..self.v() as u32).map(|w| (w, self.phi(topic, w))).collect();
        words.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| self.vocab.token(a.0).cmp(self.vocab.token(b.0)))
        });
        words
            .into_iter()
            .take(m)
            .map(|(w, p)| (self.vocab.token(w).to_string(), p))
            .collect()
    }

    pub fn total_tokens(&self) -> u64 {
        self.topic_totals.iter().sum()
    }
}

/// Topic proportions of a single document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTopicDist {
    pub theta: Vec<f64>,
}

impl DocTopicDist {
    pub fn uniform(k: usize) -> Self {
        Self {
            theta: vec![1.0 / k as f64; k],
        }
    }

    /// Most probable topic (lowest index on ties).
    pub fn argmax(&self) -> usize {
        self.theta
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| if *p > best.1 { (i, *p) } else { best })
            .0
    }
}

fn draw(rng: &mut StreamRng, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, w) in weights.iter().enumerate() {
        if u < *w {
            return k;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Collapsed Gibbs sampler state; exposed so callers can run and inspect
/// individual sweeps.
pub struct GibbsSampler {
    k: usize,
    v: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    sweeps: usize,
    docs: Vec<TrainingDoc>,
    assignments: Vec<Vec<u16>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<u32>,
    topic_totals: Vec<u64>,
    rngs: Vec<StreamRng>,
    weights: Vec<f64>,
}

impl GibbsSampler {
    pub fn new(docs: &[TrainingDoc], v: usize, k: usize, alpha: f64, beta: f64, seed: u64) -> Result<Self> {
        if k == 0 || k > usize::from(u16::MAX) {
            return Err(Error::InvalidInput(format!("topic count {k} out of range")));
        }
        if v < k {
            return Err(Error::InvalidInput(format!("vocabulary size {v} smaller than K = {k}")));
        }
        if !(alpha > 0.0 && beta > 0.0) {
            return Err(Error::InvalidInput("Dirichlet priors must be positive".into()));
        }
        let mut docs: Vec<TrainingDoc> = docs
            .iter()
            .filter(|d| {
                if d.tokens.is_empty() {
                    log::warn!("document {:?} has no in-vocabulary tokens; skipped", d.id);
                }
                !d.tokens.is_empty()
            })
            .cloned()
            .collect();
        if docs.is_empty() {
            return Err(Error::InvalidInput("no non-empty documents to train on".into()));
        }
        if let Some(bad) = docs.iter().flat_map(|d| &d.tokens).find(|w| **w as usize >= v) {
            return Err(Error::InvalidInput(format!("token id {bad} outside vocabulary of {v}")));
        }
        docs.sort_by(|a, b| a.id.cmp(&b.id));

        let mut topic_word = vec![0u32; k * v];
        let mut topic_totals = vec![0u64; k];
        let mut doc_topic = Vec::with_capacity(docs.len());
        let mut assignments = Vec::with_capacity(docs.len());
        let mut rngs = Vec::with_capacity(docs.len());
        for doc in &docs {
            let mut rng = substream(seed, &doc.id);
            let mut counts = vec![0u32; k];
            let z: Vec<u16> = doc
                .tokens
                .iter()
                .map(|&w| {
                    let t = rng.random_range(0..k);
                    counts[t] += 1;
                    topic_word[t * v + w as usize] += 1;
                    topic_totals[t] += 1;
                    t as u16
                })
                .collect();
            doc_topic.push(counts);
            assignments.push(z);
            rngs.push(rng);
        }
        Ok(Self {
            k,
            v,
            alpha,
            beta,
            seed,
            sweeps: 0,
            docs,
            assignments,
            doc_topic,
            topic_word,
            topic_totals,
            rngs,
            weights: vec![0.0; k],
        })
    }

    /// Resample every token assignment once.
    pub fn sweep(&mut self) {
        let (k, v) = (self.k, self.v);
        let vbeta = v as f64 * self.beta;
        for d in 0..self.docs.len() {
            let rng = &mut self.rngs[d];
            for (i, &w) in self.docs[d].tokens.iter().enumerate() {
                let w = w as usize;
                let old = usize::from(self.assignments[d][i]);
                self.doc_topic[d][old] -= 1;
                self.topic_word[old * v + w] -= 1;
                self.topic_totals[old] -= 1;

                for t in 0..k {
                    self.weights[t] = (f64::from(self.doc_topic[d][t]) + self.alpha)
                        * (f64::from(self.topic_word[t * v + w]) + self.beta)
                        / (self.topic_totals[t] as f64 + vbeta);
                }
                let new = draw(rng, &self.weights);

                self.assignments[d][i] = new as u16;
                self.doc_topic[d][new] += 1;
                self.topic_word[new * v + w] += 1;
                self.topic_totals[new] += 1;
            }
        }
        self.sweeps += 1;
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Per-document topic counts add up to document lengths, topic totals add
    /// up to the corpus token count, and the topic-word table agrees with both.
    pub fn counts_consistent(&self) -> bool {
        let per_doc = self
            .docs
            .iter()
            .zip(&self.doc_topic)
            .all(|(doc, counts)| counts.iter().map(|c| *c as usize).sum::<usize>() == doc.tokens.len());
        let corpus: u64 = self.docs.iter().map(|d| d.tokens.len() as u64).sum();
        let totals_ok = self.topic_totals.iter().sum::<u64>() == corpus;
        let rows_ok = (0..self.k).all(|t| {
            self.topic_word[t * self.v..(t + 1) * self.v]
                .iter()
                .map(|c| u64::from(*c))
                .sum::<u64>()
                == self.topic_totals[t]
        });
        per_doc && totals_ok && rows_ok
    }

    /// Freeze the current counts into a model.
    pub fn to_model(&self, vocab: &Vocabulary) -> LdaModel {
        LdaModel {
            k: self.k,
            alpha: self.alpha,
            beta: self.beta,
            vocab: vocab.clone(),
            topic_word_counts: self.topic_word.clone(),
            topic_totals: self.topic_totals.clone(),
            seed: self.seed,
            iterations: self.sweeps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub topics: usize,
    /// `None` means `50 / K`.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            topics: DEFAULT_TOPICS,
            alpha: None,
            beta: DEFAULT_BETA,
            iterations: DEFAULT_ITERATIONS,
            seed: 0,
        }
    }
}

impl LdaConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| default_alpha(self.topics))
    }
}

pub fn gibbs_train(docs: &[TrainingDoc], vocab: &Vocabulary, cfg: &LdaConfig) -> Result<LdaModel> {
    if cfg.iterations == 0 {
        return Err(Error::InvalidInput("at least one Gibbs sweep is required".into()));
    }
    let mut sampler = GibbsSampler::new(docs, vocab.len(), cfg.topics, cfg.alpha(), cfg.beta, cfg.seed)?;
    for _ in 0..cfg.iterations {
        sampler.sweep();
    }
    Ok(sampler.to_model(vocab))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferConfig {
    pub burn_in: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for InferConfig {
    fn default() -> Self {
        Self {
            burn_in: DEFAULT_BURN_IN,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

/// Fold-in Gibbs sampling of a new document's topic proportions with the
/// model's topic-word distributions held fixed.
pub fn infer_theta(model: &LdaModel, doc_id: &str, tokens: &[u32], cfg: &InferConfig) -> DocTopicDist {
    let k = model.k;
    if tokens.is_empty() {
        return DocTopicDist::uniform(k);
    }
    let phi: Vec<Vec<f64>> = tokens
        .iter()
        .map(|&w| (0..k).map(|t| model.phi(t, w)).collect())
        .collect();
    let mut rng = substream(cfg.seed, doc_id);
    let mut counts = vec![0u32; k];
    let mut z: Vec<usize> = tokens
        .iter()
        .map(|_| {
            let t = rng.random_range(0..k);
            counts[t] += 1;
            t
        })
        .collect();

    let samples = cfg.samples.max(1);
    let norm = tokens.len() as f64 + k as f64 * model.alpha;
    let mut theta = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for sweep in 0..cfg.burn_in + samples {
        for (i, word_phi) in phi.iter().enumerate() {
            counts[z[i]] -= 1;
            for t in 0..k {
                weights[t] = (f64::from(counts[t]) + model.alpha) * word_phi[t];
            }
            z[i] = draw(&mut rng, &weights);
            counts[z[i]] += 1;
        }
        if sweep >= cfg.burn_in {
            for t in 0..k {
                theta[t] += (f64::from(counts[t]) + model.alpha) / norm;
            }
        }
    }
    for t in theta.iter_mut() {
        *t /= samples as f64;
    }
    DocTopicDist { theta }
}

/// Held-out perplexity `exp(-sum log p(w) / N)` under fold-in estimates.
pub fn perplexity(model: &LdaModel, docs: &[TrainingDoc], cfg: &InferConfig) -> f64 {
    let mut log_lik = 0.0;
    let mut n = 0usize;
    for doc in docs.iter().filter(|d| !d.tokens.is_empty()) {
        let theta = infer_theta(model, &doc.id, &doc.tokens, cfg).theta;
        for &w in &doc.tokens {
            let p: f64 = (0..model.k).map(|t| theta[t] * model.phi(t, w)).sum();
            log_lik += p.ln();
            n += 1;
        }
    }
    (-log_lik / n.max(1) as f64).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topics::vocab::build_vocab;
    use std::collections::BTreeSet;

    fn corpus() -> (Vocabulary, Vec<TrainingDoc>) {
        let texts = [
            "oil gas barrel crude",
            "crude oil pipeline gas",
            "bank loan rate credit",
            "credit bank mortgage rate",
            "barrel crude pipeline",
            "loan mortgage bank",
        ];
        let vocab = build_vocab(&texts, &BTreeSet::new(), 1, 1.0).unwrap();
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| TrainingDoc {
                id: format!("d{i}"),
                tokens: vocab.encode(t),
            })
            .collect();
        (vocab, docs)
    }

    fn cfg(k: usize, iterations: usize, seed: u64) -> LdaConfig {
        LdaConfig {
            topics: k,
            alpha: Some(0.5),
            beta: 0.01,
            iterations,
            seed,
        }
    }

    #[test]
    fn single_topic_is_smoothed_unigram() {
        let (vocab, docs) = corpus();
        let model = gibbs_train(&docs, &vocab, &cfg(1, 3, 1)).unwrap();
        let n: u64 = docs.iter().map(|d| d.tokens.len() as u64).sum();
        let v = vocab.len() as f64;
        for w in 0..vocab.len() as u32 {
            let count = docs.iter().flat_map(|d| &d.tokens).filter(|t| **t == w).count() as f64;
            let expected = (count + 0.01) / (n as f64 + v * 0.01);
            assert!((model.phi(0, w) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn same_seed_is_bit_identical_and_order_free() {
        let (vocab, docs) = corpus();
        let a = gibbs_train(&docs, &vocab, &cfg(2, 20, 9)).unwrap();
        let b = gibbs_train(&docs, &vocab, &cfg(2, 20, 9)).unwrap();
        assert_eq!(a, b);
        let mut rev = docs.clone();
        rev.reverse();
        let c = gibbs_train(&rev, &vocab, &cfg(2, 20, 9)).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn counts_conserved_each_sweep() {
        let (vocab, docs) = corpus();
        let mut s = GibbsSampler::new(&docs, vocab.len(), 3, 0.5, 0.01, 4).unwrap();
        assert!(s.counts_consistent());
        for _ in 0..25 {
            s.sweep();
            assert!(s.counts_consistent());
        }
        let m = s.to_model(&vocab);
        assert_eq!(m.iterations, 25);
        for t in 0..3 {
            assert!((m.phi_row(t).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn training_errors() {
        let (vocab, docs) = corpus();
        assert!(gibbs_train(&docs, &vocab, &cfg(vocab.len() + 1, 5, 0)).is_err());
        assert!(gibbs_train(&docs, &vocab, &cfg(2, 0, 0)).is_err());
        let empty = vec![TrainingDoc {
            id: "e".into(),
            tokens: vec![],
        }];
        assert!(gibbs_train(&empty, &vocab, &cfg(2, 5, 0)).is_err());
    }

    #[test]
    fn inference_edge_cases() {
        let (vocab, docs) = corpus();
        let model = gibbs_train(&docs, &vocab, &cfg(2, 50, 2)).unwrap();
        let infer = InferConfig::default();
        assert_eq!(infer_theta(&model, "x", &[], &infer), DocTopicDist::uniform(2));
        let theta = infer_theta(&model, "x", &vocab.encode("oil crude gas"), &infer);
        assert!((theta.theta.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(theta.theta.iter().all(|p| *p >= 0.0));
    }

    #[test]
    fn top_words_contract() {
        let (vocab, docs) = corpus();
        let model = gibbs_train(&docs, &vocab, &cfg(2, 30, 5)).unwrap();
        let top = model.top_words(0, 5);
        assert_eq!(top.len(), 5);
        assert!(top.windows(2).all(|w| w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0)));
        assert_eq!(model.top_words(0, 1000).len(), vocab.len());
    }
}
