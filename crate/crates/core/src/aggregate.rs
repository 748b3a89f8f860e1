//! Daily aggregation of document sentiment.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::DayBucket;
use crate::sentiment::{classify_polarity, score_document, Lexicon, Polarity, RuleConfig, SentimentScores};

/// One trading day of aggregated sentiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailySentiment {
    pub trading_day: NaiveDate,
    pub mean_neg: f64,
    pub mean_neu: f64,
    pub mean_pos: f64,
    pub mean_compound: f64,
    pub n_pos: u64,
    pub n_neg: u64,
    pub n_neut: u64,
    /// `(n_pos - n_neg) / (n_pos + n_neut + n_neg + 3)`; the 3 is a Laplace
    /// pseudo-count, one per class.
    pub sentd: f64,
    pub n_docs: u64,
}

/// Laplace-smoothed daily score as an exact ratio `(numerator, denominator)`.
pub fn sentd_ratio(n_pos: u64, n_neg: u64, n_neut: u64) -> (i128, u128) {
    let num = i128::from(n_pos) - i128::from(n_neg);
    let den = u128::from(n_pos) + u128::from(n_neut) + u128::from(n_neg) + 3;
    (num, den)
}

/// Correctly rounded value of [`sentd_ratio`].
pub fn sentd(n_pos: u64, n_neg: u64, n_neut: u64) -> f64 {
    let (num, den) = sentd_ratio(n_pos, n_neg, n_neut);
    // both fit in 2^53 for any realistic count, so the division rounds once
    num as f64 / den as f64
}

impl DailySentiment {
    pub fn empty(trading_day: NaiveDate) -> Self {
        Self::from_scores(trading_day, &[], &RuleConfig::default())
    }

    /// Aggregate already-computed document scores.
    pub fn from_scores(trading_day: NaiveDate, scores: &[SentimentScores], cfg: &RuleConfig) -> Self {
        let (mut n_pos, mut n_neg, mut n_neut) = (0u64, 0u64, 0u64);
        let (mut neg, mut neu, mut pos, mut compound) = (0.0, 0.0, 0.0, 0.0);
        for s in scores {
            neg += s.neg;
            neu += s.neu;
            pos += s.pos;
            compound += s.compound;
            match classify_polarity(s, cfg) {
                Polarity::Positive => n_pos += 1,
                Polarity::Negative => n_neg += 1,
                Polarity::Neutral => n_neut += 1,
            }
        }
        let n = scores.len() as u64;
        let mean = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
        Self {
            trading_day,
            mean_neg: mean(neg),
            mean_neu: mean(neu),
            mean_pos: mean(pos),
            mean_compound: mean(compound),
            n_pos,
            n_neg,
            n_neut,
            sentd: sentd(n_pos, n_neg, n_neut),
            n_docs: n,
        }
    }
}

pub fn aggregate_day(bucket: &DayBucket, lex: &Lexicon, cfg: &RuleConfig) -> DailySentiment {
    let scores: Vec<SentimentScores> = bucket
        .documents
        .iter()
        .map(|d| score_document(d, lex, cfg))
        .collect();
    DailySentiment::from_scores(bucket.trading_day, &scores, cfg)
}

/// One record per bucket, in trading-day order; empty buckets give zero
/// records so the series lines up with the market series.
pub fn build_daily_series(buckets: &[DayBucket], lex: &Lexicon, cfg: &RuleConfig) -> Vec<DailySentiment> {
    let mut out: Vec<DailySentiment> = buckets.iter().map(|b| aggregate_day(b, lex, cfg)).collect();
    out.sort_by_key(|d| d.trading_day);
    out
}
