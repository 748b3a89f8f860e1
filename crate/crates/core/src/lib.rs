//! Sentiment and topic signals for market volatility.
//!
//! The crate is organised as a pipeline of small, pure stages:
//!
//! * [`corpus`] loads documents and closing prices and buckets documents onto
//!   trading days (non-trading days roll forward to the next session).
//! * [`sentiment`] is a lexicon-and-rule scorer producing neg/neu/pos
//!   proportions and a compound score per document.
//! * [`aggregate`] collapses document scores into one record per trading day,
//!   including the Laplace-smoothed daily score.
//! * [`market`] computes log returns, rolling annualised volatility and
//!   next-day direction labels.
//! * [`stats`] holds Pearson correlation, Granger causality and the special
//!   functions behind their p-values.
//! * [`topics`] is an LDA topic model trained by collapsed Gibbs sampling.
//! * [`classify`] trains and evaluates a logistic-regression direction model.
//! * [`synth`] generates seeded synthetic corpora with planted signals.

pub mod aggregate;
pub mod classify;
pub mod corpus;
pub mod error;
pub mod market;
pub mod rng;
pub mod sentiment;
pub mod stats;
pub mod synth;
pub mod topics;

pub use error::{Error, Result};
