//! Correlation and causality statistics.

mod ols;
pub mod special;

use std::collections::BTreeMap;
use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::aggregate::DailySentiment;
use crate::error::{Error, Result};
use crate::market::MarketSeries;

pub use ols::{ols, OlsFit};
pub use special::{f_cdf, f_sf, ln_gamma, reg_incomplete_beta, t_cdf, t_two_sided_p};

/// Significance level used to flag results.
pub const SIGNIFICANCE: f64 = 0.05;
pub const DEFAULT_GRANGER_LAGS: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
    pub lag: usize,
}

impl CorrelationResult {
    pub fn is_significant(&self) -> bool {
        self.p_value < SIGNIFICANCE
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Pearson correlation with a two-sided Student-t p-value on `n - 2`
/// degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "pearson needs at least 3 pairs, got {n}"
        )));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation("zero-variance input".into()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let p_value = if r.abs() == 1.0 {
        0.0
    } else {
        // t^2 = r^2 (n-2) / (1-r^2)  =>  df/(df+t^2) = 1 - r^2
        let df = (n - 2) as f64;
        let r2 = r * r;
        special::beta_inc_pair(0.5 * df, 0.5, 1.0 - r2, r2).0
    };
    Ok(CorrelationResult {
        r,
        p_value,
        n,
        lag: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentField {
    Negative,
    Positive,
    Neutral,
    /// The Laplace-smoothed daily score.
    Aggregate,
    Compound,
}

impl SentimentField {
    /// The four dimensions reported in the correlation grid.
    pub const GRID: [SentimentField; 4] = [
        SentimentField::Negative,
        SentimentField::Positive,
        SentimentField::Neutral,
        SentimentField::Aggregate,
    ];

    pub fn value(self, d: &DailySentiment) -> f64 {
        match self {
            SentimentField::Negative => d.mean_neg,
            SentimentField::Positive => d.mean_pos,
            SentimentField::Neutral => d.mean_neu,
            SentimentField::Aggregate => d.sentd,
            SentimentField::Compound => d.mean_compound,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentField::Negative => "negative",
            SentimentField::Positive => "positive",
            SentimentField::Neutral => "neutral",
            SentimentField::Aggregate => "aggregate",
            SentimentField::Compound => "compound",
        }
    }
}

impl fmt::Display for SentimentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Returns,
    Volatility,
}

impl Target {
    pub const ALL: [Target; 2] = [Target::Returns, Target::Volatility];

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Returns => "returns",
            Target::Volatility => "volatility",
        }
    }

    fn values(self, mkt: &MarketSeries) -> &[Option<f64>] {
        match self {
            Target::Returns => &mkt.returns,
            Target::Volatility => &mkt.volatility,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rows `(sentiment, target)` on the trading days both series share, in
/// date order. The target may be undefined on some days.
fn joined(
    sent: &[DailySentiment],
    mkt: &MarketSeries,
    field: SentimentField,
    target: Target,
) -> Vec<(NaiveDate, f64, Option<f64>)> {
    let by_day: BTreeMap<NaiveDate, f64> = sent
        .iter()
        .map(|d| (d.trading_day, field.value(d)))
        .collect();
    mkt.dates
        .iter()
        .zip(target.values(mkt))
        .filter_map(|(date, t)| by_day.get(date).map(|s| (*date, *s, *t)))
        .collect()
}

/// Correlate sentiment on day `t` with the market target `lag` trading
/// days later (0 = same day).
pub fn lagged_correlation(
    sent: &[DailySentiment],
    mkt: &MarketSeries,
    field: SentimentField,
    target: Target,
    lag: usize,
) -> Result<CorrelationResult> {
    let rows = joined(sent, mkt, field, target);
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .zip(rows.iter().skip(lag))
        .filter_map(|(a, b)| b.2.map(|y| (a.1, y)))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} aligned pairs for {field}/{target} at lag {lag}",
            xs.len()
        )));
    }
    Ok(CorrelationResult {
        lag,
        ..pearson(&xs, &ys)?
    })
}

/// Sentiment and target on the shared trading days where the target is
/// defined, as two equal-length series (for Granger tests).
pub fn aligned_series(
    sent: &[DailySentiment],
    mkt: &MarketSeries,
    field: SentimentField,
    target: Target,
) -> (Vec<f64>, Vec<f64>) {
    joined(sent, mkt, field, target)
        .into_iter()
        .filter_map(|(_, s, t)| t.map(|t| (s, t)))
        .unzip()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub field: SentimentField,
    pub target: Target,
    pub lag: usize,
    pub result: std::result::Result<CorrelationResult, String>,
}

/// Every `field x target x lag` combination; failing cells carry their error.
pub fn correlation_grid(
    sent: &[DailySentiment],
    mkt: &MarketSeries,
    fields: &[SentimentField],
    targets: &[Target],
    lags: &[usize],
) -> Vec<GridCell> {
    let mut cells = Vec::new();
    for &field in fields {
        for &target in targets {
            for &lag in lags {
                cells.push(GridCell {
                    field,
                    target,
                    lag,
                    result: lagged_correlation(sent, mkt, field, target, lag).map_err(|e| e.to_string()),
                });
            }
        }
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrangerDirection {
    /// Lags of `x` help predict `y`.
    XToY,
    YToX,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrangerResult {
    pub lag: usize,
    pub f_stat: f64,
    pub p_value: f64,
    pub direction: GrangerDirection,
    pub rss_restricted: f64,
    pub rss_unrestricted: f64,
    pub df_num: usize,
    pub df_denom: usize,
}

impl GrangerResult {
    pub fn is_significant(&self) -> bool {
        self.p_value < SIGNIFICANCE
    }
}

/// Restricted and unrestricted fits for lag order `k`: `y_t` on a constant
/// and `y_{t-1..t-k}`, then additionally on `x_{t-1..t-k}`.
pub fn granger_fits(x: &[f64], y: &[f64], k: usize) -> Result<(OlsFit, OlsFit)> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if k == 0 {
        return Err(Error::InvalidInput("Granger lag order must be >= 1".into()));
    }
    let t = x.len();
    if t < 3 * k + 2 {
        return Err(Error::InsufficientData(format!(
            "series of length {t} too short for lag order {k}"
        )));
    }
    let mut restricted = Vec::with_capacity(t - k);
    let mut unrestricted = Vec::with_capacity(t - k);
    for i in k..t {
        let mut row = Vec::with_capacity(2 * k + 1);
        row.push(1.0);
        row.extend((1..=k).map(|j| y[i - j]));
        restricted.push(row.clone());
        row.extend((1..=k).map(|j| x[i - j]));
        unrestricted.push(row);
    }
    let target = &y[k..];
    Ok((ols(&restricted, target)?, ols(&unrestricted, target)?))
}

/// F-test of whether `x` Granger-causes `y` at lag order `k`.
pub fn granger_test(x: &[f64], y: &[f64], k: usize) -> Result<GrangerResult> {
    let (restricted, unrestricted) = granger_fits(x, y, k)?;
    let t_eff = unrestricted.n_obs;
    let df_denom = t_eff - 2 * k - 1;
    let rss_r = restricted.rss;
    let rss_u = unrestricted.rss;
    let gain = (rss_r - rss_u).max(0.0);
    let f_stat = if rss_u == 0.0 {
        if gain == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (gain / k as f64) / (rss_u / df_denom as f64)
    };
    Ok(GrangerResult {
        lag: k,
        f_stat,
        p_value: f_sf(f_stat, k as f64, df_denom as f64)?,
        direction: GrangerDirection::XToY,
        rss_restricted: rss_r,
        rss_unrestricted: rss_u,
        df_num: k,
        df_denom,
    })
}

/// Both directions: `x -> y` then `y -> x`.
pub fn granger_both(x: &[f64], y: &[f64], k: usize) -> Result<[GrangerResult; 2]> {
    let forward = granger_test(x, y, k)?;
    let reverse = GrangerResult {
        direction: GrangerDirection::YToX,
        ..granger_test(y, x, k)?
    };
    Ok([forward, reverse])
}
