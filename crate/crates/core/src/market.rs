//! Log returns, rolling annualised volatility and direction labels.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::PriceBar;
use crate::error::{Error, Result};

pub const TRADING_DAYS_PER_YEAR: f64 = 252.0;
pub const DEFAULT_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceDivisor {
    /// `1/N`
    #[default]
    Population,
    /// `1/(N-1)`
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "UP")]
    Up,
    #[serde(rename = "DOWN")]
    Down,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "UP",
            Direction::Down => "DOWN",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionLabel {
    pub date: NaiveDate,
    pub direction: Direction,
}

/// `r_t = ln(close_t / close_{t-1})`.
pub fn log_returns(closes: &[f64]) -> Result<Vec<f64>> {
    if closes.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 closes for a return, got {}",
            closes.len()
        )));
    }
    if let Some(c) = closes.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
        return Err(Error::InvalidInput(format!("close must be positive, got {c}")));
    }
    Ok(closes.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
}

/// Annualised standard deviation over each trailing window of `window`
/// returns. Output has `returns.len() - window + 1` points; point `i` covers
/// `returns[i..i + window]`.
pub fn rolling_volatility(returns: &[f64], window: usize, divisor: VarianceDivisor) -> Result<Vec<f64>> {
    if window < 2 {
        return Err(Error::InvalidInput(format!("volatility window must be >= 2, got {window}")));
    }
    if returns.len() < window {
        return Err(Error::InsufficientData(format!(
            "volatility window {window} exceeds {} returns",
            returns.len()
        )));
    }
    let denom = match divisor {
        VarianceDivisor::Population => window as f64,
        VarianceDivisor::Sample => (window - 1) as f64,
    };
    let annualise = TRADING_DAYS_PER_YEAR.sqrt();
    Ok(returns
        .windows(window)
        .map(|w| {
            let mean = w.iter().sum::<f64>() / window as f64;
            let ss: f64 = w.iter().map(|r| (r - mean) * (r - mean)).sum();
            (ss / denom).sqrt() * annualise
        })
        .collect())
}

/// `UP` at `t` iff `vol[t+1] > vol[t]`; ties are `DOWN`.
pub fn directions(vols: &[f64]) -> Vec<Direction> {
    vols.windows(2)
        .map(|w| if w[1] > w[0] { Direction::Up } else { Direction::Down })
        .collect()
}

pub fn direction_labels(dates: &[NaiveDate], vols: &[f64]) -> Vec<DirectionLabel> {
    dates
        .iter()
        .zip(directions(vols))
        .map(|(date, direction)| DirectionLabel {
            date: *date,
            direction,
        })
        .collect()
}

/// Per-date market view. Undefined values (first return, volatility before
/// the window fills, label on the last volatility date) are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSeries {
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
    pub returns: Vec<Option<f64>>,
    pub volatility: Vec<Option<f64>>,
    pub labels: Vec<Option<Direction>>,
    pub window: usize,
    pub divisor: VarianceDivisor,
    /// Labels decided by an exact tie (`vol[t+1] == vol[t]`).
    pub ties: usize,
}

impl MarketSeries {
    pub fn from_bars(bars: &[PriceBar], window: usize, divisor: VarianceDivisor) -> Result<Self> {
        let closes: Vec<f64> = bars.iter().map(|b| b.close).collect();
        let dates: Vec<NaiveDate> = bars.iter().map(|b| b.date).collect();
        let rets = log_returns(&closes)?;
        let vols = rolling_volatility(&rets, window, divisor)?;
        let n = closes.len();

        let mut returns = vec![None; n];
        for (i, r) in rets.iter().enumerate() {
            returns[i + 1] = Some(*r);
        }
        // the first full window ends at return index window-1, i.e. date index window
        let mut volatility = vec![None; n];
        for (i, v) in vols.iter().enumerate() {
            volatility[i + window] = Some(*v);
        }
        let mut labels = vec![None; n];
        let mut ties = 0;
        for (i, pair) in vols.windows(2).enumerate() {
            if pair[0] == pair[1] {
                ties += 1;
            }
            labels[i + window] = Some(if pair[1] > pair[0] { Direction::Up } else { Direction::Down });
        }
        Ok(Self {
            dates,
            closes,
            returns,
            volatility,
            labels,
            window,
            divisor,
            ties,
        })
    }

    pub fn direction_labels(&self) -> Vec<DirectionLabel> {
        self.dates
            .iter()
            .zip(&self.labels)
            .filter_map(|(date, l)| l.map(|direction| DirectionLabel { date: *date, direction }))
            .collect()
    }

    pub fn return_on(&self, date: NaiveDate) -> Option<f64> {
        self.index_of(date).and_then(|i| self.returns[i])
    }

    pub fn volatility_on(&self, date: NaiveDate) -> Option<f64> {
        self.index_of(date).and_then(|i| self.volatility[i])
    }

    fn index_of(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }
}
