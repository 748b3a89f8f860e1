//! Seeded synthetic corpora with planted signals, used by tests and by the
//! `synth` command.
//!
//! * [`topic_direction`] plants a link between the topic mix of day t's
//!   headlines and the direction of volatility from t to t+1.
//! * [`mood_volatility`] plants a persistent tweet mood whose positive share
//!   moves against the scale of market returns.

use chrono::{Datelike, Days, NaiveDate, TimeZone, Utc, Weekday};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::corpus::{Document, PriceBar, Source};
use crate::error::{Error, Result};
use crate::market::{Direction, DEFAULT_WINDOW};
use crate::rng::substream;

const TURBULENT_WORDS: &[&str] = &[
    "turmoil", "selloff", "plunge", "margin", "liquidation", "contagion", "default", "downgrade", "probe", "lawsuit",
    "spill", "outage", "recall", "writedown", "volatile", "tumble", "rout", "scramble", "emergency", "halt",
];
const CALM_WORDS: &[&str] = &[
    "dividend", "steady", "routine", "scheduled", "annual", "meeting", "maintained", "unchanged", "guidance",
    "reiterated", "quarterly", "payment", "appointment", "board", "renewal", "agreement", "stable", "consistent",
    "regular", "orderly",
];
const BACKGROUND_WORDS: &[&str] = &[
    "oil", "gas", "refinery", "barrel", "crude", "bank", "lender", "mortgage", "retail", "grocer", "airline", "mining",
    "copper", "telecom", "pharma", "drug", "insurer", "utility", "property", "builder", "chip", "software", "brewer",
    "tobacco", "shipping", "steel", "gold", "carmaker", "media", "defence",
];
const TICKERS: &[&str] = &["$BP", "$HSBA", "$VOD", "$GSK", "$RIO", "$TSCO", "$BARC", "$LLOY", "$SHEL", "$ULVR"];
const FILLERS: &[&str] = &["today", "trading", "market", "stock", "price", "session", "close", "open", "desk", "ftse"];
const POSITIVE_WORDS: &[&str] = &["good", "great", "happy", "love", "excellent", "nice", "glad", "awesome"];
const NEGATIVE_WORDS: &[&str] = &["bad", "terrible", "awful", "hate", "worst", "sad", "horrible", "ugly"];

/// Generated corpus together with the quantities that were planted.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthData {
    pub documents: Vec<Document>,
    pub prices: Vec<PriceBar>,
    /// Planted direction per trading day (`None` where no label exists).
    pub planted: Vec<Option<Direction>>,
}

/// The first `n` weekdays starting at `start`.
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2019, 1, 2).expect("valid date")
}

fn document(id: String, day: NaiveDate, minute: usize, text: String, source: Source) -> Document {
    let at = day.and_hms_opt(8, 0, 0).expect("valid time") + chrono::Duration::minutes(minute as i64);
    Document {
        id,
        ts: Utc.from_utc_datetime(&at),
        text,
        source,
    }
}

fn prices_from_returns(days: &[NaiveDate], returns: &[f64]) -> Vec<PriceBar> {
    let mut close = 100.0;
    let mut out = vec![PriceBar { date: days[0], close }];
    for (day, r) in days[1..].iter().zip(returns) {
        close *= r.exp();
        out.push(PriceBar { date: *day, close });
    }
    out
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn normal(sd: f64) -> Normal<f64> {
    Normal::new(0.0, sd).expect("positive standard deviation")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopicDirectionConfig {
    pub days: usize,
    pub docs_per_day: usize,
    pub words_per_doc: usize,
    /// Probability that a day's headlines describe the wrong regime.
    pub label_noise: f64,
    /// Share of each headline's words drawn from the regime vocabulary.
    pub signal_share: f64,
    pub window: usize,
    pub seed: u64,
}

impl Default for TopicDirectionConfig {
    fn default() -> Self {
        Self {
            days: 300,
            docs_per_day: 6,
            words_per_doc: 8,
            label_noise: 0.15,
            signal_share: 0.5,
            window: DEFAULT_WINDOW,
            seed: 0,
        }
    }
}

/// Headlines whose regime vocabulary on day t announces whether volatility
/// rises (turbulent) or falls (calm) from t to t+1.
///
/// For a falling day the next return equals the mean of the returns that stay
/// in the window, which strictly lowers the window variance unless the
/// dropped return already sat at that mean. For a rising day the next return
/// lies further from that mean than the dropped one.
pub fn topic_direction(cfg: &TopicDirectionConfig) -> Result<SynthData> {
    let w = cfg.window;
    if w < 2 || cfg.days < w + 10 || cfg.docs_per_day == 0 || cfg.words_per_doc == 0 {
        return Err(Error::InvalidInput("synthetic corpus too small for the window".into()));
    }
    if !(0.0..=1.0).contains(&cfg.label_noise) || !(0.0..=1.0).contains(&cfg.signal_share) {
        return Err(Error::InvalidInput("noise and signal shares must be probabilities".into()));
    }
    let days = business_days(start_date(), cfg.days);
    let mut rng = substream(cfg.seed, "topic-direction/market");
    let base = normal(0.01);

    // returns[j] is the return into day j+1
    let mut returns: Vec<f64> = (0..w).map(|_| base.sample(&mut rng)).collect();
    let mut planted = vec![None; cfg.days];
    for (i, slot) in planted.iter_mut().enumerate().take(cfg.days - 1).skip(w) {
        // the window for day i holds returns[i-w..i]; day i+1 drops returns[i-w]
        let kept = &returns[i - w + 1..i];
        let mean = kept.iter().sum::<f64>() / kept.len() as f64;
        let dropped = returns[i - w];
        let direction = if rng.random::<bool>() { Direction::Up } else { Direction::Down };
        let next = match direction {
            Direction::Down => mean,
            Direction::Up => {
                let extra = 0.002 + 0.01 * rng.random::<f64>();
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                mean + sign * ((dropped - mean).abs() + extra)
            }
        };
        returns.push(next);
        *slot = Some(direction);
    }
    let prices = prices_from_returns(&days, &returns);

    let mut documents = Vec::with_capacity(cfg.days * cfg.docs_per_day);
    for (i, day) in days.iter().enumerate() {
        let mut day_rng = substream(cfg.seed, &format!("topic-direction/day/{i}"));
        let truth = planted[i].unwrap_or(if day_rng.random::<bool>() { Direction::Up } else { Direction::Down });
        let shown = if day_rng.random::<f64>() < cfg.label_noise {
            match truth {
                Direction::Up => Direction::Down,
                Direction::Down => Direction::Up,
            }
        } else {
            truth
        };
        let regime = match shown {
            Direction::Up => TURBULENT_WORDS,
            Direction::Down => CALM_WORDS,
        };
        for j in 0..cfg.docs_per_day {
            let words: Vec<&str> = (0..cfg.words_per_doc)
                .map(|_| {
                    let block = if day_rng.random::<f64>() < cfg.signal_share { regime } else { BACKGROUND_WORDS };
                    *block.choose(&mut day_rng).expect("non-empty block")
                })
                .collect();
            documents.push(document(
                format!("h{i:05}-{j:02}"),
                *day,
                j * 7,
                words.join(" "),
                Source::Headline,
            ));
        }
    }
    Ok(SynthData {
        documents,
        prices,
        planted,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoodConfig {
    pub days: usize,
    pub docs_per_day: usize,
    /// AR(1) coefficient of the latent mood.
    pub persistence: f64,
    /// Stationary standard deviation of the mood.
    pub mood_scale: f64,
    /// How strongly mood shrinks return scale, in [0, 1).
    pub coupling: f64,
    pub seed: u64,
}

impl Default for MoodConfig {
    fn default() -> Self {
        Self {
            days: 250,
            docs_per_day: 20,
            persistence: 0.97,
            mood_scale: 2.0,
            coupling: 0.9,
            seed: 0,
        }
    }
}

/// Tweets driven by a slowly varying mood `m_t`. A tweet carries a positive
/// word with probability `0.7 * sigmoid(m_t)` and a negative word with
/// probability `0.7 * (1 - sigmoid(m_t))`. The next day's return is
/// `+-0.01 * (1 + coupling * (1 - 2 sigmoid(m_t)))` with a random sign, so
/// cheerful stretches are calm stretches and positive sentiment
/// anticorrelates with volatility.
pub fn mood_volatility(cfg: &MoodConfig) -> Result<SynthData> {
    if cfg.days < 30 || cfg.docs_per_day == 0 {
        return Err(Error::InvalidInput("synthetic corpus too small".into()));
    }
    if !(0.0..1.0).contains(&cfg.coupling) || !(cfg.mood_scale > 0.0) {
        return Err(Error::InvalidInput("coupling must lie in [0, 1) and mood scale be positive".into()));
    }
    if !(0.0..1.0).contains(&cfg.persistence.abs()) {
        return Err(Error::InvalidInput("mood persistence must lie in (-1, 1)".into()));
    }
    let days = business_days(start_date(), cfg.days);
    let mut rng = substream(cfg.seed, "mood/market");
    let innovation = normal(cfg.mood_scale * (1.0 - cfg.persistence * cfg.persistence).sqrt());
    let unit = normal(1.0);

    let mut mood = vec![cfg.mood_scale * unit.sample(&mut rng)];
    for _ in 1..cfg.days {
        let prev = *mood.last().expect("non-empty");
        mood.push(cfg.persistence * prev + innovation.sample(&mut rng));
    }
    let returns: Vec<f64> = mood[..cfg.days - 1]
        .iter()
        .map(|m| {
            let gloom = 1.0 - sigmoid(*m);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            sign * 0.01 * (1.0 + cfg.coupling * (2.0 * gloom - 1.0))
        })
        .collect();
    let prices = prices_from_returns(&days, &returns);

    let mut documents = Vec::with_capacity(cfg.days * cfg.docs_per_day);
    for (i, (day, m)) in days.iter().zip(&mood).enumerate() {
        let mut day_rng = substream(cfg.seed, &format!("mood/day/{i}"));
        let q = sigmoid(*m);
        for j in 0..cfg.docs_per_day {
            let ticker = TICKERS.choose(&mut day_rng).expect("non-empty");
            let a = FILLERS.choose(&mut day_rng).expect("non-empty");
            let b = FILLERS.choose(&mut day_rng).expect("non-empty");
            let u = day_rng.random::<f64>();
            let text = if u < 0.7 * q {
                let word = POSITIVE_WORDS.choose(&mut day_rng).expect("non-empty");
                format!("{ticker} {a} {word} {b}")
            } else if u < 0.7 {
                let word = NEGATIVE_WORDS.choose(&mut day_rng).expect("non-empty");
                format!("{ticker} {a} {word} {b}")
            } else {
                format!("{ticker} {a} {b}")
            };
            documents.push(document(format!("t{i:05}-{j:02}"), *day, j * 3, text, Source::Tweet));
        }
    }
    Ok(SynthData {
        documents,
        prices,
        planted: vec![None; cfg.days],
    })
}
