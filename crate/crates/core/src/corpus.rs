//! Document and price ingestion, and trading-day bucketing.
//!
//! Documents are line-delimited JSON records:
//!
//! ```text
//! {"id": "h-1", "ts": "2019-08-02T09:15:00Z", "text": "FTSE opens higher", "source": "headline"}
//! ```
//!
//! Prices are a `date,close` CSV. The trading calendar is exactly the set of
//! dates present in the price file; a document dated on a non-trading day is
//! assigned to the next trading day.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Above this share of malformed records a document file is rejected.
pub const MAX_MALFORMED_FRACTION: f64 = 0.5;

/// The malformed-share rule only applies to files with at least this many
/// records; smaller files just skip their bad lines.
pub const MIN_RECORDS_FOR_MALFORMED_RULE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Headline,
    Tweet,
    Story,
}

impl Source {
    pub const ALL: [Source; 3] = [Source::Headline, Source::Tweet, Source::Story];

    pub fn as_str(self) -> &'static str {
        match self {
            Source::Headline => "headline",
            Source::Tweet => "tweet",
            Source::Story => "story",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "headline" => Ok(Source::Headline),
            "tweet" => Ok(Source::Tweet),
            "story" => Ok(Source::Story),
            other => Err(Error::InvalidInput(format!("unknown source {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub ts: DateTime<Utc>,
    pub text: String,
    pub source: Source,
}

impl Document {
    /// UTC calendar date; there is no intraday cutoff.
    pub fn date(&self) -> NaiveDate {
        self.ts.date_naive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PriceBar {
    pub date: NaiveDate,
    pub close: f64,
}

/// A skipped or corrected input record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

/// Records read from a file together with the warnings raised on the way.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub records: Vec<T>,
    pub warnings: Vec<LoadWarning>,
}

#[derive(Deserialize)]
struct RawDocument {
    id: Option<serde_json::Value>,
    ts: Option<String>,
    text: Option<String>,
    source: Option<String>,
}

fn parse_document(line: &str) -> std::result::Result<Document, String> {
    let raw: RawDocument = serde_json::from_str(line).map_err(|e| format!("invalid JSON: {e}"))?;
    let id = match raw.id {
        Some(serde_json::Value::String(s)) if !s.is_empty() => s,
        Some(serde_json::Value::Number(n)) => n.to_string(),
        Some(_) => return Err("field \"id\" must be a non-empty string".into()),
        None => return Err("missing field \"id\"".into()),
    };
    let ts = raw.ts.ok_or("missing field \"ts\"")?;
    let ts = DateTime::parse_from_rfc3339(&ts)
        .map_err(|e| format!("unparseable timestamp {ts:?}: {e}"))?
        .with_timezone(&Utc);
    let text = raw.text.ok_or("missing field \"text\"")?;
    if text.trim().is_empty() {
        return Err("empty text".into());
    }
    let source = raw.source.ok_or("missing field \"source\"")?;
    let source = source.parse::<Source>().map_err(|e| e.to_string())?;
    Ok(Document {
        id,
        ts,
        text,
        source,
    })
}

/// Parse line-delimited document records from `content`.
///
/// Blank lines are ignored. Bad records (including duplicate ids) are skipped
/// with a warning; the whole input is rejected when more than half of the
/// records are bad and there are at least [`MIN_RECORDS_FOR_MALFORMED_RULE`]
/// of them.
pub fn parse_documents(
    content: &str,
    path: &Path,
    source_filter: Option<Source>,
) -> Result<Loaded<Document>> {
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut seen = HashSet::new();
    let mut total = 0usize;

    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        match parse_document(line) {
            Ok(doc) if !seen.insert(doc.id.clone()) => warnings.push(LoadWarning {
                line: line_no,
                message: format!("duplicate id {:?}", doc.id),
            }),
            Ok(doc) => {
                if source_filter.is_none_or(|s| s == doc.source) {
                    records.push(doc);
                }
            }
            Err(message) => warnings.push(LoadWarning {
                line: line_no,
                message,
            }),
        }
    }

    let malformed = warnings.len();
    if total >= MIN_RECORDS_FOR_MALFORMED_RULE
        && malformed as f64 > MAX_MALFORMED_FRACTION * total as f64
    {
        let first = warnings
            .first()
            .map(|w| format!("line {}: {}", w.line, w.message))
            .unwrap_or_default();
        return Err(Error::TooManyMalformed {
            path: path.to_path_buf(),
            malformed,
            total,
            first,
        });
    }
    for w in &warnings {
        log::warn!("{}: line {}: skipped: {}", path.display(), w.line, w.message);
    }
    Ok(Loaded { records, warnings })
}

pub fn load_documents(path: &Path, source_filter: Option<Source>) -> Result<Loaded<Document>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_documents(&content, path, source_filter)
}

#[derive(Deserialize)]
struct RawPrice {
    date: String,
    close: String,
}

/// Parse a `date,close` CSV. Unsorted rows are sorted (with a warning);
/// duplicate dates and non-positive closes are fatal.
pub fn parse_prices(content: &str, path: &Path) -> Result<Loaded<PriceBar>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(content.as_bytes());
    let headers = reader.headers().map_err(|e| Error::InvalidRecord {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })?;
    if headers.len() < 2 || &headers[0] != "date" || &headers[1] != "close" {
        return Err(Error::InvalidRecord {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header \"date,close\", found {headers:?}"),
        });
    }

    let mut bars = Vec::new();
    for row in reader.deserialize::<RawPrice>() {
        let invalid = |line: usize, message: String| Error::InvalidRecord {
            path: path.to_path_buf(),
            line,
            message,
        };
        let raw = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            invalid(line, e.to_string())
        })?;
        let line = bars.len() + 2;
        let date = NaiveDate::parse_from_str(&raw.date, "%Y-%m-%d")
            .map_err(|e| invalid(line, format!("bad date {:?}: {e}", raw.date)))?;
        let close: f64 = raw
            .close
            .parse()
            .map_err(|e| invalid(line, format!("bad close {:?}: {e}", raw.close)))?;
        if !(close.is_finite() && close > 0.0) {
            return Err(invalid(line, format!("close must be positive, got {close}")));
        }
        bars.push(PriceBar { date, close });
    }

    let mut warnings = Vec::new();
    if bars.windows(2).any(|w| w[0].date > w[1].date) {
        warnings.push(LoadWarning {
            line: 0,
            message: "price rows were not in date order; sorted ascending".into(),
        });
        log::warn!("{}: price rows out of order, sorting", path.display());
        bars.sort_by_key(|b| b.date);
    }
    if let Some(w) = bars.windows(2).find(|w| w[0].date == w[1].date) {
        return Err(Error::InvalidRecord {
            path: path.to_path_buf(),
            line: 0,
            message: format!("duplicate date {}", w[0].date),
        });
    }
    Ok(Loaded {
        records: bars,
        warnings,
    })
}

pub fn load_prices(path: &Path) -> Result<Loaded<PriceBar>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_prices(&content, path)
}

/// Ordered set of dates with market data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradingCalendar {
    days: Vec<NaiveDate>,
}

impl TradingCalendar {
    pub fn new(mut days: Vec<NaiveDate>) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::EmptyCalendar);
        }
        days.sort_unstable();
        days.dedup();
        Ok(Self { days })
    }

    pub fn from_bars(bars: &[PriceBar]) -> Result<Self> {
        Self::new(bars.iter().map(|b| b.date).collect())
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.days.binary_search(&date).is_ok()
    }

    /// Smallest trading day on or after `date`, if any.
    pub fn effective_day(&self, date: NaiveDate) -> Option<NaiveDate> {
        let idx = self.days.partition_point(|d| *d < date);
        self.days.get(idx).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayBucket {
    pub trading_day: NaiveDate,
    pub documents: Vec<Document>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bucketing {
    /// One bucket per calendar day, in order (possibly empty).
    pub buckets: Vec<DayBucket>,
    /// Documents dated after the final trading day.
    pub excluded: usize,
}

/// Assign every document to its effective trading day.
///
/// Weekend and holiday documents are merged into the following session's
/// bucket; documents keep their input order within a bucket.
pub fn bucket_by_day(docs: &[Document], cal: &TradingCalendar) -> Bucketing {
    let mut by_day: BTreeMap<NaiveDate, Vec<Document>> =
        cal.days().iter().map(|d| (*d, Vec::new())).collect();
    let mut excluded = 0;
    for doc in docs {
        match cal.effective_day(doc.date()) {
            Some(day) => by_day.entry(day).or_default().push(doc.clone()),
            None => excluded += 1,
        }
    }
    if excluded > 0 {
        log::info!("{excluded} document(s) dated after the last trading day were excluded");
    }
    Bucketing {
        buckets: by_day
            .into_iter()
            .map(|(trading_day, documents)| DayBucket {
                trading_day,
                documents,
            })
            .collect(),
        excluded,
    }
}
