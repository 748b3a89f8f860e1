//! Plain-text rendering of the correlation heatmap and the pipeline report.

use std::fmt::Write as _;

use sentivol_core::classify::EvalReport;
use sentivol_core::market::MarketSeries;
use sentivol_core::stats::{GridCell, SentimentField, Target, SIGNIFICANCE};
use sentivol_core::topics::TopicSummary;

use crate::commands::{EvalFile, GrangerRow, SentimentData, GRID_LAGS};
use crate::config::RunConfig;

/// Sentiment fields down the side, target/lag pairs across. Cells show r to
/// three decimals, starred when p < 0.05.
pub fn heatmap(grid: &[GridCell]) -> String {
    let mut columns = Vec::new();
    for target in Target::ALL {
        for lag in GRID_LAGS {
            columns.push((target, lag));
        }
    }
    let mut s = String::new();
    let _ = write!(s, "{:<10}", "");
    for (target, lag) in &columns {
        let _ = write!(s, " {:>14}", format!("{target}@lag{lag}"));
    }
    s.push('\n');
    for field in SentimentField::GRID {
        let _ = write!(s, "{:<10}", field.as_str());
        for &(target, lag) in &columns {
            let cell = grid
                .iter()
                .find(|c| c.field == field && c.target == target && c.lag == lag)
                .map(|c| match &c.result {
                    Ok(r) => format!("{:.3}{}", r.r, if r.p_value < SIGNIFICANCE { "*" } else { " " }),
                    Err(_) => "n/a ".to_string(),
                })
                .unwrap_or_else(|| "- ".to_string());
            let _ = write!(s, " {cell:>14}");
        }
        s.push('\n');
    }
    s.push_str("* p < 0.05\n");
    s
}

pub struct ReportInputs<'a> {
    pub sentiment: &'a SentimentData,
    pub market: &'a MarketSeries,
    pub grid: &'a [GridCell],
    pub granger: &'a [GrangerRow],
    pub topics: &'a [TopicSummary],
    pub eval: &'a EvalFile,
    pub cfg: &'a RunConfig,
}

fn metrics_row(s: &mut String, name: &str, r: &EvalReport) {
    let flag = |v: f64, undefined: bool| if undefined { "n/a".to_string() } else { format!("{v:.4}") };
    let _ = writeln!(
        s,
        "{:<10} {:>9} {:>9} {:>9} {:>9} {:>6}",
        name,
        format!("{:.4}", r.accuracy),
        flag(r.recall, r.recall_undefined),
        flag(r.precision, r.precision_undefined),
        flag(r.f1, r.f1_undefined),
        r.n_test
    );
}

pub fn full_report(inp: &ReportInputs<'_>) -> String {
    let mut s = String::new();
    let mkt = inp.market;
    let labelled = mkt.labels.iter().flatten().count();

    s.push_str("== Summary ==\n");
    let _ = writeln!(s, "documents          {}", inp.sentiment.n_documents);
    let _ = writeln!(s, "documents dropped  {} (after the last trading day)", inp.sentiment.excluded);
    let _ = writeln!(s, "trading days       {}", mkt.dates.len());
    let _ = writeln!(s, "days with text     {}", inp.sentiment.daily.len());
    let _ = writeln!(s, "labelled days      {labelled} (window {})", inp.cfg.window);
    if let (Some(first), Some(last)) = (mkt.dates.first(), mkt.dates.last()) {
        let _ = writeln!(s, "date range         {first} .. {last}");
    }

    s.push_str("\n== Sentiment/market correlation (Pearson r) ==\n");
    s.push_str(&heatmap(inp.grid));

    s.push_str("\n== Granger causality (F test) ==\n");
    let _ = writeln!(
        s,
        "{:<26} {:>3} {:>10} {:>10} {:>4}",
        "direction", "lag", "F", "p", "sig"
    );
    for g in inp.granger {
        match &g.result {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "{:<26} {:>3} {:>10.4} {:>10.4} {:>4}",
                    g.direction_label(),
                    g.lag,
                    r.f_stat,
                    r.p_value,
                    if r.is_significant() { "*" } else { "" }
                );
            }
            Err(e) => {
                let _ = writeln!(s, "{:<26} {:>3} n/a ({e})", g.direction_label(), g.lag);
            }
        }
    }

    s.push_str("\n== Topics ==\n");
    for t in inp.topics {
        let words: Vec<&str> = t.top_words.iter().map(|(w, _)| w.as_str()).collect();
        let _ = writeln!(s, "topic {:>2}: {}", t.topic_id, words.join(" "));
    }

    let e = inp.eval;
    let _ = writeln!(
        s,
        "\n== Volatility direction classifier ({} features, k = {}) ==",
        e.feature_mode, e.k
    );
    let _ = writeln!(
        s,
        "{:<10} {:>9} {:>9} {:>9} {:>9} {:>6}",
        "split", "accuracy", "recall", "precision", "f1", "n"
    );
    metrics_row(&mut s, "test", &e.test);
    metrics_row(&mut s, "in-sample", &e.in_sample);
    let c = e.test.confusion;
    let _ = writeln!(s, "test period        {} .. {}", e.test_start, e.test_end);
    let _ = writeln!(s, "test confusion     actual UP: {} UP, {} DOWN", c[0][0], c[0][1]);
    let _ = writeln!(s, "                   actual DOWN: {} UP, {} DOWN", c[1][0], c[1][1]);
    let _ = writeln!(s, "UP base rate       train {:.4}, test {:.4}", e.train_base_rate, e.test.base_rate);
    s
}
