//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.
//! Tolerances and time limits are pinned in the constants below.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;
use serde_json::Value;

use sentivol_core::aggregate::DailySentiment;
use sentivol_core::classify::{evaluate, LabeledRow, LogisticModel};
use sentivol_core::market::{log_returns, rolling_volatility, Direction, VarianceDivisor};
use sentivol_core::rng::substream;
use sentivol_core::sentiment::{score_text, Lexicon, RuleConfig, SentimentScores};
use sentivol_core::stats::special::{f_cdf, ln_gamma, reg_incomplete_beta, t_cdf};
use sentivol_core::stats::{granger_test, pearson};
use sentivol_core::topics::{build_vocab, infer_theta, GibbsSampler, InferConfig, TrainingDoc, Vocabulary};

const SENTIMENT_TOL: f64 = 1e-4;
const SENTIMENT_LIMIT: Duration = Duration::from_secs(1);
const SENTD_TRIPLES: usize = 1000;
const MARKET_TOL: f64 = 1e-12;
const MARKET_WINDOWS: usize = 1000;
const PEARSON_TOL: f64 = 1e-9;
const GRANGER_TOL: f64 = 1e-6;
const SPECIAL_TOL: f64 = 1e-10;
const STATS_LIMIT: Duration = Duration::from_secs(10);
const GRANGER_T: usize = 200;
const POWER_TRIALS: u64 = 100;
const MIN_POWER: f64 = 0.95;
const SIZE_TRIALS: u64 = 1000;
const SIZE_TARGET: f64 = 0.05;
const SIZE_TOL: f64 = 0.02;
const GRANGER_LIMIT: Duration = Duration::from_secs(60);
const LDA_SEEDS: u64 = 5;
const LDA_MIN_RECOVERED: usize = 4;
const LDA_SUM_TOL: f64 = 1e-9;
const LDA_LIMIT: Duration = Duration::from_secs(60);
const PIPELINE_SEEDS: u64 = 5;
const MIN_ACCURACY: f64 = 0.60;
const PIPELINE_LIMIT: Duration = Duration::from_secs(180);
const ANTICORR_RANGE: (f64, f64) = (-1.0, -0.5);
const ANTICORR_P: f64 = 0.05;
const METRIC_MATRICES: usize = 1000;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn core_fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn sentivol(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_sentivol"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("sentivol {args:?} failed: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[derive(Deserialize)]
struct GoldenSentence {
    text: String,
    neg: f64,
    neu: f64,
    pos: f64,
    compound: f64,
}

fn sentiment_golden() -> Outcome {
    let golden: Vec<GoldenSentence> = read_json(&core_fixture("vader_golden.json"))?;
    ensure(golden.len() == 50, || format!("expected 50 sentences, found {}", golden.len()))?;
    let start = Instant::now();
    let lex = Lexicon::bundled();
    let cfg = RuleConfig::default();
    let mut worst = 0.0f64;
    for g in &golden {
        let s = score_text(&g.text, &lex, &cfg);
        for (got, want) in [(s.neg, g.neg), (s.neu, g.neu), (s.pos, g.pos), (s.compound, g.compound)] {
            worst = worst.max((got - want).abs());
            ensure((got - want).abs() <= SENTIMENT_TOL, || {
                format!("{:?}: {got} vs {want}", g.text)
            })?;
        }
    }
    let punct = ["!", "?"].iter().all(|p| golden.iter().any(|g| g.text.contains(p)));
    ensure(punct, || "fixture lacks '!' or '?' cases".into())?;
    within(start.elapsed(), SENTIMENT_LIMIT)?;
    Ok(format!("50 sentences, max abs diff {worst:.1e}, {:.2?}", start.elapsed()))
}

/// True when `v` is the nearest double to `num / den`, checked in integers.
fn is_correctly_rounded(v: f64, num: i128, den: i128) -> bool {
    if v == 0.0 {
        return num == 0;
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = ((bits & ((1u64 << 52) - 1)) | (1u64 << 52)) as i128;
    // v = sign * mantissa * 2^(exp - 1075); only |v| <= 1 occurs here
    let shift = 1075 - exp;
    if !(0..=120).contains(&shift) {
        return false;
    }
    // |mantissa*den - num*2^shift| <= den/2 means within half an ulp
    let diff = sign * mantissa * den - num * (1i128 << shift);
    2 * diff.abs() <= den
}

fn scores_with(compound: f64) -> SentimentScores {
    SentimentScores {
        neg: 0.0,
        neu: 1.0,
        pos: 0.0,
        compound,
    }
}

fn sentd_exactness() -> Outcome {
    let mut rng = substream(0, "sentd-triples");
    let cfg = RuleConfig::default();
    let day = NaiveDate::from_ymd_opt(2020, 1, 2).unwrap();
    for i in 0..SENTD_TRIPLES {
        let (p, n, z): (u64, u64, u64) =
            (rng.random_range(0..200), rng.random_range(0..200), rng.random_range(0..200));
        let mut scores = Vec::new();
        scores.extend((0..p).map(|_| scores_with(0.5)));
        scores.extend((0..n).map(|_| scores_with(-0.5)));
        scores.extend((0..z).map(|_| scores_with(0.0)));
        let d = DailySentiment::from_scores(day, &scores, &cfg);
        ensure((d.n_pos, d.n_neg, d.n_neut) == (p, n, z), || format!("triple {i}: counts differ"))?;
        let (num, den) = (p as i128 - n as i128, (p + n + z + 3) as i128);
        ensure(is_correctly_rounded(d.sentd, num, den), || {
            format!("triple {i} ({p}, {n}, {z}): {} is not {num}/{den}", d.sentd)
        })?;
    }
    Ok(format!("{SENTD_TRIPLES} random triples exact"))
}

fn market_math() -> Outcome {
    let mut rng = substream(0, "market");
    let mut closes = vec![100.0f64];
    for _ in 0..1500 {
        let r: f64 = StandardNormal.sample(&mut rng);
        closes.push(closes.last().unwrap() * (0.015 * r).exp());
    }
    let returns = log_returns(&closes).map_err(|e| e.to_string())?;
    let total: f64 = returns.iter().sum();
    let expected = (closes[closes.len() - 1] / closes[0]).ln();
    ensure((total - expected).abs() <= MARKET_TOL, || {
        format!("telescoping sum off by {:e}", (total - expected).abs())
    })?;

    let mut worst = 0.0f64;
    for _ in 0..MARKET_WINDOWS {
        let window = rng.random_range(2..40usize);
        let start = rng.random_range(0..returns.len() - window);
        let slice = &returns[start..start + window];
        let got = rolling_volatility(slice, window, VarianceDivisor::Population).map_err(|e| e.to_string())?[0];
        let mut mean = 0.0;
        for r in slice {
            mean += r;
        }
        mean /= window as f64;
        let mut ss = 0.0;
        for r in slice {
            ss += (r - mean).powi(2);
        }
        let brute = (ss / window as f64).sqrt() * 252f64.sqrt();
        worst = worst.max((got - brute).abs());
    }
    ensure(worst <= MARKET_TOL, || format!("volatility off by {worst:e}"))?;

    let pair = rolling_volatility(&[0.01, -0.01], 2, VarianceDivisor::Population).map_err(|e| e.to_string())?[0];
    let target = 0.01 * 252f64.sqrt();
    ensure((pair - target).abs() <= MARKET_TOL, || format!("two-point case {pair} vs {target}"))?;
    Ok(format!("max volatility diff {worst:.1e} over {MARKET_WINDOWS} windows"))
}

#[derive(Deserialize)]
struct StatsFixture {
    x: Vec<f64>,
    y: Vec<f64>,
    k: usize,
    pearson_r: f64,
    pearson_p: f64,
    granger_f: f64,
    granger_p: f64,
    df_num: usize,
    df_denom: usize,
}

#[derive(Deserialize)]
struct StatsOracle {
    fixtures: Vec<StatsFixture>,
    ln_gamma: Vec<[f64; 2]>,
    reg_incomplete_beta: Vec<[f64; 4]>,
    t_cdf: Vec<[f64; 3]>,
    f_cdf: Vec<[f64; 4]>,
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what}: {got} vs {want}"))
}

fn stats_oracle() -> Outcome {
    let o: StatsOracle = read_json(&core_fixture("stats_oracle.json"))?;
    let start = Instant::now();
    ensure(o.fixtures.len() == 20, || format!("expected 20 fixtures, found {}", o.fixtures.len()))?;
    for (i, f) in o.fixtures.iter().enumerate() {
        ensure(f.x.len() <= 50, || format!("fixture {i} longer than 50"))?;
        let c = pearson(&f.x, &f.y).map_err(|e| e.to_string())?;
        close(&format!("fixture {i} r"), c.r, f.pearson_r, PEARSON_TOL)?;
        close(&format!("fixture {i} p"), c.p_value, f.pearson_p, PEARSON_TOL)?;
        let g = granger_test(&f.x, &f.y, f.k).map_err(|e| e.to_string())?;
        ensure((g.df_num, g.df_denom) == (f.df_num, f.df_denom), || format!("fixture {i} dfs"))?;
        close(&format!("fixture {i} F"), g.f_stat, f.granger_f, GRANGER_TOL)?;
        close(&format!("fixture {i} Granger p"), g.p_value, f.granger_p, GRANGER_TOL)?;
    }
    let mut points = 0;
    let err = |e: sentivol_core::Error| e.to_string();
    for [x, v] in &o.ln_gamma {
        close(&format!("ln_gamma({x})"), ln_gamma(*x).map_err(err)?, *v, SPECIAL_TOL)?;
        points += 1;
    }
    for [a, b, x, v] in &o.reg_incomplete_beta {
        close(&format!("I_{x}({a},{b})"), reg_incomplete_beta(*a, *b, *x).map_err(err)?, *v, SPECIAL_TOL)?;
        points += 1;
    }
    for [t, df, v] in &o.t_cdf {
        close(&format!("t_cdf({t},{df})"), t_cdf(*t, *df).map_err(err)?, *v, SPECIAL_TOL)?;
        points += 1;
    }
    for [f, d1, d2, v] in &o.f_cdf {
        close(&format!("f_cdf({f},{d1},{d2})"), f_cdf(*f, *d1, *d2).map_err(err)?, *v, SPECIAL_TOL)?;
        points += 1;
    }
    within(start.elapsed(), STATS_LIMIT)?;
    Ok(format!("20 fixtures, {points} special-function points, {:.2?}", start.elapsed()))
}

fn noise(seed: u64, label: &str) -> Vec<f64> {
    let mut rng = substream(seed, label);
    (0..GRANGER_T).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn granger_size_power() -> Outcome {
    let start = Instant::now();
    let mut power_hits = 0;
    for trial in 0..POWER_TRIALS {
        let x = noise(trial, "x");
        let e = noise(trial, "e");
        let y: Vec<f64> = (0..GRANGER_T)
            .map(|t| if t == 0 { e[0] } else { 0.8 * x[t - 1] + e[t] })
            .collect();
        if granger_test(&x, &y, 1).map_err(|e| e.to_string())?.p_value < 0.05 {
            power_hits += 1;
        }
    }
    let mut size_hits = 0;
    for trial in 0..SIZE_TRIALS {
        let x = noise(10_000 + trial, "x");
        let y = noise(10_000 + trial, "y");
        if granger_test(&x, &y, 1).map_err(|e| e.to_string())?.p_value < 0.05 {
            size_hits += 1;
        }
    }
    let power = power_hits as f64 / POWER_TRIALS as f64;
    let size = size_hits as f64 / SIZE_TRIALS as f64;
    ensure(power >= MIN_POWER, || format!("power {power}"))?;
    ensure((size - SIZE_TARGET).abs() <= SIZE_TOL, || format!("size {size}"))?;
    within(start.elapsed(), GRANGER_LIMIT)?;
    Ok(format!("power {power:.2}, size {size:.3}, {:.2?}", start.elapsed()))
}

const BLOCK_A: &[&str] = &[
    "oil", "gas", "crude", "barrel", "refinery", "pipeline", "drilling", "offshore", "rig", "opec", "brent",
    "petrol", "diesel", "tanker", "shale", "fuel", "energy", "field", "reserve", "output",
];
const BLOCK_B: &[&str] = &[
    "bank", "loan", "mortgage", "credit", "deposit", "lender", "interest", "savings", "branch", "capital",
    "borrower", "debt", "bond", "yield", "treasury", "currency", "payment", "account", "fintech", "regulator",
];

fn block_corpus(seed: u64) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (b, block) in [BLOCK_A, BLOCK_B].iter().enumerate() {
        for i in 0..100 {
            let id = format!("d{b}-{i:03}");
            let mut rng = substream(seed, &id);
            let words: Vec<&str> = (0..20).map(|_| *block.choose(&mut rng).unwrap()).collect();
            out.push((id, words.join(" ")));
        }
    }
    out
}

fn encode(vocab: &Vocabulary, docs: &[(String, String)]) -> Vec<TrainingDoc> {
    docs.iter()
        .map(|(id, text)| TrainingDoc {
            id: id.clone(),
            tokens: vocab.encode(text),
        })
        .collect()
}

fn lda_recovery() -> Outcome {
    let start = Instant::now();
    let mut recovered = 0;
    for seed in 0..LDA_SEEDS {
        let corpus = block_corpus(seed);
        let raw: Vec<&str> = corpus.iter().map(|(_, t)| t.as_str()).collect();
        let vocab = build_vocab(&raw, &BTreeSet::new(), 1, 1.0).map_err(|e| e.to_string())?;
        let docs = encode(&vocab, &corpus);
        let mut sampler = GibbsSampler::new(&docs, vocab.len(), 2, 0.5, 0.01, seed).map_err(|e| e.to_string())?;
        for sweep in 0..500 {
            sampler.sweep();
            ensure(sampler.counts_consistent(), || format!("seed {seed}: counts drift at sweep {sweep}"))?;
        }
        let model = sampler.to_model(&vocab);
        for t in 0..2 {
            let sum: f64 = model.phi_row(t).iter().sum();
            ensure((sum - 1.0).abs() <= LDA_SUM_TOL, || format!("seed {seed}: phi row {t} sums to {sum}"))?;
        }
        for (id, text) in corpus.iter().step_by(17) {
            let theta = infer_theta(&model, id, &vocab.encode(text), &InferConfig::default());
            let sum: f64 = theta.theta.iter().sum();
            ensure((sum - 1.0).abs() <= LDA_SUM_TOL, || format!("seed {seed}: theta of {id} sums to {sum}"))?;
        }
        let blocks: Vec<BTreeSet<bool>> = (0..2)
            .map(|t| model.top_words(t, 10).iter().map(|(w, _)| BLOCK_A.contains(&w.as_str())).collect())
            .collect();
        if blocks.iter().all(|b| b.len() == 1) && blocks[0] != blocks[1] {
            recovered += 1;
        }
    }
    ensure(recovered >= LDA_MIN_RECOVERED, || format!("recovered in {recovered}/{LDA_SEEDS} seeds"))?;
    within(start.elapsed(), LDA_LIMIT)?;
    Ok(format!("recovered in {recovered}/{LDA_SEEDS} seeds, {:.2?}", start.elapsed()))
}

fn run_synth_pipeline(dir: &Path, seed: u64, extra: &[&str]) -> Result<PathBuf, String> {
    let data = dir.join("data");
    let out = dir.join("out");
    let seed = seed.to_string();
    sentivol(&["synth", "--kind", "topic-direction", "--seed", &seed, "--output-dir", path_str(&data)])?;
    let config = data.join("sentivol.toml");
    let mut args = vec!["--config", path_str(&config), "pipeline", "--output-dir", path_str(&out)];
    args.extend_from_slice(extra);
    sentivol(&args)?;
    Ok(out)
}

fn end_to_end() -> Outcome {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut accuracies = Vec::new();
    for seed in 0..PIPELINE_SEEDS {
        let out = run_synth_pipeline(&tmp.path().join(seed.to_string()), seed, &[])?;
        let eval: Value = read_json(&out.join("eval.json"))?;
        let acc = eval["accuracy"].as_f64().ok_or("eval.json lacks accuracy")?;
        accuracies.push(acc);
    }
    let shown: Vec<String> = accuracies.iter().map(|a| format!("{a:.3}")).collect();
    ensure(accuracies.iter().all(|&a| a >= MIN_ACCURACY), || {
        format!("test accuracies [{}]", shown.join(", "))
    })?;
    within(start.elapsed(), PIPELINE_LIMIT)?;
    Ok(format!("test accuracy [{}], {:.2?}", shown.join(", "), start.elapsed()))
}

fn anticorrelation() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    let out = tmp.path().join("out");
    sentivol(&["synth", "--kind", "mood", "--seed", "0", "--output-dir", path_str(&data)])?;
    let config = data.join("sentivol.toml");
    sentivol(&["--config", path_str(&config), "correlate", "--output-dir", path_str(&out)])?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(out.join("correlations.csv"))
        .map_err(|e| e.to_string())?;
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(rows.len() == 16, || format!("grid has {} cells", rows.len()))?;
    let cell = rows
        .iter()
        .find(|r| &r[0] == "positive" && &r[1] == "volatility" && &r[2] == "1")
        .ok_or("missing (positive, volatility, 1) cell")?;
    let r: f64 = cell[3].parse().map_err(|_| "unparseable r")?;
    let p: f64 = cell[4].parse().map_err(|_| "unparseable p")?;
    ensure((ANTICORR_RANGE.0..=ANTICORR_RANGE.1).contains(&r), || format!("r = {r}"))?;
    ensure(p < ANTICORR_P && &cell[6] == "true", || format!("p = {p}, flag {}", &cell[6]))?;
    Ok(format!("r = {r:.4}, p = {p:.2e}"))
}

fn metric_exactness() -> Outcome {
    let mut rng = substream(0, "confusion");
    let model = LogisticModel::linear(vec![1.0], 0.0);
    let day = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let row = |x: f64, label| LabeledRow {
        date: day,
        features: vec![x],
        label,
    };
    let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    for i in 0..METRIC_MATRICES {
        let [tp, fn_, fp, tn]: [u64; 4] = std::array::from_fn(|_| rng.random_range(0..40));
        let mut rows = Vec::new();
        rows.extend((0..tp).map(|_| row(1.0, Direction::Up)));
        rows.extend((0..fn_).map(|_| row(-1.0, Direction::Up)));
        rows.extend((0..fp).map(|_| row(1.0, Direction::Down)));
        rows.extend((0..tn).map(|_| row(-1.0, Direction::Down)));
        if rows.is_empty() {
            continue;
        }
        let e = evaluate(&model, &rows, 0).map_err(|e| e.to_string())?;
        let expected = [
            ratio(tp + tn, tp + tn + fp + fn_),
            ratio(tp, tp + fp),
            ratio(tp, tp + fn_),
            ratio(2 * tp, 2 * tp + fp + fn_),
        ];
        let got = [e.accuracy, e.precision, e.recall, e.f1];
        ensure(got == expected && e.confusion == [[tp, fn_], [fp, tn]], || {
            format!("matrix {i} ({tp}, {fn_}, {fp}, {tn}): {got:?} vs {expected:?}")
        })?;
        ensure(e.precision_undefined == (tp + fp == 0) && e.recall_undefined == (tp + fn_ == 0), || {
            format!("matrix {i}: undefined flags")
        })?;
    }
    Ok(format!("{METRIC_MATRICES} random matrices exact"))
}

fn manifest_hashes(out: &Path) -> Result<BTreeMap<String, (String, String)>, String> {
    let manifest: Value = read_json(&out.join("manifest.json"))?;
    let stages = manifest["stages"].as_array().ok_or("manifest lacks stages")?;
    Ok(stages
        .iter()
        .map(|s| {
            (
                s["file"].as_str().unwrap_or_default().to_string(),
                (
                    s["stage"].as_str().unwrap_or_default().to_string(),
                    s["sha256"].as_str().unwrap_or_default().to_string(),
                ),
            )
        })
        .collect())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = run_synth_pipeline(&tmp.path().join("a"), 3, &[])?;
    let b = run_synth_pipeline(&tmp.path().join("b"), 3, &[])?;
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.file_name()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    names.sort();
    for name in &names {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| e.to_string())?;
        ensure(x == y, || format!("{} differs between reruns", name.to_string_lossy()))?;
    }

    // a different volatility window touches market and what depends on it
    let c = run_synth_pipeline(&tmp.path().join("c"), 3, &["--window", "12"])?;
    let (base, moved) = (manifest_hashes(&a)?, manifest_hashes(&c)?);
    let downstream = ["market", "correlate", "granger", "classify-train", "classify-eval", "report"];
    for (file, (stage, hash)) in &base {
        let changed = moved.get(file).map(|(_, h)| h != hash).unwrap_or(true);
        ensure(changed == downstream.contains(&stage.as_str()), || {
            format!("{file} ({stage}) changed = {changed} after a window change")
        })?;
    }
    Ok(format!("{} artifacts byte-identical; window change confined to market-downstream", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("sentiment golden suite", sentiment_golden),
        ("sentd exactness", sentd_exactness),
        ("market math", market_math),
        ("statistics oracle equivalence", stats_oracle),
        ("granger size and power", granger_size_power),
        ("lda planted recovery", lda_recovery),
        ("end-to-end planted-signal pipeline", end_to_end),
        ("correlation grid anticorrelation", anticorrelation),
        ("metric exactness", metric_exactness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
