//! One function per subcommand. Each stage recomputes what it needs from
//! the raw inputs or reads the files an earlier stage wrote, so running the
//! stages one by one produces the same files as `pipeline`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::Serialize;

use sentivol_core::aggregate::{build_daily_series, DailySentiment};
use sentivol_core::classify::{self, EvalReport, LabeledDataset, LogisticModel, TrainConfig};
use sentivol_core::corpus::{bucket_by_day, load_documents, load_prices, Bucketing, Document, PriceBar, Source, TradingCalendar};
use sentivol_core::market::{MarketSeries, VarianceDivisor};
use sentivol_core::sentiment::{classify_polarity, score_document, Lexicon, RuleConfig};
use sentivol_core::stats::{aligned_series, correlation_grid, granger_both, GrangerDirection, GridCell, SentimentField, Target};
use sentivol_core::synth::{self, MoodConfig, TopicDirectionConfig};
use sentivol_core::topics::{
    self, build_vocab, english_stopwords, gibbs_train, training_docs, DayFeatureVector, FeatureMode, InferConfig,
    LdaConfig, LdaModel, TopicSummary,
};

use crate::artifact::{self, file_sha256, num, opt_num, sha256_hex, Artifact, Meta};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::files;
use crate::report;
use crate::SynthKind;

/// Lags reported in the correlation grid.
pub const GRID_LAGS: [usize; 2] = [0, 1];

/// Files written by a stage plus the values it computed.
pub struct StageOutput<T> {
    pub artifacts: Vec<Artifact>,
    pub value: T,
}

fn out(cfg: &RunConfig, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}

struct LexiconInput {
    lexicon: Lexicon,
    sha256: String,
}

fn lexicon(cfg: &RunConfig) -> Result<LexiconInput, CliError> {
    match &cfg.lexicon {
        None => Ok(LexiconInput {
            lexicon: Lexicon::bundled(),
            sha256: sha256_hex(Lexicon::bundled_source().as_bytes()),
        }),
        Some(_) => {
            let path = cfg.require_file("lexicon", &cfg.lexicon)?;
            Ok(LexiconInput {
                lexicon: Lexicon::load(path)?,
                sha256: file_sha256(path)?,
            })
        }
    }
}

struct DocumentInput {
    documents: Vec<Document>,
    sha256: String,
}

fn documents(cfg: &RunConfig) -> Result<DocumentInput, CliError> {
    let path = cfg.require_file("documents", &cfg.documents)?;
    let loaded = load_documents(path, cfg.source)?;
    if !loaded.warnings.is_empty() {
        log::warn!("{}: {} record(s) skipped", path.display(), loaded.warnings.len());
    }
    Ok(DocumentInput {
        documents: loaded.records,
        sha256: file_sha256(path)?,
    })
}

struct PriceInput {
    bars: Vec<PriceBar>,
    sha256: String,
}

fn prices(cfg: &RunConfig) -> Result<PriceInput, CliError> {
    let path = cfg.require_file("prices", &cfg.prices)?;
    let loaded = load_prices(path)?;
    for w in &loaded.warnings {
        log::warn!("{}: line {}: {}", path.display(), w.line, w.message);
    }
    Ok(PriceInput {
        bars: loaded.records,
        sha256: file_sha256(path)?,
    })
}

fn market_series(cfg: &RunConfig, bars: &[PriceBar]) -> Result<MarketSeries, CliError> {
    Ok(MarketSeries::from_bars(bars, cfg.window, VarianceDivisor::Population)?)
}

fn buckets(docs: &[Document], bars: &[PriceBar]) -> Result<Bucketing, CliError> {
    let cal = TradingCalendar::from_bars(bars)?;
    Ok(bucket_by_day(docs, &cal))
}

#[derive(Serialize)]
struct ScoreFingerprint<'a> {
    documents: &'a str,
    source: Option<Source>,
    lexicon: &'a str,
    rules: RuleConfig,
}

fn score_fingerprint<'a>(cfg: &RunConfig, docs: &'a DocumentInput, lex: &'a LexiconInput) -> ScoreFingerprint<'a> {
    ScoreFingerprint {
        documents: &docs.sha256,
        source: cfg.source,
        lexicon: &lex.sha256,
        rules: RuleConfig::default(),
    }
}

pub fn score(cfg: &RunConfig) -> Result<StageOutput<()>, CliError> {
    let lex = lexicon(cfg)?;
    let docs = documents(cfg)?;
    let rules = RuleConfig::default();
    let rows: Vec<Vec<String>> = docs
        .documents
        .iter()
        .map(|d| {
            let s = score_document(d, &lex.lexicon, &rules);
            vec![
                d.id.clone(),
                d.date().to_string(),
                num(s.neg),
                num(s.neu),
                num(s.pos),
                num(s.compound),
                classify_polarity(&s, &rules).as_str().to_string(),
            ]
        })
        .collect();
    let meta = Meta::new("score", &score_fingerprint(cfg, &docs, &lex), cfg.seed);
    let path = out(cfg, files::SCORES);
    artifact::write_csv(
        &path,
        &meta,
        &["id", "date", "neg", "neu", "pos", "compound", "polarity"],
        &rows,
    )?;
    Ok(StageOutput {
        artifacts: vec![Artifact { stage: "score", path }],
        value: (),
    })
}

/// Daily sentiment series with the inputs it came from.
pub struct SentimentData {
    pub daily: Vec<DailySentiment>,
    pub n_documents: usize,
    pub excluded: usize,
}

#[derive(Serialize)]
struct AggregateFingerprint<'a> {
    score: ScoreFingerprint<'a>,
    prices: &'a str,
}

pub fn aggregate(cfg: &RunConfig) -> Result<StageOutput<SentimentData>, CliError> {
    let lex = lexicon(cfg)?;
    let docs = documents(cfg)?;
    let px = prices(cfg)?;
    let bucketing = buckets(&docs.documents, &px.bars)?;
    let daily = build_daily_series(&bucketing.buckets, &lex.lexicon, &RuleConfig::default());
    let rows: Vec<Vec<String>> = daily
        .iter()
        .map(|d| {
            vec![
                d.trading_day.to_string(),
                d.n_docs.to_string(),
                d.n_pos.to_string(),
                d.n_neg.to_string(),
                d.n_neut.to_string(),
                num(d.mean_neg),
                num(d.mean_neu),
                num(d.mean_pos),
                num(d.mean_compound),
                num(d.sentd),
            ]
        })
        .collect();
    let fp = AggregateFingerprint {
        score: score_fingerprint(cfg, &docs, &lex),
        prices: &px.sha256,
    };
    let meta = Meta::new("aggregate", &fp, cfg.seed);
    let path = out(cfg, files::DAILY);
    artifact::write_csv(
        &path,
        &meta,
        &[
            "date", "n_docs", "n_pos", "n_neg", "n_neut", "mean_neg", "mean_neu", "mean_pos", "mean_compound", "sentd",
        ],
        &rows,
    )?;
    Ok(StageOutput {
        artifacts: vec![Artifact { stage: "aggregate", path }],
        value: SentimentData {
            daily,
            n_documents: docs.documents.len(),
            excluded: bucketing.excluded,
        },
    })
}

#[derive(Serialize)]
struct MarketFingerprint<'a> {
    prices: &'a str,
    window: usize,
}

pub fn market(cfg: &RunConfig) -> Result<StageOutput<MarketSeries>, CliError> {
    let px = prices(cfg)?;
    let mkt = market_series(cfg, &px.bars)?;
    let rows: Vec<Vec<String>> = (0..mkt.dates.len())
        .map(|i| {
            vec![
                mkt.dates[i].to_string(),
                num(mkt.closes[i]),
                opt_num(mkt.returns[i]),
                opt_num(mkt.volatility[i]),
                mkt.labels[i].map(|l| l.as_str().to_string()).unwrap_or_default(),
            ]
        })
        .collect();
    let fp = MarketFingerprint {
        prices: &px.sha256,
        window: cfg.window,
    };
    let meta = Meta::new("market", &fp, cfg.seed);
    let path = out(cfg, files::MARKET);
    artifact::write_csv(&path, &meta, &["date", "close", "return", "volatility", "label"], &rows)?;
    if mkt.ties > 0 {
        log::info!("{} direction label(s) decided by exact volatility ties (labelled DOWN)", mkt.ties);
    }
    Ok(StageOutput {
        artifacts: vec![Artifact { stage: "market", path }],
        value: mkt,
    })
}

#[derive(Serialize)]
struct SentimentMarketFingerprint<'a> {
    score: ScoreFingerprint<'a>,
    prices: &'a str,
    window: usize,
    lags: &'a [usize],
}

struct SentimentMarket {
    daily: Vec<DailySentiment>,
    mkt: MarketSeries,
    docs: DocumentInput,
    lex: LexiconInput,
    px: PriceInput,
}

fn sentiment_and_market(cfg: &RunConfig) -> Result<SentimentMarket, CliError> {
    let lex = lexicon(cfg)?;
    let docs = documents(cfg)?;
    let px = prices(cfg)?;
    let bucketing = buckets(&docs.documents, &px.bars)?;
    let daily = build_daily_series(&bucketing.buckets, &lex.lexicon, &RuleConfig::default());
    let mkt = market_series(cfg, &px.bars)?;
    Ok(SentimentMarket {
        daily,
        mkt,
        docs,
        lex,
        px,
    })
}

pub fn correlate(cfg: &RunConfig) -> Result<StageOutput<Vec<GridCell>>, CliError> {
    let SentimentMarket {
        daily,
        mkt,
        docs,
        lex,
        px,
    } = sentiment_and_market(cfg)?;
    let grid = correlation_grid(&daily, &mkt, &SentimentField::GRID, &Target::ALL, &GRID_LAGS);
    let rows: Vec<Vec<String>> = grid
        .iter()
        .map(|c| {
            let mut row = vec![c.field.to_string(), c.target.to_string(), c.lag.to_string()];
            match &c.result {
                Ok(r) => row.extend([
                    num(r.r),
                    num(r.p_value),
                    r.n.to_string(),
                    r.is_significant().to_string(),
                    String::new(),
                ]),
                Err(e) => row.extend([String::new(), String::new(), String::new(), "false".into(), e.clone()]),
            }
            row
        })
        .collect();
    let fp = SentimentMarketFingerprint {
        score: score_fingerprint(cfg, &docs, &lex),
        prices: &px.sha256,
        window: cfg.window,
        lags: &GRID_LAGS,
    };
    let meta = Meta::new("correlate", &fp, cfg.seed);
    let csv_path = out(cfg, files::CORRELATIONS);
    artifact::write_csv(
        &csv_path,
        &meta,
        &["field", "target", "lag", "r", "p_value", "n", "significant", "note"],
        &rows,
    )?;
    let heat_path = out(cfg, files::HEATMAP);
    artifact::write_text(&heat_path, &meta, &report::heatmap(&grid))?;
    Ok(StageOutput {
        artifacts: vec![
            Artifact {
                stage: "correlate",
                path: csv_path,
            },
            Artifact {
                stage: "correlate",
                path: heat_path,
            },
        ],
        value: grid,
    })
}

/// One Granger test (or the reason it could not be run).
#[derive(Debug, Clone)]
pub struct GrangerRow {
    pub field: SentimentField,
    pub target: Target,
    pub lag: usize,
    pub direction: GrangerDirection,
    pub result: Result<sentivol_core::stats::GrangerResult, String>,
}

impl GrangerRow {
    pub fn direction_label(&self) -> String {
        match self.direction {
            GrangerDirection::XToY => format!("{}->{}", self.field, self.target),
            GrangerDirection::YToX => format!("{}->{}", self.target, self.field),
        }
    }
}

pub fn granger(cfg: &RunConfig) -> Result<StageOutput<Vec<GrangerRow>>, CliError> {
    let SentimentMarket {
        daily,
        mkt,
        docs,
        lex,
        px,
    } = sentiment_and_market(cfg)?;
    let mut results = Vec::new();
    for field in SentimentField::GRID {
        for target in Target::ALL {
            let (x, y) = aligned_series(&daily, &mkt, field, target);
            for &lag in &cfg.lags {
                match granger_both(&x, &y, lag) {
                    Ok(pair) => results.extend(pair.into_iter().map(|g| GrangerRow {
                        field,
                        target,
                        lag,
                        direction: g.direction,
                        result: Ok(g),
                    })),
                    Err(e) => {
                        for direction in [GrangerDirection::XToY, GrangerDirection::YToX] {
                            results.push(GrangerRow {
                                field,
                                target,
                                lag,
                                direction,
                                result: Err(e.to_string()),
                            });
                        }
                    }
                }
            }
        }
    }
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|g| {
            let mut row = vec![
                g.field.to_string(),
                g.target.to_string(),
                g.direction_label(),
                g.lag.to_string(),
            ];
            match &g.result {
                Ok(r) => row.extend([
                    num(r.f_stat),
                    num(r.p_value),
                    r.df_num.to_string(),
                    r.df_denom.to_string(),
                    r.is_significant().to_string(),
                    String::new(),
                ]),
                Err(e) => row.extend([
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    "false".into(),
                    e.clone(),
                ]),
            }
            row
        })
        .collect();
    let fp = SentimentMarketFingerprint {
        score: score_fingerprint(cfg, &docs, &lex),
        prices: &px.sha256,
        window: cfg.window,
        lags: &cfg.lags,
    };
    let meta = Meta::new("granger", &fp, cfg.seed);
    let path = out(cfg, files::GRANGER);
    artifact::write_csv(
        &path,
        &meta,
        &[
            "field", "target", "direction", "lag", "f_stat", "p_value", "df_num", "df_denom", "significant", "note",
        ],
        &rows,
    )?;
    Ok(StageOutput {
        artifacts: vec![Artifact { stage: "granger", path }],
        value: results,
    })
}

#[derive(Serialize)]
struct TopicsTrainFingerprint<'a> {
    documents: &'a str,
    source: Option<Source>,
    topics: usize,
    alpha: f64,
    beta: f64,
    iterations: usize,
    min_df: usize,
    max_df_fraction: f64,
    top_words: usize,
}

#[derive(Serialize)]
struct TopicsFile<'a> {
    topics: &'a [TopicSummary],
}

fn lda_config(cfg: &RunConfig) -> LdaConfig {
    LdaConfig {
        topics: cfg.topics,
        alpha: cfg.alpha,
        beta: cfg.beta,
        iterations: cfg.iterations,
        seed: cfg.seed,
    }
}

pub fn topics_train(cfg: &RunConfig) -> Result<StageOutput<Vec<TopicSummary>>, CliError> {
    let docs = documents(cfg)?;
    let texts: Vec<&str> = docs.documents.iter().map(|d| d.text.as_str()).collect();
    let vocab = build_vocab(&texts, &english_stopwords(), cfg.min_df, cfg.max_df_fraction)?;
    if vocab.len() < cfg.topics {
        return Err(sentivol_core::Error::InvalidInput(format!(
            "vocabulary of {} tokens is smaller than topics = {}",
            vocab.len(),
            cfg.topics
        ))
        .into());
    }
    let lda = lda_config(cfg);
    let model = gibbs_train(&training_docs(&docs.documents, &vocab), &vocab, &lda)?;
    let summaries = topics::topic_report(&model, cfg.top_words);

    let fp = TopicsTrainFingerprint {
        documents: &docs.sha256,
        source: cfg.source,
        topics: cfg.topics,
        alpha: lda.alpha(),
        beta: cfg.beta,
        iterations: cfg.iterations,
        min_df: cfg.min_df,
        max_df_fraction: cfg.max_df_fraction,
        top_words: cfg.top_words,
    };
    let meta = Meta::new("topics-train", &fp, cfg.seed);
    let model_path = cfg.lda_model_path();
    artifact::write_json_text(&model_path, &meta, &model.to_json()?)?;
    let topics_path = out(cfg, files::TOPICS);
    artifact::write_json(&topics_path, &meta, &TopicsFile { topics: &summaries })?;
    Ok(StageOutput {
        artifacts: vec![
            Artifact {
                stage: "topics-train",
                path: model_path,
            },
            Artifact {
                stage: "topics-train",
                path: topics_path,
            },
        ],
        value: summaries,
    })
}

fn input_file(cfg: &RunConfig, key: &str, path: PathBuf) -> Result<PathBuf, CliError> {
    cfg.require_file(key, &Some(path.clone()))?;
    Ok(path)
}

#[derive(Serialize)]
struct TopicsInferFingerprint<'a> {
    model: &'a str,
    documents: &'a str,
    source: Option<Source>,
    prices: &'a str,
    burn_in: usize,
    samples: usize,
    feature_mode: FeatureMode,
}

pub fn topics_infer(cfg: &RunConfig) -> Result<StageOutput<Vec<DayFeatureVector>>, CliError> {
    let model_path = input_file(cfg, "lda-model", cfg.lda_model_path())?;
    let model = LdaModel::load(&model_path)?;
    let docs = documents(cfg)?;
    let px = prices(cfg)?;
    let bucketing = buckets(&docs.documents, &px.bars)?;
    let infer = InferConfig {
        burn_in: cfg.burn_in,
        samples: cfg.samples,
        seed: cfg.seed,
    };
    let features = topics::day_feature_vectors(&model, &bucketing.buckets, cfg.feature_mode, &infer);

    let mut header = vec!["date".to_string()];
    header.extend((0..model.k).map(|t| format!("topic_{t}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = features
        .iter()
        .map(|f| {
            let mut row = vec![f.trading_day.to_string()];
            row.extend(f.features.iter().map(|v| num(*v)));
            row
        })
        .collect();
    let model_sha = file_sha256(&model_path)?;
    let fp = TopicsInferFingerprint {
        model: &model_sha,
        documents: &docs.sha256,
        source: cfg.source,
        prices: &px.sha256,
        burn_in: cfg.burn_in,
        samples: cfg.samples,
        feature_mode: cfg.feature_mode,
    };
    let meta = Meta::new("topics-infer", &fp, cfg.seed);
    let path = cfg.features_path();
    artifact::write_csv(&path, &meta, &header, &rows)?;
    Ok(StageOutput {
        artifacts: vec![Artifact {
            stage: "topics-infer",
            path,
        }],
        value: features,
    })
}

/// Read a feature file written by `topics-infer`.
pub fn read_features(path: &Path) -> Result<Vec<DayFeatureVector>, CliError> {
    let bad = |msg: String| CliError::Runtime(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let mut fields = record.iter();
        let date = fields.next().unwrap_or_default();
        let trading_day = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|e| bad(format!("row {}: bad date {date:?}: {e}", i + 1)))?;
        let features = fields
            .map(|v| v.parse::<f64>().map_err(|e| bad(format!("row {}: bad value {v:?}: {e}", i + 1))))
            .collect::<Result<Vec<f64>, _>>()?;
        out.push(DayFeatureVector { trading_day, features });
    }
    if out.is_empty() {
        return Err(bad("no feature rows".into()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ClassifierFingerprint<'a> {
    features: &'a str,
    prices: &'a str,
    window: usize,
    split_fraction: f64,
    train: TrainConfig,
    feature_mode: FeatureMode,
}

fn train_config(cfg: &RunConfig) -> TrainConfig {
    TrainConfig {
        learning_rate: cfg.learning_rate,
        epochs: cfg.epochs,
        l2_lambda: cfg.l2_lambda,
        standardize: cfg.standardize,
        seed: cfg.seed,
    }
}

struct ClassifierInputs {
    dataset: LabeledDataset,
    features_sha: String,
    prices_sha: String,
}

fn classifier_inputs(cfg: &RunConfig) -> Result<ClassifierInputs, CliError> {
    let features_path = input_file(cfg, "features", cfg.features_path())?;
    let features = read_features(&features_path)?;
    let px = prices(cfg)?;
    let mkt = market_series(cfg, &px.bars)?;
    let dataset = classify::make_dataset(&features, &mkt.direction_labels(), cfg.split_fraction)?;
    assert!(dataset.is_chronological(), "training dates must precede test dates");
    Ok(ClassifierInputs {
        dataset,
        features_sha: file_sha256(&features_path)?,
        prices_sha: px.sha256,
    })
}

pub fn classify_train(cfg: &RunConfig) -> Result<StageOutput<LogisticModel>, CliError> {
    let inputs = classifier_inputs(cfg)?;
    let train = train_config(cfg);
    let model = classify::train(inputs.dataset.train(), &train, cfg.feature_mode)?;
    let fp = ClassifierFingerprint {
        features: &inputs.features_sha,
        prices: &inputs.prices_sha,
        window: cfg.window,
        split_fraction: cfg.split_fraction,
        train,
        feature_mode: cfg.feature_mode,
    };
    let meta = Meta::new("classify-train", &fp, cfg.seed);
    let path = cfg.classifier_path();
    artifact::write_json_text(&path, &meta, &model.to_json()?)?;
    Ok(StageOutput {
        artifacts: vec![Artifact {
            stage: "classify-train",
            path,
        }],
        value: model,
    })
}

/// Test-split metrics at the top level, in-sample metrics alongside.
#[derive(Debug, Clone, Serialize)]
pub struct EvalFile {
    #[serde(flatten)]
    pub test: EvalReport,
    pub in_sample: EvalReport,
    pub train_base_rate: f64,
    pub feature_mode: FeatureMode,
    pub k: usize,
    pub test_start: NaiveDate,
    pub test_end: NaiveDate,
}

#[derive(Serialize)]
struct EvalFingerprint<'a> {
    classifier: &'a str,
    features: &'a str,
    prices: &'a str,
    window: usize,
    split_fraction: f64,
}

pub fn classify_eval(cfg: &RunConfig) -> Result<StageOutput<EvalFile>, CliError> {
    let classifier_path = input_file(cfg, "classifier", cfg.classifier_path())?;
    let model = LogisticModel::load(&classifier_path)?;
    let inputs = classifier_inputs(cfg)?;
    let data = &inputs.dataset;
    let n_train = data.n_train;
    let test = classify::evaluate(&model, data.test(), n_train)?;
    let in_sample = classify::evaluate(&model, data.train(), n_train)?;
    let eval = EvalFile {
        train_base_rate: in_sample.base_rate,
        in_sample,
        test,
        feature_mode: model.feature_mode,
        k: model.k(),
        test_start: data.test()[0].date,
        test_end: data.test()[data.test().len() - 1].date,
    };
    let classifier_sha = file_sha256(&classifier_path)?;
    let fp = EvalFingerprint {
        classifier: &classifier_sha,
        features: &inputs.features_sha,
        prices: &inputs.prices_sha,
        window: cfg.window,
        split_fraction: cfg.split_fraction,
    };
    let meta = Meta::new("classify-eval", &fp, cfg.seed);
    let path = out(cfg, files::EVAL);
    artifact::write_json(&path, &meta, &eval)?;
    Ok(StageOutput {
        artifacts: vec![Artifact {
            stage: "classify-eval",
            path,
        }],
        value: eval,
    })
}

/// Configuration with paths replaced by the hashes of the files they name,
/// so the run hash does not depend on where files live.
#[derive(Serialize)]
struct RunFingerprint<'a> {
    config: &'a RunConfig,
    inputs: &'a BTreeMap<&'static str, String>,
}

#[derive(Serialize)]
struct ManifestEntry {
    stage: &'static str,
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config_hash: String,
    seed: u64,
    version: &'static str,
    inputs: &'a BTreeMap<&'static str, String>,
    config: &'a RunConfig,
    stages: Vec<ManifestEntry>,
}

fn in_stage<T>(stage: &'static str, result: Result<T, CliError>) -> Result<T, CliError> {
    result.map_err(|e| CliError::Stage {
        stage,
        source: Box::new(e),
    })
}

pub fn pipeline(cfg: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    // validate every input before any work
    let documents_path = cfg.require_file("documents", &cfg.documents)?.to_path_buf();
    let prices_path = cfg.require_file("prices", &cfg.prices)?.to_path_buf();
    let lex = lexicon(cfg)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("documents", file_sha256(&documents_path)?);
    inputs.insert("prices", file_sha256(&prices_path)?);
    inputs.insert("lexicon", lex.sha256.clone());

    // later stages read what earlier stages wrote in this run
    let mut run = cfg.clone();
    run.lda_model = None;
    run.features = None;
    run.classifier = None;

    let mut artifacts = Vec::new();
    let mut take = |a: &mut Vec<Artifact>| artifacts.append(a);
    let mut s = in_stage("score", score(&run))?;
    take(&mut s.artifacts);
    let mut sentiment = in_stage("aggregate", aggregate(&run))?;
    take(&mut sentiment.artifacts);
    let mut mkt = in_stage("market", market(&run))?;
    take(&mut mkt.artifacts);
    let mut corr = in_stage("correlate", correlate(&run))?;
    take(&mut corr.artifacts);
    let mut gr = in_stage("granger", granger(&run))?;
    take(&mut gr.artifacts);
    let mut tt = in_stage("topics-train", topics_train(&run))?;
    take(&mut tt.artifacts);
    let mut ti = in_stage("topics-infer", topics_infer(&run))?;
    take(&mut ti.artifacts);
    let mut ct = in_stage("classify-train", classify_train(&run))?;
    take(&mut ct.artifacts);
    let mut ce = in_stage("classify-eval", classify_eval(&run))?;
    take(&mut ce.artifacts);

    let mut sanitized = run.clone();
    sanitized.documents = None;
    sanitized.prices = None;
    sanitized.lexicon = None;
    sanitized.output_dir = PathBuf::new();
    let run_fp = RunFingerprint {
        config: &sanitized,
        inputs: &inputs,
    };
    let meta = Meta::new("pipeline", &run_fp, cfg.seed);

    let text = report::full_report(&report::ReportInputs {
        sentiment: &sentiment.value,
        market: &mkt.value,
        grid: &corr.value,
        granger: &gr.value,
        topics: &tt.value,
        eval: &ce.value,
        cfg: &run,
    });
    let report_path = out(cfg, files::REPORT);
    in_stage("report", artifact::write_text(&report_path, &meta, &text))?;
    artifacts.push(Artifact {
        stage: "report",
        path: report_path,
    });

    let stages = artifacts
        .iter()
        .map(|a| {
            let file = a
                .path
                .strip_prefix(&cfg.output_dir)
                .map(Path::to_path_buf)
                .unwrap_or_else(|_| a.path.clone());
            Ok(ManifestEntry {
                stage: a.stage,
                file: file.to_string_lossy().replace('\\', "/"),
                sha256: file_sha256(&a.path)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let manifest = Manifest {
        config_hash: meta.config_hash.clone(),
        seed: cfg.seed,
        version: artifact::VERSION,
        inputs: &inputs,
        config: &sanitized,
        stages,
    };
    let manifest_path = out(cfg, files::MANIFEST);
    artifact::write_json(&manifest_path, &meta, &manifest)?;
    artifacts.push(Artifact {
        stage: "pipeline",
        path: manifest_path,
    });
    Ok(artifacts)
}

#[derive(Serialize)]
struct SynthFingerprint {
    kind: &'static str,
    days: Option<usize>,
}

#[derive(Serialize)]
struct SynthConfigFile {
    documents: String,
    prices: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<Source>,
    seed: u64,
}

/// Write a synthetic document file, price file and matching config.
pub fn synth(cfg: &RunConfig, kind: SynthKind, days: Option<usize>) -> Result<Vec<Artifact>, CliError> {
    let (data, name, source) = match kind {
        SynthKind::TopicDirection => {
            let mut c = TopicDirectionConfig {
                seed: cfg.seed,
                window: cfg.window,
                ..Default::default()
            };
            if let Some(d) = days {
                c.days = d;
            }
            (synth::topic_direction(&c)?, "topic-direction", None)
        }
        SynthKind::Mood => {
            let mut c = MoodConfig {
                seed: cfg.seed,
                ..Default::default()
            };
            if let Some(d) = days {
                c.days = d;
            }
            (synth::mood_volatility(&c)?, "mood", Some(Source::Tweet))
        }
    };
    artifact::ensure_dir(&cfg.output_dir)?;
    let meta = Meta::new("synth", &SynthFingerprint { kind: name, days }, cfg.seed);

    let mut jsonl = String::new();
    for d in &data.documents {
        jsonl.push_str(&serde_json::to_string(d).map_err(|e| CliError::Runtime(e.to_string()))?);
        jsonl.push('\n');
    }
    let docs_path = out(cfg, files::SYNTH_DOCUMENTS);
    std::fs::write(&docs_path, jsonl).map_err(|e| CliError::io(&docs_path, e))?;

    let rows: Vec<Vec<String>> = data
        .prices
        .iter()
        .map(|b| vec![b.date.to_string(), num(b.close)])
        .collect();
    let prices_path = out(cfg, files::SYNTH_PRICES);
    artifact::write_csv(&prices_path, &meta, &["date", "close"], &rows)?;

    let config = SynthConfigFile {
        documents: files::SYNTH_DOCUMENTS.into(),
        prices: files::SYNTH_PRICES.into(),
        source,
        seed: cfg.seed,
    };
    let text = toml::to_string(&config).map_err(|e| CliError::Runtime(e.to_string()))?;
    let config_path = out(cfg, files::SYNTH_CONFIG);
    artifact::write_text(&config_path, &meta, &text)?;
    Ok(vec![
        Artifact {
            stage: "synth",
            path: docs_path,
        },
        Artifact {
            stage: "synth",
            path: prices_path,
        },
        Artifact {
            stage: "synth",
            path: config_path,
        },
    ])
}
