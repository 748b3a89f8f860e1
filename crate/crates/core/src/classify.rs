//! Logistic regression from day-t topic features to the day-t label (the
//! direction of volatility from t to t+1).

use std::collections::BTreeMap;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{Direction, DirectionLabel};
use crate::topics::{DayFeatureVector, FeatureMode};

pub const DEFAULT_SPLIT_FRACTION: f64 = 0.8;
pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
pub const DEFAULT_EPOCHS: usize = 500;
pub const DEFAULT_L2: f64 = 1e-3;
pub const MODEL_FORMAT: &str = "sentivol-logistic";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledRow {
    pub date: NaiveDate,
    pub features: Vec<f64>,
    pub label: Direction,
}

/// Date-ordered rows; the first `n_train` are the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub rows: Vec<LabeledRow>,
    pub n_train: usize,
}

impl LabeledDataset {
    pub fn train(&self) -> &[LabeledRow] {
        &self.rows[..self.n_train]
    }

    pub fn test(&self) -> &[LabeledRow] {
        &self.rows[self.n_train..]
    }

    pub fn dim(&self) -> usize {
        self.rows.first().map_or(0, |r| r.features.len())
    }

    /// Every training date precedes every test date.
    pub fn is_chronological(&self) -> bool {
        let sorted = self.rows.windows(2).all(|w| w[0].date < w[1].date);
        let split_ok = match (self.train().last(), self.test().first()) {
            (Some(a), Some(b)) => a.date < b.date,
            _ => true,
        };
        sorted && split_ok
    }
}

/// Inner-join features and labels on date and split chronologically, the
/// first `floor(split_fraction * n)` rows forming the training set.
pub fn make_dataset(
    features: &[DayFeatureVector],
    labels: &[DirectionLabel],
    split_fraction: f64,
) -> Result<LabeledDataset> {
    if !(split_fraction > 0.0 && split_fraction < 1.0) {
        return Err(Error::InvalidInput(format!(
            "split fraction must be in (0, 1), got {split_fraction}"
        )));
    }
    let by_date: BTreeMap<NaiveDate, Direction> = labels.iter().map(|l| (l.date, l.direction)).collect();
    let mut rows: Vec<LabeledRow> = features
        .iter()
        .filter_map(|f| {
            by_date.get(&f.trading_day).map(|label| LabeledRow {
                date: f.trading_day,
                features: f.features.clone(),
                label: *label,
            })
        })
        .collect();
    rows.sort_by_key(|r| r.date);
    rows.dedup_by_key(|r| r.date);
    if rows.is_empty() {
        return Err(Error::InsufficientData("no dates shared by features and labels".into()));
    }
    let dim = rows[0].features.len();
    if let Some(bad) = rows.iter().find(|r| r.features.len() != dim) {
        return Err(Error::LengthMismatch {
            left: dim,
            right: bad.features.len(),
        });
    }
    let n_train = (split_fraction * rows.len() as f64).floor() as usize;
    if n_train == 0 || n_train == rows.len() {
        return Err(Error::InsufficientData(format!(
            "split {split_fraction} of {} rows leaves an empty side",
            rows.len()
        )));
    }
    let data = LabeledDataset { rows, n_train };
    debug_assert!(data.is_chronological());
    Ok(data)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2_lambda: f64,
    /// Centre and scale each feature by its training mean and standard
    /// deviation before fitting.
    pub standardize: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: DEFAULT_EPOCHS,
            l2_lambda: DEFAULT_L2,
            standardize: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    pub feature_mode: FeatureMode,
    /// Per-feature shift and scale applied before the linear score:
    /// `z = w . ((x - mean) / scale) + b`. Identity when not standardising.
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    /// Set when training data had a single class; every prediction is that class.
    pub fallback: Option<Direction>,
    /// Objective value before each epoch and after the last one.
    pub loss_history: Vec<f64>,
}

impl LogisticModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Plain logistic model with identity feature transform.
    pub fn linear(weights: Vec<f64>, bias: f64) -> Self {
        let k = weights.len();
        Self {
            weights,
            bias,
            l2_lambda: 0.0,
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: 0,
            seed: 0,
            feature_mode: FeatureMode::Distribution,
            feature_mean: vec![0.0; k],
            feature_scale: vec![1.0; k],
            fallback: None,
            loss_history: Vec::new(),
        }
    }

    fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.feature_mean.iter().zip(&self.feature_scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    /// Linear score `w . x' + b` of the transformed features.
    pub fn score(&self, features: &[f64]) -> f64 {
        dot(&self.weights, &self.transform(features)) + self.bias
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(&ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            model: self.clone(),
        })
        .map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported model file {} v{} (expected {MODEL_FORMAT} v{MODEL_VERSION})",
                file.format, file.version
            )));
        }
        Ok(file.model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    model: LogisticModel,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn target(label: Direction) -> f64 {
    match label {
        Direction::Up => 1.0,
        Direction::Down => 0.0,
    }
}

fn dot(w: &[f64], x: &[f64]) -> f64 {
    w.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// Mean binary cross-entropy plus `(lambda / 2) |w|^2`, and its gradient
/// with respect to `(w, b)`.
pub fn loss_and_gradient(rows: &[LabeledRow], weights: &[f64], bias: f64, l2_lambda: f64) -> (f64, Vec<f64>, f64) {
    let n = rows.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for row in rows {
        let z = dot(weights, &row.features) + bias;
        let y = target(row.label);
        // -[y ln s(z) + (1-y) ln(1 - s(z))] = softplus(z) - y z
        loss += softplus(z) - y * z;
        let err = sigmoid(z) - y;
        for (g, x) in grad_w.iter_mut().zip(&row.features) {
            *g += err * x;
        }
        grad_b += err;
    }
    loss /= n;
    grad_b /= n;
    let mut penalty = 0.0;
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g / n + l2_lambda * w;
        penalty += w * w;
    }
    (loss + 0.5 * l2_lambda * penalty, grad_w, grad_b)
}

/// Full-batch gradient descent from zero weights. The bias is not penalised.
pub fn train(train_rows: &[LabeledRow], cfg: &TrainConfig, feature_mode: FeatureMode) -> Result<LogisticModel> {
    let k = train_rows
        .first()
        .map(|r| r.features.len())
        .ok_or_else(|| Error::InsufficientData("no training rows".into()))?;
    if let Some(bad) = train_rows.iter().find(|r| r.features.len() != k) {
        return Err(Error::LengthMismatch {
            left: k,
            right: bad.features.len(),
        });
    }
    if !(cfg.learning_rate > 0.0) || !(cfg.l2_lambda >= 0.0) {
        return Err(Error::InvalidInput(
            "learning rate must be positive and L2 penalty non-negative".into(),
        ));
    }
    let mut model = LogisticModel {
        weights: vec![0.0; k],
        bias: 0.0,
        l2_lambda: cfg.l2_lambda,
        learning_rate: cfg.learning_rate,
        epochs: cfg.epochs,
        seed: cfg.seed,
        feature_mode,
        feature_mean: vec![0.0; k],
        feature_scale: vec![1.0; k],
        fallback: None,
        loss_history: Vec::with_capacity(cfg.epochs + 1),
    };

    let n_up = train_rows.iter().filter(|r| r.label == Direction::Up).count();
    if train_rows.len() < 2 || n_up == 0 || n_up == train_rows.len() {
        let majority = if 2 * n_up >= train_rows.len() { Direction::Up } else { Direction::Down };
        log::warn!(
            "training data has {} row(s) and {n_up} UP label(s); using a constant {} classifier",
            train_rows.len(),
            majority.as_str()
        );
        model.fallback = Some(majority);
        return Ok(model);
    }

    if cfg.standardize {
        let n = train_rows.len() as f64;
        for j in 0..k {
            let mean = train_rows.iter().map(|r| r.features[j]).sum::<f64>() / n;
            let var = train_rows.iter().map(|r| (r.features[j] - mean).powi(2)).sum::<f64>() / n;
            model.feature_mean[j] = mean;
            // constant features are centred only
            model.feature_scale[j] = if var > 0.0 { var.sqrt() } else { 1.0 };
        }
    }
    let scaled: Vec<LabeledRow> = train_rows
        .iter()
        .map(|r| LabeledRow {
            features: model.transform(&r.features),
            ..r.clone()
        })
        .collect();

    for epoch in 0..=cfg.epochs {
        let (loss, gw, gb) = loss_and_gradient(&scaled, &model.weights, model.bias, cfg.l2_lambda);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                detail: format!(
                    "loss {loss}, bias {}, max |w| {}",
                    model.bias,
                    model.weights.iter().fold(0.0f64, |m, w| m.max(w.abs()))
                ),
            });
        }
        model.loss_history.push(loss);
        if epoch == cfg.epochs {
            break;
        }
        for (w, g) in model.weights.iter_mut().zip(&gw) {
            *w -= cfg.learning_rate * g;
        }
        model.bias -= cfg.learning_rate * gb;
    }
    Ok(model)
}

/// `(P(UP), label)`, UP iff the probability is at least 0.5.
pub fn predict(model: &LogisticModel, features: &[f64]) -> Result<(f64, Direction)> {
    if features.len() != model.k() {
        return Err(Error::LengthMismatch {
            left: model.k(),
            right: features.len(),
        });
    }
    if let Some(label) = model.fallback {
        return Ok((target(label), label));
    }
    let p = sigmoid(model.score(features));
    Ok((p, if p >= 0.5 { Direction::Up } else { Direction::Down }))
}

/// 2x2 counts with UP as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, actual: Direction, predicted: Direction) {
        match (actual, predicted) {
            (Direction::Up, Direction::Up) => self.tp += 1,
            (Direction::Up, Direction::Down) => self.fn_ += 1,
            (Direction::Down, Direction::Up) => self.fp += 1,
            (Direction::Down, Direction::Down) => self.tn += 1,
        }
    }

    /// Rows are actual UP/DOWN, columns predicted UP/DOWN.
    pub fn rows(&self) -> [[u64; 2]; 2] {
        [[self.tp, self.fn_], [self.fp, self.tn]]
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn accuracy(&self) -> Ratio {
        Ratio::new(self.tp + self.tn, self.total())
    }

    pub fn precision(&self) -> Ratio {
        Ratio::new(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> Ratio {
        Ratio::new(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall, `2TP / (2TP + FP + FN)`.
    pub fn f1(&self) -> Ratio {
        Ratio::new(2 * self.tp, 2 * self.tp + self.fp + self.fn_)
    }
}

/// An unreduced non-negative fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn is_defined(&self) -> bool {
        self.den != 0
    }

    /// Correctly rounded value; 0 when the denominator is 0.
    pub fn value(&self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Rows actual UP/DOWN, columns predicted UP/DOWN.
    pub confusion: [[u64; 2]; 2],
    pub n_train: usize,
    pub n_test: usize,
    /// Share of UP labels among the evaluated rows.
    pub base_rate: f64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

impl EvalReport {
    pub fn from_confusion(cm: &ConfusionMatrix, n_train: usize) -> Self {
        let (p, r, f) = (cm.precision(), cm.recall(), cm.f1());
        Self {
            accuracy: cm.accuracy().value(),
            precision: p.value(),
            recall: r.value(),
            f1: f.value(),
            confusion: cm.rows(),
            n_train,
            n_test: cm.total() as usize,
            base_rate: Ratio::new(cm.tp + cm.fn_, cm.total()).value(),
            precision_undefined: !p.is_defined(),
            recall_undefined: !r.is_defined(),
            f1_undefined: !f.is_defined(),
        }
    }

    pub fn confusion_matrix(&self) -> ConfusionMatrix {
        let [[tp, fn_], [fp, tn]] = self.confusion;
        ConfusionMatrix { tp, fn_, fp, tn }
    }
}

pub fn confusion(model: &LogisticModel, rows: &[LabeledRow]) -> Result<ConfusionMatrix> {
    let mut cm = ConfusionMatrix::default();
    for row in rows {
        let (_, predicted) = predict(model, &row.features)?;
        cm.record(row.label, predicted);
    }
    Ok(cm)
}

/// Score `rows` (normally the test split). `n_train` is carried into the report.
pub fn evaluate(model: &LogisticModel, rows: &[LabeledRow], n_train: usize) -> Result<EvalReport> {
    if rows.is_empty() {
        return Err(Error::InsufficientData("nothing to evaluate".into()));
    }
    Ok(EvalReport::from_confusion(&confusion(model, rows)?, n_train))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn day(i: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(u64::from(i))
    }

    fn row(i: u32, x: Vec<f64>, label: Direction) -> LabeledRow {
        LabeledRow {
            date: day(i),
            features: x,
            label,
        }
    }

    fn fixture() -> Vec<LabeledRow> {
        let mut rng = crate::rng::seeded(17);
        (0..60)
            .map(|i| {
                let x: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
                let up = x[0] - x[1] + 0.3 * (rng.random::<f64>() - 0.5) > 0.0;
                row(i, x, if up { Direction::Up } else { Direction::Down })
            })
            .collect()
    }

    #[test]
    fn chronological_split() {
        let feats: Vec<DayFeatureVector> = (0..10)
            .map(|i| DayFeatureVector {
                trading_day: day(9 - i),
                features: vec![i as f64],
            })
            .collect();
        let labels: Vec<DirectionLabel> = (0..10)
            .map(|i| DirectionLabel {
                date: day(i),
                direction: Direction::Up,
            })
            .collect();
        let data = make_dataset(&feats, &labels, 0.8).unwrap();
        assert_eq!((data.train().len(), data.test().len()), (8, 2));
        assert!(data.is_chronological());
        // the feature of date t is paired with the label stored at date t
        assert_eq!(data.rows[0].features, vec![9.0]);

        let later: Vec<DirectionLabel> = (20..30)
            .map(|i| DirectionLabel {
                date: day(i),
                direction: Direction::Down,
            })
            .collect();
        assert!(make_dataset(&feats, &later, 0.8).is_err());
        assert!(make_dataset(&feats[..1], &labels, 0.8).is_err());
        assert!(make_dataset(&feats, &labels, 1.0).is_err());
    }

    #[test]
    fn separable_pair() {
        let rows = vec![row(0, vec![0.0], Direction::Down), row(1, vec![1.0], Direction::Up)];
        let model = train(&rows, &TrainConfig::default(), FeatureMode::Distribution).unwrap();
        let report = evaluate(&model, &rows, 2).unwrap();
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn heavy_penalty_gives_majority() {
        let mut rows = fixture();
        for r in rows.iter_mut().take(45) {
            r.label = Direction::Up;
        }
        let cfg = TrainConfig {
            l2_lambda: 15.0,
            ..TrainConfig::default()
        };
        let model = train(&rows, &cfg, FeatureMode::Distribution).unwrap();
        assert!(model.weights.iter().all(|w| w.abs() < 0.05), "{:?}", model.weights);
        assert!(rows.iter().all(|r| predict(&model, &r.features).unwrap().1 == Direction::Up));
    }

    #[test]
    fn single_class_falls_back() {
        let rows: Vec<LabeledRow> = (0..4).map(|i| row(i, vec![i as f64], Direction::Down)).collect();
        let model = train(&rows, &TrainConfig::default(), FeatureMode::Count).unwrap();
        assert_eq!(model.fallback, Some(Direction::Down));
        assert_eq!(predict(&model, &[10.0]).unwrap(), (0.0, Direction::Down));
    }

    #[test]
    fn loss_is_non_increasing() {
        let model = train(&fixture(), &TrainConfig::default(), FeatureMode::Distribution).unwrap();
        assert_eq!(model.loss_history.len(), DEFAULT_EPOCHS + 1);
        assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let rows = fixture();
        let mut rng = crate::rng::seeded(99);
        let h = 1e-6;
        for _ in 0..10 {
            let w: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let b = rng.random_range(-1.0..1.0);
            let (_, gw, gb) = loss_and_gradient(&rows, &w, b, 0.1);
            let mut numeric = Vec::new();
            for j in 0..3 {
                let (mut plus, mut minus) = (w.clone(), w.clone());
                plus[j] += h;
                minus[j] -= h;
                let (lp, _, _) = loss_and_gradient(&rows, &plus, b, 0.1);
                let (lm, _, _) = loss_and_gradient(&rows, &minus, b, 0.1);
                numeric.push((lp - lm) / (2.0 * h));
            }
            let (lp, _, _) = loss_and_gradient(&rows, &w, b + h, 0.1);
            let (lm, _, _) = loss_and_gradient(&rows, &w, b - h, 0.1);
            numeric.push((lp - lm) / (2.0 * h));
            let analytic: Vec<f64> = gw.iter().copied().chain([gb]).collect();
            for (a, n) in analytic.iter().zip(&numeric) {
                let rel = (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
                assert!(rel < 1e-5, "analytic {a} numeric {n}");
            }
        }
    }

    #[test]
    fn prediction_boundary_and_symmetry() {
        let mut model = train(&fixture(), &TrainConfig::default(), FeatureMode::Distribution).unwrap();
        let zero = LogisticModel {
            weights: vec![0.0; 3],
            bias: 0.0,
            ..model.clone()
        };
        assert_eq!(predict(&zero, &[1.0, 2.0, 3.0]).unwrap(), (0.5, Direction::Up));
        let big = LogisticModel { bias: 800.0, ..zero };
        assert_eq!(predict(&big, &[0.0; 3]).unwrap().0, 1.0);
        let x = [0.2, 0.7, 0.1];
        let (p, _) = predict(&model, &x).unwrap();
        model.weights.iter_mut().for_each(|w| *w = -*w);
        model.bias = -model.bias;
        let (q, _) = predict(&model, &x).unwrap();
        assert!((p + q - 1.0).abs() < 1e-15);
        assert!(predict(&model, &[1.0]).is_err());
    }

    #[test]
    fn metric_example() {
        let cm = ConfusionMatrix {
            tp: 10,
            fp: 5,
            fn_: 0,
            tn: 5,
        };
        let r = EvalReport::from_confusion(&cm, 80);
        assert_eq!(r.accuracy, 0.75);
        assert_eq!(r.precision, 2.0 / 3.0);
        assert_eq!(r.recall, 1.0);
        assert_eq!(r.f1, 0.8);
        assert_eq!(r.confusion, [[10, 0], [5, 5]]);
        let none = EvalReport::from_confusion(&ConfusionMatrix { tn: 4, ..Default::default() }, 1);
        assert!(none.precision_undefined && none.recall_undefined && none.f1_undefined);
        assert_eq!(none.precision, 0.0);
    }

    #[test]
    fn model_file_round_trips() {
        let model = train(&fixture(), &TrainConfig::default(), FeatureMode::Count).unwrap();
        assert_eq!(LogisticModel::from_json(&model.to_json().unwrap()).unwrap(), model);
    }

    proptest! {
        #[test]
        fn label_matches_linear_score(w in prop::collection::vec(-5.0f64..5.0, 3), b in -5.0f64..5.0,
                                      x in prop::collection::vec(-3.0f64..3.0, 3)) {
            let model = LogisticModel::linear(w.clone(), b);
            let (_, label) = predict(&model, &x).unwrap();
            prop_assert_eq!(label == Direction::Up, dot(&w, &x) + b >= 0.0);
        }
    }
}
