//! Lexicon-and-rule sentiment scoring.
//!
//! Each token gets its lexicon valence (on a -4..+4 scale), adjusted by the
//! surrounding context: booster/dampener words, negations up to three tokens
//! back, ALL-CAPS emphasis, contrastive "but" and a few idioms. The adjusted
//! valences are summed, amplified by trailing "!"/"?" emphasis and squashed
//! into a compound score `S / sqrt(S^2 + alpha)`. The neg/neu/pos
//! proportions share out the positive, negative and neutral tokens.
//!
//! The rule set reproduces the public VADER reference implementation, so
//! scores agree with it to floating-point rounding.

mod lexicon;

use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};

pub use lexicon::{Lexicon, BOOSTER_INCREMENT};

/// ASCII punctuation stripped from token edges.
const PUNCTUATION: &str = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleConfig {
    pub exclaim_increment: f64,
    pub question_increment: f64,
    pub exclaim_cap: usize,
    /// At most this many "?" are counted individually...
    pub question_cap: usize,
    /// ...fewer than this many contribute nothing...
    pub question_min: usize,
    /// ...and more than `question_cap` contribute this flat amount.
    pub question_flood_amplifier: f64,
    pub negation_window: usize,
    pub negation_scalar: f64,
    pub caps_increment: f64,
    pub normalization_alpha: f64,
    pub pos_threshold: f64,
    pub neg_threshold: f64,
    pub but_rule: bool,
    pub idiom_rule: bool,
}

impl Default for RuleConfig {
    fn default() -> Self {
        Self {
            exclaim_increment: 0.292,
            question_increment: 0.18,
            exclaim_cap: 4,
            question_cap: 3,
            question_min: 2,
            question_flood_amplifier: 0.96,
            negation_window: 3,
            negation_scalar: -0.74,
            caps_increment: 0.733,
            normalization_alpha: 15.0,
            pos_threshold: 0.05,
            neg_threshold: -0.05,
            but_rule: true,
            idiom_rule: true,
        }
    }
}

impl RuleConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(format!("rule config: {m}")));
        if self.exclaim_increment < 0.0
            || self.question_increment < 0.0
            || self.question_flood_amplifier < 0.0
            || self.caps_increment < 0.0
        {
            return bad("increments must be non-negative");
        }
        if !(self.neg_threshold < 0.0 && 0.0 < self.pos_threshold) {
            return bad("thresholds must satisfy neg < 0 < pos");
        }
        if !(self.normalization_alpha > 0.0) {
            return bad("normalization_alpha must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentimentScores {
    pub neg: f64,
    pub neu: f64,
    pub pos: f64,
    pub compound: f64,
}

impl SentimentScores {
    pub const NEUTRAL: SentimentScores = SentimentScores {
        neg: 0.0,
        neu: 1.0,
        pos: 0.0,
        compound: 0.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl Polarity {
    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tokens {
    pub words: Vec<String>,
    pub exclaim_count: usize,
    pub question_count: usize,
}

fn is_split_space(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

fn strip_punctuation(token: &str) -> &str {
    let stripped = token.trim_matches(|c| PUNCTUATION.contains(c));
    // two characters or fewer left: probably an emoticon such as ":)"
    if stripped.chars().count() <= 2 {
        token
    } else {
        stripped
    }
}

/// Whitespace tokenization with edge punctuation stripped from word-like
/// tokens. Case is preserved; "!" and "?" are counted over the whole text.
pub fn tokenize(text: &str) -> Tokens {
    Tokens {
        words: text
            .split(is_split_space)
            .filter(|t| !t.is_empty())
            .map(|t| strip_punctuation(t).to_string())
            .collect(),
        exclaim_count: text.matches('!').count(),
        question_count: text.matches('?').count(),
    }
}

/// At least one uppercase letter and no lowercase ones.
fn is_upper(s: &str) -> bool {
    s.chars().any(char::is_uppercase) && !s.chars().any(char::is_lowercase)
}

/// True when some, but not all, tokens are ALL CAPS.
fn caps_differential(words: &[String]) -> bool {
    let upper = words.iter().filter(|w| is_upper(w)).count();
    let diff = words.len() - upper;
    0 < diff && diff < words.len()
}

struct Context<'a> {
    words: &'a [String],
    lower: Vec<String>,
    cap_diff: bool,
    lex: &'a Lexicon,
    cfg: &'a RuleConfig,
}

impl Context<'_> {
    fn lw(&self, i: usize) -> &str {
        &self.lower[i]
    }

    /// Booster contribution of `word`, sign-aligned with `valence`.
    fn booster_shift(&self, idx: usize, valence: f64) -> f64 {
        let Some(mut scalar) = self.lex.booster(self.lw(idx)) else {
            return 0.0;
        };
        if valence < 0.0 {
            scalar = -scalar;
        }
        if is_upper(&self.words[idx]) && self.cap_diff {
            if valence > 0.0 {
                scalar += self.cfg.caps_increment;
            } else {
                scalar -= self.cfg.caps_increment;
            }
        }
        scalar
    }

    fn negation_check(&self, mut valence: f64, start: usize, i: usize) -> f64 {
        let n = self.cfg.negation_scalar;
        match start {
            0 => {
                if self.lex.is_negation(self.lw(i - 1)) {
                    valence *= n;
                }
            }
            1 => {
                if self.lw(i - 2) == "never" && matches!(self.lw(i - 1), "so" | "this") {
                    valence *= 1.25;
                } else if self.lw(i - 2) == "without" && self.lw(i - 1) == "doubt" {
                } else if self.lex.is_negation(self.lw(i - 2)) {
                    valence *= n;
                }
            }
            2 => {
                if (self.lw(i - 3) == "never" && matches!(self.lw(i - 2), "so" | "this"))
                    || matches!(self.lw(i - 1), "so" | "this")
                {
                    valence *= 1.25;
                } else if self.lw(i - 3) == "without"
                    && (self.lw(i - 2) == "doubt" || self.lw(i - 1) == "doubt")
                {
                } else if self.lex.is_negation(self.lw(i - 3)) {
                    valence *= n;
                }
            }
            _ => {
                if self.lex.is_negation(self.lw(i - start - 1)) {
                    valence *= n;
                }
            }
        }
        valence
    }

    fn idioms_check(&self, mut valence: f64, i: usize) -> f64 {
        let l = |k: usize| self.lw(k);
        let onezero = format!("{} {}", l(i - 1), l(i));
        let twoonezero = format!("{} {} {}", l(i - 2), l(i - 1), l(i));
        let twoone = format!("{} {}", l(i - 2), l(i - 1));
        let threetwoone = format!("{} {} {}", l(i - 3), l(i - 2), l(i - 1));
        let threetwo = format!("{} {}", l(i - 3), l(i - 2));

        for seq in [&onezero, &twoonezero, &twoone, &threetwoone, &threetwo] {
            if let Some(v) = self.lex.special_case(seq) {
                valence = v;
                break;
            }
        }
        let n = self.lower.len();
        if n - 1 > i {
            if let Some(v) = self.lex.special_case(&format!("{} {}", l(i), l(i + 1))) {
                valence = v;
            }
        }
        if n - 1 > i + 1 {
            let zeroonetwo = format!("{} {} {}", l(i), l(i + 1), l(i + 2));
            if let Some(v) = self.lex.special_case(&zeroonetwo) {
                valence = v;
            }
        }
        // multiword dampeners such as "kind of" (not sign-aligned)
        for gram in [&threetwoone, &threetwo, &twoone] {
            if let Some(b) = self.lex.booster(gram) {
                valence += b;
            }
        }
        valence
    }

    fn least_check(&self, mut valence: f64, i: usize) -> f64 {
        if i > 1 && !self.lex.contains(self.lw(i - 1)) && self.lw(i - 1) == "least" {
            if self.lw(i - 2) != "at" && self.lw(i - 2) != "very" {
                valence *= self.cfg.negation_scalar;
            }
        } else if i > 0 && !self.lex.contains(self.lw(i - 1)) && self.lw(i - 1) == "least" {
            valence *= self.cfg.negation_scalar;
        }
        valence
    }

    fn token_valence(&self, i: usize) -> f64 {
        let item = &self.words[i];
        let lower = self.lw(i);
        let Some(base) = self.lex.valence(lower) else {
            return 0.0;
        };
        let n = self.words.len();
        let mut valence = base;

        // "no" directly before another sentiment word acts as a negation
        if lower == "no" && i != n - 1 && self.lex.contains(self.lw(i + 1)) {
            valence = 0.0;
        }
        if (i > 0 && self.lw(i - 1) == "no")
            || (i > 1 && self.lw(i - 2) == "no")
            || (i > 2 && self.lw(i - 3) == "no" && matches!(self.lw(i - 1), "or" | "nor"))
        {
            valence = base * self.cfg.negation_scalar;
        }

        if is_upper(item) && self.cap_diff {
            if valence > 0.0 {
                valence += self.cfg.caps_increment;
            } else {
                valence -= self.cfg.caps_increment;
            }
        }

        for start in 0..self.cfg.negation_window {
            if i > start && !self.lex.contains(self.lw(i - start - 1)) {
                let mut s = self.booster_shift(i - start - 1, valence);
                if s != 0.0 {
                    s *= match start {
                        0 => 1.0,
                        1 => 0.95,
                        _ => 0.9,
                    };
                }
                valence += s;
                valence = self.negation_check(valence, start, i);
                if start == 2 && self.cfg.idiom_rule {
                    valence = self.idioms_check(valence, i);
                }
            }
        }
        self.least_check(valence, i)
    }

    fn valences(&self) -> Vec<f64> {
        let n = self.words.len();
        (0..n)
            .map(|i| {
                let lower = self.lw(i);
                if self.lex.booster(lower).is_some()
                    || (i + 1 < n && lower == "kind" && self.lw(i + 1) == "of")
                {
                    0.0
                } else {
                    self.token_valence(i)
                }
            })
            .collect()
    }
}

/// Contrastive "but": halve valences before the first "but", boost those
/// after by half.
///
/// Mirrors the reference exactly, including its lookup of each value's
/// *first* occurrence, so repeated valences are rescaled at that position.
fn but_rule(lower: &[String], sentiments: &mut [f64]) {
    let Some(bi) = lower.iter().position(|w| w == "but") else {
        return;
    };
    for j in 0..sentiments.len() {
        let value = sentiments[j];
        let si = sentiments
            .iter()
            .position(|s| *s == value)
            .expect("value is present");
        if si < bi {
            sentiments[si] = value * 0.5;
        } else if si > bi {
            sentiments[si] = value * 1.5;
        }
    }
}

fn punctuation_amplifier(tokens: &Tokens, cfg: &RuleConfig) -> f64 {
    let ep = tokens.exclaim_count.min(cfg.exclaim_cap) as f64 * cfg.exclaim_increment;
    let q = tokens.question_count;
    let qm = if q < cfg.question_min {
        0.0
    } else if q <= cfg.question_cap {
        q as f64 * cfg.question_increment
    } else {
        cfg.question_flood_amplifier
    };
    ep + qm
}

/// `score / sqrt(score^2 + alpha)`, clamped to [-1, 1].
pub fn normalize(score: f64, alpha: f64) -> f64 {
    (score / (score * score + alpha).sqrt()).clamp(-1.0, 1.0)
}

/// Adjusted per-token valences for `text` (after emoji expansion).
pub fn token_valences(text: &str, lex: &Lexicon, cfg: &RuleConfig) -> (Tokens, Vec<f64>) {
    let text = lex.expand_emoji(text);
    let tokens = tokenize(&text);
    let ctx = Context {
        words: &tokens.words,
        lower: tokens.words.iter().map(|w| w.to_lowercase()).collect(),
        cap_diff: caps_differential(&tokens.words),
        lex,
        cfg,
    };
    let mut sentiments = ctx.valences();
    if cfg.but_rule {
        but_rule(&ctx.lower, &mut sentiments);
    }
    (tokens, sentiments)
}

pub fn score_text(text: &str, lex: &Lexicon, cfg: &RuleConfig) -> SentimentScores {
    let (tokens, sentiments) = token_valences(text, lex, cfg);
    if sentiments.is_empty() {
        return SentimentScores::NEUTRAL;
    }

    let amplifier = punctuation_amplifier(&tokens, cfg);
    let mut sum: f64 = sentiments.iter().sum();
    if sum > 0.0 {
        sum += amplifier;
    } else if sum < 0.0 {
        sum -= amplifier;
    }
    let compound = normalize(sum, cfg.normalization_alpha);

    // +1/-1 per sentiment token keeps them commensurate with neutral counts
    let mut pos_sum = 0.0;
    let mut neg_sum = 0.0;
    let mut neu_count = 0usize;
    for &s in &sentiments {
        if s > 0.0 {
            pos_sum += s + 1.0;
        }
        if s < 0.0 {
            neg_sum += s - 1.0;
        }
        if s == 0.0 {
            neu_count += 1;
        }
    }
    if pos_sum > neg_sum.abs() {
        pos_sum += amplifier;
    } else if pos_sum < neg_sum.abs() {
        neg_sum -= amplifier;
    }
    let total = pos_sum + neg_sum.abs() + neu_count as f64;
    SentimentScores {
        neg: (neg_sum / total).abs(),
        neu: (neu_count as f64 / total).abs(),
        pos: (pos_sum / total).abs(),
        compound,
    }
}

pub fn score_document(doc: &Document, lex: &Lexicon, cfg: &RuleConfig) -> SentimentScores {
    score_text(&doc.text, lex, cfg)
}

pub fn classify_polarity(s: &SentimentScores, cfg: &RuleConfig) -> Polarity {
    if s.compound >= cfg.pos_threshold {
        Polarity::Positive
    } else if s.compound <= cfg.neg_threshold {
        Polarity::Negative
    } else {
        Polarity::Neutral
    }
}
