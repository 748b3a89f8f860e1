use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BUNDLED_LEXICON: &str = include_str!("../../data/vader_lexicon.txt");
const BUNDLED_EMOJI: &str = include_str!("../../data/emoji_utf8_lexicon.txt");

/// Booster/dampener increment magnitude.
pub const BOOSTER_INCREMENT: f64 = 0.293;

const NEGATIONS: &[&str] = &[
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt", "ain't", "aren't",
    "can't", "couldn't", "daren't", "didn't", "doesn't", "dont", "hadnt", "hasnt", "havent",
    "isnt", "mightnt", "mustnt", "neither", "don't", "hadn't", "hasn't", "haven't", "isn't",
    "mightn't", "mustn't", "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing",
    "nowhere", "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent", "oughtn't", "shan't",
    "shouldn't", "uh-uh", "wasn't", "weren't", "without", "wont", "wouldnt", "won't", "wouldn't",
    "rarely", "seldom", "despite",
];

const BOOSTERS_UP: &[&str] = &[
    "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
    "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
    "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping", "flippin",
    "frackin", "fracking", "fricking", "frickin", "frigging", "friggin", "fully", "fuckin",
    "fucking", "fuggin", "fugging", "greatly", "hella", "highly", "hugely", "incredible",
    "incredibly", "intensely", "major", "majorly", "more", "most", "particularly", "purely",
    "quite", "really", "remarkably", "so", "substantially", "thoroughly", "total", "totally",
    "tremendous", "tremendously", "uber", "unbelievably", "unusually", "utter", "utterly", "very",
];

const BOOSTERS_DOWN: &[&str] = &[
    "almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of", "less",
    "little", "marginal", "marginally", "occasional", "occasionally", "partly", "scarce",
    "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof", "sort-of",
];

/// Multiword phrases whose valence replaces the word-level value.
const SPECIAL_CASES: &[(&str, f64)] = &[
    ("the shit", 3.0),
    ("the bomb", 3.0),
    ("bad ass", 1.5),
    ("badass", 1.5),
    ("bus stop", 0.0),
    ("yeah right", -2.0),
    ("kiss of death", -1.5),
    ("to die for", 3.0),
    ("beating heart", 3.5),
];

/// Token valences plus the modifier word lists used by the rules.
///
/// Valence keys are stored verbatim from the file; lookups lowercase the
/// token first, so entries containing capitals are never matched.
#[derive(Debug, Clone)]
pub struct Lexicon {
    valences: HashMap<String, f64>,
    boosters: HashMap<String, f64>,
    negations: HashSet<String>,
    special_cases: HashMap<String, f64>,
    emoji: HashMap<char, String>,
}

impl Lexicon {
    /// Lexicon and emoji descriptions shipped with the crate.
    pub fn bundled() -> Self {
        let mut lex = Self::from_tsv(BUNDLED_LEXICON).expect("bundled lexicon is valid");
        lex.emoji = parse_emoji(BUNDLED_EMOJI);
        lex
    }

    /// Raw text of the bundled lexicon file.
    pub fn bundled_source() -> &'static str {
        BUNDLED_LEXICON
    }

    /// Parse `token \t mean_valence [\t ignored...]` lines. Uses the default
    /// booster/negation lists and no emoji table.
    pub fn from_tsv(content: &str) -> Result<Self> {
        let mut valences = HashMap::new();
        for (idx, line) in content.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut cols = line.trim().split('\t');
            let token = cols.next().unwrap_or_default();
            let value = cols.next().ok_or_else(|| {
                Error::Lexicon(format!("line {}: expected token<TAB>valence", idx + 1))
            })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| Error::Lexicon(format!("line {}: bad valence: {e}", idx + 1)))?;
            if !(-4.0..=4.0).contains(&value) {
                return Err(Error::Lexicon(format!(
                    "line {}: valence {value} outside [-4, 4]",
                    idx + 1
                )));
            }
            valences.insert(token.to_string(), value);
        }
        Self::from_valences(valences)
    }

    pub fn from_valences(valences: HashMap<String, f64>) -> Result<Self> {
        if valences.is_empty() {
            return Err(Error::Lexicon("no entries".into()));
        }
        if let Some((t, v)) = valences.iter().find(|(_, v)| !(-4.0..=4.0).contains(*v)) {
            return Err(Error::Lexicon(format!("{t:?} has valence {v} outside [-4, 4]")));
        }
        let boosters = BOOSTERS_UP
            .iter()
            .map(|w| (w.to_string(), BOOSTER_INCREMENT))
            .chain(BOOSTERS_DOWN.iter().map(|w| (w.to_string(), -BOOSTER_INCREMENT)))
            .collect();
        Ok(Self {
            valences,
            boosters,
            negations: NEGATIONS.iter().map(|w| w.to_string()).collect(),
            special_cases: SPECIAL_CASES
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
            emoji: HashMap::new(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(&content)
    }

    /// Attach an emoji-description table (`emoji \t description` lines).
    pub fn with_emoji_table(mut self, content: &str) -> Self {
        self.emoji = parse_emoji(content);
        self
    }

    /// Copy with every valence negated (used to check sign symmetry).
    pub fn negated(&self) -> Self {
        Self {
            valences: self.valences.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            ..self.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.valences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valences.is_empty()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, f64)> {
        self.valences.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Valence of an already-lowercased token.
    pub fn valence(&self, lower: &str) -> Option<f64> {
        self.valences.get(lower).copied()
    }

    pub fn contains(&self, lower: &str) -> bool {
        self.valences.contains_key(lower)
    }

    pub fn booster(&self, lower: &str) -> Option<f64> {
        self.boosters.get(lower).copied()
    }

    pub fn is_negation(&self, lower: &str) -> bool {
        self.negations.contains(lower) || lower.contains("n't")
    }

    pub fn special_case(&self, phrase: &str) -> Option<f64> {
        self.special_cases.get(phrase).copied()
    }

    /// Replace single-codepoint emoji by their textual description,
    /// then trim surrounding whitespace.
    pub fn expand_emoji(&self, text: &str) -> String {
        if self.emoji.is_empty() {
            return text.trim().to_string();
        }
        let mut out = String::with_capacity(text.len());
        let mut prev_space = true;
        for c in text.chars() {
            if let Some(desc) = self.emoji.get(&c) {
                if !prev_space {
                    out.push(' ');
                }
                out.push_str(desc);
                prev_space = false;
            } else {
                out.push(c);
                prev_space = c == ' ';
            }
        }
        out.trim().to_string()
    }
}

fn parse_emoji(content: &str) -> HashMap<char, String> {
    let mut map = HashMap::new();
    for line in content.lines() {
        let mut cols = line.trim().split('\t');
        let (Some(key), Some(desc)) = (cols.next(), cols.next()) else {
            continue;
        };
        let mut chars = key.chars();
        if let (Some(c), None) = (chars.next(), chars.next()) {
            map.insert(c, desc.to_string());
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_lexicon_loads() {
        let lex = Lexicon::bundled();
        assert!(lex.len() > 7000);
        assert_eq!(lex.valence("good"), Some(1.9));
        assert_eq!(lex.valence(":)"), Some(2.0));
        assert!(lex.tokens().all(|(_, v)| (-4.0..=4.0).contains(&v)));
    }

    #[test]
    fn rejects_out_of_range_and_empty() {
        assert!(Lexicon::from_tsv("great\t4.5\n").is_err());
        assert!(Lexicon::from_tsv("").is_err());
        assert!(Lexicon::from_tsv("great\n").is_err());
        let lex = Lexicon::from_tsv("great\t3.1\t0.5\t[3, 3]\n").unwrap();
        assert_eq!(lex.valence("great"), Some(3.1));
    }

    #[test]
    fn emoji_expansion_inserts_spaces() {
        let lex = Lexicon::bundled();
        assert_eq!(lex.expand_emoji("up\u{1F600}"), "up grinning face");
        assert_eq!(lex.expand_emoji(" plain "), "plain");
    }
}
