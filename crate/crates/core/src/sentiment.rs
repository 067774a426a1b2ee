//! Lexicon-driven sentence sentiment in the style of VADER.
//!
//! Token valences are summed after two adjustments: an intensifier directly
//! before a valence token pushes it further from zero by the intensifier's
//! boost, and a negator among the three preceding tokens scales it by -0.74.
//! The sum S is normalized to compound = S / sqrt(S² + 15).
//!
//! The bundled lexicon is the word-token subset of the VADER lexicon (MIT,
//! see `resources/LEXICON_LICENSE.txt`).

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analyzer::TextAnalyzer;
use crate::error::{Error, Result};

pub const NEGATION_SCALAR: f64 = -0.74;
pub const NEGATION_WINDOW: usize = 3;
pub const NORMALIZATION_ALPHA: f64 = 15.0;
pub const POSITIVE_THRESHOLD: f64 = 0.05;
pub const NEGATIVE_THRESHOLD: f64 = -0.05;

const BUNDLED_LEXICON: &str = include_str!("../resources/lexicon.tsv");
const BUNDLED_NEGATORS: &str = include_str!("../resources/negators.txt");
const BUNDLED_INTENSIFIERS: &str = include_str!("../resources/intensifiers.tsv");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentimentLexicon {
    pub valence: HashMap<String, f64>,
    pub negators: HashSet<String>,
    pub intensifiers: HashMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceSentiment {
    pub compound: f64,
    pub label: Polarity,
}

impl SentenceSentiment {
    pub fn from_compound(compound: f64) -> Self {
        let label = if compound >= POSITIVE_THRESHOLD {
            Polarity::Positive
        } else if compound <= NEGATIVE_THRESHOLD {
            Polarity::Negative
        } else {
            Polarity::Neutral
        };
        Self { compound, label }
    }
}

/// Maps a raw valence sum into (-1, 1).
pub fn normalize(sum: f64) -> f64 {
    if sum == 0.0 {
        0.0
    } else {
        sum / (sum * sum + NORMALIZATION_ALPHA).sqrt()
    }
}

impl SentimentLexicon {
    /// The lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(
            BUNDLED_LEXICON,
            BUNDLED_NEGATORS,
            BUNDLED_INTENSIFIERS,
            Path::new("<bundled>"),
        )
        .expect("bundled lexicon is well formed")
    }

    /// Loads `token<TAB>valence` lines, one negator per line, and
    /// `token<TAB>boost` lines.
    pub fn load(valence: &Path, negators: &Path, intensifiers: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let mut lex = Self::parse(&read(valence)?, "", "", valence)?;
        lex.negators = parse_list(&read(negators)?);
        lex.intensifiers = parse_pairs(&read(intensifiers)?, intensifiers, None)?;
        Ok(lex)
    }

    fn parse(valence: &str, negators: &str, intensifiers: &str, origin: &Path) -> Result<Self> {
        Ok(Self {
            valence: parse_pairs(valence, origin, Some(4.0))?,
            negators: parse_list(negators),
            intensifiers: parse_pairs(intensifiers, origin, None)?,
        })
    }

    /// Adjusted valence of every token (0 where the token has none).
    pub fn token_valences(&self, tokens: &[String]) -> Vec<f64> {
        tokens
            .iter()
            .enumerate()
            .map(|(i, tok)| {
                let Some(&base) = self.valence.get(tok) else {
                    return 0.0;
                };
                let mut v = base;
                if v != 0.0 && i > 0 {
                    if let Some(&boost) = self.intensifiers.get(&tokens[i - 1]) {
                        v += boost * v.signum();
                    }
                }
                let lo = i.saturating_sub(NEGATION_WINDOW);
                if tokens[lo..i].iter().any(|t| self.negators.contains(t)) {
                    v *= NEGATION_SCALAR;
                }
                v
            })
            .collect()
    }

    pub fn score_tokens(&self, tokens: &[String]) -> SentenceSentiment {
        let sum: f64 = self.token_valences(tokens).iter().sum();
        SentenceSentiment::from_compound(normalize(sum))
    }

    pub fn score_sentence(&self, sentence: &str, analyzer: &TextAnalyzer) -> SentenceSentiment {
        self.score_tokens(&analyzer.tokenize(sentence))
    }
}

pub fn score_sentence(s: &str, lex: &SentimentLexicon, analyzer: &TextAnalyzer) -> SentenceSentiment {
    lex.score_sentence(s, analyzer)
}

fn parse_list(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

fn parse_pairs(text: &str, origin: &Path, bound: Option<f64>) -> Result<HashMap<String, f64>> {
    let mut out = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: n + 1,
            msg,
        };
        let mut f = line.split('\t');
        let (Some(tok), Some(val)) = (f.next(), f.next()) else {
            return Err(err("expected token<TAB>value".into()));
        };
        let v: f64 = val.trim().parse().map_err(|_| err(format!("bad value {val:?}")))?;
        if let Some(b) = bound {
            if !(-b..=b).contains(&v) {
                return Err(err(format!("valence {v} outside [-{b}, {b}]")));
            }
        }
        out.insert(tok.trim().to_lowercase(), v);
    }
    Ok(out)
}

/// Splits on '.', '!' or '?' when followed by whitespace or the end of the
/// text. Delimiters stay with their sentence; empty pieces are dropped.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, ch)) = chars.next() {
        if matches!(ch, '.' | '!' | '?') {
            let boundary = match chars.peek() {
                None => true,
                Some(&(_, next)) => next.is_whitespace(),
            };
            if boundary {
                let end = i + ch.len_utf8();
                let s = text[start..end].trim();
                if !s.is_empty() {
                    out.push(s);
                }
                start = end;
            }
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}
