//! Text analysis shared by the index, the rankers, the sentiment scorer and
//! the profile builder.
//!
//! The default pipeline lowercases (Unicode-aware), strips every character
//! that is neither alphanumeric nor whitespace, and splits on whitespace.
//! No stemming and no stopword removal unless configured.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzerConfig {
    /// Tokens dropped after normalization.
    #[serde(default)]
    pub stopwords: BTreeSet<String>,
    /// Keep original case. Off by default.
    #[serde(default)]
    pub preserve_case: bool,
}

/// A token together with the byte range of the whitespace-delimited chunk
/// it came from in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub term: String,
    pub span: Range<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TextAnalyzer {
    config: AnalyzerConfig,
}

impl TextAnalyzer {
    pub fn new(config: AnalyzerConfig) -> Self {
        Self { config }
    }

    pub fn config(&self) -> &AnalyzerConfig {
        &self.config
    }

    pub fn tokenize(&self, text: &str) -> Vec<String> {
        self.tokens_with_spans(text)
            .into_iter()
            .map(|t| t.term)
            .collect()
    }

    pub fn tokens_with_spans(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in text.char_indices() {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    self.push_chunk(text, s..i, &mut out);
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            self.push_chunk(text, s..text.len(), &mut out);
        }
        out
    }

    /// Number of analyzer tokens in `text`.
    pub fn count(&self, text: &str) -> usize {
        self.tokens_with_spans(text).len()
    }

    /// Returns the prefix of `text` holding exactly its first `max_tokens`
    /// tokens (or the whole text when it has no more than that).
    pub fn truncate<'a>(&self, text: &'a str, max_tokens: usize) -> &'a str {
        if max_tokens == 0 {
            return "";
        }
        let toks = self.tokens_with_spans(text);
        if toks.len() <= max_tokens {
            return text;
        }
        &text[..toks[max_tokens - 1].span.end]
    }

    fn push_chunk(&self, text: &str, span: Range<usize>, out: &mut Vec<Token>) {
        let mut term = String::with_capacity(span.len());
        for ch in text[span.clone()].chars().filter(|c| c.is_alphanumeric()) {
            if self.config.preserve_case {
                term.push(ch);
            } else {
                term.extend(ch.to_lowercase());
            }
        }
        if term.is_empty() || self.config.stopwords.contains(&term) {
            return;
        }
        out.push(Token { term, span });
    }
}
