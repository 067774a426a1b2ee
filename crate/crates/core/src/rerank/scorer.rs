//! Pair scorers: the deterministic lexical stub, a constant scorer, and the
//! HTTP client for an external cross-encoder service.

use std::collections::HashMap;
use std::fmt;
use std::time::Duration;

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::analyzer::TextAnalyzer;
use crate::error::{Error, Result};
use crate::index::IndexedCollection;

/// Which fine-tuned head a pair is scored with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreModel {
    Vbd,
    Cp,
    Pp,
    Np,
    Rp,
}

impl ScoreModel {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoreModel::Vbd => "vbd",
            ScoreModel::Cp => "cp",
            ScoreModel::Pp => "pp",
            ScoreModel::Np => "np",
            ScoreModel::Rp => "rp",
        }
    }
}

impl fmt::Display for ScoreModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorerError {
    /// Index of the offending pair within the batch, when known.
    pub pair_index: Option<usize>,
    pub msg: String,
}

impl ScorerError {
    pub fn batch(msg: impl Into<String>) -> Self {
        Self {
            pair_index: None,
            msg: msg.into(),
        }
    }
}

/// Scores (query, passage) pairs; higher is more relevant. Implementations
/// must be deterministic for fixed inputs and return one score per pair in
/// input order.
pub trait PairScorer: Send + Sync {
    fn scorer_id(&self) -> &str;

    fn score_batch(&self, model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError>;
}

/// Lexical stand-in for a cross-encoder:
/// `squash(Σ_{t ∈ distinct q} ln(1 + tf(t, passage)) · icf(t))` with
/// `icf(t) = ln(1 + L / (cf(t) + 1))` and `squash(x) = x / (1 + x)`.
#[derive(Debug, Clone)]
pub struct StubScorer {
    analyzer: TextAnalyzer,
    collection_len: u64,
    cf: HashMap<String, u64>,
}

impl StubScorer {
    pub fn from_index(index: &IndexedCollection) -> Self {
        let cf = (0..index.num_terms() as u32)
            .map(|t| (index.term(t).to_string(), index.collection_freq(t)))
            .collect();
        Self {
            analyzer: index.analyzer().clone(),
            collection_len: index.collection_len(),
            cf,
        }
    }

    pub fn icf(&self, term: &str) -> f64 {
        let cf = self.cf.get(term).copied().unwrap_or(0);
        (1.0 + self.collection_len as f64 / (cf as f64 + 1.0)).ln()
    }

    pub fn raw_score(&self, query: &str, passage: &str) -> f64 {
        let mut tf: HashMap<String, u32> = HashMap::new();
        for t in self.analyzer.tokenize(passage) {
            *tf.entry(t).or_insert(0) += 1;
        }
        let mut terms = self.analyzer.tokenize(query);
        terms.sort();
        terms.dedup();
        terms
            .iter()
            .map(|t| f64::from(1 + tf.get(t).copied().unwrap_or(0)).ln() * self.icf(t))
            .sum()
    }

    pub fn score(&self, query: &str, passage: &str) -> f64 {
        let raw = self.raw_score(query, passage);
        raw / (1.0 + raw)
    }
}

pub fn stub_scorer(index: &IndexedCollection) -> StubScorer {
    StubScorer::from_index(index)
}

impl PairScorer for StubScorer {
    fn scorer_id(&self) -> &str {
        "stub"
    }

    fn score_batch(&self, _model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        Ok(pairs.iter().map(|(q, p)| self.score(q, p)).collect())
    }
}

/// Returns the same score for every pair.
#[derive(Debug, Clone)]
pub struct ConstantScorer(pub f64);

impl PairScorer for ConstantScorer {
    fn scorer_id(&self) -> &str {
        "constant"
    }

    fn score_batch(&self, _model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        Ok(vec![self.0; pairs.len()])
    }
}

#[derive(Debug, Serialize)]
struct WirePair<'a> {
    query: &'a str,
    text: &'a str,
}

#[derive(Debug, Serialize)]
struct ScoreRequest<'a> {
    model: &'a str,
    pairs: Vec<WirePair<'a>>,
}

#[derive(Debug, Deserialize)]
struct ScoreResponse {
    scores: Vec<f64>,
}

const MAX_RETRIES: u32 = 3;

/// Client for a scorer service answering `POST {endpoint}/score`.
#[derive(Debug, Clone)]
pub struct RemoteScorer {
    endpoint: String,
    id: String,
    batch_size: usize,
    backoff: Duration,
    agent: ureq::Agent,
}

impl RemoteScorer {
    pub fn new(endpoint: &str, timeout: Duration, batch_size: usize) -> Self {
        let endpoint = endpoint.trim_end_matches('/').to_string();
        Self {
            id: format!("remote:{endpoint}"),
            endpoint,
            batch_size: batch_size.max(1),
            backoff: Duration::from_millis(100),
            agent: ureq::AgentBuilder::new().timeout(timeout).build(),
        }
    }

    /// Initial delay between retries; doubled after each failed attempt.
    pub fn with_backoff(mut self, backoff: Duration) -> Self {
        self.backoff = backoff;
        self
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn post_once(&self, model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>, Attempt> {
        let body = ScoreRequest {
            model: model.as_str(),
            pairs: pairs.iter().map(|&(query, text)| WirePair { query, text }).collect(),
        };
        let resp = self
            .agent
            .post(&format!("{}/score", self.endpoint))
            .send_json(&body);
        let resp = match resp {
            Ok(r) => r,
            Err(ureq::Error::Status(code, r)) if code >= 500 => {
                return Err(Attempt::Retry(format!("status {code}: {}", r.into_string().unwrap_or_default())))
            }
            Err(ureq::Error::Status(code, r)) => {
                return Err(Attempt::Fatal(format!("status {code}: {}", r.into_string().unwrap_or_default())))
            }
            Err(e) => return Err(Attempt::Retry(e.to_string())),
        };
        let parsed: ScoreResponse = resp
            .into_json()
            .map_err(|e| Attempt::Fatal(format!("malformed response: {e}")))?;
        if parsed.scores.len() != pairs.len() {
            return Err(Attempt::Fatal(format!(
                "protocol error: {} scores for {} pairs",
                parsed.scores.len(),
                pairs.len()
            )));
        }
        Ok(parsed.scores)
    }

    fn post(&self, model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>> {
        let mut delay = self.backoff;
        let mut attempt = 0;
        loop {
            match self.post_once(model, pairs) {
                Ok(s) => return Ok(s),
                Err(Attempt::Fatal(msg)) => {
                    return Err(Error::RemoteScorer {
                        endpoint: self.endpoint.clone(),
                        msg,
                    })
                }
                Err(Attempt::Retry(msg)) if attempt < MAX_RETRIES => {
                    attempt += 1;
                    warn!("scorer {}: {msg}; retry {attempt}/{MAX_RETRIES} in {delay:?}", self.endpoint);
                    std::thread::sleep(delay);
                    delay *= 2;
                }
                Err(Attempt::Retry(msg)) => {
                    return Err(Error::RemoteScorer {
                        endpoint: self.endpoint.clone(),
                        msg: format!("{msg} (after {MAX_RETRIES} retries)"),
                    })
                }
            }
        }
    }

    pub fn score_all(&self, model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(pairs.len());
        for chunk in pairs.chunks(self.batch_size) {
            debug!("scoring {} pairs with {model} at {}", chunk.len(), self.endpoint);
            out.extend(self.post(model, chunk)?);
        }
        Ok(out)
    }
}

enum Attempt {
    Retry(String),
    Fatal(String),
}

pub fn remote_scorer(endpoint: &str, timeout: Duration, batch_size: usize) -> RemoteScorer {
    RemoteScorer::new(endpoint, timeout, batch_size)
}

impl PairScorer for RemoteScorer {
    fn scorer_id(&self) -> &str {
        &self.id
    }

    fn score_batch(&self, model: ScoreModel, pairs: &[(&str, &str)]) -> Result<Vec<f64>, ScorerError> {
        self.score_all(model, pairs)
            .map_err(|e| ScorerError::batch(e.to_string()))
    }
}
