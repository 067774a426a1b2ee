//! Candidate-based (Model 1) and document-based (Model 2) language-model
//! expert rankers with length-dependent smoothing.
//!
//! Model 1: p(q|ca) = Π_t [ (1-λ_ca) Σ_{d∈D_ca} p(t|d) p(d|ca) + λ_ca p(t) ]
//! Model 2: p(q|ca) = Σ_{d∈D_ca} Π_t [ (1-λ_d) p(t|d) + λ_d p(t) ] p(d|ca)
//!
//! with λ_d = β/(β+|d|) and λ_ca = β/(β+Σ_{d∈D_ca}|d|). Products are taken in
//! log space. Answers with no tokens are left out of D_ca.

use serde::{Deserialize, Serialize};

use super::list::{AnswerEntry, AnswerRanking, Cutoff, RankedList};
use crate::corpus::QueryTopic;
use crate::error::{Error, Result};
use crate::index::{DocId, IndexedCollection, LawyerIdx, TermId};

pub const MODEL1_TAG: &str = "model1_lm";
pub const MODEL2_TAG: &str = "model2_lm";

/// How p(d|ca) is assigned.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DocPrior {
    /// 1/|D_ca|, a proper distribution over the candidate's answers.
    #[default]
    Uniform,
    /// 1 for every answer.
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub beta: f64,
    #[serde(default)]
    pub doc_prior: DocPrior,
}

impl SmoothingParams {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            doc_prior: DocPrior::Uniform,
        }
    }

    /// β set to the mean answer length of the index.
    pub fn for_index(index: &IndexedCollection) -> Self {
        Self::new(index.mean_doc_len().max(f64::MIN_POSITIVE))
    }

    pub fn lambda_doc(&self, doc_len: u64) -> f64 {
        self.beta / (self.beta + doc_len as f64)
    }

    pub fn lambda_cand(&self, total_len: u64) -> f64 {
        self.beta / (self.beta + total_len as f64)
    }

    fn doc_prior(&self, n_docs: usize) -> f64 {
        match self.doc_prior {
            DocPrior::Uniform => 1.0 / n_docs as f64,
            DocPrior::One => 1.0,
        }
    }
}

pub(crate) fn query_terms(q: &QueryTopic, index: &IndexedCollection) -> Result<Vec<Option<TermId>>> {
    let terms = index.analyze_query(&q.tag_text);
    if terms.is_empty() {
        return Err(Error::EmptyQuery);
    }
    Ok(terms)
}

fn scoring_docs(index: &IndexedCollection, l: LawyerIdx) -> Vec<DocId> {
    index
        .author_docs(l)
        .iter()
        .copied()
        .filter(|&d| index.doc_len(d) > 0)
        .collect()
}

/// log p(q|ca) under Model 1 for every candidate with a non-empty answer.
pub fn model1_log_scores(
    terms: &[Option<TermId>],
    index: &IndexedCollection,
    sp: &SmoothingParams,
) -> Vec<(LawyerIdx, f64)> {
    let mut out = Vec::new();
    for l in index.candidates() {
        let docs = scoring_docs(index, l);
        if docs.is_empty() {
            continue;
        }
        let total: u64 = docs.iter().map(|&d| u64::from(index.doc_len(d))).sum();
        let lambda = sp.lambda_cand(total);
        let prior = sp.doc_prior(docs.len());
        let mut log_p = 0.0;
        for t in terms {
            let mix = match *t {
                None => 0.0,
                Some(t) => {
                    let cand: f64 = docs.iter().map(|&d| index.p_term_doc(t, d) * prior).sum();
                    (1.0 - lambda) * cand + lambda * index.p_term_collection(t)
                }
            };
            log_p += mix.ln();
        }
        out.push((l, log_p));
    }
    out
}

/// log rel(d,q) under Model 2 for every non-empty answer.
pub fn model2_doc_log_scores(
    terms: &[Option<TermId>],
    index: &IndexedCollection,
    sp: &SmoothingParams,
) -> Vec<(DocId, f64)> {
    (0..index.num_docs() as DocId)
        .filter(|&d| index.doc_len(d) > 0)
        .map(|d| {
            let lambda = sp.lambda_doc(u64::from(index.doc_len(d)));
            let log_rel = terms
                .iter()
                .map(|t| match *t {
                    None => f64::NEG_INFINITY,
                    Some(t) => {
                        ((1.0 - lambda) * index.p_term_doc(t, d) + lambda * index.p_term_collection(t)).ln()
                    }
                })
                .sum();
            (d, log_rel)
        })
        .collect()
}

fn log_sum_exp(xs: impl Iterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.collect();
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Candidate-based ranking. Scores are p(q|ca).
pub fn score_model1(q: &QueryTopic, index: &IndexedCollection, sp: &SmoothingParams) -> Result<RankedList> {
    let terms = query_terms(q, index)?;
    let scores = model1_log_scores(&terms, index, sp)
        .into_iter()
        .map(|(l, s)| (index.lawyer_id(l).to_string(), s.exp()));
    Ok(RankedList::from_scores(&q.query_id, MODEL1_TAG, scores))
}

/// Document-based ranking: the lawyer list and the answer list it was
/// aggregated from (answers with rel(d,q) > 0).
pub fn score_model2(
    q: &QueryTopic,
    index: &IndexedCollection,
    sp: &SmoothingParams,
) -> Result<(RankedList, AnswerRanking)> {
    let terms = query_terms(q, index)?;
    let doc_scores = model2_doc_log_scores(&terms, index, sp);
    let mut per_lawyer: Vec<Vec<f64>> = vec![Vec::new(); index.num_lawyers()];
    for &(d, s) in &doc_scores {
        per_lawyer[index.doc_author(d) as usize].push(s);
    }
    let scores = index.candidates().filter_map(|l| {
        let docs = &per_lawyer[l as usize];
        if docs.is_empty() {
            return None;
        }
        let log_prior = sp.doc_prior(docs.len()).ln();
        let s = log_sum_exp(docs.iter().map(|s| s + log_prior));
        Some((index.lawyer_id(l).to_string(), s.exp()))
    });
    let lawyers = RankedList::from_scores(&q.query_id, MODEL2_TAG, scores);
    let answers = AnswerRanking::from_scores(
        &q.query_id,
        MODEL2_TAG,
        doc_scores
            .into_iter()
            .map(|(d, s)| (d, s.exp()))
            .filter(|&(_, s)| s > 0.0)
            .map(|(d, s)| AnswerEntry {
                doc_id: index.doc_id(d).to_string(),
                lawyer_id: index.lawyer_id(index.doc_author(d)).to_string(),
                score: s,
            }),
        Cutoff {
            lawyer_k: None,
            min_score: Some(0.0),
        },
    );
    Ok((lawyers, answers))
}
