//! BM25 expert rankers.
//!
//! The candidate variant scores one pseudo-document per lawyer (all answers
//! concatenated); the document variant scores answers and sums per lawyer.
//! idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5)).

use serde::{Deserialize, Serialize};

use super::list::{AnswerEntry, AnswerRanking, Cutoff, RankedList};
use super::lm::query_terms;
use crate::corpus::QueryTopic;
use crate::error::Result;
use crate::index::{DocId, IndexedCollection, TermId};

pub const BM25_CAND_TAG: &str = "model1_bm25";
pub const BM25_DOC_TAG: &str = "model2_bm25";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn idf(n: f64, df: f64) -> f64 {
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    pub fn term_weight(&self, tf: f64, len: f64, avg_len: f64) -> f64 {
        if tf == 0.0 {
            return 0.0;
        }
        let norm = if avg_len > 0.0 {
            1.0 - self.b + self.b * len / avg_len
        } else {
            1.0
        };
        tf * (self.k1 + 1.0) / (tf + self.k1 * norm)
    }
}

/// Per-answer BM25 for every answer with a positive score.
pub fn bm25_doc_scores(terms: &[Option<TermId>], index: &IndexedCollection, p: &Bm25Params) -> Vec<(DocId, f64)> {
    let n = index.num_docs() as f64;
    let avg = index.mean_doc_len();
    let mut acc = vec![0.0f64; index.num_docs()];
    for t in terms.iter().flatten() {
        let idf = Bm25Params::idf(n, index.doc_freq(*t) as f64);
        for post in index.postings(*t) {
            let len = f64::from(index.doc_len(post.doc));
            acc[post.doc as usize] += idf * p.term_weight(f64::from(post.tf), len, avg);
        }
    }
    acc.into_iter()
        .enumerate()
        .filter(|&(_, s)| s > 0.0)
        .map(|(d, s)| (d as DocId, s))
        .collect()
}

/// Document-level BM25: answers scored individually, lawyers by the sum of
/// their answer scores.
pub fn score_bm25_doc(
    q: &QueryTopic,
    index: &IndexedCollection,
    p: &Bm25Params,
) -> Result<(RankedList, AnswerRanking)> {
    let terms = query_terms(q, index)?;
    let docs = bm25_doc_scores(&terms, index, p);
    let mut per_lawyer = vec![0.0f64; index.num_lawyers()];
    for &(d, s) in &docs {
        per_lawyer[index.doc_author(d) as usize] += s;
    }
    let lawyers = RankedList::from_scores(
        &q.query_id,
        BM25_DOC_TAG,
        index
            .candidates()
            .map(|l| (index.lawyer_id(l).to_string(), per_lawyer[l as usize])),
    );
    let answers = AnswerRanking::from_scores(
        &q.query_id,
        BM25_DOC_TAG,
        docs.into_iter().map(|(d, s)| AnswerEntry {
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

/// Candidate-level BM25 over one concatenated pseudo-document per lawyer.
pub fn score_bm25_candidate(q: &QueryTopic, index: &IndexedCollection, p: &Bm25Params) -> Result<RankedList> {
    let terms = query_terms(q, index)?;
    let cands: Vec<_> = index.candidates().collect();
    let n = cands.len() as f64;
    let lens: Vec<f64> = cands.iter().map(|&l| index.lawyer_len(l) as f64).collect();
    let avg = if cands.is_empty() { 0.0 } else { lens.iter().sum::<f64>() / n };

    let mut scores = vec![0.0f64; cands.len()];
    for t in terms.iter().flatten() {
        let tfs: Vec<u32> = cands
            .iter()
            .map(|&l| index.author_docs(l).iter().map(|&d| index.tf(*t, d)).sum())
            .collect();
        let df = tfs.iter().filter(|&&tf| tf > 0).count() as f64;
        let idf = Bm25Params::idf(n, df);
        for (i, &tf) in tfs.iter().enumerate() {
            scores[i] += idf * p.term_weight(f64::from(tf), lens[i], avg);
        }
    }
    Ok(RankedList::from_scores(
        &q.query_id,
        BM25_CAND_TAG,
        cands
            .iter()
            .zip(scores)
            .map(|(&l, s)| (index.lawyer_id(l).to_string(), s)),
    ))
}

/// Both BM25 variants: (candidate-level, document-level).
pub fn score_bm25_variants(
    q: &QueryTopic,
    index: &IndexedCollection,
    p: &Bm25Params,
) -> Result<(RankedList, RankedList)> {
    let cand = score_bm25_candidate(q, index, p)?;
    let (doc, _) = score_bm25_doc(q, index, p)?;
    Ok((cand, doc))
}
