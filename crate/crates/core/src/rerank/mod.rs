//! Neural re-ranking stage.
//!
//! The top-k lawyers of an initial ranking are re-scored by summing pair
//! scores over their retrieved answers (S_BD); profiles are scored once per
//! kind (S_CP, S_PP, S_NP, S_RP). Scorers are pluggable.

pub mod scorer;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, QueryTopic};
use crate::error::{Error, Result};
use crate::profile::{ProfileKind, ProfileSet};
use crate::rank::{AnswerRanking, RankedEntry, RankedList};

pub use scorer::{
    remote_scorer, stub_scorer, ConstantScorer, PairScorer, RemoteScorer, ScoreModel, ScorerError, StubScorer,
};

pub const DEFAULT_RERANK_K: usize = 50;
pub const VBD_TAG: &str = "vbd";

/// How per-answer scores become one lawyer score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerAggregation {
    #[default]
    Sum,
    Mean,
    Max,
}

impl AnswerAggregation {
    fn apply(self, scores: &[f64]) -> f64 {
        if scores.is_empty() {
            return 0.0;
        }
        match self {
            AnswerAggregation::Sum => scores.iter().sum(),
            AnswerAggregation::Mean => scores.iter().sum::<f64>() / scores.len() as f64,
            AnswerAggregation::Max => scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub query_id: String,
    pub lawyer_id: String,
    pub s_bd: f64,
    pub s_cp: f64,
    pub s_pp: f64,
    pub s_np: f64,
    pub s_rp: f64,
}

impl ScoreVector {
    pub fn new(query_id: &str, lawyer_id: &str) -> Self {
        Self {
            query_id: query_id.to_string(),
            lawyer_id: lawyer_id.to_string(),
            ..Self::default()
        }
    }

    /// `[s_bd, s_cp, s_pp, s_np, s_rp]`.
    pub fn as_array(&self) -> [f64; 5] {
        [self.s_bd, self.s_cp, self.s_pp, self.s_np, self.s_rp]
    }

    fn set_profile(&mut self, kind: ProfileKind, v: f64) {
        match kind {
            ProfileKind::Cp => self.s_cp = v,
            ProfileKind::Pp => self.s_pp = v,
            ProfileKind::Np => self.s_np = v,
            ProfileKind::Rp => self.s_rp = v,
        }
    }
}

/// Result of the document-based re-rank.
#[derive(Debug, Clone, PartialEq)]
pub struct VbdRerank {
    /// Re-ranked top-k followed by the remaining lawyers in initial order.
    pub ranking: RankedList,
    /// S_BD for each lawyer of the re-ranked block.
    pub s_bd: BTreeMap<String, f64>,
    /// Number of lawyers in the re-ranked block.
    pub pool_size: usize,
}

fn preview(s: &str) -> String {
    s.chars().take(80).collect()
}

fn score_checked(
    scorer: &dyn PairScorer,
    model: ScoreModel,
    pairs: &[(&str, &str)],
) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    let fail = |idx: Option<usize>, msg: String| {
        let (q, t) = pairs[idx.unwrap_or(0).min(pairs.len() - 1)];
        Error::Scorer {
            scorer_id: scorer.scorer_id().to_string(),
            query: q.to_string(),
            text_preview: preview(t),
            msg,
        }
    };
    let scores = scorer
        .score_batch(model, pairs)
        .map_err(|e| fail(e.pair_index, e.msg))?;
    if scores.len() != pairs.len() {
        return Err(fail(None, format!("{} scores for {} pairs", scores.len(), pairs.len())));
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(fail(Some(i), format!("non-finite score {}", scores[i])));
    }
    Ok(scores)
}

/// Appends `tail` entries below `block` with scores strictly under the
/// block's minimum, so the whole list stays non-increasing.
pub(crate) fn stack_tail(block: &mut Vec<RankedEntry>, tail: impl Iterator<Item = String>) {
    let floor = block.iter().map(|e| e.score).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 0.0 };
    for (i, lawyer_id) in tail.enumerate() {
        block.push(RankedEntry {
            lawyer_id,
            score: floor - (i + 1) as f64,
        });
    }
}

/// Re-ranks the top `k` lawyers of `initial` by the aggregated pair scores of
/// their answers in `d_q`. Lawyers without answers in `d_q` get S_BD = 0.
pub fn rerank_vbd(
    q: &QueryTopic,
    initial: &RankedList,
    d_q: &AnswerRanking,
    corpus: &Corpus,
    scorer: &dyn PairScorer,
    k: usize,
    aggregation: AnswerAggregation,
) -> Result<VbdRerank> {
    if k == 0 {
        return Err(Error::Config("re-rank cutoff k must be at least 1".into()));
    }
    let pool: Vec<&str> = initial.lawyer_ids().take(k).collect();
    let by_lawyer = d_q.by_lawyer();

    let mut pairs: Vec<(&str, &str)> = Vec::new();
    let mut owners: Vec<usize> = Vec::new();
    for (i, lawyer) in pool.iter().enumerate() {
        for e in by_lawyer.get(lawyer).into_iter().flatten() {
            let a = corpus.answer(&e.doc_id).ok_or_else(|| Error::DanglingReference {
                kind: "answer ranking",
                id: d_q.query_id.clone(),
                field: "doc_id",
                target_kind: "answer",
                target: e.doc_id.clone(),
            })?;
            pairs.push((q.tag_text.as_str(), a.text.as_str()));
            owners.push(i);
        }
    }
    let scores = score_checked(scorer, ScoreModel::Vbd, &pairs)?;
    let mut per_lawyer: Vec<Vec<f64>> = vec![Vec::new(); pool.len()];
    for (s, &o) in scores.iter().zip(&owners) {
        per_lawyer[o].push(*s);
    }
    let s_bd: BTreeMap<String, f64> = pool
        .iter()
        .zip(&per_lawyer)
        .map(|(l, s)| (l.to_string(), aggregation.apply(s)))
        .collect();

    let mut block = RankedList::from_scores(&q.query_id, VBD_TAG, s_bd.iter().map(|(l, s)| (l.clone(), *s))).entries;
    stack_tail(&mut block, initial.lawyer_ids().skip(pool.len()).map(str::to_string));
    Ok(VbdRerank {
        ranking: RankedList {
            query_id: q.query_id.clone(),
            run_tag: VBD_TAG.to_string(),
            entries: block,
        },
        s_bd,
        pool_size: pool.len(),
    })
}

/// Scores each non-empty profile once; empty profiles score 0. Returned
/// vectors carry profile scores only (S_BD = 0).
pub fn score_profiles(
    q: &QueryTopic,
    profiles: &BTreeMap<String, ProfileSet>,
    scorer: &dyn PairScorer,
) -> Result<BTreeMap<String, ScoreVector>> {
    let mut out: BTreeMap<String, ScoreVector> = profiles
        .keys()
        .map(|l| (l.clone(), ScoreVector::new(&q.query_id, l)))
        .collect();
    for kind in ProfileKind::ALL {
        let model = match kind {
            ProfileKind::Cp => ScoreModel::Cp,
            ProfileKind::Pp => ScoreModel::Pp,
            ProfileKind::Np => ScoreModel::Np,
            ProfileKind::Rp => ScoreModel::Rp,
        };
        let (lawyers, pairs): (Vec<&String>, Vec<(&str, &str)>) = profiles
            .iter()
            .filter(|(_, p)| !p.get(kind).is_empty())
            .map(|(l, p)| (l, (q.tag_text.as_str(), p.get(kind).text.as_str())))
            .unzip();
        let scores = score_checked(scorer, model, &pairs)?;
        for (l, s) in lawyers.into_iter().zip(scores) {
            out.get_mut(l).expect("keys come from profiles").set_profile(kind, s);
        }
    }
    Ok(out)
}

/// Merges S_BD into profile vectors over the re-rank pool. Pool lawyers
/// without profiles get zero profile scores.
pub fn combine_vectors(
    query_id: &str,
    vbd: &VbdRerank,
    profile_scores: &BTreeMap<String, ScoreVector>,
) -> Vec<ScoreVector> {
    vbd.ranking
        .entries
        .iter()
        .take(vbd.pool_size)
        .map(|e| {
            let mut v = profile_scores
                .get(&e.lawyer_id)
                .cloned()
                .unwrap_or_else(|| ScoreVector::new(query_id, &e.lawyer_id));
            v.s_bd = vbd.s_bd[&e.lawyer_id];
            v
        })
        .collect()
}

pub fn write_score_vectors(path: &Path, vectors: &[ScoreVector]) -> Result<()> {
    let mut buf = Vec::new();
    for v in vectors {
        serde_json::to_writer(&mut buf, v).expect("score vectors serialize");
        buf.push(b'\n');
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&buf))
        .map_err(|e| Error::io(path, e))
}

pub fn read_score_vectors(path: &Path) -> Result<Vec<ScoreVector>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                msg: e.to_string(),
            })
        })
        .collect()
}
