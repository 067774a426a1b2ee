//! Adapters from the reference fusion cases to library inputs.

use lawfind::fusion::{Objective, SearchConfig, SearchStrategy, TuningQuery};
use lawfind::rerank::ScoreVector;

use super::FusionQuery;

pub fn to_tuning(qs: &[FusionQuery]) -> Vec<TuningQuery> {
    qs.iter()
        .enumerate()
        .map(|(i, q)| {
            let qid = format!("q{i}");
            TuningQuery {
                query_id: qid.clone(),
                relevant: q.relevant.clone(),
                pool: q.pool.iter().map(|(l, s)| vector(&qid, l, *s)).collect(),
                tail: q.tail.clone(),
            }
        })
        .collect()
}

pub fn vector(q: &str, l: &str, s: [f64; 5]) -> ScoreVector {
    ScoreVector {
        s_bd: s[0],
        s_cp: s[1],
        s_pp: s[2],
        s_np: s[3],
        s_rp: s[4],
        ..ScoreVector::new(q, l)
    }
}

pub fn config(strategy: SearchStrategy, hi: u32) -> SearchConfig {
    SearchConfig {
        strategy,
        lo: 1,
        hi,
        objective: Objective::Map,
    }
}
