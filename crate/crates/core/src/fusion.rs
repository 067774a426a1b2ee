//! Weighted linear fusion of the five re-ranking scores and integer grid
//! search for the weights.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::corpus::DatasetSplit;
use crate::error::{Error, Result};
use crate::eval::{average_precision, precision_at, reciprocal_rank};
use crate::rank::list::rank_order;
use crate::rank::{RankedEntry, RankedList};
use crate::rerank::{stack_tail, ScoreVector};

pub const FUSED_TAG: &str = "vbd_profiles";
pub const WEIGHT_MIN: u32 = 1;
pub const WEIGHT_MAX: u32 = 100;
/// Refuse exhaustive grids larger than this many points.
pub const EXHAUSTIVE_LIMIT: u64 = 20_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeightVector {
    pub w_bd: u32,
    pub w_cp: u32,
    pub w_pp: u32,
    pub w_np: u32,
    pub w_rp: u32,
}

impl WeightVector {
    pub const fn new(w: [u32; 5]) -> Self {
        Self {
            w_bd: w[0],
            w_cp: w[1],
            w_pp: w[2],
            w_np: w[3],
            w_rp: w[4],
        }
    }

    pub const fn uniform(v: u32) -> Self {
        Self::new([v; 5])
    }

    pub fn as_array(&self) -> [u32; 5] {
        [self.w_bd, self.w_cp, self.w_pp, self.w_np, self.w_rp]
    }

    pub fn in_range(&self, lo: u32, hi: u32) -> bool {
        self.as_array().iter().all(|w| (lo..=hi).contains(w))
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.as_array();
        write!(f, "{a} {b} {c} {d} {e}")
    }
}

/// w_bd·s_bd + w_cp·s_cp + w_pp·s_pp + w_np·s_np + w_rp·s_rp
pub fn aggregate(scores: &ScoreVector, w: &WeightVector) -> f64 {
    scores
        .as_array()
        .iter()
        .zip(w.as_array())
        .map(|(s, w)| f64::from(w) * s)
        .sum()
}

/// Ranks the pool by fused score and appends `tail` (lawyers outside the
/// re-rank pool) below it in the given order.
pub fn fuse(query_id: &str, pool: &[ScoreVector], tail: &[String], w: &WeightVector) -> RankedList {
    let mut entries: Vec<RankedEntry> = RankedList::from_scores(
        query_id,
        FUSED_TAG,
        pool.iter().map(|v| (v.lawyer_id.clone(), aggregate(v, w))),
    )
    .entries;
    stack_tail(&mut entries, tail.iter().cloned());
    RankedList {
        query_id: query_id.to_string(),
        run_tag: FUSED_TAG.to_string(),
        entries,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Map,
    Mrr,
    P1,
    P2,
    P5,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::Map => "map",
            Objective::Mrr => "mrr",
            Objective::P1 => "p1",
            Objective::P2 => "p2",
            Objective::P5 => "p5",
        }
    }

    fn per_query<'a>(self, ranked: impl IntoIterator<Item = &'a str>, relevant: &BTreeSet<String>) -> f64 {
        match self {
            Objective::Map => average_precision(ranked, relevant),
            Objective::Mrr => reciprocal_rank(ranked, relevant),
            Objective::P1 => precision_at(ranked, relevant, 1),
            Objective::P2 => precision_at(ranked, relevant, 2),
            Objective::P5 => precision_at(ranked, relevant, 5),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStrategy {
    /// Cycle over the five weights, setting each to its best grid value with
    /// the others fixed, until a full pass changes nothing.
    #[default]
    CoordinateAscent,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub strategy: SearchStrategy,
    pub lo: u32,
    pub hi: u32,
    pub objective: Objective,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            strategy: SearchStrategy::CoordinateAscent,
            lo: WEIGHT_MIN,
            hi: WEIGHT_MAX,
            objective: Objective::Map,
        }
    }
}

/// Everything needed to re-rank one validation query under new weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningQuery {
    pub query_id: String,
    pub relevant: BTreeSet<String>,
    pub pool: Vec<ScoreVector>,
    pub tail: Vec<String>,
}

impl TuningQuery {
    fn ranked_ids(&self, w: &WeightVector) -> Vec<&str> {
        let mut scored: Vec<(&str, f64)> = self
            .pool
            .iter()
            .map(|v| (v.lawyer_id.as_str(), aggregate(v, w)))
            .collect();
        scored.sort_by(|a, b| rank_order(*a, *b));
        scored
            .into_iter()
            .map(|(id, _)| id)
            .chain(self.tail.iter().map(String::as_str))
            .collect()
    }
}

/// Builds tuning queries for a split from precomputed score vectors and the
/// lawyers ranked below each query's pool.
pub fn tuning_queries(
    split: &DatasetSplit,
    vectors: &[ScoreVector],
    tails: &BTreeMap<String, Vec<String>>,
) -> Vec<TuningQuery> {
    let mut by_query: BTreeMap<&str, Vec<ScoreVector>> = BTreeMap::new();
    for v in vectors {
        by_query.entry(v.query_id.as_str()).or_default().push(v.clone());
    }
    split
        .queries
        .iter()
        .map(|q| TuningQuery {
            query_id: q.query_id.clone(),
            relevant: q.relevant_experts.clone(),
            pool: by_query.remove(q.query_id.as_str()).unwrap_or_default(),
            tail: tails.get(&q.query_id).cloned().unwrap_or_default(),
        })
        .collect()
}

/// Mean objective over queries for one weight vector.
pub fn objective_value(queries: &[TuningQuery], w: &WeightVector, objective: Objective) -> f64 {
    if queries.is_empty() {
        return 0.0;
    }
    let total: f64 = queries
        .iter()
        .map(|q| objective.per_query(q.ranked_ids(w), &q.relevant))
        .sum();
    total / queries.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub weights: WeightVector,
    pub objective: Objective,
    pub value: f64,
    pub evaluations: u64,
}

/// Maximizes the objective over the integer grid `[lo, hi]^5`. Among equally
/// good vectors visited, the lexicographically smallest wins.
pub fn tune_weights(queries: &[TuningQuery], config: &SearchConfig) -> Result<TuneResult> {
    if queries.is_empty() {
        return Err(Error::EmptyValidation);
    }
    if config.lo == 0 || config.lo > config.hi {
        return Err(Error::Config(format!("bad weight range [{}, {}]", config.lo, config.hi)));
    }
    let mut evaluations = 0u64;
    let mut eval = |w: &WeightVector| {
        evaluations += 1;
        objective_value(queries, w, config.objective)
    };
    let (weights, value) = match config.strategy {
        SearchStrategy::Exhaustive => {
            let side = u64::from(config.hi - config.lo + 1);
            if side.pow(5) > EXHAUSTIVE_LIMIT {
                return Err(Error::Config(format!(
                    "exhaustive grid of {} points exceeds {EXHAUSTIVE_LIMIT}",
                    side.pow(5)
                )));
            }
            exhaustive(config.lo, config.hi, &mut eval)
        }
        SearchStrategy::CoordinateAscent => coordinate_ascent(config.lo, config.hi, &mut eval),
    };
    info!(
        "tuned weights {weights} ({} = {value:.6}, {evaluations} evaluations)",
        config.objective.as_str()
    );
    Ok(TuneResult {
        weights,
        objective: config.objective,
        value,
        evaluations,
    })
}

fn better(val: f64, w: &WeightVector, best_val: f64, best: &WeightVector) -> bool {
    val > best_val || (val == best_val && w < best)
}

fn exhaustive(lo: u32, hi: u32, eval: &mut impl FnMut(&WeightVector) -> f64) -> (WeightVector, f64) {
    let mut best = WeightVector::uniform(lo);
    let mut best_val = eval(&best);
    let mut w = [lo; 5];
    loop {
        // odometer increment, last coordinate fastest
        let mut i = 4;
        loop {
            if w[i] < hi {
                w[i] += 1;
                break;
            }
            w[i] = lo;
            if i == 0 {
                return (best, best_val);
            }
            i -= 1;
        }
        let cand = WeightVector::new(w);
        let val = eval(&cand);
        if val > best_val {
            best = cand;
            best_val = val;
        }
    }
}

fn coordinate_ascent(lo: u32, hi: u32, eval: &mut impl FnMut(&WeightVector) -> f64) -> (WeightVector, f64) {
    let mut cur = WeightVector::uniform(lo);
    let mut cur_val = eval(&cur);
    let mut pass = 0;
    loop {
        pass += 1;
        let mut changed = false;
        for c in 0..5 {
            let mut best = cur;
            let mut best_val = cur_val;
            for v in lo..=hi {
                let mut arr = cur.as_array();
                if arr[c] == v {
                    continue;
                }
                arr[c] = v;
                let cand = WeightVector::new(arr);
                let val = eval(&cand);
                if better(val, &cand, best_val, &best) {
                    best = cand;
                    best_val = val;
                }
            }
            if best != cur {
                debug!("pass {pass}: weight {c} -> {} (objective {best_val:.6})", best.as_array()[c]);
                cur = best;
                cur_val = best_val;
                changed = true;
            }
        }
        if !changed {
            return (cur, cur_val);
        }
    }
}

/// Writes `w_bd w_cp w_pp w_np w_rp` on the first line and the achieved
/// validation metric on the second.
pub fn write_weights(path: &Path, result: &TuneResult) -> Result<()> {
    let body = format!("{}\n{} {}\n", result.weights, result.objective.as_str(), result.value);
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn read_weights(path: &Path) -> Result<WeightVector> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        msg,
    };
    let first = text.lines().next().ok_or_else(|| err("empty weights file".into()))?;
    let nums: Vec<u32> = first
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(format!("bad weight {t:?}"))))
        .collect::<Result<_>>()?;
    let arr: [u32; 5] = nums
        .try_into()
        .map_err(|v: Vec<u32>| err(format!("expected 5 weights, found {}", v.len())))?;
    Ok(WeightVector::new(arr))
}
