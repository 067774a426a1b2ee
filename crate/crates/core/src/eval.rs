//! Run evaluation: AP, reciprocal rank and precision at 1, 2 and 5, a
//! one-tailed paired t-test, and the seen/unseen query breakdown.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::corpus::QueryTopic;
use crate::error::{Error, Result};
use crate::rank::RankedList;

pub const CUTOFFS: [usize; 3] = [1, 2, 5];

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QueryMetrics {
    pub ap: f64,
    pub rr: f64,
    #[serde(rename = "p@1")]
    pub p1: f64,
    #[serde(rename = "p@2")]
    pub p2: f64,
    #[serde(rename = "p@5")]
    pub p5: f64,
}

impl QueryMetrics {
    pub fn as_array(&self) -> [f64; 5] {
        [self.ap, self.rr, self.p1, self.p2, self.p5]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub run_tag: String,
    pub per_query: BTreeMap<String, QueryMetrics>,
    pub means: QueryMetrics,
    pub n_queries: usize,
}

/// Mean over relevant items of precision at their rank; unretrieved relevant
/// items contribute 0.
pub fn average_precision<'a>(ranked: impl IntoIterator<Item = &'a str>, relevant: &BTreeSet<String>) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, id) in ranked.into_iter().enumerate() {
        if relevant.contains(id) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    sum / relevant.len() as f64
}

pub fn reciprocal_rank<'a>(ranked: impl IntoIterator<Item = &'a str>, relevant: &BTreeSet<String>) -> f64 {
    ranked
        .into_iter()
        .position(|id| relevant.contains(id))
        .map_or(0.0, |p| 1.0 / (p + 1) as f64)
}

/// Relevant items among the first `k`, divided by `k`.
pub fn precision_at<'a>(ranked: impl IntoIterator<Item = &'a str>, relevant: &BTreeSet<String>, k: usize) -> f64 {
    ranked.into_iter().take(k).filter(|id| relevant.contains(*id)).count() as f64 / k as f64
}

pub fn query_metrics(run: &RankedList, relevant: &BTreeSet<String>) -> QueryMetrics {
    QueryMetrics {
        ap: average_precision(run.lawyer_ids(), relevant),
        rr: reciprocal_rank(run.lawyer_ids(), relevant),
        p1: precision_at(run.lawyer_ids(), relevant, 1),
        p2: precision_at(run.lawyer_ids(), relevant, 2),
        p5: precision_at(run.lawyer_ids(), relevant, 5),
    }
}

fn mean_metrics<'a>(it: impl Iterator<Item = &'a QueryMetrics>) -> QueryMetrics {
    let mut sum = [0.0; 5];
    let mut n = 0usize;
    for m in it {
        for (s, v) in sum.iter_mut().zip(m.as_array()) {
            *s += v;
        }
        n += 1;
    }
    if n == 0 {
        return QueryMetrics::default();
    }
    let d = n as f64;
    QueryMetrics {
        ap: sum[0] / d,
        rr: sum[1] / d,
        p1: sum[2] / d,
        p2: sum[3] / d,
        p5: sum[4] / d,
    }
}

impl EvalReport {
    pub fn from_per_query(run_tag: impl Into<String>, per_query: BTreeMap<String, QueryMetrics>) -> Self {
        Self {
            run_tag: run_tag.into(),
            means: mean_metrics(per_query.values()),
            n_queries: per_query.len(),
            per_query,
        }
    }

    /// Per-query values of one metric, in query id order.
    pub fn column(&self, metric: impl Fn(&QueryMetrics) -> f64) -> Vec<f64> {
        self.per_query.values().map(metric).collect()
    }

    pub fn subset(&self, query_ids: &BTreeSet<String>) -> Self {
        Self::from_per_query(
            self.run_tag.clone(),
            self.per_query
                .iter()
                .filter(|(q, _)| query_ids.contains(*q))
                .map(|(q, m)| (q.clone(), *m))
                .collect(),
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.means;
        let _ = writeln!(
            s,
            "{:<24} n={:<4} MAP={:.4} MRR={:.4} P@1={:.4} P@2={:.4} P@5={:.4}",
            self.run_tag, self.n_queries, m.ap, m.rr, m.p1, m.p2, m.p5
        );
        s
    }

    /// One JSON line per query, then an `all` line with the means.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        let line = |q: &str, m: &QueryMetrics| {
            serde_json::json!({
                "run_tag": self.run_tag, "query_id": q,
                "ap": m.ap, "rr": m.rr, "p@1": m.p1, "p@2": m.p2, "p@5": m.p5,
            })
            .to_string()
        };
        for (q, m) in &self.per_query {
            s.push_str(&line(q, m));
            s.push('\n');
        }
        s.push_str(&line("all", &self.means));
        s.push('\n');
        s
    }

    pub fn read_jsonl(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Line {
            run_tag: String,
            query_id: String,
            #[serde(flatten)]
            metrics: QueryMetrics,
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut tag = String::new();
        let mut per_query = BTreeMap::new();
        for (n, l) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let line: Line = serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                msg: e.to_string(),
            })?;
            tag = line.run_tag;
            if line.query_id != "all" {
                per_query.insert(line.query_id, line.metrics);
            }
        }
        Ok(Self::from_per_query(tag, per_query))
    }
}

/// Evaluates every ranked list against the relevant sets of `qrels`.
pub fn evaluate_run(run: &[RankedList], qrels: &[QueryTopic]) -> Result<EvalReport> {
    let rel: BTreeMap<&str, &BTreeSet<String>> = qrels
        .iter()
        .filter(|q| !q.relevant_experts.is_empty())
        .map(|q| (q.query_id.as_str(), &q.relevant_experts))
        .collect();
    let missing: Vec<String> = run
        .iter()
        .filter(|r| !rel.contains_key(r.query_id.as_str()))
        .map(|r| r.query_id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingQrels(missing));
    }
    let per_query = run
        .iter()
        .map(|r| (r.query_id.clone(), query_metrics(r, rel[r.query_id.as_str()])))
        .collect();
    let tag = run.first().map(|r| r.run_tag.clone()).unwrap_or_default();
    Ok(EvalReport::from_per_query(tag, per_query))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

/// One-tailed paired t-test of H1: mean(a - b) > 0.
pub fn paired_ttest(a: &[f64], b: &[f64], alpha: f64) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewObservations(n));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = d.iter().sum::<f64>() / n as f64;
    let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let (t, p) = if var == 0.0 {
        if mean > 0.0 {
            (f64::INFINITY, 0.0)
        } else if mean < 0.0 {
            (f64::NEG_INFINITY, 1.0)
        } else {
            (0.0, 0.5)
        }
    } else {
        let t = mean / (var / n as f64).sqrt();
        let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("df >= 1");
        (t, dist.sf(t))
    };
    Ok(TTest {
        t,
        p,
        significant: p < alpha,
    })
}

/// Splits a test report by whether each query also occurs in training.
pub fn seen_unseen_report(
    test_report: &EvalReport,
    train_queries: &BTreeSet<String>,
    test_queries: &BTreeSet<String>,
) -> (EvalReport, EvalReport) {
    let seen: BTreeSet<String> = test_queries.intersection(train_queries).cloned().collect();
    let unseen: BTreeSet<String> = test_queries.difference(train_queries).cloned().collect();
    let mut s = test_report.subset(&seen);
    let mut u = test_report.subset(&unseen);
    s.run_tag = format!("{}:seen", test_report.run_tag);
    u.run_tag = format!("{}:unseen", test_report.run_tag);
    (s, u)
}
