use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexedCollection;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub lawyer_id: String,
    pub score: f64,
}

/// Lawyers for one query, best first. Ties go to the smaller lawyer id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub query_id: String,
    pub run_tag: String,
    pub entries: Vec<RankedEntry>,
}

/// Descending score, then ascending id.
pub(crate) fn rank_order(a: (&str, f64), b: (&str, f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0))
}

impl RankedList {
    pub fn from_scores(
        query_id: impl Into<String>,
        run_tag: impl Into<String>,
        scores: impl IntoIterator<Item = (String, f64)>,
    ) -> Self {
        let mut entries: Vec<RankedEntry> = scores
            .into_iter()
            .map(|(lawyer_id, score)| RankedEntry { lawyer_id, score })
            .collect();
        entries.sort_by(|a, b| rank_order((&a.lawyer_id, a.score), (&b.lawyer_id, b.score)));
        Self {
            query_id: query_id.into(),
            run_tag: run_tag.into(),
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lawyer_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.lawyer_id.as_str())
    }

    /// 1-based rank of a lawyer.
    pub fn rank_of(&self, lawyer_id: &str) -> Option<usize> {
        self.entries
            .iter()
            .position(|e| e.lawyer_id == lawyer_id)
            .map(|p| p + 1)
    }

    /// Drops the given lawyers, keeping order.
    pub fn without(&self, excluded: &BTreeSet<String>) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| !excluded.contains(&e.lawyer_id))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    pub fn with_tag(mut self, run_tag: impl Into<String>) -> Self {
        self.run_tag = run_tag.into();
        self
    }

    pub fn is_well_ordered(&self) -> bool {
        self.entries
            .windows(2)
            .all(|w| rank_order((&w[0].lawyer_id, w[0].score), (&w[1].lawyer_id, w[1].score)) != Ordering::Greater)
            && self.lawyer_ids().collect::<BTreeSet<_>>().len() == self.entries.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerEntry {
    pub doc_id: String,
    pub lawyer_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Cutoff {
    /// Only answers of the top-k lawyers of the companion ranking were kept.
    pub lawyer_k: Option<usize>,
    /// Answers scoring at or below this were dropped.
    pub min_score: Option<f64>,
}

/// Retrieved answers for one query, best first; ties by doc id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerRanking {
    pub query_id: String,
    pub run_tag: String,
    pub entries: Vec<AnswerEntry>,
    pub cutoff: Cutoff,
}

impl AnswerRanking {
    pub fn from_scores(
        query_id: impl Into<String>,
        run_tag: impl Into<String>,
        scores: impl IntoIterator<Item = AnswerEntry>,
        cutoff: Cutoff,
    ) -> Self {
        let mut entries: Vec<AnswerEntry> = scores.into_iter().collect();
        entries.sort_by(|a, b| rank_order((&a.doc_id, a.score), (&b.doc_id, b.score)));
        Self {
            query_id: query_id.into(),
            run_tag: run_tag.into(),
            entries,
            cutoff,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lawyers with at least one retrieved answer.
    pub fn lawyers(&self) -> BTreeSet<&str> {
        self.entries.iter().map(|e| e.lawyer_id.as_str()).collect()
    }

    /// Retrieved answers grouped by lawyer, each group in ranking order.
    pub fn by_lawyer(&self) -> BTreeMap<&str, Vec<&AnswerEntry>> {
        let mut m: BTreeMap<&str, Vec<&AnswerEntry>> = BTreeMap::new();
        for e in &self.entries {
            m.entry(e.lawyer_id.as_str()).or_default().push(e);
        }
        m
    }

    /// Keeps only answers written by the first `k` lawyers of `lawyers`.
    pub fn restrict_to_top_lawyers(&self, lawyers: &RankedList, k: usize) -> Self {
        let keep: BTreeSet<&str> = lawyers.lawyer_ids().take(k).collect();
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| keep.contains(e.lawyer_id.as_str()))
                .cloned()
                .collect(),
            cutoff: Cutoff {
                lawyer_k: Some(k),
                ..self.cutoff.clone()
            },
            ..self.clone()
        }
    }

    pub fn without_lawyers(&self, excluded: &BTreeSet<String>) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|e| !excluded.contains(&e.lawyer_id))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }
}

/// `query_id Q0 item rank score run_tag` lines.
fn run_lines<'a>(
    out: &mut String,
    query_id: &str,
    run_tag: &str,
    items: impl Iterator<Item = (&'a str, f64)>,
) {
    for (i, (item, score)) in items.enumerate() {
        let _ = writeln!(out, "{query_id} Q0 {item} {} {score} {run_tag}", i + 1);
    }
}

pub fn format_run(lists: &[RankedList]) -> String {
    let mut s = String::new();
    for l in lists {
        run_lines(
            &mut s,
            &l.query_id,
            &l.run_tag,
            l.entries.iter().map(|e| (e.lawyer_id.as_str(), e.score)),
        );
    }
    s
}

pub fn write_run(path: &Path, lists: &[RankedList]) -> Result<()> {
    std::fs::write(path, format_run(lists)).map_err(|e| Error::io(path, e))
}

pub fn write_answer_run(path: &Path, rankings: &[AnswerRanking]) -> Result<()> {
    let mut s = String::new();
    for r in rankings {
        run_lines(
            &mut s,
            &r.query_id,
            &r.run_tag,
            r.entries.iter().map(|e| (e.doc_id.as_str(), e.score)),
        );
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

struct RunLine {
    query_id: String,
    item: String,
    rank: usize,
    score: f64,
    run_tag: String,
}

fn parse_run(path: &Path) -> Result<Vec<(String, Vec<RunLine>)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut groups: Vec<(String, Vec<RunLine>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            msg,
        };
        if f.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", f.len())));
        }
        let rank = f[3].parse().map_err(|_| err(format!("bad rank {:?}", f[3])))?;
        let score = f[4].parse().map_err(|_| err(format!("bad score {:?}", f[4])))?;
        let rl = RunLine {
            query_id: f[0].to_string(),
            item: f[2].to_string(),
            rank,
            score,
            run_tag: f[5].to_string(),
        };
        match groups.iter_mut().find(|(q, _)| *q == rl.query_id) {
            Some((_, v)) => v.push(rl),
            None => groups.push((rl.query_id.clone(), vec![rl])),
        }
    }
    for (_, v) in &mut groups {
        v.sort_by_key(|l| l.rank);
    }
    Ok(groups)
}

/// Reads a lawyer run. Entry order follows the rank column.
pub fn read_run(path: &Path) -> Result<Vec<RankedList>> {
    Ok(parse_run(path)?
        .into_iter()
        .map(|(q, lines)| RankedList {
            query_id: q,
            run_tag: lines.first().map(|l| l.run_tag.clone()).unwrap_or_default(),
            entries: lines
                .into_iter()
                .map(|l| RankedEntry {
                    lawyer_id: l.item,
                    score: l.score,
                })
                .collect(),
        })
        .collect())
}

/// Reads an answer run, resolving authors through the index.
pub fn read_answer_run(path: &Path, index: &IndexedCollection) -> Result<Vec<AnswerRanking>> {
    parse_run(path)?
        .into_iter()
        .map(|(q, lines)| {
            let run_tag = lines.first().map(|l| l.run_tag.clone()).unwrap_or_default();
            let entries = lines
                .into_iter()
                .map(|l| {
                    let d = index.doc(&l.item).ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line: 0,
                        msg: format!("unknown answer id {}", l.item),
                    })?;
                    Ok(AnswerEntry {
                        lawyer_id: index.lawyer_id(index.doc_author(d)).to_string(),
                        doc_id: l.item,
                        score: l.score,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnswerRanking {
                query_id: q,
                run_tag,
                entries,
                cutoff: Cutoff::default(),
            })
        })
        .collect()
}
