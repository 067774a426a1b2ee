//! Query selection from co-occurring category tags, plus the query and qrels
//! file formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Corpus, ExpertLabelSet};
use crate::error::{Error, Result};

/// Fraction of co-occurring tags considered as query candidates.
pub const TOP_TAG_FRACTION: f64 = 0.2;
/// Minimum relevant experts for a tag to become a query.
pub const MIN_EXPERTS_PER_QUERY: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTopic {
    pub query_id: String,
    pub tag_text: String,
    pub relevant_experts: BTreeSet<String>,
}

impl QueryTopic {
    pub fn new(
        query_id: impl Into<String>,
        tag_text: impl Into<String>,
        relevant: impl IntoIterator<Item = String>,
    ) -> Self {
        Self {
            query_id: query_id.into(),
            tag_text: tag_text.into(),
            relevant_experts: relevant.into_iter().collect(),
        }
    }
}

/// Stable identifier derived from a tag: lowercase alphanumerics with runs of
/// anything else collapsed to `_`.
pub fn query_id_for(tag: &str) -> String {
    let mut id = String::new();
    for ch in tag.chars() {
        if ch.is_alphanumeric() {
            id.extend(ch.to_lowercase());
        } else if !id.ends_with('_') {
            id.push('_');
        }
    }
    let id = id.trim_matches('_').to_string();
    if id.is_empty() {
        "q".to_string()
    } else {
        id
    }
}

/// Counts questions of `category` carrying each tag.
pub fn tag_cooccurrence(corpus: &Corpus, category: &str) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for q in corpus.questions().iter().filter(|q| q.category == category) {
        for t in &q.tags {
            *counts.entry(t.clone()).or_insert(0) += 1;
        }
    }
    counts
}

/// Keeps the top 20% (ceiling) of tags by co-occurrence with the anchor
/// category, including every tag tied with the boundary count, then keeps the
/// tags with at least two labeled experts.
pub fn select_queries(
    corpus: &Corpus,
    labels: &ExpertLabelSet,
    anchor_category: &str,
) -> Vec<QueryTopic> {
    let counts = tag_cooccurrence(corpus, anchor_category);
    let mut ranked: Vec<(&String, usize)> = counts.iter().map(|(t, &c)| (t, c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    if ranked.is_empty() {
        return Vec::new();
    }
    let keep = ((ranked.len() as f64) * TOP_TAG_FRACTION).ceil() as usize;
    let boundary = ranked[keep.max(1) - 1].1;

    let mut out = Vec::new();
    let mut used_ids = BTreeSet::new();
    for (tag, _) in ranked.into_iter().take_while(|&(_, c)| c >= boundary) {
        let experts = labels.experts_on(tag);
        if experts.len() < MIN_EXPERTS_PER_QUERY {
            continue;
        }
        let base = query_id_for(tag);
        let mut id = base.clone();
        let mut n = 2;
        while !used_ids.insert(id.clone()) {
            id = format!("{base}_{n}");
            n += 1;
        }
        out.push(QueryTopic::new(id, tag.clone(), experts));
    }
    out.sort_by(|a, b| a.query_id.cmp(&b.query_id));
    out
}

/// Writes `query_id<TAB>tag_text` lines.
pub fn write_queries(path: &Path, queries: &[QueryTopic]) -> Result<()> {
    let mut s = String::new();
    for q in queries {
        let _ = writeln!(s, "{}\t{}", q.query_id, q.tag_text);
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Writes TREC qrels lines `query_id 0 lawyer_id 1`.
pub fn write_qrels(path: &Path, queries: &[QueryTopic]) -> Result<()> {
    let mut s = String::new();
    for q in queries {
        for l in &q.relevant_experts {
            let _ = writeln!(s, "{} 0 {} 1", q.query_id, l);
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

/// Reads TREC qrels; only lines with positive relevance are kept.
pub fn read_qrels(path: &Path) -> Result<BTreeMap<String, BTreeSet<String>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.is_empty() {
            continue;
        }
        if f.len() != 4 {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                msg: format!("expected 4 fields, found {}", f.len()),
            });
        }
        let rel: i64 = f[3].parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            msg: format!("bad relevance {:?}", f[3]),
        })?;
        let entry = out.entry(f[0].to_string()).or_default();
        if rel > 0 {
            entry.insert(f[2].to_string());
        }
    }
    Ok(out)
}

/// Reads a queries file and attaches relevant experts from a qrels file.
pub fn read_queries(queries_path: &Path, qrels_path: Option<&Path>) -> Result<Vec<QueryTopic>> {
    let text = std::fs::read_to_string(queries_path).map_err(|e| Error::io(queries_path, e))?;
    let qrels = match qrels_path {
        Some(p) => read_qrels(p)?,
        None => BTreeMap::new(),
    };
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (id, tag) = line.split_once('\t').ok_or_else(|| Error::Parse {
            path: queries_path.to_path_buf(),
            line: n + 1,
            msg: "expected query_id<TAB>text".into(),
        })?;
        if tag.trim().is_empty() {
            return Err(Error::Parse {
                path: queries_path.to_path_buf(),
                line: n + 1,
                msg: "empty query text".into(),
            });
        }
        let rel = qrels.get(id).cloned().unwrap_or_default();
        out.push(QueryTopic::new(id, tag, rel));
    }
    Ok(out)
}
