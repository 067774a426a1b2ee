//! Expert-level train/validation/test splitting.
//!
//! Experts, not queries, are partitioned, so the same query can appear in
//! several splits with disjoint relevant sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{ExpertLabelSet, QueryTopic};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitName {
    Train,
    Validation,
    Test,
}

impl SplitName {
    pub const ALL: [SplitName; 3] = [SplitName::Train, SplitName::Validation, SplitName::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            SplitName::Train => "train",
            SplitName::Validation => "validation",
            SplitName::Test => "test",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(SplitName::Train),
            "validation" | "valid" | "dev" => Ok(SplitName::Validation),
            "test" => Ok(SplitName::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub name: SplitName,
    pub expert_ids: BTreeSet<String>,
    pub queries: Vec<QueryTopic>,
}

impl DatasetSplit {
    fn build(name: SplitName, expert_ids: BTreeSet<String>, queries: &[QueryTopic]) -> Self {
        let queries = queries
            .iter()
            .filter_map(|q| {
                let rel: BTreeSet<String> = q
                    .relevant_experts
                    .intersection(&expert_ids)
                    .cloned()
                    .collect();
                (!rel.is_empty()).then(|| QueryTopic {
                    relevant_experts: rel,
                    ..q.clone()
                })
            })
            .collect();
        Self {
            name,
            expert_ids,
            queries,
        }
    }

    pub fn query_ids(&self) -> BTreeSet<String> {
        self.queries.iter().map(|q| q.query_id.clone()).collect()
    }
}

/// Shuffles all labeled experts with `seed` and cuts them by `ratios`.
///
/// Train and validation take `floor(r * n)` experts, test takes the rest;
/// every split keeps at least one expert.
pub fn split_by_experts(
    queries: &[QueryTopic],
    labels: &ExpertLabelSet,
    seed: u64,
    ratios: [f64; 3],
) -> Result<[DatasetSplit; 3]> {
    split_experts(queries, labels.experts(), seed, ratios)
}

/// Same as [`split_by_experts`] for an explicit expert set.
pub fn split_experts(
    queries: &[QueryTopic],
    experts: BTreeSet<String>,
    seed: u64,
    ratios: [f64; 3],
) -> Result<[DatasetSplit; 3]> {
    if ratios.iter().any(|r| !r.is_finite() || *r < 0.0) || (ratios.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidRatios(ratios));
    }
    let mut experts: Vec<String> = experts.into_iter().collect();
    let n = experts.len();
    if n < 3 {
        return Err(Error::TooFewExperts { needed: 3, found: n });
    }
    rng::shuffle(&mut experts, &mut rng::substream(seed, &["split"]));

    let mut sizes = [0usize; 3];
    sizes[0] = (ratios[0] * n as f64 + 1e-9).floor() as usize;
    sizes[1] = ((ratios[1] * n as f64 + 1e-9).floor() as usize).min(n - sizes[0]);
    sizes[2] = n - sizes[0] - sizes[1];
    while let Some(empty) = sizes.iter().position(|&s| s == 0) {
        let donor = (0..3).max_by_key(|&i| (sizes[i], std::cmp::Reverse(i))).unwrap();
        sizes[donor] -= 1;
        sizes[empty] += 1;
    }

    let mut it = experts.into_iter();
    let mut parts: Vec<BTreeSet<String>> = sizes.iter().map(|&s| it.by_ref().take(s).collect()).collect();
    let test = parts.pop().unwrap();
    let valid = parts.pop().unwrap();
    let train = parts.pop().unwrap();
    Ok([
        DatasetSplit::build(SplitName::Train, train, queries),
        DatasetSplit::build(SplitName::Validation, valid, queries),
        DatasetSplit::build(SplitName::Test, test, queries),
    ])
}

/// Builds the three splits from an explicit lawyer → split assignment.
pub fn splits_from_partition(
    partition: &BTreeMap<String, SplitName>,
    queries: &[QueryTopic],
) -> [DatasetSplit; 3] {
    SplitName::ALL.map(|name| {
        let ids = partition
            .iter()
            .filter(|(_, &s)| s == name)
            .map(|(l, _)| l.clone())
            .collect();
        DatasetSplit::build(name, ids, queries)
    })
}

/// Reads `split_name<TAB>lawyer_id` lines.
pub fn read_partition(path: &Path) -> Result<BTreeMap<String, SplitName>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            msg,
        };
        let (name, lawyer) = line
            .split_once('\t')
            .ok_or_else(|| parse_err("expected split_name<TAB>lawyer_id".into()))?;
        let name: SplitName = name.trim().parse().map_err(parse_err)?;
        if let Some(prev) = out.insert(lawyer.trim().to_string(), name) {
            if prev != name {
                return Err(parse_err(format!("lawyer {lawyer} assigned to {prev} and {name}")));
            }
        }
    }
    Ok(out)
}

pub fn write_partition(path: &Path, splits: &[DatasetSplit]) -> Result<()> {
    let mut s = String::new();
    for sp in splits {
        for l in &sp.expert_ids {
            let _ = writeln!(s, "{}\t{}", sp.name, l);
        }
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}
