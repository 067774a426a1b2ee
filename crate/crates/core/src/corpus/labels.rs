//! Ground-truth expert labeling from best-answer counts.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::{Error, Result};

/// Minimum number of best answers in the category.
pub const MIN_BEST_ANSWERS: u32 = 10;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub answers: u32,
    pub best: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LawyerStats {
    /// Answers in the labeled category.
    pub answer_count: u32,
    /// Best answers in the labeled category.
    pub best_answer_count: u32,
    pub per_category: BTreeMap<String, Counts>,
    /// Per tag, restricted to questions in the labeled category.
    pub per_tag: BTreeMap<String, Counts>,
}

impl LawyerStats {
    pub fn acceptance_ratio(&self) -> f64 {
        if self.answer_count == 0 {
            0.0
        } else {
            f64::from(self.best_answer_count) / f64::from(self.answer_count)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertLabelSet {
    pub category: String,
    /// lawyer_id → tag → expert?
    pub labels: BTreeMap<String, BTreeMap<String, bool>>,
    /// Mean best-answer count per tag over lawyers with at least one answer on it.
    pub avg_best_answers_per_tag: BTreeMap<String, f64>,
    /// Mean of per-lawyer acceptance ratios over lawyers active in the category.
    pub collection_avg_acceptance_ratio: f64,
    pub per_lawyer_stats: BTreeMap<String, LawyerStats>,
}

impl ExpertLabelSet {
    pub fn is_expert(&self, lawyer_id: &str, tag: &str) -> bool {
        self.labels
            .get(lawyer_id)
            .and_then(|m| m.get(tag))
            .copied()
            .unwrap_or(false)
    }

    /// Lawyers labeled expert on at least one tag.
    pub fn experts(&self) -> BTreeSet<String> {
        self.labels
            .iter()
            .filter(|(_, tags)| tags.values().any(|&b| b))
            .map(|(l, _)| l.clone())
            .collect()
    }

    pub fn experts_on(&self, tag: &str) -> BTreeSet<String> {
        self.labels
            .iter()
            .filter(|(_, tags)| tags.get(tag).copied().unwrap_or(false))
            .map(|(l, _)| l.clone())
            .collect()
    }

    pub fn tags(&self) -> impl Iterator<Item = &String> {
        self.avg_best_answers_per_tag.keys()
    }

    /// Re-derives one label from the stored statistics and averages.
    pub fn recheck(&self, lawyer_id: &str, tag: &str) -> bool {
        let Some(stats) = self.per_lawyer_stats.get(lawyer_id) else {
            return false;
        };
        let Some(&tag_avg) = self.avg_best_answers_per_tag.get(tag) else {
            return false;
        };
        let on_tag = stats.per_tag.get(tag).copied().unwrap_or_default();
        stats.best_answer_count >= MIN_BEST_ANSWERS
            && f64::from(on_tag.best) > tag_avg
            && stats.acceptance_ratio() > self.collection_avg_acceptance_ratio
    }
}

/// Labels (lawyer, tag) pairs of `category` as expert when the lawyer has at
/// least ten best answers in the category, more best answers on the tag than
/// the tag's active-lawyer mean, and an acceptance ratio above the collection
/// mean.
pub fn label_experts(corpus: &Corpus, category: &str) -> Result<ExpertLabelSet> {
    let mut stats: BTreeMap<String, LawyerStats> = corpus
        .lawyers()
        .iter()
        .map(|l| (l.lawyer_id.clone(), LawyerStats::default()))
        .collect();
    let mut tags = BTreeSet::new();
    for q in corpus.questions().iter().filter(|q| q.category == category) {
        tags.extend(q.tags.iter().cloned());
    }

    let mut any = false;
    for a in corpus.answers() {
        let q = corpus
            .question(&a.question_id)
            .expect("ingestion resolves question ids");
        let s = stats.entry(a.lawyer_id.clone()).or_default();
        let best = u32::from(a.is_best);
        let c = s.per_category.entry(q.category.clone()).or_default();
        c.answers += 1;
        c.best += best;
        if q.category != category {
            continue;
        }
        any = true;
        s.answer_count += 1;
        s.best_answer_count += best;
        for t in &q.tags {
            let c = s.per_tag.entry(t.clone()).or_default();
            c.answers += 1;
            c.best += best;
        }
    }
    if !any {
        return Err(Error::EmptyCategory(category.to_string()));
    }

    let mut avg_best = BTreeMap::new();
    for t in &tags {
        let (n, sum) = stats
            .values()
            .filter_map(|s| s.per_tag.get(t))
            .filter(|c| c.answers > 0)
            .fold((0u32, 0u64), |(n, sum), c| (n + 1, sum + u64::from(c.best)));
        avg_best.insert(t.clone(), sum as f64 / f64::from(n.max(1)));
    }

    let active: Vec<f64> = stats
        .values()
        .filter(|s| s.answer_count > 0)
        .map(LawyerStats::acceptance_ratio)
        .collect();
    let avg_ratio = active.iter().sum::<f64>() / active.len() as f64;

    let mut set = ExpertLabelSet {
        category: category.to_string(),
        labels: BTreeMap::new(),
        avg_best_answers_per_tag: avg_best,
        collection_avg_acceptance_ratio: avg_ratio,
        per_lawyer_stats: stats,
    };
    let mut labels = BTreeMap::new();
    for lawyer in set.per_lawyer_stats.keys() {
        let row = tags
            .iter()
            .map(|t| (t.clone(), set.recheck(lawyer, t)))
            .collect();
        labels.insert(lawyer.clone(), row);
    }
    set.labels = labels;
    Ok(set)
}
