mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use lawfind::corpus::{
    label_experts, select_queries, split_experts, Corpus, CorpusRecord, ExpertLabelSet, QueryTopic,
};

fn labeled_pairs(labels: &ExpertLabelSet) -> BTreeSet<(String, String)> {
    labels
        .labels
        .iter()
        .flat_map(|(l, tags)| tags.iter().filter(|(_, &v)| v).map(move |(t, _)| (l.clone(), t.clone())))
        .collect()
}

#[test]
fn labels_equal_brute_force_recheck() {
    let mut positives = 0;
    for seed in 0..10 {
        for n_lawyers in [12, 16, 25] {
            let c = labeling_corpus(seed, n_lawyers, 400);
            let labels = label_experts(&c, "bankruptcy").unwrap();
            let want = expert_pairs(&c, "bankruptcy");
            assert_eq!(labeled_pairs(&labels), want, "seed {seed}, {n_lawyers} lawyers");
            positives += want.len();
            for (l, tags) in &labels.labels {
                let r = labels.per_lawyer_stats[l].acceptance_ratio();
                assert!((0.0..=1.0).contains(&r));
                for (t, &v) in tags {
                    assert_eq!(labels.recheck(l, t), v);
                }
            }
        }
    }
    assert!(positives > 30, "fixture should produce experts, got {positives}");
}

#[test]
fn silent_lawyer_is_never_expert() {
    let mut c = labeling_corpus(1, 12, 300).records().collect::<Vec<_>>();
    c.push(lawyer("zz", "x"));
    let labels = label_experts(&corpus(c), "bankruptcy").unwrap();
    assert!(labels.labels.get("zz").is_none_or(|m| m.values().all(|v| !v)));
}

fn uniform_labels(tags: &[&str]) -> ExpertLabelSet {
    let mut labels: BTreeMap<String, BTreeMap<String, bool>> = BTreeMap::new();
    for l in ["e1", "e2"] {
        labels.insert(l.into(), tags.iter().map(|t| (t.to_string(), true)).collect());
    }
    ExpertLabelSet {
        category: "bankruptcy".into(),
        labels,
        avg_best_answers_per_tag: tags.iter().map(|t| (t.to_string(), 0.0)).collect(),
        collection_avg_acceptance_ratio: 0.0,
        per_lawyer_stats: BTreeMap::new(),
    }
}

/// Ten tags; tag `tN` occurs on `counts[N]` questions.
fn tag_corpus(counts: [usize; 10]) -> Corpus {
    let mut recs = vec![lawyer("e1", "x"), lawyer("e2", "x")];
    let mut q = 0;
    for (i, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            let tag = format!("t{i}");
            recs.push(question(&format!("q{q:03}"), "bankruptcy", &[&tag], 1 + q));
            q += 1;
        }
    }
    corpus(recs)
}

fn tag_texts(qs: &[QueryTopic]) -> Vec<String> {
    qs.iter().map(|q| q.tag_text.clone()).collect()
}

#[test]
fn top_two_of_ten_tags() {
    let tags = ["t0", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8", "t9"];
    // ceil(0.2 * 10) = 2 tags: t3 (9 questions) and t7 (8)
    let c = tag_corpus([3, 1, 5, 9, 2, 4, 6, 8, 7, 1]);
    let got = select_queries(&c, &uniform_labels(&tags), "bankruptcy");
    assert_eq!(tag_texts(&got), ["t3", "t7"]);

    // a tie at the boundary brings in every tied tag
    let c = tag_corpus([3, 1, 5, 9, 2, 4, 6, 8, 8, 1]);
    let got = select_queries(&c, &uniform_labels(&tags), "bankruptcy");
    assert_eq!(tag_texts(&got), ["t3", "t7", "t8"]);

    // a top tag with one expert is dropped, not replaced
    let mut labels = uniform_labels(&tags);
    labels.labels.get_mut("e2").unwrap().insert("t3".into(), false);
    let c = tag_corpus([3, 1, 5, 9, 2, 4, 6, 8, 7, 1]);
    assert_eq!(tag_texts(&select_queries(&c, &labels, "bankruptcy")), ["t7"]);
}

fn without_tag(c: &Corpus, tag: &str) -> Corpus {
    let recs = c.records().map(|r| match r {
        CorpusRecord::Question(mut q) => {
            q.tags.remove(tag);
            CorpusRecord::Question(q)
        }
        other => other,
    });
    corpus(recs.collect())
}

fn keep_count(n_tags: usize) -> usize {
    (n_tags as f64 * 0.2).ceil() as usize
}

#[test]
fn removing_unselected_tag_keeps_selection() {
    let mut checked = 0;
    for seed in 0..6 {
        let c = labeling_corpus(seed, 20, 500);
        let selected = select_queries(&c, &label_experts(&c, "bankruptcy").unwrap(), "bankruptcy");
        let chosen: BTreeSet<String> = tag_texts(&selected).into_iter().collect();
        let all: Vec<String> = lawfind::corpus::tag_cooccurrence(&c, "bankruptcy").into_keys().collect();
        for t in &all {
            // the cut size must not move with the tag count
            if chosen.contains(t) || t == "chapter7" || keep_count(all.len() - 1) != keep_count(all.len()) {
                continue;
            }
            let reduced = without_tag(&c, t);
            let again = select_queries(&reduced, &label_experts(&reduced, "bankruptcy").unwrap(), "bankruptcy");
            assert_eq!(again, selected, "seed {seed}, removed {t}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

fn queries_over(experts: &[String]) -> Vec<QueryTopic> {
    (0..12)
        .map(|i| {
            let rel = experts.iter().skip(i % 5).step_by(3).take(4).cloned();
            QueryTopic::new(format!("q{i}"), format!("tag {i}"), rel)
        })
        .collect()
}

#[test]
fn splits_are_seeded_and_disjoint() {
    let experts: Vec<String> = (0..30).map(|i| format!("e{i:02}")).collect();
    let all: BTreeSet<String> = experts.iter().cloned().collect();
    let qs = queries_over(&experts);
    let ratios = [1.0 / 3.0; 3];
    let a = split_experts(&qs, all.clone(), 7, ratios).unwrap();
    let b = split_experts(&qs, all.clone(), 7, ratios).unwrap();
    let c = split_experts(&qs, all.clone(), 8, ratios).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.iter().map(|s| &s.expert_ids).collect::<Vec<_>>(), c.iter().map(|s| &s.expert_ids).collect::<Vec<_>>());
    for splits in [&a, &c] {
        let mut union = BTreeSet::new();
        for (i, s) in splits.iter().enumerate() {
            assert_eq!(s.expert_ids.len(), 10);
            for t in &splits[i + 1..] {
                assert!(s.expert_ids.is_disjoint(&t.expert_ids));
            }
            union.extend(s.expert_ids.iter().cloned());
            for q in &s.queries {
                assert!(!q.relevant_experts.is_empty());
                assert!(q.relevant_experts.is_subset(&s.expert_ids));
            }
        }
        assert_eq!(union, all);
    }
}

#[test]
fn three_experts_one_per_split() {
    let experts = set(&["a", "b", "c"]);
    let splits = split_experts(&[], experts, 7, [1.0 / 3.0; 3]).unwrap();
    assert!(splits.iter().all(|s| s.expert_ids.len() == 1));
}
