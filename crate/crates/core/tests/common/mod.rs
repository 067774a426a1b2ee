//! Record builders and straight-line reference implementations shared by the
//! integration tests. The reference code never calls into the library.

#![allow(dead_code)]

pub mod evalcases;
pub mod profiles;
pub mod recovery;
pub mod tuning;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use lawfind::corpus::{Answer, Comment, Corpus, CorpusRecord, LawyerRef, Question};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub fn lawyer(id: &str, city: &str) -> CorpusRecord {
    CorpusRecord::Lawyer(LawyerRef {
        lawyer_id: id.into(),
        city: city.into(),
        state: "CA".into(),
    })
}

pub fn question(id: &str, category: &str, tags: &[&str], ts: i64) -> CorpusRecord {
    CorpusRecord::Question(Question {
        id: id.into(),
        text: format!("question {id}"),
        category: category.into(),
        tags: tags.iter().map(|t| t.to_string()).collect(),
        city: "fresno".into(),
        state: "CA".into(),
        timestamp: ts,
    })
}

pub fn answer(id: &str, q: &str, lawyer: &str, text: &str, best: bool, ts: i64) -> CorpusRecord {
    CorpusRecord::Answer(Answer {
        id: id.into(),
        question_id: q.into(),
        lawyer_id: lawyer.into(),
        text: text.into(),
        is_best: best,
        timestamp: ts,
    })
}

pub fn comment(id: &str, answer: &str, text: &str, ts: i64) -> CorpusRecord {
    CorpusRecord::Comment(Comment {
        id: id.into(),
        answer_id: answer.into(),
        text: text.into(),
        timestamp: ts,
    })
}

pub fn corpus(records: Vec<CorpusRecord>) -> Corpus {
    Corpus::from_records(records).expect("fixture corpus is valid")
}

/// Three lawyers, six short answers.
pub fn toy_corpus() -> Corpus {
    corpus(vec![
        lawyer("l1", "fresno"),
        lawyer("l2", "oakland"),
        lawyer("l3", "fresno"),
        question("q1", "bankruptcy", &["tax"], 1),
        question("q2", "bankruptcy", &["exemption"], 2),
        answer("a1", "q1", "l1", "Tax refund, tax.", true, 3),
        answer("a2", "q2", "l1", "Chapter seven filing", false, 4),
        answer("a3", "q1", "l2", "tax debt discharge", false, 5),
        answer("a4", "q1", "l2", "the refund of the tax", false, 6),
        answer("a5", "q2", "l3", "house exemption", true, 7),
        answer("a6", "q2", "l3", "Homestead exemption: tax on the house", false, 8),
    ])
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_text(r: &mut ChaCha8Rng, vocab: &[&str], min: usize, max: usize) -> String {
    let n = r.gen_range(min..=max);
    (0..n).map(|_| vocab[r.gen_range(0..vocab.len())]).collect::<Vec<_>>().join(" ")
}

pub fn set(ids: &[&str]) -> BTreeSet<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Lowercased alphanumeric content of each whitespace-separated chunk.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut t = String::new();
        for c in chunk.chars() {
            if c.is_alphanumeric() {
                for l in c.to_lowercase() {
                    t.push(l);
                }
            }
        }
        if !t.is_empty() {
            out.push(t);
        }
    }
    out
}

pub struct Doc {
    pub id: String,
    pub lawyer: String,
    pub tokens: Vec<String>,
}

pub fn docs(c: &Corpus) -> Vec<Doc> {
    c.answers()
        .iter()
        .map(|a| Doc {
            id: a.id.clone(),
            lawyer: a.lawyer_id.clone(),
            tokens: tokens(&a.text),
        })
        .collect()
}

fn count(toks: &[String], t: &str) -> f64 {
    toks.iter().filter(|x| *x == t).count() as f64
}

fn collection_prob(docs: &[Doc], t: &str) -> f64 {
    let total: usize = docs.iter().map(|d| d.tokens.len()).sum();
    let cf: f64 = docs.iter().map(|d| count(&d.tokens, t)).sum();
    cf / total as f64
}

fn by_lawyer(docs: &[Doc]) -> BTreeMap<String, Vec<&Doc>> {
    let mut m: BTreeMap<String, Vec<&Doc>> = BTreeMap::new();
    for d in docs.iter().filter(|d| !d.tokens.is_empty()) {
        m.entry(d.lawyer.clone()).or_default().push(d);
    }
    m
}

/// Candidate model, evaluated as a plain product over query tokens.
pub fn model1(docs: &[Doc], query: &str, beta: f64) -> BTreeMap<String, f64> {
    let q = tokens(query);
    let mut out = BTreeMap::new();
    for (l, ds) in by_lawyer(docs) {
        let total: usize = ds.iter().map(|d| d.tokens.len()).sum();
        let lambda = beta / (beta + total as f64);
        let prior = 1.0 / ds.len() as f64;
        let mut score = 1.0;
        for t in &q {
            let mut cand = 0.0;
            for d in &ds {
                cand += count(&d.tokens, t) / d.tokens.len() as f64 * prior;
            }
            score *= (1.0 - lambda) * cand + lambda * collection_prob(docs, t);
        }
        out.insert(l, score);
    }
    out
}

/// Per-document relevance under the document model.
pub fn doc_relevance(docs: &[Doc], d: &Doc, query: &str, beta: f64) -> f64 {
    let lambda = beta / (beta + d.tokens.len() as f64);
    let mut rel = 1.0;
    for t in tokens(query) {
        let ptd = count(&d.tokens, &t) / d.tokens.len() as f64;
        rel *= (1.0 - lambda) * ptd + lambda * collection_prob(docs, &t);
    }
    rel
}

/// Document model: prior-weighted sum of per-document relevance.
pub fn model2(docs: &[Doc], query: &str, beta: f64) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for (l, ds) in by_lawyer(docs) {
        let prior = 1.0 / ds.len() as f64;
        let s: f64 = ds.iter().map(|d| doc_relevance(docs, d, query, beta) * prior).sum();
        out.insert(l, s);
    }
    out
}

fn bm25_one(toks: &[String], query: &[String], n: f64, dfs: &HashMap<String, f64>, avg: f64, k1: f64, b: f64) -> f64 {
    let mut s = 0.0;
    for t in query {
        let tf = count(toks, t);
        if tf == 0.0 {
            continue;
        }
        let df = dfs[t];
        let idf = (1.0 + (n - df + 0.5) / (df + 0.5)).ln();
        s += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * toks.len() as f64 / avg));
    }
    s
}

fn df_table(units: &[&[String]], query: &[String]) -> HashMap<String, f64> {
    query
        .iter()
        .map(|t| (t.clone(), units.iter().filter(|u| u.contains(t)).count() as f64))
        .collect()
}

/// Per-document BM25 scores keyed by answer id.
pub fn bm25_docs(docs: &[Doc], query: &str, k1: f64, b: f64) -> BTreeMap<String, f64> {
    let q = tokens(query);
    let units: Vec<&[String]> = docs.iter().map(|d| d.tokens.as_slice()).collect();
    let dfs = df_table(&units, &q);
    let n = docs.len() as f64;
    let avg = units.iter().map(|u| u.len()).sum::<usize>() as f64 / n;
    docs.iter()
        .map(|d| (d.id.clone(), bm25_one(&d.tokens, &q, n, &dfs, avg, k1, b)))
        .collect()
}

/// Lawyer score = sum of their answers' BM25 scores.
pub fn bm25_doc_lawyers(docs: &[Doc], query: &str, k1: f64, b: f64) -> BTreeMap<String, f64> {
    let per_doc = bm25_docs(docs, query, k1, b);
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for d in docs {
        *out.entry(d.lawyer.clone()).or_insert(0.0) += per_doc[&d.id];
    }
    out
}

/// BM25 over one concatenated pseudo-document per lawyer.
pub fn bm25_candidates(docs: &[Doc], query: &str, k1: f64, b: f64) -> BTreeMap<String, f64> {
    let q = tokens(query);
    let mut pseudo: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for d in docs {
        pseudo.entry(d.lawyer.clone()).or_default().extend(d.tokens.iter().cloned());
    }
    let units: Vec<&[String]> = pseudo.values().map(|v| v.as_slice()).collect();
    let dfs = df_table(&units, &q);
    let n = units.len() as f64;
    let avg = units.iter().map(|u| u.len()).sum::<usize>() as f64 / n;
    pseudo
        .iter()
        .map(|(l, toks)| (l.clone(), bm25_one(toks, &q, n, &dfs, avg, k1, b)))
        .collect()
}

/// Expert pairs from raw answers, one condition at a time.
pub fn expert_pairs(c: &Corpus, category: &str) -> BTreeSet<(String, String)> {
    let mut answers: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
    let mut on_tag: BTreeMap<(&str, &str), (u32, u32)> = BTreeMap::new();
    for a in c.answers() {
        let q = c.question(&a.question_id).unwrap();
        if q.category != category {
            continue;
        }
        let e = answers.entry(a.lawyer_id.as_str()).or_insert((0, 0));
        e.0 += 1;
        e.1 += a.is_best as u32;
        for t in &q.tags {
            let e = on_tag.entry((a.lawyer_id.as_str(), t.as_str())).or_insert((0, 0));
            e.0 += 1;
            e.1 += a.is_best as u32;
        }
    }
    let ratios: Vec<f64> = answers.values().map(|&(n, b)| b as f64 / n as f64).collect();
    let mean_ratio = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;

    let mut tag_best: BTreeMap<&str, Vec<u32>> = BTreeMap::new();
    for (&(_, t), &(_, b)) in &on_tag {
        tag_best.entry(t).or_default().push(b);
    }
    let tag_avg: BTreeMap<&str, f64> = tag_best
        .iter()
        .map(|(t, v)| (*t, v.iter().sum::<u32>() as f64 / v.len() as f64))
        .collect();

    let mut out = BTreeSet::new();
    for (&(l, t), &(_, best_on_tag)) in &on_tag {
        let (n, best) = answers[l];
        let a = best >= 10;
        let b = best_on_tag as f64 > tag_avg[t];
        let cond_c = best as f64 / n as f64 > mean_ratio;
        if a && b && cond_c {
            out.insert((l.to_string(), t.to_string()));
        }
    }
    out
}

pub struct Lexicon<'a> {
    pub valence: &'a HashMap<String, f64>,
    pub negators: &'a HashSet<String>,
    pub intensifiers: &'a HashMap<String, f64>,
}

/// Compound score written out token by token.
pub fn compound(lex: &Lexicon, sentence: &str) -> f64 {
    let toks = tokens(sentence);
    let mut sum = 0.0;
    for i in 0..toks.len() {
        let mut v = match lex.valence.get(&toks[i]) {
            Some(v) => *v,
            None => continue,
        };
        if i >= 1 && v != 0.0 {
            if let Some(boost) = lex.intensifiers.get(&toks[i - 1]) {
                if v > 0.0 {
                    v += boost;
                } else {
                    v -= boost;
                }
            }
        }
        let mut negated = false;
        for back in 1..=3 {
            if i >= back && lex.negators.contains(&toks[i - back]) {
                negated = true;
            }
        }
        if negated {
            v *= -0.74;
        }
        sum += v;
    }
    if sum == 0.0 {
        0.0
    } else {
        sum / (sum * sum + 15.0).sqrt()
    }
}

pub fn polarity(compound: f64) -> i8 {
    if compound >= 0.05 {
        1
    } else if compound <= -0.05 {
        -1
    } else {
        0
    }
}

/// Sentence pieces by a regex pass: terminator runs followed by whitespace or
/// the end of text close a sentence.
pub fn sentences(text: &str) -> Vec<String> {
    let re = regex::Regex::new(r"(?s).*?[.!?](?:\s|$)").unwrap();
    let mut out = Vec::new();
    let mut end = 0;
    for m in re.find_iter(text) {
        let s = m.as_str().trim();
        if !s.is_empty() {
            out.push(s.to_string());
        }
        end = m.end();
    }
    let tail = text[end..].trim();
    if !tail.is_empty() {
        out.push(tail.to_string());
    }
    out
}

/// Reproduces the library's labeled random stream from its published
/// construction: SHA-256 over the root and length-prefixed labels seeds
/// ChaCha8.
pub fn replay_stream(root: u64, labels: &[&str]) -> ChaCha8Rng {
    let mut bytes = root.to_le_bytes().to_vec();
    for l in labels {
        bytes.extend((l.len() as u64).to_le_bytes());
        bytes.extend(l.as_bytes());
    }
    let seed: [u8; 32] = Sha256::digest(&bytes).into();
    ChaCha8Rng::from_seed(seed)
}

pub fn replay_shuffle<T>(items: &mut [T], r: &mut ChaCha8Rng) {
    let mut i = items.len();
    while i > 1 {
        i -= 1;
        let j = r.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Units kept by the greedy fill: everything up to and including the one
/// that first pushes the token total past `budget`.
pub fn greedy_units(units: &[(String, String)], budget: usize) -> Vec<String> {
    let mut kept = Vec::new();
    let mut total = 0;
    for (id, text) in units {
        let n = tokens(text).len();
        if n == 0 {
            continue;
        }
        kept.push(id.clone());
        total += n;
        if total > budget {
            break;
        }
    }
    kept
}

/// TREC run lines grouped by query, ordered by the rank column.
pub fn read_trec_run(text: &str) -> BTreeMap<String, Vec<String>> {
    let mut rows: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    for line in text.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() == 6 {
            rows.entry(f[0].to_string())
                .or_default()
                .push((f[3].parse().unwrap(), f[2].to_string()));
        }
    }
    rows.into_iter()
        .map(|(q, mut v)| {
            v.sort();
            (q, v.into_iter().map(|(_, l)| l).collect())
        })
        .collect()
}

pub fn read_trec_qrels(text: &str) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for line in text.lines() {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() == 4 && f[3] != "0" {
            out.entry(f[0].to_string()).or_default().insert(f[2].to_string());
        }
    }
    out
}

/// [AP, RR, P@1, P@2, P@5] for one ranking.
pub fn reference_metrics(ranking: &[String], relevant: &BTreeSet<String>) -> [f64; 5] {
    let mut precisions = Vec::new();
    let mut first = None;
    for (pos, l) in ranking.iter().enumerate() {
        if relevant.contains(l) {
            precisions.push((precisions.len() + 1) as f64 / (pos + 1) as f64);
            if first.is_none() {
                first = Some(pos + 1);
            }
        }
    }
    let ap = precisions.iter().sum::<f64>() / relevant.len() as f64;
    let rr = first.map_or(0.0, |r| 1.0 / r as f64);
    let p = |k: usize| ranking.iter().take(k).filter(|l| relevant.contains(*l)).count() as f64 / k as f64;
    [ap, rr, p(1), p(2), p(5)]
}

/// Questions in two categories with uneven tag use, answered by lawyers of
/// widely varying skill. Every "bankruptcy" question carries `chapter7`.
pub fn labeling_corpus(seed: u64, n_lawyers: usize, n_questions: usize) -> Corpus {
    let tags = ["homestead", "lien", "trustee", "discharge", "wages", "car", "mortgage", "tax"];
    let mut r = rng(seed);
    let skill: Vec<f64> = (0..n_lawyers).map(|_| r.gen_range(0.02..0.8)).collect();
    let mut recs = Vec::new();
    for l in 0..n_lawyers {
        recs.push(lawyer(&format!("l{l:02}"), "x"));
    }
    let mut aid = 0;
    for q in 0..n_questions {
        let qid = format!("q{q:04}");
        let category = if r.gen_bool(0.85) { "bankruptcy" } else { "divorce" };
        let mut qtags = vec!["chapter7"];
        // skewed so that tag frequencies differ
        for (i, t) in tags.iter().enumerate() {
            if r.gen_bool(0.6 / (i + 1) as f64) {
                qtags.push(t);
            }
        }
        if category == "divorce" {
            qtags[0] = "custody";
        }
        recs.push(question(&qid, category, &qtags, 1 + q as i64));
        let n_ans = r.gen_range(1..=5);
        for _ in 0..n_ans {
            let l = r.gen_range(0..n_lawyers);
            let best = r.gen_bool(skill[l]);
            recs.push(answer(&format!("a{aid:05}"), &qid, &format!("l{l:02}"), "see a lawyer", best, 100_000 + aid));
            aid += 1;
        }
    }
    corpus(recs)
}

pub struct FusionQuery {
    pub relevant: BTreeSet<String>,
    /// (lawyer, [bd, cp, pp, np, rp]) for the scored pool.
    pub pool: Vec<(String, [f64; 5])>,
    /// Lawyers below the pool, in order.
    pub tail: Vec<String>,
}

/// Mean AP of the weighted-sum rankings.
pub fn fused_map(queries: &[FusionQuery], w: [u32; 5]) -> f64 {
    let mut total = 0.0;
    for q in queries {
        let mut scored: Vec<(f64, &String)> = q
            .pool
            .iter()
            .map(|(l, s)| {
                let mut x = 0.0;
                for i in 0..5 {
                    x += w[i] as f64 * s[i];
                }
                (x, l)
            })
            .collect();
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
        let mut ranking: Vec<String> = scored.into_iter().map(|(_, l)| l.clone()).collect();
        ranking.extend(q.tail.iter().cloned());
        total += reference_metrics(&ranking, &q.relevant)[0];
    }
    total / queries.len() as f64
}

/// Best MAP over the grid {lo..=hi}^5 and the first weight vector reaching
/// it in lexicographic order.
pub fn grid_optimum(queries: &[FusionQuery], lo: u32, hi: u32) -> ([u32; 5], f64) {
    let mut best = ([lo; 5], f64::NEG_INFINITY);
    for a in lo..=hi {
        for b in lo..=hi {
            for c in lo..=hi {
                for d in lo..=hi {
                    for e in lo..=hi {
                        let m = fused_map(queries, [a, b, c, d, e]);
                        if m > best.1 {
                            best = ([a, b, c, d, e], m);
                        }
                    }
                }
            }
        }
    }
    best
}

/// Five queries whose relevant lawyers lead on a random subset of signals.
pub fn fusion_queries(seed: u64) -> Vec<FusionQuery> {
    let mut r = rng(seed);
    (0..5)
        .map(|qi| {
            let n = r.gen_range(5..10);
            let n_rel = r.gen_range(1..=3);
            let mut pool = Vec::new();
            let mut relevant = BTreeSet::new();
            for i in 0..n {
                let id = format!("q{qi}l{i}");
                let mut s = [0.0; 5];
                for x in s.iter_mut() {
                    *x = r.gen_range(0.0..1.0);
                }
                if i < n_rel {
                    relevant.insert(id.clone());
                    for x in s.iter_mut() {
                        if r.gen_bool(0.4) {
                            *x += r.gen_range(0.0..0.8);
                        }
                    }
                }
                pool.push((id, s));
            }
            let tail: Vec<String> = (0..3).map(|i| format!("q{qi}t{i}")).collect();
            if r.gen_bool(0.3) {
                relevant.insert(tail[1].clone());
            }
            FusionQuery { relevant, pool, tail }
        })
        .collect()
}
