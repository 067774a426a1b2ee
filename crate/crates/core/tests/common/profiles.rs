//! Seeded profile fixtures and a replay of the profile construction rules.

use std::collections::BTreeMap;

use lawfind::analyzer::TextAnalyzer;
use lawfind::corpus::{Corpus, QueryTopic};
use lawfind::profile::{build_profiles, Profile, ProfileSet};
use lawfind::rank::{AnswerEntry, AnswerRanking, Cutoff};
use lawfind::sentiment::{split_sentences, Polarity, SentimentLexicon};
use rand::Rng;

use super::*;

const PLAIN: [&str; 10] = ["court", "filing", "the", "trustee", "debt", "chapter", "my", "house", "lien", "you"];
const UPBEAT: [&str; 5] = ["good", "great", "helpful", "excellent", "glad"];
const GLOOMY: [&str; 5] = ["bad", "wrong", "terrible", "awful", "poor"];
const MODIFIERS: [&str; 3] = ["not", "very", "never"];

fn sentence(r: &mut ChaCha8Rng, long: bool) -> String {
    let n = if long { r.gen_range(60..160) } else { r.gen_range(2..14) };
    let mut words = Vec::with_capacity(n);
    for _ in 0..n {
        let w = match r.gen_range(0..10) {
            0 => UPBEAT[r.gen_range(0..UPBEAT.len())],
            1 => GLOOMY[r.gen_range(0..GLOOMY.len())],
            2 => MODIFIERS[r.gen_range(0..MODIFIERS.len())],
            _ => PLAIN[r.gen_range(0..PLAIN.len())],
        };
        words.push(w);
    }
    let end = [".", "!", "?"][r.gen_range(0..3)];
    format!("{}{end}", words.join(" "))
}

fn paragraph(r: &mut ChaCha8Rng, max_sentences: usize, long_rate: f64) -> String {
    let n = r.gen_range(1..=max_sentences);
    (0..n)
        .map(|_| {
            let long = r.gen_bool(long_rate);
            sentence(r, long)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// One query over a random corpus, with a random retrieved answer list.
pub fn profile_fixture(seed: u64) -> (Corpus, QueryTopic, AnswerRanking) {
    let mut r = rng(seed);
    let mut recs = vec![];
    for l in 0..5 {
        recs.push(lawyer(&format!("l{l}"), "x"));
    }
    for q in 0..6 {
        recs.push(question(&format!("q{q}"), "bankruptcy", &["t"], 1 + q));
    }
    let mut ts = 100;
    let mut cid = 0;
    let mut answer_ids = Vec::new();
    for a in 0..30 {
        let id = format!("a{a:02}");
        let l = r.gen_range(0..5);
        let text = paragraph(&mut r, 8, 0.15);
        // repeated timestamps exercise the id tie-break
        ts += r.gen_range(0..3);
        recs.push(answer(&id, &format!("q{}", a % 6), &format!("l{l}"), &text, false, ts));
        for _ in 0..r.gen_range(0..4) {
            let text = paragraph(&mut r, 3, 0.1);
            recs.push(comment(&format!("c{cid:03}"), &id, &text, 10_000 + cid));
            cid += 1;
        }
        answer_ids.push((id, format!("l{l}")));
    }
    let c = corpus(recs);
    let mut entries = Vec::new();
    for (doc_id, lawyer_id) in answer_ids {
        if r.gen_bool(0.7) {
            let score = r.gen_range(0..4) as f64;
            entries.push(AnswerEntry { doc_id, lawyer_id, score });
        }
    }
    let qid = format!("query{seed}");
    let dq = AnswerRanking::from_scores(&qid, "model2_bm25", entries, Cutoff::default());
    (c, QueryTopic::new(qid, "trustee lien", Vec::new()), dq)
}

fn shuffled(mut units: Vec<(String, String)>, seed: u64, q: &str, l: &str, kind: &str) -> Vec<(String, String)> {
    let mut r = replay_stream(seed, &["profile", q, l, kind]);
    replay_shuffle(&mut units, &mut r);
    units
}

fn check_profile(name: &str, p: &Profile, units: &[(String, String)]) -> Result<(), String> {
    let want_ids = greedy_units(units, 512);
    if p.source_units != want_ids {
        return Err(format!("{name}: units {:?} but replay gives {:?}", p.source_units, want_ids));
    }
    let text_of: BTreeMap<&str, &str> = units.iter().map(|(i, t)| (i.as_str(), t.as_str())).collect();
    let mut want_tokens: Vec<String> = want_ids.iter().flat_map(|i| tokens(text_of[i.as_str()])).collect();
    want_tokens.truncate(512);
    let got = tokens(&p.text);
    if got != want_tokens {
        return Err(format!("{name}: text tokens differ from the replayed units"));
    }
    if p.token_count != got.len() || p.token_count > 512 {
        return Err(format!("{name}: token_count {} for {} tokens", p.token_count, got.len()));
    }
    Ok(())
}

/// Checks one lawyer's profiles against an independent replay and the
/// containment rules.
pub fn check_profile_set(
    c: &Corpus,
    q: &QueryTopic,
    dq: &AnswerRanking,
    seed: u64,
    set: &ProfileSet,
    lex: &SentimentLexicon,
) -> Result<(), String> {
    let an = TextAnalyzer::default();
    let view = Lexicon {
        valence: &lex.valence,
        negators: &lex.negators,
        intensifiers: &lex.intensifiers,
    };
    let l = set.lawyer_id.as_str();
    let answers: Vec<_> = dq
        .entries
        .iter()
        .filter(|e| e.lawyer_id == l)
        .map(|e| c.answer(&e.doc_id).unwrap())
        .collect();

    let mut cp = Vec::new();
    for a in &answers {
        for cm in c.comments().iter().filter(|cm| cm.answer_id == a.id) {
            if let Some(first) = sentences(&cm.text).into_iter().next() {
                cp.push((cm.id.clone(), first));
            }
        }
    }
    let (mut pp, mut np) = (Vec::new(), Vec::new());
    for a in &answers {
        for (i, s) in sentences(&a.text).into_iter().enumerate() {
            match polarity(compound(&view, &s)) {
                1 => pp.push((format!("{}#{i}", a.id), s)),
                -1 => np.push((format!("{}#{i}", a.id), s)),
                _ => {}
            }
        }
    }
    let mut recent = answers.clone();
    recent.sort_by(|x, y| y.timestamp.cmp(&x.timestamp).then(x.id.cmp(&y.id)));
    let rp: Vec<(String, String)> = recent.iter().map(|a| (a.id.clone(), a.text.clone())).collect();

    check_profile("cp", &set.cp, &shuffled(cp, seed, &q.query_id, l, "cp"))?;
    check_profile("pp", &set.pp, &shuffled(pp, seed, &q.query_id, l, "pp"))?;
    check_profile("np", &set.np, &shuffled(np, seed, &q.query_id, l, "np"))?;
    check_profile("rp", &set.rp, &rp)?;

    // containment through the library's own sentiment and splitter
    for (units, want) in [(&set.pp.source_units, Polarity::Positive), (&set.np.source_units, Polarity::Negative)] {
        for u in units {
            let (aid, i) = u.split_once('#').ok_or(format!("bad unit {u}"))?;
            let a = c.answer(aid).ok_or(format!("unknown answer {aid}"))?;
            if a.lawyer_id != l || !dq.entries.iter().any(|e| e.doc_id == aid) {
                return Err(format!("{u} is not a retrieved answer of {l}"));
            }
            let s = split_sentences(&a.text)[i.parse::<usize>().unwrap()];
            if lex.score_sentence(s, &an).label != want {
                return Err(format!("{u} has the wrong polarity"));
            }
        }
    }
    for u in &set.cp.source_units {
        let cm = c.comments().iter().find(|cm| &cm.id == u).ok_or(format!("unknown comment {u}"))?;
        let a = c.answer(&cm.answer_id).unwrap();
        if a.lawyer_id != l || !dq.entries.iter().any(|e| e.doc_id == a.id) {
            return Err(format!("comment {u} is not on a retrieved answer of {l}"));
        }
    }
    Ok(())
}

pub struct CaseReport {
    pub cases: usize,
    /// Profiles cut at exactly 512 tokens.
    pub saturated: usize,
    /// Every profile set, serialized in order.
    pub bytes: Vec<u8>,
}

/// Builds profiles for successive fixtures until `n` (query, lawyer) cases
/// are checked.
pub fn check_profile_cases(n: usize, seed: u64) -> Result<CaseReport, String> {
    let lex = SentimentLexicon::bundled();
    let an = TextAnalyzer::default();
    let mut cases = 0;
    let mut saturated = 0;
    let mut bytes = Vec::new();
    let mut fixture = 0;
    while cases < n {
        let (c, q, dq) = profile_fixture(fixture);
        fixture += 1;
        let sets = build_profiles(&q, &dq, &c, &lex, &an, seed);
        if sets != build_profiles(&q, &dq, &c, &lex, &an, seed) {
            return Err("rebuild differs".into());
        }
        for set in sets.values() {
            check_profile_set(&c, &q, &dq, seed, set, &lex).map_err(|e| format!("{} {}: {e}", q.query_id, set.lawyer_id))?;
            bytes.extend(serde_json::to_vec(set).unwrap());
            bytes.push(b'\n');
            saturated += [&set.cp, &set.pp, &set.np, &set.rp].iter().filter(|p| p.token_count == 512).count();
            cases += 1;
        }
    }
    Ok(CaseReport { cases, saturated, bytes })
}
