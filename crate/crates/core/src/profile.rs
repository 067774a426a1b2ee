//! Query-dependent lawyer profiles built from the retrieved answer list D_q.
//!
//! Four texts per lawyer with at least one retrieved answer:
//! - CP: first sentence of each comment on the lawyer's retrieved answers,
//!   in seeded shuffled order;
//! - PP / NP: positive / negative sentences of those answers, shuffled;
//! - RP: the answers themselves, newest first.
//!
//! Units are appended until the profile first exceeds [`PROFILE_TOKENS`]
//! analyzer tokens, then the text is cut back to exactly that many.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analyzer::TextAnalyzer;
use crate::corpus::{Corpus, QueryTopic};
use crate::error::{Error, Result};
use crate::rank::AnswerRanking;
use crate::rng;
use crate::sentiment::{split_sentences, Polarity, SentimentLexicon};

pub const PROFILE_TOKENS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Cp,
    Pp,
    Np,
    Rp,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 4] = [ProfileKind::Cp, ProfileKind::Pp, ProfileKind::Np, ProfileKind::Rp];

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileKind::Cp => "cp",
            ProfileKind::Pp => "pp",
            ProfileKind::Np => "np",
            ProfileKind::Rp => "rp",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub text: String,
    pub token_count: usize,
    /// Comment ids (CP), `answer_id#sentence_index` (PP/NP) or answer ids (RP).
    pub source_units: Vec<String>,
}

impl Profile {
    pub fn is_empty(&self) -> bool {
        self.token_count == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub query_id: String,
    pub lawyer_id: String,
    pub cp: Profile,
    pub pp: Profile,
    pub np: Profile,
    pub rp: Profile,
    pub seed: u64,
}

impl ProfileSet {
    pub fn get(&self, kind: ProfileKind) -> &Profile {
        match kind {
            ProfileKind::Cp => &self.cp,
            ProfileKind::Pp => &self.pp,
            ProfileKind::Np => &self.np,
            ProfileKind::Rp => &self.rp,
        }
    }

    fn get_mut(&mut self, kind: ProfileKind) -> &mut Profile {
        match kind {
            ProfileKind::Cp => &mut self.cp,
            ProfileKind::Pp => &mut self.pp,
            ProfileKind::Np => &mut self.np,
            ProfileKind::Rp => &mut self.rp,
        }
    }
}

/// Identifier of sentence `i` (0-based) of an answer.
pub fn sentence_unit_id(answer_id: &str, i: usize) -> String {
    format!("{answer_id}#{i}")
}

/// Concatenates units (id, text) until the token budget is first exceeded,
/// then truncates to the budget.
pub fn fill_profile<'a>(units: impl IntoIterator<Item = (String, &'a str)>, analyzer: &TextAnalyzer) -> Profile {
    let mut text = String::new();
    let mut count = 0;
    let mut source_units = Vec::new();
    for (id, unit) in units {
        let n = analyzer.count(unit);
        if n == 0 {
            continue;
        }
        if !text.is_empty() {
            text.push(' ');
        }
        text.push_str(unit.trim());
        count += n;
        source_units.push(id);
        if count > PROFILE_TOKENS {
            break;
        }
    }
    if count > PROFILE_TOKENS {
        let cut = analyzer.truncate(&text, PROFILE_TOKENS).len();
        text.truncate(cut);
        count = PROFILE_TOKENS;
    }
    Profile {
        text,
        token_count: count,
        source_units,
    }
}

/// Shuffled with the (seed, query, lawyer, kind) substream.
fn shuffled<T>(mut items: Vec<T>, seed: u64, query_id: &str, lawyer_id: &str, kind: ProfileKind) -> Vec<T> {
    let mut r = rng::substream(seed, &["profile", query_id, lawyer_id, kind.as_str()]);
    rng::shuffle(&mut items, &mut r);
    items
}

pub fn build_profiles(
    q: &QueryTopic,
    d_q: &AnswerRanking,
    corpus: &Corpus,
    lexicon: &SentimentLexicon,
    analyzer: &TextAnalyzer,
    seed: u64,
) -> BTreeMap<String, ProfileSet> {
    let mut out = BTreeMap::new();
    for (lawyer, entries) in d_q.by_lawyer() {
        let answers: Vec<_> = entries
            .iter()
            .filter_map(|e| corpus.answer(&e.doc_id))
            .filter(|a| a.lawyer_id == lawyer)
            .collect();
        if answers.is_empty() {
            continue;
        }
        let mut set = ProfileSet {
            query_id: q.query_id.clone(),
            lawyer_id: lawyer.to_string(),
            cp: Profile::default(),
            pp: Profile::default(),
            np: Profile::default(),
            rp: Profile::default(),
            seed,
        };

        let comments: Vec<(String, &str)> = answers
            .iter()
            .flat_map(|a| corpus.comments_on(&a.id))
            .filter_map(|c| split_sentences(&c.text).first().map(|s| (c.id.clone(), *s)))
            .collect();
        set.cp = fill_profile(shuffled(comments, seed, &q.query_id, lawyer, ProfileKind::Cp), analyzer);

        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for a in &answers {
            for (i, s) in split_sentences(&a.text).into_iter().enumerate() {
                match lexicon.score_sentence(s, analyzer).label {
                    Polarity::Positive => positive.push((sentence_unit_id(&a.id, i), s)),
                    Polarity::Negative => negative.push((sentence_unit_id(&a.id, i), s)),
                    Polarity::Neutral => {}
                }
            }
        }
        set.pp = fill_profile(shuffled(positive, seed, &q.query_id, lawyer, ProfileKind::Pp), analyzer);
        set.np = fill_profile(shuffled(negative, seed, &q.query_id, lawyer, ProfileKind::Np), analyzer);

        let mut recent = answers.clone();
        recent.sort_by(|a, b| b.timestamp.cmp(&a.timestamp).then_with(|| a.id.cmp(&b.id)));
        set.rp = fill_profile(recent.iter().map(|a| (a.id.clone(), a.text.as_str())), analyzer);

        out.insert(lawyer.to_string(), set);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub query_id: String,
    pub lawyer_id: String,
    pub kind: ProfileKind,
    pub text: String,
}

/// One `{query_id, lawyer_id, kind, text}` line per profile.
pub fn write_profiles<'a>(path: &Path, sets: impl IntoIterator<Item = &'a ProfileSet>) -> Result<()> {
    let mut buf = Vec::new();
    for set in sets {
        for kind in ProfileKind::ALL {
            let rec = ProfileRecord {
                query_id: set.query_id.clone(),
                lawyer_id: set.lawyer_id.clone(),
                kind,
                text: set.get(kind).text.clone(),
            };
            serde_json::to_writer(&mut buf, &rec).expect("profile records serialize");
            buf.push(b'\n');
        }
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

/// Reads exported profiles back, keyed by (query_id, lawyer_id). Source units
/// are not part of the export and come back empty.
pub fn read_profiles(path: &Path, analyzer: &TextAnalyzer) -> Result<BTreeMap<(String, String), ProfileSet>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out: BTreeMap<(String, String), ProfileSet> = BTreeMap::new();
    let mut seen: HashMap<(String, String, ProfileKind), usize> = HashMap::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ProfileRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: n + 1,
            msg: e.to_string(),
        })?;
        if let Some(prev) = seen.insert((rec.query_id.clone(), rec.lawyer_id.clone(), rec.kind), n + 1) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                msg: format!("duplicate {} profile (first on line {prev})", rec.kind),
            });
        }
        let set = out
            .entry((rec.query_id.clone(), rec.lawyer_id.clone()))
            .or_insert_with(|| ProfileSet {
                query_id: rec.query_id.clone(),
                lawyer_id: rec.lawyer_id.clone(),
                cp: Profile::default(),
                pp: Profile::default(),
                np: Profile::default(),
                rp: Profile::default(),
                seed: 0,
            });
        *set.get_mut(rec.kind) = Profile {
            token_count: analyzer.count(&rec.text),
            text: rec.text,
            source_units: Vec::new(),
        };
    }
    Ok(out)
}
