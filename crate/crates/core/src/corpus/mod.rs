//! Corpus data model and file ingestion.
//!
//! Corpus files are line-delimited JSON, one record per line, each carrying a
//! `kind` discriminator (`question`, `answer`, `comment`, `lawyer`).

mod labels;
mod queries;
mod split;

use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use labels::{label_experts, ExpertLabelSet, LawyerStats};
pub use queries::{query_id_for, read_qrels, read_queries, select_queries, tag_cooccurrence, write_qrels, write_queries, QueryTopic};
pub use split::{read_partition, split_by_experts, split_experts, splits_from_partition, write_partition, DatasetSplit, SplitName};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub text: String,
    pub category: String,
    pub tags: BTreeSet<String>,
    pub city: String,
    pub state: String,
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub id: String,
    pub question_id: String,
    pub lawyer_id: String,
    pub text: String,
    pub is_best: bool,
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comment {
    pub id: String,
    pub answer_id: String,
    pub text: String,
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawyerRef {
    pub lawyer_id: String,
    pub city: String,
    pub state: String,
}

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CorpusRecord {
    Question(Question),
    Answer(Answer),
    Comment(Comment),
    Lawyer(LawyerRef),
}

/// An ingested corpus with resolved cross-references.
///
/// Each record list is sorted by `(timestamp, id)`; lawyers by id.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    questions: Vec<Question>,
    answers: Vec<Answer>,
    comments: Vec<Comment>,
    lawyers: Vec<LawyerRef>,
    question_idx: HashMap<String, usize>,
    answer_idx: HashMap<String, usize>,
    lawyer_idx: HashMap<String, usize>,
    comments_by_answer: HashMap<String, Vec<usize>>,
    answers_by_question: HashMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorpusCounts {
    pub questions: usize,
    pub answers: usize,
    pub comments: usize,
    pub lawyers: usize,
    /// Questions plus answers.
    pub posts: usize,
}

impl Corpus {
    /// Validates records and resolves references.
    pub fn from_records(records: impl IntoIterator<Item = CorpusRecord>) -> Result<Self> {
        let mut questions = Vec::new();
        let mut answers = Vec::new();
        let mut comments = Vec::new();
        let mut lawyers = Vec::new();
        for r in records {
            match r {
                CorpusRecord::Question(q) => questions.push(q),
                CorpusRecord::Answer(a) => answers.push(a),
                CorpusRecord::Comment(c) => comments.push(c),
                CorpusRecord::Lawyer(l) => lawyers.push(l),
            }
        }
        questions.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        answers.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        comments.sort_by(|a, b| (a.timestamp, &a.id).cmp(&(b.timestamp, &b.id)));
        lawyers.sort_by(|a, b| a.lawyer_id.cmp(&b.lawyer_id));

        let lawyer_idx = unique_index("lawyer", lawyers.iter().map(|l| l.lawyer_id.as_str()))?;
        let question_idx = unique_index("question", questions.iter().map(|q| q.id.as_str()))?;
        let answer_idx = unique_index("answer", answers.iter().map(|a| a.id.as_str()))?;
        let _ = unique_index("comment", comments.iter().map(|c| c.id.as_str()))?;

        for q in &questions {
            if q.tags.is_empty() {
                return Err(invalid("question", &q.id, "tags must be non-empty"));
            }
            if q.timestamp <= 0 {
                return Err(invalid("question", &q.id, "timestamp must be positive"));
            }
        }
        let mut answers_by_question: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, a) in answers.iter().enumerate() {
            if !question_idx.contains_key(&a.question_id) {
                return Err(Error::DanglingReference {
                    kind: "answer",
                    id: a.id.clone(),
                    field: "question_id",
                    target_kind: "question",
                    target: a.question_id.clone(),
                });
            }
            if !lawyer_idx.contains_key(&a.lawyer_id) {
                return Err(Error::DanglingReference {
                    kind: "answer",
                    id: a.id.clone(),
                    field: "lawyer_id",
                    target_kind: "lawyer",
                    target: a.lawyer_id.clone(),
                });
            }
            if a.text.trim().is_empty() {
                return Err(invalid("answer", &a.id, "text is empty"));
            }
            answers_by_question
                .entry(a.question_id.clone())
                .or_default()
                .push(i);
        }
        let mut comments_by_answer: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, c) in comments.iter().enumerate() {
            if !answer_idx.contains_key(&c.answer_id) {
                return Err(Error::DanglingReference {
                    kind: "comment",
                    id: c.id.clone(),
                    field: "answer_id",
                    target_kind: "answer",
                    target: c.answer_id.clone(),
                });
            }
            comments_by_answer
                .entry(c.answer_id.clone())
                .or_default()
                .push(i);
        }

        Ok(Self {
            questions,
            answers,
            comments,
            lawyers,
            question_idx,
            answer_idx,
            lawyer_idx,
            comments_by_answer,
            answers_by_question,
        })
    }

    pub fn questions(&self) -> &[Question] {
        &self.questions
    }

    pub fn answers(&self) -> &[Answer] {
        &self.answers
    }

    pub fn comments(&self) -> &[Comment] {
        &self.comments
    }

    pub fn lawyers(&self) -> &[LawyerRef] {
        &self.lawyers
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.question_idx.get(id).map(|&i| &self.questions[i])
    }

    pub fn answer(&self, id: &str) -> Option<&Answer> {
        self.answer_idx.get(id).map(|&i| &self.answers[i])
    }

    pub fn lawyer(&self, id: &str) -> Option<&LawyerRef> {
        self.lawyer_idx.get(id).map(|&i| &self.lawyers[i])
    }

    /// Comments on an answer, oldest first.
    pub fn comments_on(&self, answer_id: &str) -> impl Iterator<Item = &Comment> {
        self.comments_by_answer
            .get(answer_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.comments[i])
    }

    pub fn answers_to(&self, question_id: &str) -> impl Iterator<Item = &Answer> {
        self.answers_by_question
            .get(question_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.answers[i])
    }

    pub fn counts(&self) -> CorpusCounts {
        CorpusCounts {
            questions: self.questions.len(),
            answers: self.answers.len(),
            comments: self.comments.len(),
            lawyers: self.lawyers.len(),
            posts: self.questions.len() + self.answers.len(),
        }
    }

    /// All records in canonical order: lawyers, questions, answers, comments.
    pub fn records(&self) -> impl Iterator<Item = CorpusRecord> + '_ {
        self.lawyers
            .iter()
            .cloned()
            .map(CorpusRecord::Lawyer)
            .chain(self.questions.iter().cloned().map(CorpusRecord::Question))
            .chain(self.answers.iter().cloned().map(CorpusRecord::Answer))
            .chain(self.comments.iter().cloned().map(CorpusRecord::Comment))
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        for r in self.records() {
            let line = serde_json::to_string(&r).expect("corpus records serialize");
            writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Reads and validates every file in `paths` into one corpus.
pub fn ingest_corpus<P: AsRef<Path>>(paths: &[P]) -> Result<Corpus> {
    let mut records = Vec::new();
    for path in paths {
        let path = path.as_ref();
        let f = File::open(path).map_err(|e| Error::io(path, e))?;
        for (n, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: CorpusRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                msg: e.to_string(),
            })?;
            records.push(rec);
        }
    }
    Corpus::from_records(records)
}

fn unique_index<'a>(
    kind: &'static str,
    ids: impl Iterator<Item = &'a str>,
) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id.to_string(), i).is_some() {
            return Err(Error::DuplicateId {
                kind,
                id: id.to_string(),
            });
        }
    }
    Ok(map)
}

fn invalid(kind: &'static str, id: &str, msg: &str) -> Error {
    Error::InvalidRecord {
        kind,
        id: id.to_string(),
        msg: msg.to_string(),
    }
}
