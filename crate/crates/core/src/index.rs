//! Inverted index over answers with the term statistics the rankers need.
//!
//! One index document per answer. Terms, documents and lawyers are addressed
//! by dense integer ids; string lookups are provided for callers.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use crate::analyzer::{AnalyzerConfig, TextAnalyzer};
use crate::corpus::Corpus;
use crate::error::{Error, Result};

pub type TermId = u32;
pub type DocId = u32;
pub type LawyerIdx = u32;

const MAGIC: &[u8; 8] = b"LFINDEX\0";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: DocId,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexedCollection {
    analyzer: TextAnalyzer,
    terms: Vec<String>,
    term_lookup: HashMap<String, TermId>,
    postings: Vec<Vec<Posting>>,
    collection_freq: Vec<u64>,
    collection_len: u64,

    doc_ids: Vec<String>,
    doc_lookup: HashMap<String, DocId>,
    doc_len: Vec<u32>,
    doc_terms: Vec<Vec<(TermId, u32)>>,
    doc_author: Vec<LawyerIdx>,
    doc_city: Vec<String>,

    lawyers: Vec<String>,
    lawyer_lookup: HashMap<String, LawyerIdx>,
    lawyer_city: Vec<String>,
    author_docs: Vec<Vec<DocId>>,
}

impl IndexedCollection {
    pub fn build(corpus: &Corpus, analyzer: &TextAnalyzer) -> Self {
        let lawyers: Vec<String> = corpus.lawyers().iter().map(|l| l.lawyer_id.clone()).collect();
        let lawyer_city = corpus.lawyers().iter().map(|l| l.city.clone()).collect();

        let mut vocab: BTreeMap<String, ()> = BTreeMap::new();
        let mut tokenized = Vec::with_capacity(corpus.answers().len());
        for a in corpus.answers() {
            let toks = analyzer.tokenize(&a.text);
            for t in &toks {
                vocab.entry(t.clone()).or_insert(());
            }
            tokenized.push(toks);
        }
        let terms: Vec<String> = vocab.into_keys().collect();
        let term_lookup: HashMap<String, TermId> = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TermId))
            .collect();
        let lawyer_lookup: HashMap<String, LawyerIdx> = lawyers
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as LawyerIdx))
            .collect();

        let mut doc_terms = Vec::with_capacity(tokenized.len());
        let mut doc_author = Vec::with_capacity(tokenized.len());
        let mut doc_city = Vec::with_capacity(tokenized.len());
        for (a, toks) in corpus.answers().iter().zip(&tokenized) {
            let mut tf: BTreeMap<TermId, u32> = BTreeMap::new();
            for t in toks {
                *tf.entry(term_lookup[t]).or_insert(0) += 1;
            }
            doc_terms.push(tf.into_iter().collect());
            let author = lawyer_lookup[&a.lawyer_id];
            doc_author.push(author);
            doc_city.push(corpus.lawyers()[author as usize].city.clone());
        }
        let doc_ids = corpus.answers().iter().map(|a| a.id.clone()).collect();
        Self::assemble(
            analyzer.clone(),
            terms,
            doc_ids,
            doc_terms,
            doc_author,
            doc_city,
            lawyers,
            lawyer_city,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        analyzer: TextAnalyzer,
        terms: Vec<String>,
        doc_ids: Vec<String>,
        doc_terms: Vec<Vec<(TermId, u32)>>,
        doc_author: Vec<LawyerIdx>,
        doc_city: Vec<String>,
        lawyers: Vec<String>,
        lawyer_city: Vec<String>,
    ) -> Self {
        let mut postings = vec![Vec::new(); terms.len()];
        let mut collection_freq = vec![0u64; terms.len()];
        let mut doc_len = Vec::with_capacity(doc_terms.len());
        let mut author_docs = vec![Vec::new(); lawyers.len()];
        for (d, row) in doc_terms.iter().enumerate() {
            let mut len = 0u32;
            for &(t, tf) in row {
                postings[t as usize].push(Posting { doc: d as DocId, tf });
                collection_freq[t as usize] += u64::from(tf);
                len += tf;
            }
            doc_len.push(len);
            author_docs[doc_author[d] as usize].push(d as DocId);
        }
        let collection_len = doc_len.iter().map(|&l| u64::from(l)).sum();
        Self {
            analyzer,
            term_lookup: terms.iter().enumerate().map(|(i, t)| (t.clone(), i as TermId)).collect(),
            terms,
            postings,
            collection_freq,
            collection_len,
            doc_lookup: doc_ids.iter().enumerate().map(|(i, d)| (d.clone(), i as DocId)).collect(),
            doc_ids,
            doc_len,
            doc_terms,
            doc_author,
            doc_city,
            lawyer_lookup: lawyers.iter().enumerate().map(|(i, l)| (l.clone(), i as LawyerIdx)).collect(),
            lawyers,
            lawyer_city,
            author_docs,
        }
    }

    pub fn analyzer(&self) -> &TextAnalyzer {
        &self.analyzer
    }

    pub fn num_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn collection_len(&self) -> u64 {
        self.collection_len
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.term_lookup.get(term).copied()
    }

    pub fn term(&self, t: TermId) -> &str {
        &self.terms[t as usize]
    }

    pub fn postings(&self, t: TermId) -> &[Posting] {
        &self.postings[t as usize]
    }

    pub fn collection_freq(&self, t: TermId) -> u64 {
        self.collection_freq[t as usize]
    }

    pub fn doc_freq(&self, t: TermId) -> usize {
        self.postings[t as usize].len()
    }

    pub fn doc_id(&self, d: DocId) -> &str {
        &self.doc_ids[d as usize]
    }

    pub fn doc(&self, id: &str) -> Option<DocId> {
        self.doc_lookup.get(id).copied()
    }

    pub fn doc_len(&self, d: DocId) -> u32 {
        self.doc_len[d as usize]
    }

    /// (term, tf) pairs of a document, sorted by term id.
    pub fn doc_terms(&self, d: DocId) -> &[(TermId, u32)] {
        &self.doc_terms[d as usize]
    }

    pub fn tf(&self, t: TermId, d: DocId) -> u32 {
        let row = &self.doc_terms[d as usize];
        row.binary_search_by_key(&t, |&(term, _)| term)
            .map(|i| row[i].1)
            .unwrap_or(0)
    }

    pub fn doc_author(&self, d: DocId) -> LawyerIdx {
        self.doc_author[d as usize]
    }

    pub fn doc_city(&self, d: DocId) -> &str {
        &self.doc_city[d as usize]
    }

    pub fn num_lawyers(&self) -> usize {
        self.lawyers.len()
    }

    pub fn lawyer_id(&self, l: LawyerIdx) -> &str {
        &self.lawyers[l as usize]
    }

    pub fn lawyer(&self, id: &str) -> Option<LawyerIdx> {
        self.lawyer_lookup.get(id).copied()
    }

    pub fn lawyer_city(&self, l: LawyerIdx) -> &str {
        &self.lawyer_city[l as usize]
    }

    pub fn author_docs(&self, l: LawyerIdx) -> &[DocId] {
        &self.author_docs[l as usize]
    }

    /// Total indexed tokens over a lawyer's answers.
    pub fn lawyer_len(&self, l: LawyerIdx) -> u64 {
        self.author_docs(l)
            .iter()
            .map(|&d| u64::from(self.doc_len(d)))
            .sum()
    }

    /// Lawyers with at least one indexed answer, in id order.
    pub fn candidates(&self) -> impl Iterator<Item = LawyerIdx> + '_ {
        (0..self.lawyers.len() as LawyerIdx).filter(|&l| !self.author_docs[l as usize].is_empty())
    }

    pub fn mean_doc_len(&self) -> f64 {
        if self.doc_len.is_empty() {
            0.0
        } else {
            self.collection_len as f64 / self.doc_len.len() as f64
        }
    }

    pub fn has_city(&self, city: &str) -> bool {
        self.lawyer_city.iter().any(|c| c == city)
    }

    /// p(t|d): tf(t,d)/|d|, or 0 for empty documents and unknown terms.
    pub fn term_prob_doc(&self, term: &str, doc: &str) -> f64 {
        match (self.term_id(term), self.doc(doc)) {
            (Some(t), Some(d)) => self.p_term_doc(t, d),
            _ => 0.0,
        }
    }

    pub(crate) fn p_term_doc(&self, t: TermId, d: DocId) -> f64 {
        let len = self.doc_len(d);
        if len == 0 {
            0.0
        } else {
            f64::from(self.tf(t, d)) / f64::from(len)
        }
    }

    /// p(t): collection frequency over collection length.
    pub fn collection_prob(&self, term: &str) -> Result<f64> {
        if self.collection_len == 0 {
            return Err(Error::EmptyCollection);
        }
        Ok(self.term_id(term).map_or(0.0, |t| self.p_term_collection(t)))
    }

    pub(crate) fn p_term_collection(&self, t: TermId) -> f64 {
        self.collection_freq(t) as f64 / self.collection_len as f64
    }

    /// Analyzes query text into known term ids, keeping repeats. Terms not in
    /// the vocabulary map to `None`.
    pub fn analyze_query(&self, text: &str) -> Vec<Option<TermId>> {
        self.analyzer
            .tokenize(text)
            .iter()
            .map(|t| self.term_id(t))
            .collect()
    }

    /// Human-readable dump of collection and per-term counts.
    pub fn stats_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "documents\t{}", self.num_docs());
        let _ = writeln!(s, "terms\t{}", self.num_terms());
        let _ = writeln!(s, "collection_len\t{}", self.collection_len);
        let _ = writeln!(s, "lawyers\t{}", self.num_lawyers());
        let _ = writeln!(s, "candidates\t{}", self.candidates().count());
        let _ = writeln!(s, "# term\tdf\tcf");
        for (t, term) in self.terms.iter().enumerate() {
            let _ = writeln!(s, "{term}\t{}\t{}", self.postings[t].len(), self.collection_freq[t]);
        }
        s
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Vec::new();
        w.extend_from_slice(MAGIC);
        put_u32(&mut w, FORMAT_VERSION);
        put_str(&mut w, &serde_json::to_string(self.analyzer.config()).expect("config serializes"));
        put_u32(&mut w, self.terms.len() as u32);
        for t in &self.terms {
            put_str(&mut w, t);
        }
        put_u32(&mut w, self.lawyers.len() as u32);
        for (l, city) in self.lawyers.iter().zip(&self.lawyer_city) {
            put_str(&mut w, l);
            put_str(&mut w, city);
        }
        put_u32(&mut w, self.doc_ids.len() as u32);
        for d in 0..self.doc_ids.len() {
            put_str(&mut w, &self.doc_ids[d]);
            put_u32(&mut w, self.doc_author[d]);
            put_str(&mut w, &self.doc_city[d]);
            put_u32(&mut w, self.doc_terms[d].len() as u32);
            for &(t, tf) in &self.doc_terms[d] {
                put_u32(&mut w, t);
                put_u32(&mut w, tf);
            }
        }
        w
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(Error::IndexFormat("bad magic".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::IndexFormat(format!("unsupported version {version}")));
        }
        let config: AnalyzerConfig = serde_json::from_str(&r.string()?)
            .map_err(|e| Error::IndexFormat(format!("analyzer config: {e}")))?;
        let n_terms = r.u32()? as usize;
        let terms = (0..n_terms).map(|_| r.string()).collect::<Result<Vec<_>>>()?;
        let n_lawyers = r.u32()? as usize;
        let mut lawyers = Vec::with_capacity(n_lawyers);
        let mut lawyer_city = Vec::with_capacity(n_lawyers);
        for _ in 0..n_lawyers {
            lawyers.push(r.string()?);
            lawyer_city.push(r.string()?);
        }
        let n_docs = r.u32()? as usize;
        let mut doc_ids = Vec::with_capacity(n_docs);
        let mut doc_author = Vec::with_capacity(n_docs);
        let mut doc_city = Vec::with_capacity(n_docs);
        let mut doc_terms = Vec::with_capacity(n_docs);
        for _ in 0..n_docs {
            doc_ids.push(r.string()?);
            let author = r.u32()?;
            if author as usize >= n_lawyers {
                return Err(Error::IndexFormat(format!("author {author} out of range")));
            }
            doc_author.push(author);
            doc_city.push(r.string()?);
            let n = r.u32()? as usize;
            let mut row = Vec::with_capacity(n);
            for _ in 0..n {
                let t = r.u32()?;
                if t as usize >= n_terms {
                    return Err(Error::IndexFormat(format!("term {t} out of range")));
                }
                row.push((t, r.u32()?));
            }
            doc_terms.push(row);
        }
        if r.pos != bytes.len() {
            return Err(Error::IndexFormat("trailing bytes".into()));
        }
        Ok(Self::assemble(
            TextAnalyzer::new(config),
            terms,
            doc_ids,
            doc_terms,
            doc_author,
            doc_city,
            lawyers,
            lawyer_city,
        ))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// Builds the index: one document per answer, tokens from `analyzer`.
pub fn build_index(corpus: &Corpus, analyzer: &TextAnalyzer) -> IndexedCollection {
    IndexedCollection::build(corpus, analyzer)
}

fn put_u32(w: &mut Vec<u8>, v: u32) {
    w.extend_from_slice(&v.to_le_bytes());
}

fn put_str(w: &mut Vec<u8>, s: &str) {
    put_u32(w, s.len() as u32);
    w.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::IndexFormat("truncated".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn string(&mut self) -> Result<String> {
        let n = self.u32()? as usize;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::IndexFormat("invalid utf-8".into()))
    }
}
