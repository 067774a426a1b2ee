//! Synthetic question-answer corpora with planted experts.
//!
//! Text is bag-of-words sampled from per-tag topic vocabularies, a shared
//! background vocabulary and a handful of sentiment-bearing words.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{query_id_for, Answer, Comment, Corpus, CorpusRecord, LawyerRef, Question, QueryTopic};
use crate::error::{Error, Result};
use crate::rng::{shuffle, substream};

const POSITIVE_WORDS: &[&str] = &["good", "great", "helpful", "excellent", "thanks", "clear", "grateful"];
const NEGATIVE_WORDS: &[&str] = &["bad", "wrong", "useless", "terrible", "poor", "awful"];
const BASE_TIMESTAMP: i64 = 1_400_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n_lawyers: usize,
    pub n_questions: usize,
    pub n_tags: usize,
    /// Tag text to topic tokens. Empty means generate `n_tags` tags named
    /// `topicN` with tokens `topicN`, `topicNw1`, ...
    pub topic_vocab: BTreeMap<String, Vec<String>>,
    /// Probability that a planted expert's answer is on topic, and
    /// (independently) that it is marked best.
    pub expert_skill: f64,
    /// The same two probabilities for every other answer.
    pub noise_skill: f64,
    /// Probability that an answer receives a comment.
    pub comment_rate: f64,
    pub seed: u64,
    pub experts_per_tag: usize,
    pub noise_answers_per_question: usize,
    pub topic_vocab_size: usize,
    pub background_vocab_size: usize,
    pub sentences_per_answer: usize,
    pub words_per_sentence: usize,
    /// Upper bound on extra tags per question, drawn with Zipf-like weights.
    pub max_secondary_tags: usize,
    pub category: String,
    /// `(city, state)` pairs assigned to lawyers round-robin.
    pub cities: Vec<(String, String)>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_lawyers: 60,
            n_questions: 200,
            n_tags: 10,
            topic_vocab: BTreeMap::new(),
            expert_skill: 0.9,
            noise_skill: 0.1,
            comment_rate: 0.5,
            seed: 42,
            experts_per_tag: 3,
            noise_answers_per_question: 7,
            topic_vocab_size: 12,
            background_vocab_size: 300,
            sentences_per_answer: 3,
            words_per_sentence: 8,
            max_secondary_tags: 2,
            category: "bankruptcy".into(),
            cities: [("Chicago", "IL"), ("Houston", "TX"), ("Phoenix", "AZ"), ("Seattle", "WA")]
                .iter()
                .map(|(c, s)| (c.to_string(), s.to_string()))
                .collect(),
        }
    }
}

/// Planted experts per tag.
pub type PlantedExperts = BTreeMap<String, BTreeSet<String>>;

impl SynthConfig {
    fn tag_vocab(&self) -> BTreeMap<String, Vec<String>> {
        if !self.topic_vocab.is_empty() {
            return self.topic_vocab.clone();
        }
        (0..self.n_tags)
            .map(|i| {
                let tag = format!("topic{i}");
                let mut words = vec![tag.clone()];
                words.extend((1..self.topic_vocab_size.max(1)).map(|j| format!("topic{i}w{j}")));
                (tag, words)
            })
            .collect()
    }

    fn background(&self) -> Vec<String> {
        (0..self.background_vocab_size.max(1)).map(|j| format!("bg{j}")).collect()
    }

    fn validate(&self, vocab: &BTreeMap<String, Vec<String>>) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("expert_skill", self.expert_skill),
            ("noise_skill", self.noise_skill),
            ("comment_rate", self.comment_rate),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        if self.expert_skill <= self.noise_skill {
            return bad(format!(
                "expert_skill {} must exceed noise_skill {}",
                self.expert_skill, self.noise_skill
            ));
        }
        if vocab.len() != self.n_tags {
            return bad(format!("topic_vocab has {} tags but n_tags = {}", vocab.len(), self.n_tags));
        }
        if self.n_tags == 0 || self.experts_per_tag == 0 {
            return bad("need at least one tag and one expert per tag".into());
        }
        let planted = self.n_tags * self.experts_per_tag;
        if self.n_lawyers < planted + self.noise_answers_per_question {
            return bad(format!(
                "{} lawyers cannot cover {planted} planted experts plus {} noise answerers",
                self.n_lawyers, self.noise_answers_per_question
            ));
        }
        if self.cities.is_empty() {
            return bad("no cities configured".into());
        }
        let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
        let background = self.background();
        let shared = background
            .iter()
            .map(|w| (w.as_str(), "background"))
            .chain(POSITIVE_WORDS.iter().chain(NEGATIVE_WORDS).map(|w| (*w, "sentiment")));
        let topical = vocab
            .iter()
            .flat_map(|(tag, words)| words.iter().map(move |w| (w.as_str(), tag.as_str())));
        for (word, src) in shared.chain(topical) {
            if let Some(prev) = owner.insert(word, src) {
                if prev != src {
                    return bad(format!("vocabulary collision: {word:?} in both {prev} and {src}"));
                }
            }
        }
        if vocab.values().any(Vec::is_empty) {
            return bad("empty topic vocabulary".into());
        }
        Ok(())
    }
}

struct TextGen<'a> {
    background: &'a [String],
    words_per_sentence: usize,
}

impl TextGen<'_> {
    fn sentence(&self, rng: &mut ChaCha8Rng, topic: Option<&[String]>) -> String {
        let mut words: Vec<&str> = (0..self.words_per_sentence)
            .map(|_| match topic {
                Some(t) if rng.gen_bool(0.5) => t[rng.gen_range(0..t.len())].as_str(),
                _ => self.background[rng.gen_range(0..self.background.len())].as_str(),
            })
            .collect();
        let roll: f64 = rng.gen();
        if roll < 0.35 {
            words.push(POSITIVE_WORDS[rng.gen_range(0..POSITIVE_WORDS.len())]);
        } else if roll < 0.55 {
            words.push(NEGATIVE_WORDS[rng.gen_range(0..NEGATIVE_WORDS.len())]);
        }
        let mut s = words.join(" ");
        s.push('.');
        s
    }

    fn comment(&self, rng: &mut ChaCha8Rng, positive: bool) -> String {
        let pool = if positive { POSITIVE_WORDS } else { NEGATIVE_WORDS };
        let mut words = vec![pool[rng.gen_range(0..pool.len())]];
        words.extend((0..3).map(|_| self.background[rng.gen_range(0..self.background.len())].as_str()));
        words.push(pool[rng.gen_range(0..pool.len())]);
        format!("{}. {}.", words.join(" "), self.background[rng.gen_range(0..self.background.len())])
    }
}

/// Generates a corpus and the planted expert map. Deterministic per config.
pub fn generate(config: &SynthConfig) -> Result<(Corpus, PlantedExperts)> {
    let vocab = config.tag_vocab();
    config.validate(&vocab)?;
    if config.n_questions == 0 {
        return Ok((Corpus::default(), PlantedExperts::new()));
    }
    let mut rng = substream(config.seed, &["synth"]);
    let background = config.background();
    let gen = TextGen {
        background: &background,
        words_per_sentence: config.words_per_sentence.max(1),
    };
    let tags: Vec<&String> = vocab.keys().collect();

    let lawyer_ids: Vec<String> = (0..config.n_lawyers).map(|i| format!("l{i:04}")).collect();
    let mut records: Vec<CorpusRecord> = lawyer_ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let (city, state) = &config.cities[i % config.cities.len()];
            CorpusRecord::Lawyer(LawyerRef {
                lawyer_id: id.clone(),
                city: city.clone(),
                state: state.clone(),
            })
        })
        .collect();

    let mut order: Vec<usize> = (0..config.n_lawyers).collect();
    shuffle(&mut order, &mut rng);
    let n_planted = config.n_tags * config.experts_per_tag;
    let mut planted = PlantedExperts::new();
    for (t, chunk) in order[..n_planted].chunks(config.experts_per_tag).enumerate() {
        planted.insert(tags[t].clone(), chunk.iter().map(|&i| lawyer_ids[i].clone()).collect());
    }
    let mut noise: Vec<&String> = order[n_planted..].iter().map(|&i| &lawyer_ids[i]).collect();
    noise.sort();

    // Zipf-like popularity for secondary tags
    let zipf: Vec<f64> = (0..tags.len()).map(|r| 1.0 / (r as f64 + 1.0)).collect();
    let zipf_total: f64 = zipf.iter().sum();

    let mut n_answers = 0usize;
    let mut n_comments = 0usize;
    for qi in 0..config.n_questions {
        let primary = qi % tags.len();
        let mut qtags: BTreeSet<String> = BTreeSet::from([tags[primary].clone()]);
        for _ in 0..rng.gen_range(0..=config.max_secondary_tags) {
            let mut x = rng.gen::<f64>() * zipf_total;
            let mut pick = tags.len() - 1;
            for (r, w) in zipf.iter().enumerate() {
                if x < *w {
                    pick = r;
                    break;
                }
                x -= w;
            }
            qtags.insert(tags[pick].clone());
        }
        let topic = &vocab[tags[primary]];
        let q_ts = BASE_TIMESTAMP + 3600 * qi as i64;
        let qid = format!("q{qi:05}");
        let (city, state) = &config.cities[rng.gen_range(0..config.cities.len())];
        let q_text = (0..2).map(|_| gen.sentence(&mut rng, Some(topic))).collect::<Vec<_>>().join(" ");
        records.push(CorpusRecord::Question(Question {
            id: qid.clone(),
            text: q_text,
            category: config.category.clone(),
            tags: qtags,
            city: city.clone(),
            state: state.clone(),
            timestamp: q_ts,
        }));

        let experts = &planted[tags[primary]];
        let mut answerers: Vec<(&String, bool)> = experts.iter().map(|l| (l, true)).collect();
        for i in sample(&mut rng, noise.len(), config.noise_answers_per_question) {
            answerers.push((noise[i], false));
        }
        shuffle(&mut answerers, &mut rng);
        for (j, (lawyer, is_expert)) in answerers.into_iter().enumerate() {
            let skill = if is_expert { config.expert_skill } else { config.noise_skill };
            let on_topic = rng.gen_bool(skill);
            let is_best = rng.gen_bool(skill);
            let text = (0..config.sentences_per_answer.max(1))
                .map(|_| gen.sentence(&mut rng, on_topic.then_some(topic.as_slice())))
                .collect::<Vec<_>>()
                .join(" ");
            let aid = format!("a{n_answers:06}");
            n_answers += 1;
            let a_ts = q_ts + 60 * (j as i64 + 1);
            records.push(CorpusRecord::Answer(Answer {
                id: aid.clone(),
                question_id: qid.clone(),
                lawyer_id: lawyer.clone(),
                text,
                is_best,
                timestamp: a_ts,
            }));
            if rng.gen_bool(config.comment_rate) {
                let positive = rng.gen_bool(skill);
                records.push(CorpusRecord::Comment(Comment {
                    id: format!("c{n_comments:06}"),
                    answer_id: aid,
                    text: gen.comment(&mut rng, positive),
                    timestamp: a_ts + 30,
                }));
                n_comments += 1;
            }
        }
    }
    Ok((Corpus::from_records(records)?, planted))
}

/// One query per planted tag with its planted experts as the relevant set.
pub fn planted_queries(planted: &PlantedExperts) -> Vec<QueryTopic> {
    let mut out: Vec<QueryTopic> = planted
        .iter()
        .map(|(tag, experts)| QueryTopic::new(query_id_for(tag), tag.clone(), experts.iter().cloned()))
        .collect();
    out.sort_by(|a, b| a.query_id.cmp(&b.query_id));
    out
}
