//! Planted-expert recovery on the default synthetic corpus.

use std::collections::{BTreeMap, BTreeSet};

use lawfind::analyzer::TextAnalyzer;
use lawfind::corpus::{Corpus, DatasetSplit, SplitName};
use lawfind::eval::evaluate_run;
use lawfind::fusion::{tune_weights, tuning_queries, SearchConfig, TuneResult, FUSED_TAG};
use lawfind::index::build_index;
use lawfind::pipeline::{add_fused_run, run_split, PipelineConfig, PipelineContext, SplitRuns, RUN_TAGS};
use lawfind::rerank::stub_scorer;
use lawfind::sentiment::SentimentLexicon;
use lawfind::synth::{generate, planted_queries, SynthConfig};

pub struct Recovery {
    pub n_answers: usize,
    pub n_queries: usize,
    /// Test MAP and P@1 per run tag.
    pub map: BTreeMap<String, f64>,
    pub p1: BTreeMap<String, f64>,
    pub tuned: TuneResult,
}

fn whole_split(planted: &lawfind::synth::PlantedExperts, name: SplitName) -> DatasetSplit {
    DatasetSplit {
        name,
        expert_ids: planted.values().flatten().cloned().collect(),
        queries: planted_queries(planted),
    }
}

fn runs_for(corpus: &Corpus, split: &DatasetSplit, lex: &SentimentLexicon, config: &PipelineConfig) -> SplitRuns {
    let index = build_index(corpus, &TextAnalyzer::default());
    let scorer = stub_scorer(&index);
    let ctx = PipelineContext {
        corpus,
        index: &index,
        lexicon: lex,
        scorer: &scorer,
        config,
    };
    run_split(&ctx, split, &BTreeSet::new()).unwrap()
}

/// Weights are tuned on a second corpus drawn with `tune_seed`, then applied
/// to the corpus drawn with `seed`. Every planted query is evaluated.
pub fn planted_recovery(seed: u64, tune_seed: u64) -> Recovery {
    let lex = SentimentLexicon::bundled();
    let config = PipelineConfig::default();

    let (tune_corpus, tune_planted) = generate(&SynthConfig { seed: tune_seed, ..SynthConfig::default() }).unwrap();
    let valid = whole_split(&tune_planted, SplitName::Validation);
    let vruns = runs_for(&tune_corpus, &valid, &lex, &config);
    let tuned = tune_weights(&tuning_queries(&valid, &vruns.vectors, &vruns.tails), &SearchConfig::default()).unwrap();

    let (corpus, planted) = generate(&SynthConfig { seed, ..SynthConfig::default() }).unwrap();
    let test = whole_split(&planted, SplitName::Test);
    let mut runs = runs_for(&corpus, &test, &lex, &config);
    add_fused_run(&test, &mut runs, &tuned.weights);

    let mut map = BTreeMap::new();
    let mut p1 = BTreeMap::new();
    for tag in RUN_TAGS {
        let r = evaluate_run(runs.run(tag), &test.queries).unwrap();
        map.insert(tag.to_string(), r.means.ap);
        p1.insert(tag.to_string(), r.means.p1);
    }
    Recovery {
        n_answers: corpus.answers().len(),
        n_queries: test.queries.len(),
        map,
        p1,
        tuned,
    }
}

impl Recovery {
    pub fn best_single_map(&self) -> (String, f64) {
        self.map
            .iter()
            .filter(|(t, _)| t.as_str() != FUSED_TAG)
            .map(|(t, v)| (t.clone(), *v))
            .fold((String::new(), f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    }
}

/// Five planted queries from a small corpus with weak experts, as tuning
/// input. Scores come from the stub scorer.
pub fn validation_set(seed: u64) -> Vec<lawfind::fusion::TuningQuery> {
    let cfg = SynthConfig {
        seed,
        n_tags: 5,
        n_questions: 100,
        expert_skill: 0.5,
        noise_skill: 0.35,
        ..SynthConfig::default()
    };
    let (corpus, planted) = generate(&cfg).unwrap();
    let split = whole_split(&planted, SplitName::Validation);
    let runs = runs_for(&corpus, &split, &SentimentLexicon::bundled(), &PipelineConfig::default());
    tuning_queries(&split, &runs.vectors, &runs.tails)
}
