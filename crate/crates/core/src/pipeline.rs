//! End-to-end run: lexical rankers, document re-rank, profiles, weight
//! tuning on validation and evaluation on test.

use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, DatasetSplit, SplitName};
use crate::error::{Error, Result};
use crate::eval::{evaluate_run, paired_ttest, seen_unseen_report, EvalReport, TTest};
use crate::fusion::{fuse, tune_weights, tuning_queries, SearchConfig, TuneResult, FUSED_TAG};
use crate::index::IndexedCollection;
use crate::profile::{build_profiles, ProfileSet};
use crate::rank::bm25::{BM25_CAND_TAG, BM25_DOC_TAG};
use crate::rank::lm::{MODEL1_TAG, MODEL2_TAG};
use crate::rank::{
    score_bm25_candidate, score_bm25_doc, score_model1, score_model2, AnswerRanking, Bm25Params, DocPrior,
    RankedList, SmoothingParams,
};
use crate::rerank::{combine_vectors, rerank_vbd, score_profiles, AnswerAggregation, PairScorer, ScoreVector, VBD_TAG};
use crate::sentiment::SentimentLexicon;

/// Run tags in report order; the fused run comes last.
pub const RUN_TAGS: [&str; 6] = [MODEL1_TAG, MODEL2_TAG, BM25_CAND_TAG, BM25_DOC_TAG, VBD_TAG, FUSED_TAG];
pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Smoothing β; `None` uses the mean answer length.
    pub beta: Option<f64>,
    pub doc_prior: DocPrior,
    pub bm25: Bm25Params,
    pub k: usize,
    pub seed: u64,
    pub aggregation: AnswerAggregation,
    pub search: SearchConfig,
    pub alpha: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            beta: None,
            doc_prior: DocPrior::Uniform,
            bm25: Bm25Params::default(),
            k: crate::rerank::DEFAULT_RERANK_K,
            seed: 42,
            aggregation: AnswerAggregation::Sum,
            search: SearchConfig::default(),
            alpha: DEFAULT_ALPHA,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::Config(format!("beta must be positive, got {b}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must be in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }

    pub fn smoothing(&self, index: &IndexedCollection) -> SmoothingParams {
        let mut sp = match self.beta {
            Some(b) => SmoothingParams::new(b),
            None => SmoothingParams::for_index(index),
        };
        sp.doc_prior = self.doc_prior;
        sp
    }
}

/// Everything produced for the queries of one split.
#[derive(Debug, Clone, Default)]
pub struct SplitRuns {
    /// Run tag to one ranked list per query, in query order.
    pub runs: BTreeMap<String, Vec<RankedList>>,
    /// D_q per query.
    pub answer_runs: Vec<AnswerRanking>,
    pub profiles: Vec<ProfileSet>,
    /// Score vectors for the re-rank pool of every query.
    pub vectors: Vec<ScoreVector>,
    /// Lawyers ranked below the pool, per query.
    pub tails: BTreeMap<String, Vec<String>>,
}

impl SplitRuns {
    pub fn run(&self, tag: &str) -> &[RankedList] {
        self.runs.get(tag).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Shared read-only inputs of a run.
pub struct PipelineContext<'a> {
    pub corpus: &'a Corpus,
    pub index: &'a IndexedCollection,
    pub lexicon: &'a SentimentLexicon,
    pub scorer: &'a dyn PairScorer,
    pub config: &'a PipelineConfig,
}

/// Experts of the other two splits; they are removed from this split's
/// rankings so each split is judged on its own expert pool.
pub fn excluded_for(splits: &[DatasetSplit; 3], name: SplitName) -> BTreeSet<String> {
    splits
        .iter()
        .filter(|s| s.name != name)
        .flat_map(|s| s.expert_ids.iter().cloned())
        .collect()
}

/// Runs every ranker for the queries of `split`, excluding `excluded`
/// lawyers from all rankings.
pub fn run_split(ctx: &PipelineContext<'_>, split: &DatasetSplit, excluded: &BTreeSet<String>) -> Result<SplitRuns> {
    let cfg = ctx.config;
    let sp = cfg.smoothing(ctx.index);
    let mut out = SplitRuns::default();
    for q in &split.queries {
        let m1 = score_model1(q, ctx.index, &sp)?.without(excluded);
        let (m2, _) = score_model2(q, ctx.index, &sp)?;
        let cand = score_bm25_candidate(q, ctx.index, &cfg.bm25)?.without(excluded);
        let (doc, answers) = score_bm25_doc(q, ctx.index, &cfg.bm25)?;
        let doc = doc.without(excluded);
        let d_q = answers.without_lawyers(excluded).restrict_to_top_lawyers(&doc, cfg.k);

        let vbd = rerank_vbd(q, &doc, &d_q, ctx.corpus, ctx.scorer, cfg.k, cfg.aggregation)?;
        let profiles = build_profiles(q, &d_q, ctx.corpus, ctx.lexicon, ctx.index.analyzer(), cfg.seed);
        let profile_scores = score_profiles(q, &profiles, ctx.scorer)?;
        out.vectors.extend(combine_vectors(&q.query_id, &vbd, &profile_scores));
        out.tails.insert(
            q.query_id.clone(),
            vbd.ranking.lawyer_ids().skip(vbd.pool_size).map(str::to_string).collect(),
        );
        out.profiles.extend(profiles.into_values());
        out.answer_runs.push(d_q);

        for list in [m1, m2.without(excluded), cand, doc, vbd.ranking] {
            out.runs.entry(list.run_tag.clone()).or_default().push(list);
        }
    }
    Ok(out)
}

/// Appends the fused run for `weights` to `runs`.
pub fn add_fused_run(split: &DatasetSplit, runs: &mut SplitRuns, weights: &crate::fusion::WeightVector) {
    let mut pools: BTreeMap<&str, Vec<ScoreVector>> = BTreeMap::new();
    for v in &runs.vectors {
        pools.entry(v.query_id.as_str()).or_default().push(v.clone());
    }
    let fused: Vec<RankedList> = split
        .queries
        .iter()
        .map(|q| {
            let pool = pools.remove(q.query_id.as_str()).unwrap_or_default();
            let tail = runs.tails.get(&q.query_id).cloned().unwrap_or_default();
            fuse(&q.query_id, &pool, &tail, weights)
        })
        .collect();
    runs.runs.insert(FUSED_TAG.to_string(), fused);
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub system: String,
    pub baseline: String,
    pub metric: String,
    pub mean_system: f64,
    pub mean_baseline: f64,
    pub ttest: Option<TTest>,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub validation: SplitRuns,
    pub test: SplitRuns,
    pub tuned: TuneResult,
    /// Test reports in [`RUN_TAGS`] order.
    pub reports: Vec<EvalReport>,
    /// The fused run against every other run, on per-query AP.
    pub comparisons: Vec<Comparison>,
    pub seen: EvalReport,
    pub unseen: EvalReport,
}

impl PipelineOutput {
    pub fn report(&self, tag: &str) -> Option<&EvalReport> {
        self.reports.iter().find(|r| r.run_tag == tag)
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "weights {} (validation {} = {:.4})\n\n",
            self.tuned.weights,
            self.tuned.objective.as_str(),
            self.tuned.value
        ));
        for r in &self.reports {
            s.push_str(&r.to_text());
        }
        s.push_str(&self.seen.to_text());
        s.push_str(&self.unseen.to_text());
        s.push('\n');
        for c in &self.comparisons {
            match &c.ttest {
                Some(t) => s.push_str(&format!(
                    "{} vs {} ({}): {:.4} vs {:.4}, t = {:.4}, p = {:.4}{}\n",
                    c.system,
                    c.baseline,
                    c.metric,
                    c.mean_system,
                    c.mean_baseline,
                    t.t,
                    t.p,
                    if t.significant { " *" } else { "" }
                )),
                None => s.push_str(&format!("{} vs {} ({}): too few queries\n", c.system, c.baseline, c.metric)),
            }
        }
        s
    }
}

pub fn run_pipeline(ctx: &PipelineContext<'_>, splits: &[DatasetSplit; 3]) -> Result<PipelineOutput> {
    ctx.config.validate()?;
    let [train, valid, test] = splits;
    if valid.queries.is_empty() {
        return Err(Error::EmptyValidation);
    }
    info!("validation: {} queries", valid.queries.len());
    let validation = run_split(ctx, valid, &excluded_for(splits, SplitName::Validation))?;
    let tq = tuning_queries(valid, &validation.vectors, &validation.tails);
    let tuned = tune_weights(&tq, &ctx.config.search)?;

    info!("test: {} queries", test.queries.len());
    let mut test_runs = run_split(ctx, test, &excluded_for(splits, SplitName::Test))?;
    add_fused_run(test, &mut test_runs, &tuned.weights);

    let reports = RUN_TAGS
        .iter()
        .map(|tag| evaluate_run(test_runs.run(tag), &test.queries).map(|mut r| {
            r.run_tag = tag.to_string();
            r
        }))
        .collect::<Result<Vec<_>>>()?;
    let fused = reports.last().expect("fused report");
    let comparisons = reports[..reports.len() - 1]
        .iter()
        .map(|base| {
            let a = fused.column(|m| m.ap);
            let b = base.column(|m| m.ap);
            let ttest = match paired_ttest(&a, &b, ctx.config.alpha) {
                Ok(t) => Some(t),
                Err(e) => {
                    warn!("no t-test against {}: {e}", base.run_tag);
                    None
                }
            };
            Comparison {
                system: fused.run_tag.clone(),
                baseline: base.run_tag.clone(),
                metric: "ap".into(),
                mean_system: fused.means.ap,
                mean_baseline: base.means.ap,
                ttest,
            }
        })
        .collect();
    let (seen, unseen) = seen_unseen_report(fused, &train.query_ids(), &test.query_ids());
    Ok(PipelineOutput {
        validation,
        test: test_runs,
        tuned,
        reports,
        comparisons,
        seen,
        unseen,
    })
}
