use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::warn;

use lawfind::corpus::{
    ingest_corpus, label_experts, read_partition, read_qrels, read_queries, select_queries, split_by_experts,
    split_experts, splits_from_partition, write_partition, write_qrels, write_queries, Corpus, DatasetSplit,
    ExpertLabelSet, QueryTopic, SplitName,
};
use lawfind::eval::{evaluate_run, paired_ttest, EvalReport, QueryMetrics};
use lawfind::fusion::{fuse, read_weights, tune_weights, tuning_queries, write_weights, SearchStrategy};
use lawfind::index::{build_index, IndexedCollection};
use lawfind::manifest::Manifest;
use lawfind::pipeline::{excluded_for, run_pipeline, PipelineContext, PipelineOutput, SplitRuns};
use lawfind::profile::{build_profiles, read_profiles, write_profiles, ProfileSet};
use lawfind::rank::{
    filter_by_city, read_answer_run, read_run, score_bm25_candidate, score_bm25_doc, score_model1, score_model2,
    write_answer_run, write_run, AnswerRanking, Cutoff, RankedList,
};
use lawfind::rerank::{combine_vectors, read_score_vectors, rerank_vbd, score_profiles, write_score_vectors};
use lawfind::sentiment::SentimentLexicon;
use lawfind::synth::{generate, planted_queries};

use crate::config::{need, Config};
use crate::{Cli, Command, Metric, RankModel, Strategy};

/// Runs one subcommand and writes its manifest.
pub fn run(cli: &Cli) -> Result<()> {
    let cfg = Config::load(cli.config.as_deref(), &cli.overrides())?;
    let mut m = Manifest::new(command_name(&cli.command), &cfg, cfg.seed);
    if let Some(c) = &cli.config {
        m.add_input(c)?;
    }
    let primary = dispatch(&cli.command, &cfg, &mut m)?;
    let path = cli.manifest.clone().unwrap_or_else(|| manifest_path(&primary));
    m.write(&path)?;
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ingest { .. } => "ingest",
        Command::Label { .. } => "label",
        Command::SelectQueries { .. } => "select-queries",
        Command::Split { .. } => "split",
        Command::Index { .. } => "index",
        Command::Stats { .. } => "stats",
        Command::Rank { .. } => "rank",
        Command::FilterCity { .. } => "filter-city",
        Command::Profiles { .. } => "profiles",
        Command::Rerank { .. } => "rerank",
        Command::Tune { .. } => "tune",
        Command::Evaluate { .. } => "evaluate",
        Command::Ttest { .. } => "ttest",
        Command::SynthGen { .. } => "synth-gen",
        Command::EndToEnd { .. } => "end-to-end",
    }
}

fn manifest_path(primary: &Path) -> PathBuf {
    if primary.is_dir() {
        return primary.join("manifest.json");
    }
    let mut s = primary.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn dispatch(cmd: &Command, cfg: &Config, m: &mut Manifest) -> Result<PathBuf> {
    match cmd {
        Command::Ingest { corpus, out } => {
            let c = load_corpus(corpus, cfg, m)?;
            c.write_jsonl(out)?;
            m.add_output(out)?;
            let n = c.counts();
            println!(
                "questions {}\nanswers {}\ncomments {}\nlawyers {}\nposts {}",
                n.questions, n.answers, n.comments, n.lawyers, n.posts
            );
            Ok(out.clone())
        }
        Command::Label { corpus, category, out } => {
            let c = load_corpus(corpus, cfg, m)?;
            let labels = label_experts(&c, category.as_deref().unwrap_or(&cfg.category))?;
            let mut body = serde_json::to_string_pretty(&labels)?;
            body.push('\n');
            write(out, body, m)?;
            print!("{}", label_summary(&labels));
            Ok(out.clone())
        }
        Command::SelectQueries {
            corpus,
            category,
            queries_out,
            qrels_out,
        } => {
            let c = load_corpus(corpus, cfg, m)?;
            let category = category.as_deref().unwrap_or(&cfg.category);
            let labels = label_experts(&c, category)?;
            let queries = select_queries(&c, &labels, category);
            write_queries(queries_out, &queries)?;
            write_qrels(qrels_out, &queries)?;
            m.add_output(queries_out)?;
            m.add_output(qrels_out)?;
            println!("queries {}", queries.len());
            Ok(queries_out.clone())
        }
        Command::Split { qrels, out } => {
            let qrels = need(qrels, &cfg.paths.qrels, "qrels")?;
            m.add_input(&qrels)?;
            let queries = topics_from_qrels(read_qrels(&qrels)?);
            let experts = queries.iter().flat_map(|q| q.relevant_experts.iter().cloned()).collect();
            let splits = split_experts(&queries, experts, cfg.seed, cfg.split_ratios)?;
            write_partition(out, &splits)?;
            m.add_output(out)?;
            for s in &splits {
                println!("{}\texperts {}\tqueries {}", s.name, s.expert_ids.len(), s.queries.len());
            }
            Ok(out.clone())
        }
        Command::Index { corpus, out } => {
            let c = load_corpus(corpus, cfg, m)?;
            let index = build_index(&c, &cfg.analyzer());
            index.save(out)?;
            m.add_output(out)?;
            println!("documents {}\nterms {}", index.num_docs(), index.num_terms());
            Ok(out.clone())
        }
        Command::Stats { index, out } => {
            let path = need(index, &cfg.paths.index, "index")?;
            let index = load_index(&path, m)?;
            let text = index.stats_text();
            match out {
                Some(o) => {
                    write(o, text, m)?;
                    Ok(o.clone())
                }
                None => {
                    print!("{text}");
                    Ok(with_suffix(&path, ".stats"))
                }
            }
        }
        Command::Rank {
            model,
            index,
            queries,
            qrels,
            partition,
            split,
            out,
            answers_out,
        } => {
            let index = load_index(&need(index, &cfg.paths.index, "index")?, m)?;
            let queries = load_queries(queries, qrels.as_ref().or(cfg.paths.qrels.as_ref()), cfg, m)?;
            let (queries, excluded) = select_split(queries, partition.as_ref(), split.as_deref(), m)?;
            if answers_out.is_some() && matches!(model, RankModel::Model1 | RankModel::Bm25Cand) {
                bail!("--answers-out needs a document-level model (model2 or bm25-doc)");
            }
            let sp = cfg.pipeline.smoothing(&index);
            let k = cfg.pipeline.k;
            let mut lists = Vec::new();
            let mut answers = Vec::new();
            for q in &queries {
                let (list, ans) = match model {
                    RankModel::Model1 => (score_model1(q, &index, &sp)?, None),
                    RankModel::Bm25Cand => (score_bm25_candidate(q, &index, &cfg.pipeline.bm25)?, None),
                    RankModel::Model2 => {
                        let (l, a) = score_model2(q, &index, &sp)?;
                        (l, Some(a))
                    }
                    RankModel::Bm25Doc => {
                        let (l, a) = score_bm25_doc(q, &index, &cfg.pipeline.bm25)?;
                        (l, Some(a))
                    }
                };
                let list = list.without(&excluded);
                if let Some(a) = ans {
                    answers.push(a.without_lawyers(&excluded).restrict_to_top_lawyers(&list, k));
                }
                lists.push(list);
            }
            write_run(out, &lists)?;
            m.add_output(out)?;
            if let Some(a) = answers_out {
                write_answer_run(a, &answers)?;
                m.add_output(a)?;
            }
            Ok(out.clone())
        }
        Command::FilterCity { run, index, city, out } => {
            let index = load_index(&need(index, &cfg.paths.index, "index")?, m)?;
            m.add_input(run)?;
            let lists: Vec<RankedList> = read_run(run)?
                .iter()
                .map(|l| filter_by_city(l, city, &index).result)
                .collect();
            write_run(out, &lists)?;
            m.add_output(out)?;
            Ok(out.clone())
        }
        Command::Profiles {
            corpus,
            index,
            queries,
            answers,
            out,
        } => {
            let c = load_corpus(corpus, cfg, m)?;
            let index = load_index(&need(index, &cfg.paths.index, "index")?, m)?;
            let queries = by_id(load_queries(queries, None, cfg, m)?);
            let answers_path = need(answers, &cfg.paths.answers, "answers")?;
            m.add_input(&answers_path)?;
            let lexicon = SentimentLexicon::bundled();
            let mut sets: Vec<ProfileSet> = Vec::new();
            for d_q in read_answer_run(&answers_path, &index)? {
                let q = lookup(&queries, &d_q.query_id)?;
                sets.extend(build_profiles(q, &d_q, &c, &lexicon, index.analyzer(), cfg.seed).into_values());
            }
            write_profiles(out, &sets)?;
            m.add_output(out)?;
            Ok(out.clone())
        }
        Command::Rerank {
            corpus,
            index,
            queries,
            run,
            answers,
            profiles,
            out,
            vectors_out,
        } => {
            let c = load_corpus(corpus, cfg, m)?;
            let index = load_index(&need(index, &cfg.paths.index, "index")?, m)?;
            let queries = by_id(load_queries(queries, None, cfg, m)?);
            m.add_input(run)?;
            let initial = read_run(run)?;
            let answers_path = need(answers, &cfg.paths.answers, "answers")?;
            m.add_input(&answers_path)?;
            let mut d_qs: BTreeMap<String, AnswerRanking> = read_answer_run(&answers_path, &index)?
                .into_iter()
                .map(|a| (a.query_id.clone(), a))
                .collect();
            let profiles_path = need(profiles, &cfg.paths.profiles, "profiles")?;
            m.add_input(&profiles_path)?;
            let mut profiles: BTreeMap<String, BTreeMap<String, ProfileSet>> = BTreeMap::new();
            for ((q, l), set) in read_profiles(&profiles_path, index.analyzer())? {
                profiles.entry(q).or_default().insert(l, set);
            }
            let scorer = cfg.scorer(&index)?;
            let mut lists = Vec::new();
            let mut vectors = Vec::new();
            for list in &initial {
                let q = lookup(&queries, &list.query_id)?;
                let d_q = d_qs.remove(&q.query_id).unwrap_or_else(|| {
                    warn!("no retrieved answers for query {}", q.query_id);
                    AnswerRanking::from_scores(&q.query_id, &list.run_tag, [], Cutoff::default())
                });
                let vbd = rerank_vbd(q, list, &d_q, &c, scorer.as_ref(), cfg.pipeline.k, cfg.pipeline.aggregation)?;
                let empty = BTreeMap::new();
                let ps = score_profiles(q, profiles.get(&q.query_id).unwrap_or(&empty), scorer.as_ref())?;
                vectors.extend(combine_vectors(&q.query_id, &vbd, &ps));
                lists.push(vbd.ranking);
            }
            write_run(out, &lists)?;
            write_score_vectors(vectors_out, &vectors)?;
            m.add_output(out)?;
            m.add_output(vectors_out)?;
            Ok(out.clone())
        }
        Command::Tune {
            vectors,
            run,
            queries,
            qrels,
            partition,
            split,
            strategy,
            lo,
            hi,
            out,
            fused_out,
        } => {
            let vectors_path = need(vectors, &cfg.paths.vectors, "vectors")?;
            m.add_input(&vectors_path)?;
            let vectors = read_score_vectors(&vectors_path)?;
            m.add_input(run)?;
            let lists = read_run(run)?;
            let qrels = need(qrels, &cfg.paths.qrels, "qrels")?;
            let queries = load_queries(queries, Some(&qrels), cfg, m)?;
            let partition = partition.as_ref().or(cfg.paths.partition.as_ref());
            let target = match partition {
                Some(p) => {
                    m.add_input(p)?;
                    let name: SplitName = split.parse().map_err(|e| anyhow!("{e}"))?;
                    let splits = splits_from_partition(&read_partition(p)?, &queries);
                    splits.into_iter().find(|s| s.name == name).expect("all three splits exist")
                }
                None => DatasetSplit {
                    name: SplitName::Validation,
                    expert_ids: queries.iter().flat_map(|q| q.relevant_experts.iter().cloned()).collect(),
                    queries,
                },
            };
            let tails = tails_from_run(&lists, &vectors);
            let mut search = cfg.pipeline.search;
            if let Some(s) = strategy {
                search.strategy = match s {
                    Strategy::CoordinateAscent => SearchStrategy::CoordinateAscent,
                    Strategy::Exhaustive => SearchStrategy::Exhaustive,
                };
            }
            search.lo = lo.unwrap_or(search.lo);
            search.hi = hi.unwrap_or(search.hi);
            let tq = tuning_queries(&target, &vectors, &tails);
            let tuned = tune_weights(&tq, &search)?;
            write_weights(out, &tuned)?;
            m.add_output(out)?;
            println!("{} {} {:.6}", tuned.weights, tuned.objective.as_str(), tuned.value);
            if let Some(f) = fused_out {
                let fused: Vec<RankedList> = tq
                    .iter()
                    .map(|q| fuse(&q.query_id, &q.pool, &q.tail, &tuned.weights))
                    .collect();
                write_run(f, &fused)?;
                m.add_output(f)?;
            }
            Ok(out.clone())
        }
        Command::Evaluate {
            run,
            qrels,
            partition,
            split,
            out,
        } => {
            m.add_input(run)?;
            let lists = read_run(run)?;
            let qrels = need(qrels, &cfg.paths.qrels, "qrels")?;
            m.add_input(&qrels)?;
            let topics = topics_from_qrels(read_qrels(&qrels)?);
            let (topics, _) = select_split(topics, partition.as_ref(), split.as_deref(), m)?;
            let keep: BTreeSet<&str> = topics.iter().map(|q| q.query_id.as_str()).collect();
            let lists: Vec<RankedList> = lists
                .into_iter()
                .filter(|l| keep.contains(l.query_id.as_str()))
                .collect();
            let report = evaluate_run(&lists, &topics)?;
            print!("{}", report.to_text());
            match out {
                Some(o) => {
                    write(o, report.to_jsonl(), m)?;
                    Ok(o.clone())
                }
                None => Ok(with_suffix(run, ".eval")),
            }
        }
        Command::Ttest {
            a,
            b,
            metric,
            alpha,
            out,
        } => {
            m.add_input(a)?;
            m.add_input(b)?;
            let ra = EvalReport::read_jsonl(a)?;
            let rb = EvalReport::read_jsonl(b)?;
            let common: BTreeSet<String> = ra
                .per_query
                .keys()
                .filter(|q| rb.per_query.contains_key(*q))
                .cloned()
                .collect();
            if common.len() != ra.n_queries || common.len() != rb.n_queries {
                warn!("testing on the {} queries shared by both reports", common.len());
            }
            let pick = metric_fn(*metric);
            let xa = ra.subset(&common).column(pick);
            let xb = rb.subset(&common).column(pick);
            let t = paired_ttest(&xa, &xb, *alpha)?;
            let body = format!(
                "{}\n",
                serde_json::json!({
                    "a": ra.run_tag, "b": rb.run_tag, "metric": format!("{metric:?}").to_lowercase(),
                    "n": common.len(), "t": t.t, "p": t.p, "alpha": alpha, "significant": t.significant,
                })
            );
            print!("{body}");
            match out {
                Some(o) => {
                    write(o, body, m)?;
                    Ok(o.clone())
                }
                None => Ok(with_suffix(a, ".ttest")),
            }
        }
        Command::SynthGen {
            out,
            queries_out,
            qrels_out,
        } => {
            let (c, planted) = generate(&cfg.synth)?;
            c.write_jsonl(out)?;
            m.add_output(out)?;
            let queries = planted_queries(&planted);
            if let Some(p) = queries_out {
                write_queries(p, &queries)?;
                m.add_output(p)?;
            }
            if let Some(p) = qrels_out {
                write_qrels(p, &queries)?;
                m.add_output(p)?;
            }
            let n = c.counts();
            println!("questions {}\nanswers {}\nplanted tags {}", n.questions, n.answers, planted.len());
            Ok(out.clone())
        }
        Command::EndToEnd {
            corpus,
            queries,
            qrels,
            partition,
            out_dir,
        } => end_to_end(corpus, queries, qrels, partition, out_dir, cfg, m),
    }
}

fn end_to_end(
    corpus: &[PathBuf],
    queries: &Option<PathBuf>,
    qrels: &Option<PathBuf>,
    partition: &Option<PathBuf>,
    out_dir: &Path,
    cfg: &Config,
    m: &mut Manifest,
) -> Result<PathBuf> {
    let c = load_corpus(corpus, cfg, m)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let qrels = qrels.as_ref().or(cfg.paths.qrels.as_ref());
    let partition = partition.as_ref().or(cfg.paths.partition.as_ref());

    let mut labels: Option<ExpertLabelSet> = None;
    let topics = match (queries.as_ref().or(cfg.paths.queries.as_ref()), qrels) {
        (Some(qp), Some(rp)) => {
            m.add_input(qp)?;
            m.add_input(rp)?;
            read_queries(qp, Some(rp))?
        }
        (None, None) => {
            let l = label_experts(&c, &cfg.category)?;
            let t = select_queries(&c, &l, &cfg.category);
            labels = Some(l);
            t
        }
        _ => bail!("give both --queries and --qrels, or neither"),
    };
    let queries_path = out_dir.join("queries.tsv");
    let qrels_path = out_dir.join("qrels.txt");
    write_queries(&queries_path, &topics)?;
    write_qrels(&qrels_path, &topics)?;

    let splits = match (partition, &labels) {
        (Some(p), _) => {
            m.add_input(p)?;
            splits_from_partition(&read_partition(p)?, &topics)
        }
        (None, Some(l)) => split_by_experts(&topics, l, cfg.seed, cfg.split_ratios)?,
        (None, None) => {
            let experts = topics.iter().flat_map(|q| q.relevant_experts.iter().cloned()).collect();
            split_experts(&topics, experts, cfg.seed, cfg.split_ratios)?
        }
    };
    let partition_path = out_dir.join("partition.tsv");
    write_partition(&partition_path, &splits)?;

    let index = build_index(&c, &cfg.analyzer());
    let lexicon = SentimentLexicon::bundled();
    let scorer = cfg.scorer(&index)?;
    let ctx = PipelineContext {
        corpus: &c,
        index: &index,
        lexicon: &lexicon,
        scorer: scorer.as_ref(),
        config: &cfg.pipeline,
    };
    let out = run_pipeline(&ctx, &splits)?;

    let mut written = vec![queries_path, qrels_path, partition_path];
    written.extend(write_split_outputs(out_dir, "validation", &out.validation)?);
    written.extend(write_split_outputs(out_dir, "test", &out.test)?);
    written.extend(write_reports(out_dir, &out)?);
    for p in &written {
        m.add_output(p)?;
    }
    print!("{}", out.summary_text());
    Ok(out_dir.to_path_buf())
}

fn write_split_outputs(dir: &Path, name: &str, runs: &SplitRuns) -> Result<Vec<PathBuf>> {
    let run_dir = dir.join("runs").join(name);
    fs::create_dir_all(&run_dir)?;
    let mut paths = Vec::new();
    for (tag, lists) in &runs.runs {
        let p = run_dir.join(format!("{tag}.run"));
        write_run(&p, lists)?;
        paths.push(p);
    }
    let p = dir.join(format!("answers.{name}.run"));
    write_answer_run(&p, &runs.answer_runs)?;
    paths.push(p);
    let p = dir.join(format!("profiles.{name}.jsonl"));
    write_profiles(&p, &runs.profiles)?;
    paths.push(p);
    let p = dir.join(format!("vectors.{name}.jsonl"));
    write_score_vectors(&p, &runs.vectors)?;
    paths.push(p);
    Ok(paths)
}

fn write_reports(dir: &Path, out: &PipelineOutput) -> Result<Vec<PathBuf>> {
    let weights = dir.join("weights.txt");
    write_weights(&weights, &out.tuned)?;
    debug_assert_eq!(read_weights(&weights)?, out.tuned.weights);
    let text = dir.join("report.txt");
    fs::write(&text, out.summary_text())?;
    let jsonl = dir.join("report.jsonl");
    let mut body = String::new();
    for r in out.reports.iter().chain([&out.seen, &out.unseen]) {
        body.push_str(&r.to_jsonl());
    }
    fs::write(&jsonl, body)?;
    let cmp = dir.join("significance.json");
    fs::write(&cmp, format!("{}\n", serde_json::to_string_pretty(&out.comparisons)?))?;
    Ok(vec![weights, text, jsonl, cmp])
}

fn load_corpus(flag: &[PathBuf], cfg: &Config, m: &mut Manifest) -> Result<Corpus> {
    let paths = if flag.is_empty() { &cfg.paths.corpus } else { flag };
    if paths.is_empty() {
        bail!("missing --corpus (or paths.corpus in the config)");
    }
    for p in paths {
        m.add_input(p)?;
    }
    Ok(ingest_corpus(paths)?)
}

fn load_index(path: &Path, m: &mut Manifest) -> Result<IndexedCollection> {
    m.add_input(path)?;
    Ok(IndexedCollection::load(path)?)
}

fn load_queries(flag: &Option<PathBuf>, qrels: Option<&PathBuf>, cfg: &Config, m: &mut Manifest) -> Result<Vec<QueryTopic>> {
    let path = need(flag, &cfg.paths.queries, "queries")?;
    m.add_input(&path)?;
    if let Some(r) = qrels {
        m.add_input(r)?;
    }
    Ok(read_queries(&path, qrels.map(PathBuf::as_path))?)
}

/// Queries known only from qrels; the id doubles as the query text.
fn topics_from_qrels(qrels: BTreeMap<String, BTreeSet<String>>) -> Vec<QueryTopic> {
    qrels
        .into_iter()
        .map(|(q, rel)| QueryTopic::new(q.clone(), q, rel))
        .collect()
}

/// Restricts `queries` to one split of a partition, returning the experts of
/// the other splits for exclusion.
fn select_split(
    queries: Vec<QueryTopic>,
    partition: Option<&PathBuf>,
    split: Option<&str>,
    m: &mut Manifest,
) -> Result<(Vec<QueryTopic>, BTreeSet<String>)> {
    match (partition, split) {
        (None, None) => Ok((queries, BTreeSet::new())),
        (Some(p), Some(s)) => {
            m.add_input(p)?;
            let name: SplitName = s.parse().map_err(|e| anyhow!("{e}"))?;
            let splits = splits_from_partition(&read_partition(p)?, &queries);
            let excluded = excluded_for(&splits, name);
            let [a, b, c] = splits;
            let chosen = [a, b, c].into_iter().find(|x| x.name == name).expect("all three splits exist");
            Ok((chosen.queries, excluded))
        }
        _ => bail!("--partition and --split go together"),
    }
}

fn tails_from_run(
    lists: &[RankedList],
    vectors: &[lawfind::rerank::ScoreVector],
) -> BTreeMap<String, Vec<String>> {
    let mut pools: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for v in vectors {
        pools.entry(&v.query_id).or_default().insert(&v.lawyer_id);
    }
    lists
        .iter()
        .map(|l| {
            let pool = pools.get(l.query_id.as_str());
            let tail = l
                .lawyer_ids()
                .filter(|id| !pool.is_some_and(|p| p.contains(id)))
                .map(str::to_string)
                .collect();
            (l.query_id.clone(), tail)
        })
        .collect()
}

fn by_id(queries: Vec<QueryTopic>) -> BTreeMap<String, QueryTopic> {
    queries.into_iter().map(|q| (q.query_id.clone(), q)).collect()
}

fn lookup<'a>(queries: &'a BTreeMap<String, QueryTopic>, id: &str) -> Result<&'a QueryTopic> {
    queries.get(id).ok_or_else(|| anyhow!("query {id:?} is not in the queries file"))
}

fn metric_fn(metric: Metric) -> fn(&QueryMetrics) -> f64 {
    match metric {
        Metric::Ap => |m| m.ap,
        Metric::Rr => |m| m.rr,
        Metric::P1 => |m| m.p1,
        Metric::P2 => |m| m.p2,
        Metric::P5 => |m| m.p5,
    }
}

fn write(path: &Path, body: String, m: &mut Manifest) -> Result<()> {
    fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    m.add_output(path)?;
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn label_summary(labels: &ExpertLabelSet) -> String {
    let experts = labels.experts();
    let (answers, best) = experts
        .iter()
        .filter_map(|l| labels.per_lawyer_stats.get(l))
        .fold((0u64, 0u64), |(a, b), s| {
            (a + u64::from(s.answer_count), b + u64::from(s.best_answer_count))
        });
    format!(
        "experts {}\nexpert answers {answers}\nexpert best answers {best}\nmean acceptance ratio {:.6}\n",
        experts.len(),
        labels.collection_avg_acceptance_ratio
    )
}
