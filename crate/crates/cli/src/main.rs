mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Overrides, ScorerKind};

#[derive(Debug, Parser)]
#[command(name = "lawfind", version, about = "Expert finding for legal question-answer forums")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, env = "LAWFIND_CONFIG")]
    pub config: Option<PathBuf>,
    /// Root seed for every random choice.
    #[arg(long, global = true, env = "LAWFIND_SEED")]
    pub seed: Option<u64>,
    /// Re-rank cutoff.
    #[arg(long, global = true, env = "LAWFIND_K")]
    pub k: Option<usize>,
    /// Language-model smoothing parameter.
    #[arg(long, global = true, env = "LAWFIND_BETA")]
    pub beta: Option<f64>,
    #[arg(long, global = true, value_enum, env = "LAWFIND_SCORER")]
    pub scorer: Option<ScorerKind>,
    /// Base URL of the remote scorer service.
    #[arg(long, global = true, env = "LAWFIND_ENDPOINT")]
    pub endpoint: Option<String>,
    /// Where to write the run manifest. Defaults to `<output>.manifest.json`.
    #[arg(long, global = true, env = "LAWFIND_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RankModel {
    Model1,
    Model2,
    Bm25Cand,
    Bm25Doc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Ap,
    Rr,
    P1,
    P2,
    P5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    CoordinateAscent,
    Exhaustive,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate corpus files and write them as one canonical file.
    Ingest {
        #[arg(long, num_args = 1.., required = true)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Label (lawyer, tag) experts from best-answer statistics.
    Label {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        category: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pick query tags and write queries and qrels.
    SelectQueries {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        category: Option<String>,
        #[arg(long)]
        queries_out: PathBuf,
        #[arg(long)]
        qrels_out: PathBuf,
    },
    /// Partition the relevant experts into train, validation and test.
    Split {
        #[arg(long)]
        qrels: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and save the answer index.
    Index {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print index statistics.
    Stats {
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank lawyers for every query.
    Rank {
        #[arg(value_enum)]
        model: RankModel,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        qrels: Option<PathBuf>,
        /// With --split, drop the experts of the other splits.
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        split: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the retrieved answers of the top-k lawyers
        /// (document-level models only).
        #[arg(long)]
        answers_out: Option<PathBuf>,
    },
    /// Keep only lawyers located in the given city.
    FilterCity {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        city: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the four query-dependent profiles from retrieved answers.
    Profiles {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        answers: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-rank the head of an initial run and score the profiles.
    Rerank {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        answers: Option<PathBuf>,
        #[arg(long)]
        profiles: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        vectors_out: PathBuf,
    },
    /// Tune fusion weights on one split.
    Tune {
        #[arg(long)]
        vectors: Option<PathBuf>,
        /// Re-ranked run; lawyers after the scored pool keep this order.
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        qrels: Option<PathBuf>,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long, default_value = "validation")]
        split: String,
        #[arg(long, value_enum)]
        strategy: Option<Strategy>,
        #[arg(long)]
        lo: Option<u32>,
        #[arg(long)]
        hi: Option<u32>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the fused run for these weights.
        #[arg(long)]
        fused_out: Option<PathBuf>,
    },
    /// Score a run against qrels.
    Evaluate {
        #[arg(long)]
        run: PathBuf,
        #[arg(long)]
        qrels: Option<PathBuf>,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        split: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One-tailed paired t-test of report A over report B.
    Ttest {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value = "ap")]
        metric: Metric,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with planted experts.
    SynthGen {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        queries_out: Option<PathBuf>,
        #[arg(long)]
        qrels_out: Option<PathBuf>,
    },
    /// Run everything from a corpus to the final report.
    EndToEnd {
        #[arg(long, num_args = 1..)]
        corpus: Vec<PathBuf>,
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long)]
        qrels: Option<PathBuf>,
        #[arg(long)]
        partition: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            k: self.k,
            beta: self.beta,
            scorer: self.scorer,
            endpoint: self.endpoint.clone(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
