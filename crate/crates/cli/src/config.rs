use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use lawfind::analyzer::{AnalyzerConfig, TextAnalyzer};
use lawfind::index::IndexedCollection;
use lawfind::pipeline::PipelineConfig;
use lawfind::rerank::{PairScorer, RemoteScorer, StubScorer};
use lawfind::synth::SynthConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    #[default]
    Stub,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    pub endpoint: Option<String>,
    pub timeout_secs: u64,
    pub batch_size: usize,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self {
            kind: ScorerKind::Stub,
            endpoint: None,
            timeout_secs: 30,
            batch_size: 32,
        }
    }
}

/// Default file locations; command-line path flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    pub corpus: Vec<PathBuf>,
    pub index: Option<PathBuf>,
    pub queries: Option<PathBuf>,
    pub qrels: Option<PathBuf>,
    pub partition: Option<PathBuf>,
    pub runs: Option<PathBuf>,
    pub answers: Option<PathBuf>,
    pub profiles: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub seed: u64,
    pub category: String,
    pub split_ratios: [f64; 3],
    pub paths: PathsConfig,
    pub analyzer: AnalyzerConfig,
    pub pipeline: PipelineConfig,
    pub scorer: ScorerConfig,
    pub synth: SynthConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 42,
            category: "bankruptcy".into(),
            split_ratios: [1.0 / 3.0; 3],
            paths: PathsConfig::default(),
            analyzer: AnalyzerConfig::default(),
            pipeline: PipelineConfig::default(),
            scorer: ScorerConfig::default(),
            synth: SynthConfig::default(),
        }
    }
}

/// Values that override the config file, from flags or `LAWFIND_*`.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub beta: Option<f64>,
    pub scorer: Option<ScorerKind>,
    pub endpoint: Option<String>,
}

impl Config {
    pub fn load(path: Option<&Path>, ov: &Overrides) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Config::default(),
        };
        if let Some(s) = ov.seed {
            cfg.seed = s;
        }
        if let Some(k) = ov.k {
            cfg.pipeline.k = k;
        }
        if let Some(b) = ov.beta {
            cfg.pipeline.beta = Some(b);
        }
        if let Some(s) = ov.scorer {
            cfg.scorer.kind = s;
        }
        if let Some(e) = &ov.endpoint {
            cfg.scorer.endpoint = Some(e.clone());
        }
        // one root seed drives every random choice
        cfg.pipeline.seed = cfg.seed;
        cfg.synth.seed = cfg.seed;
        cfg.pipeline.validate()?;
        Ok(cfg)
    }

    pub fn analyzer(&self) -> TextAnalyzer {
        TextAnalyzer::new(self.analyzer.clone())
    }

    pub fn scorer(&self, index: &IndexedCollection) -> Result<Box<dyn PairScorer>> {
        Ok(match self.scorer.kind {
            ScorerKind::Stub => Box::new(StubScorer::from_index(index)),
            ScorerKind::Remote => {
                let Some(endpoint) = &self.scorer.endpoint else {
                    bail!("the remote scorer needs an endpoint (--endpoint or scorer.endpoint)");
                };
                Box::new(RemoteScorer::new(
                    endpoint,
                    Duration::from_secs(self.scorer.timeout_secs),
                    self.scorer.batch_size,
                ))
            }
        })
    }
}

/// First of `flag` and the configured default, or an error naming the flag.
pub fn need(flag: &Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    match flag.as_ref().or(fallback.as_ref()) {
        Some(p) => Ok(p.clone()),
        None => bail!("missing --{name} (or paths.{name} in the config)"),
    }
}
