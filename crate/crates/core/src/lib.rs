//! Expert finding for legal community question answering.
//!
//! The pipeline labels experts from best-answer statistics, ranks lawyers for
//! tag queries with candidate- and document-level language models and BM25,
//! re-ranks the head of the list with a pluggable pair scorer over answers
//! and query-dependent lawyer profiles, fuses the scores with tuned integer
//! weights, and evaluates runs with MAP, MRR and P@k.

pub mod analyzer;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod index;
pub mod manifest;
pub mod pipeline;
pub mod profile;
pub mod rank;
pub mod rerank;
pub mod rng;
pub mod sentiment;
pub mod synth;

pub use error::{Error, Result};
