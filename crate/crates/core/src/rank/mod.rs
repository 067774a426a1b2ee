//! Lexical expert rankers: language-model Models 1 and 2, their BM25
//! counterparts, and city filtering.

pub mod bm25;
pub mod filter;
pub mod list;
pub mod lm;

pub use bm25::{score_bm25_candidate, score_bm25_doc, score_bm25_variants, Bm25Params};
pub use filter::{filter_by_city, CityFilter, Filtered};
pub use list::{
    format_run, read_answer_run, read_run, write_answer_run, write_run, AnswerEntry, AnswerRanking, Cutoff,
    RankedEntry, RankedList,
};
pub use lm::{score_model1, score_model2, DocPrior, SmoothingParams};
