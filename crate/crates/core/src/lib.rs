//! Extractive question answering as constrained masked-token generation.
//!
//! A question is rewritten into a cloze prompt with a fixed number of mask
//! slots, encoded together with the passage by a small masked-token
//! predictor whose inputs can be enriched with knowledge-base entity
//! embeddings, trained jointly with a span-level contrastive objective, and
//! decoded with a trie-constrained beam search so every produced answer is a
//! contiguous substring of the passage.
//!
//! Modules mirror the pipeline:
//! - [`text`]: tokenization, dataset ingestion, few-shot sampling
//! - [`prompt`]: query-to-cloze rewrite rules and input assembly
//! - [`knowledge`]: entity-embedding store and passage injection
//! - [`model`]: the trainable encoder with exact gradients
//! - [`contrast`]: negative span sampling and the contrastive objective
//! - [`trie`]: prefix-tree constrained beam decoding
//! - [`harness`]: training loop, metrics, synthetic data, reports

pub mod error;
pub mod knowledge;
pub mod lexicon;
pub mod prompt;
pub mod text;

pub use error::{Error, Result};
