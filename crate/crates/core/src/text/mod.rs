//! Tokenization, dataset ingestion, and deterministic few-shot sampling.

pub mod dataset;
pub mod fewshot;
pub mod vocab;

pub use dataset::{
    align_records, load_dataset, parse_records, parse_records_str, record_texts, DatasetFormat,
    EqaExample, LoadOutcome, Passage, RawAnswer, RawRecord, TokenSpan,
};
pub use fewshot::{sample_few_shot, FewShotSplit};
pub use vocab::{
    detokenize_surfaces, split_text, RawToken, TokenId, Vocab, CLS, END, MASK, NUM_SPECIALS, PAD,
    SEP, SPECIAL_SURFACES, UNK,
};
