//! Dataset ingestion: passages, QA examples, and the two supported file
//! formats.
//!
//! Record schema (documented contract for `mrqa_json`, one JSON object per
//! line; an optional first line holding a `header` key is skipped):
//!
//! ```json
//! {"context": "...", "qas": [{"question": "...",
//!                             "answers": [{"text": "...", "char_start": 17}]}]}
//! ```
//!
//! `answers` entries may also be plain strings (no offset). `squad_json` is
//! the nested `data / paragraphs / qas` layout with `answer_start` instead of
//! `char_start`. Offsets are advisory: alignment verifies the answer text at
//! the offset and falls back to a full-text search, so byte-vs-codepoint
//! conventions self-heal. Answers that cannot be aligned to a token span are
//! dropped and counted.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::text::vocab::{RawToken, TokenId, Vocab};

/// A tokenized passage with the original text and per-token byte offsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    pub tokens: Vec<TokenId>,
    /// Lowercased surface form per token (kept even for UNK ids so lemma
    /// lookups still see the original word).
    pub surfaces: Vec<String>,
    pub raw: String,
    /// Byte offsets `[start, end)` into `raw`, one per token.
    pub char_offsets: Vec<(usize, usize)>,
}

impl Passage {
    pub fn from_text(text: &str, vocab: &Vocab) -> Result<Self> {
        let (tokens, raw_tokens) = vocab.tokenize_raw(text);
        if tokens.is_empty() {
            return Err(Error::Data("passage has no tokens".into()));
        }
        Ok(Passage {
            tokens,
            surfaces: raw_tokens.iter().map(|t| t.surface.clone()).collect(),
            raw: text.to_string(),
            char_offsets: raw_tokens.iter().map(|t| (t.start, t.end)).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Surfaces of the span joined with single spaces.
    pub fn span_text(&self, span: TokenSpan) -> String {
        self.surfaces[span.start..=span.end].join(" ")
    }
}

/// Inclusive token span, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenSpan {
    pub start: usize,
    pub end: usize,
}

impl TokenSpan {
    pub fn new(start: usize, end: usize) -> Self {
        assert!(start <= end, "span start {start} > end {end}");
        TokenSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.start <= pos && pos <= self.end
    }
}

impl fmt::Display for TokenSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// One extractive QA example: the answer is a contiguous passage span.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EqaExample {
    pub passage: Passage,
    pub query_text: String,
    pub query: Vec<TokenId>,
    pub answer: TokenSpan,
    pub answer_text: String,
}

impl EqaExample {
    /// Answer surfaces as recorded in the passage.
    pub fn answer_surfaces(&self) -> &[String] {
        &self.passage.surfaces[self.answer.start..=self.answer.end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    MrqaJson,
    SquadJson,
}

impl FromStr for DatasetFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mrqa_json" | "mrqa" => Ok(DatasetFormat::MrqaJson),
            "squad_json" | "squad" => Ok(DatasetFormat::SquadJson),
            other => Err(Error::Config(format!("unknown dataset format {other:?}"))),
        }
    }
}

/// Parsed but not yet aligned QA record.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub context: String,
    pub question: String,
    pub answers: Vec<RawAnswer>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawAnswer {
    pub text: String,
    pub char_start: Option<usize>,
}

fn answer_from_value(v: &Value) -> Option<RawAnswer> {
    match v {
        Value::String(s) => Some(RawAnswer { text: s.clone(), char_start: None }),
        Value::Object(map) => {
            let text = map.get("text")?.as_str()?.to_string();
            let char_start = map
                .get("char_start")
                .or_else(|| map.get("answer_start"))
                .and_then(Value::as_u64)
                .map(|x| x as usize);
            Some(RawAnswer { text, char_start })
        }
        _ => None,
    }
}

fn records_from_context_obj(obj: &Value, context_key: &str, out: &mut Vec<RawRecord>) -> Option<()> {
    let context = obj.get(context_key)?.as_str()?.to_string();
    let qas = obj.get("qas")?.as_array()?;
    for qa in qas {
        let question = qa.get("question")?.as_str()?.to_string();
        let answers = qa
            .get("answers")
            .and_then(Value::as_array)
            .map(|arr| arr.iter().filter_map(answer_from_value).collect())
            .unwrap_or_default();
        out.push(RawRecord { context: context.clone(), question, answers });
    }
    Some(())
}

/// Parse records from file content. Errors carry line context for the
/// line-delimited format.
pub fn parse_records_str(data: &str, format: DatasetFormat) -> Result<Vec<RawRecord>> {
    match format {
        DatasetFormat::MrqaJson => {
            let mut records = Vec::new();
            for (idx, line) in data.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let value: Value = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
                    context: format!("line {}", idx + 1),
                    message: e.to_string(),
                })?;
                if value.get("header").is_some() {
                    continue;
                }
                records_from_context_obj(&value, "context", &mut records).ok_or_else(|| {
                    Error::MalformedRecord {
                        context: format!("line {}", idx + 1),
                        message: "expected {context, qas:[{question, answers}]}".into(),
                    }
                })?;
            }
            Ok(records)
        }
        DatasetFormat::SquadJson => {
            let value: Value = serde_json::from_str(data).map_err(|e| Error::MalformedRecord {
                context: "squad json".into(),
                message: e.to_string(),
            })?;
            let data_arr = value
                .get("data")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::MalformedRecord {
                    context: "squad json".into(),
                    message: "missing top-level \"data\" array".into(),
                })?;
            let mut records = Vec::new();
            for (ai, article) in data_arr.iter().enumerate() {
                let paragraphs = article
                    .get("paragraphs")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::MalformedRecord {
                        context: format!("data[{ai}]"),
                        message: "missing \"paragraphs\" array".into(),
                    })?;
                for (pi, para) in paragraphs.iter().enumerate() {
                    records_from_context_obj(para, "context", &mut records).ok_or_else(|| {
                        Error::MalformedRecord {
                            context: format!("data[{ai}].paragraphs[{pi}]"),
                            message: "expected {context, qas:[{question, answers}]}".into(),
                        }
                    })?;
                }
            }
            Ok(records)
        }
    }
}

pub fn parse_records(path: &Path, format: DatasetFormat) -> Result<Vec<RawRecord>> {
    parse_records_str(&fs::read_to_string(path)?, format)
}

/// Result of turning raw records into aligned examples.
#[derive(Debug, Clone)]
pub struct LoadOutcome {
    pub examples: Vec<EqaExample>,
    /// Records whose gold answer could not be aligned to a token span.
    pub dropped: usize,
    pub total_records: usize,
}

fn find_subsequence(haystack: &[String], needle: &[String], from: usize) -> Option<usize> {
    if needle.is_empty() || haystack.len() < needle.len() {
        return None;
    }
    (from..=haystack.len() - needle.len()).find(|&k| &haystack[k..k + needle.len()] == needle)
}

/// Align one answer to a token span: try the byte offset first, then search
/// for the answer's token sequence anywhere in the passage.
fn align_answer(passage: &Passage, answer: &RawAnswer) -> Option<TokenSpan> {
    let needle: Vec<String> = crate::text::vocab::split_text(&answer.text)
        .into_iter()
        .map(|t| t.surface)
        .collect();
    if needle.is_empty() {
        return None;
    }
    if let Some(cs) = answer.char_start {
        if let Some(k) = passage
            .char_offsets
            .iter()
            .position(|&(s, e)| s <= cs && cs < e)
        {
            let l = k + needle.len() - 1;
            if l < passage.len() && passage.surfaces[k..=l] == needle[..] {
                return Some(TokenSpan::new(k, l));
            }
        }
    }
    find_subsequence(&passage.surfaces, &needle, 0).map(|k| TokenSpan::new(k, k + needle.len() - 1))
}

/// Convert raw records to examples over a fixed vocabulary. Multi-answer
/// questions use the first listed answer; unalignable answers drop the
/// record.
pub fn align_records(records: &[RawRecord], vocab: &Vocab) -> LoadOutcome {
    let mut examples = Vec::new();
    let mut dropped = 0usize;
    for rec in records {
        let passage = match Passage::from_text(&rec.context, vocab) {
            Ok(p) => p,
            Err(_) => {
                dropped += 1;
                continue;
            }
        };
        let Some(answer) = rec.answers.first() else {
            dropped += 1;
            continue;
        };
        match align_answer(&passage, answer) {
            Some(span) => {
                examples.push(EqaExample {
                    query: vocab.tokenize(&rec.question),
                    query_text: rec.question.clone(),
                    answer: span,
                    answer_text: answer.text.clone(),
                    passage,
                });
            }
            None => dropped += 1,
        }
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} record(s) with unalignable answers");
    }
    LoadOutcome { examples, dropped, total_records: records.len() }
}

/// Parse and align a dataset file.
pub fn load_dataset(path: &Path, format: DatasetFormat, vocab: &Vocab) -> Result<LoadOutcome> {
    let records = parse_records(path, format)?;
    if records.is_empty() {
        log::warn!("dataset {} contains no records", path.display());
    }
    Ok(align_records(&records, vocab))
}

/// Collect every context and question string, for vocabulary construction.
pub fn record_texts(records: &[RawRecord]) -> Vec<String> {
    let mut texts = Vec::with_capacity(records.len() * 2);
    for r in records {
        texts.push(r.context.clone());
        texts.push(r.question.clone());
    }
    texts
}
