//! Vocabulary and word-level tokenization.
//!
//! Tokens are lowercased words split on whitespace and punctuation;
//! apostrophes and hyphens stay inside words ("norman's", "jet-powered").
//! Six special tokens occupy the first ids and are stable across save/load.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lexicon::SPLIT_PUNCT;

pub type TokenId = u32;

pub const CLS: TokenId = 0;
pub const SEP: TokenId = 1;
pub const MASK: TokenId = 2;
pub const PAD: TokenId = 3;
pub const UNK: TokenId = 4;
pub const END: TokenId = 5;

pub const NUM_SPECIALS: usize = 6;

pub const SPECIAL_SURFACES: [&str; NUM_SPECIALS] =
    ["[CLS]", "[SEP]", "[MASK]", "[PAD]", "[UNK]", "[END]"];

/// One tokenized unit of raw text, before vocabulary lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawToken {
    /// Lowercased surface form (canonical form for specials).
    pub surface: String,
    /// Byte offsets `[start, end)` into the source string.
    pub start: usize,
    pub end: usize,
}

fn special_at(text: &str, pos: usize) -> Option<&'static str> {
    let rest = text[pos..].as_bytes();
    SPECIAL_SURFACES
        .iter()
        .find(|s| rest.len() >= s.len() && rest[..s.len()].eq_ignore_ascii_case(s.as_bytes()))
        .copied()
}

/// Split raw text into lowercased word and punctuation tokens with byte
/// offsets. Special-token spellings ("[MASK]" etc., any case) are kept whole.
pub fn split_text(text: &str) -> Vec<RawToken> {
    let mut tokens = Vec::new();
    let mut iter = text.char_indices().peekable();
    while let Some(&(pos, ch)) = iter.peek() {
        if ch.is_whitespace() {
            iter.next();
            continue;
        }
        if let Some(special) = special_at(text, pos) {
            let end = pos + special.len();
            tokens.push(RawToken {
                surface: special.to_string(),
                start: pos,
                end,
            });
            while iter.peek().is_some_and(|&(p, _)| p < end) {
                iter.next();
            }
            continue;
        }
        if SPLIT_PUNCT.contains(&ch) {
            iter.next();
            tokens.push(RawToken {
                surface: ch.to_lowercase().collect(),
                start: pos,
                end: pos + ch.len_utf8(),
            });
            continue;
        }
        // Word token: run until whitespace, split punctuation, or a special.
        let start = pos;
        let mut end = pos;
        while let Some(&(p, c)) = iter.peek() {
            if c.is_whitespace() || SPLIT_PUNCT.contains(&c) || special_at(text, p).is_some() {
                break;
            }
            end = p + c.len_utf8();
            iter.next();
        }
        tokens.push(RawToken {
            surface: text[start..end].to_lowercase(),
            start,
            end,
        });
    }
    tokens
}

/// Bijective map between lowercased surface forms and token ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
}

impl Vocab {
    /// Build a vocabulary from raw text. Non-special entries are ordered by
    /// first occurrence, after the six specials.
    pub fn build<S: AsRef<str>>(corpus: &[S]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::Config("cannot build a vocabulary from an empty corpus".into()));
        }
        let mut vocab = Self::empty();
        for text in corpus {
            for tok in split_text(text.as_ref()) {
                vocab.intern(&tok.surface);
            }
        }
        Ok(vocab)
    }

    fn empty() -> Self {
        let tokens: Vec<String> = SPECIAL_SURFACES.iter().map(|s| s.to_string()).collect();
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as TokenId))
            .collect();
        Vocab { tokens, index }
    }

    fn intern(&mut self, surface: &str) -> TokenId {
        if let Some(&id) = self.index.get(surface) {
            return id;
        }
        let id = self.tokens.len() as TokenId;
        self.tokens.push(surface.to_string());
        self.index.insert(surface.to_string(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false // specials are always present
    }

    pub fn id(&self, surface: &str) -> Option<TokenId> {
        self.index.get(surface).copied()
    }

    pub fn id_or_unk(&self, surface: &str) -> TokenId {
        self.id(surface).unwrap_or(UNK)
    }

    pub fn surface(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// Tokenize text into ids; unknown words map to `[UNK]`.
    pub fn tokenize(&self, text: &str) -> Vec<TokenId> {
        split_text(text).iter().map(|t| self.id_or_unk(&t.surface)).collect()
    }

    /// Tokenize, also returning the raw tokens (surfaces + byte offsets).
    pub fn tokenize_raw(&self, text: &str) -> (Vec<TokenId>, Vec<RawToken>) {
        let raw = split_text(text);
        let ids = raw.iter().map(|t| self.id_or_unk(&t.surface)).collect();
        (ids, raw)
    }

    /// Join surfaces back into text. Closing punctuation attaches to the
    /// left, opening brackets to the right; everything else is
    /// space-separated. Recovers the input up to case folding and collapsed
    /// whitespace for text produced by [`split_text`].
    pub fn detokenize(&self, ids: &[TokenId]) -> String {
        detokenize_surfaces(ids.iter().map(|&id| self.surface(id).unwrap_or("[UNK]")))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    /// One token per line, specials first.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tokens {
            out.push_str(t);
            out.push('\n');
        }
        out
    }

    pub fn from_text(data: &str) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut index = HashMap::new();
        for (lineno, line) in data.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            if index.contains_key(line) {
                return Err(Error::MalformedRecord {
                    context: format!("vocab line {}", lineno + 1),
                    message: format!("duplicate token {line:?}"),
                });
            }
            index.insert(line.to_string(), tokens.len() as TokenId);
            tokens.push(line.to_string());
        }
        if tokens.len() < NUM_SPECIALS {
            return Err(Error::MalformedRecord {
                context: "vocab".into(),
                message: "fewer entries than the six special tokens".into(),
            });
        }
        for (i, s) in SPECIAL_SURFACES.iter().enumerate() {
            if tokens[i] != *s {
                return Err(Error::MalformedRecord {
                    context: format!("vocab line {}", i + 1),
                    message: format!("expected special token {s:?}, found {:?}", tokens[i]),
                });
            }
        }
        Ok(Vocab { tokens, index })
    }
}

const ATTACH_LEFT: &[&str] = &[",", ".", "?", "!", ";", ":", ")", "]", "}"];
const ATTACH_RIGHT: &[&str] = &["(", "[", "{"];

/// Join token surfaces with punctuation-aware spacing.
pub fn detokenize_surfaces<'a, I: IntoIterator<Item = &'a str>>(surfaces: I) -> String {
    let mut out = String::new();
    let mut glue_next = false;
    for s in surfaces {
        let no_space = out.is_empty() || glue_next || ATTACH_LEFT.contains(&s);
        if !no_space {
            out.push(' ');
        }
        out.push_str(s);
        glue_next = ATTACH_RIGHT.contains(&s);
    }
    out
}
