//! The query-to-cloze rewrite engine.
//!
//! Rewrites operate on the original string through byte-range splices so
//! capitalization, inner punctuation, and spacing survive verbatim. Matching
//! runs over lowercased word tokens.
//!
//! Conventions shared by every rule: the query's trailing sentence
//! punctuation is dropped (the fallback keeps the query untouched instead),
//! mask tokens are space-separated, a period is appended, and the first
//! alphabetic character of the result is uppercased.

use serde::{Deserialize, Serialize};

use crate::lexicon::{is_auxiliary, WH_GENERIC};
use crate::text::vocab::{split_text, RawToken};

/// Which rewrite produced a template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleId {
    /// Generic wh-word ("what", "who", ...): masks replace the wh-phrase.
    R1,
    /// "where ...": the clause gains "at the place of [MASK]...".
    R2,
    /// "when ...": the clause gains "at the time of [MASK]...".
    R3,
    /// "why ...": "The reason why ... is that [MASK]...".
    R4,
    /// No rule matched: masks are appended to the unchanged query.
    Fallback,
}

impl std::fmt::Display for RuleId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            RuleId::R1 => "R1",
            RuleId::R2 => "R2",
            RuleId::R3 => "R3",
            RuleId::R4 => "R4",
            RuleId::Fallback => "FALLBACK",
        };
        f.write_str(s)
    }
}

fn mask_run(l_mask: usize) -> String {
    vec!["[MASK]"; l_mask].join(" ")
}

fn capitalize_first(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut done = false;
    for ch in s.chars() {
        if !done && ch.is_alphabetic() {
            out.extend(ch.to_uppercase());
            done = true;
        } else {
            out.push(ch);
        }
    }
    out
}

/// A wh-phrase of at most this many tokens at the end of the query is
/// replaced wholesale ("... born in what year?" -> "... born in [MASK].").
const MAX_TRAILING_WH_PHRASE: usize = 3;

struct Analysis<'a> {
    text: &'a str,
    /// Word tokens with the trailing sentence punctuation stripped.
    body: Vec<RawToken>,
    /// Byte offset just past the last body token.
    body_end: usize,
}

fn analyze(query: &str) -> Option<Analysis<'_>> {
    let mut body = split_text(query);
    while body
        .last()
        .is_some_and(|t| matches!(t.surface.as_str(), "?" | "." | "!"))
    {
        body.pop();
    }
    let body_end = body.last()?.end;
    Some(Analysis { text: query, body, body_end })
}

fn try_generic_wh(a: &Analysis, l_mask: usize) -> Option<String> {
    let i = a.body.iter().position(|t| WH_GENERIC.contains(&t.surface.as_str()))?;
    let wh = &a.body[i];
    if a.body.get(i + 1).is_some_and(|t| is_auxiliary(&t.surface)) {
        // Inverted form: the wh-word alone becomes the mask slot.
        let head = a.text[..wh.start].trim_end();
        let tail = &a.text[wh.end..a.body_end];
        let glue = if head.is_empty() { "" } else { " " };
        return Some(capitalize_first(&format!(
            "{head}{glue}{}{tail}.",
            mask_run(l_mask)
        )));
    }
    // Short trailing wh-phrase ("in what year") with no auxiliary after it.
    let rest = &a.body[i..];
    if rest.len() <= MAX_TRAILING_WH_PHRASE && !rest.iter().any(|t| is_auxiliary(&t.surface)) && i > 0
    {
        let head = a.text[..wh.start].trim_end();
        return Some(capitalize_first(&format!("{head} {}.", mask_run(l_mask))));
    }
    None
}

fn try_adverbial(a: &Analysis, wh: &str, phrase: &str, l_mask: usize) -> Option<String> {
    let i = a.body.iter().position(|t| t.surface == wh)?;
    if i != 0 {
        return None;
    }
    let masks = mask_run(l_mask);
    if a.body.get(1).is_some_and(|t| is_auxiliary(&t.surface)) && a.body.len() > 2 {
        // Inverted question: "Where is X?" -> "X is <phrase> [MASK]...".
        let aux = a.body[1].surface.clone();
        let rest = &a.text[a.body[2].start..a.body_end];
        return Some(capitalize_first(&format!("{rest} {aux} {phrase} {masks}.")));
    }
    // Subordinate clause: "When the X was built, Y" ->
    // "The X was built <phrase> [MASK]..., Y". The insertion point is the
    // end of the clause containing the first auxiliary.
    let j = a.body.iter().skip(1).position(|t| is_auxiliary(&t.surface))? + 1;
    let insert_at = a
        .body
        .iter()
        .skip(j + 1)
        .find(|t| t.surface == ",")
        .map(|t| t.start)
        .unwrap_or(a.body_end);
    let lead = a.text[a.body[1].start..insert_at].trim_end();
    let tail = &a.text[insert_at..a.body_end];
    Some(capitalize_first(&format!("{lead} {phrase} {masks}{tail}.")))
}

fn try_reason(a: &Analysis, l_mask: usize) -> Option<String> {
    if a.body.first()?.surface != "why" || !is_auxiliary(&a.body.get(1)?.surface) {
        return None;
    }
    let rest = &a.text[a.body[1].start..a.body_end];
    Some(format!("The reason why {rest} is that {}.", mask_run(l_mask)))
}

/// Rewrite a query into a cloze sentence containing exactly `l_mask` mask
/// tokens. Total: the fallback covers every query.
pub fn rewrite_query(query: &str, l_mask: usize) -> (String, RuleId) {
    assert!(l_mask >= 1, "l_mask must be at least 1");
    let trimmed = query.trim();
    if let Some(a) = analyze(trimmed) {
        if let Some(s) = try_generic_wh(&a, l_mask) {
            return (s, RuleId::R1);
        }
        if let Some(s) = try_adverbial(&a, "where", "at the place of", l_mask) {
            return (s, RuleId::R2);
        }
        if let Some(s) = try_adverbial(&a, "when", "at the time of", l_mask) {
            return (s, RuleId::R3);
        }
        if let Some(s) = try_reason(&a, l_mask) {
            return (s, RuleId::R4);
        }
    }
    let glue = if trimmed.is_empty() { "" } else { " " };
    (format!("{trimmed}{glue}{}.", mask_run(l_mask)), RuleId::Fallback)
}
