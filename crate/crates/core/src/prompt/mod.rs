//! Query prompt construction and model-input assembly.
//!
//! A query is rewritten into a declarative cloze sentence with `l_mask`
//! contiguous mask slots ([`build_prompt`]), a subset of its tokens is
//! selected to receive passage knowledge ([`select_prompt_tokens`]), and the
//! final model input is laid out as `[CLS] prompt [SEP] passage [SEP]`
//! ([`assemble_input`]).

pub mod rules;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::KnowledgeTable;
use crate::lexicon::is_content_word;
use crate::text::dataset::{Passage, TokenSpan};
use crate::text::vocab::{TokenId, Vocab, CLS, MASK, SEP};

pub use rules::{rewrite_query, RuleId};

/// A query rewritten as a token sequence with mask slots and (optionally)
/// selected token positions for knowledge injection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    /// Rendered prompt text, capitalization and spacing preserved.
    pub surface: String,
    pub tokens: Vec<TokenId>,
    /// Lowercased surface per token (UNK-safe, used for KB lookups).
    pub surfaces: Vec<String>,
    /// Indices of the mask slots within `tokens`; always contiguous.
    pub mask_positions: Vec<usize>,
    /// Indices of the prompt tokens whose embeddings knowledge injection may
    /// replace. Disjoint from `mask_positions`.
    pub selected_positions: Vec<usize>,
    pub rule_id: RuleId,
}

impl PromptTemplate {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn l_mask(&self) -> usize {
        self.mask_positions.len()
    }
}

/// Rewrite `query` into a cloze template with exactly `l_mask` masks.
/// Every query produces a valid template: unmatched queries fall back to
/// appending the masks.
pub fn build_prompt(query: &str, l_mask: usize, vocab: &Vocab) -> PromptTemplate {
    let (surface, rule_id) = rules::rewrite_query(query, l_mask);
    let (tokens, raw) = vocab.tokenize_raw(&surface);
    let mask_positions: Vec<usize> = tokens
        .iter()
        .enumerate()
        .filter(|(_, &id)| id == MASK)
        .map(|(i, _)| i)
        .collect();
    debug_assert_eq!(mask_positions.len(), l_mask);
    debug_assert!(mask_positions.windows(2).all(|w| w[1] == w[0] + 1));
    PromptTemplate {
        surface,
        surfaces: raw.into_iter().map(|t| t.surface).collect(),
        tokens,
        mask_positions,
        selected_positions: Vec::new(),
        rule_id,
    }
}

/// How prompt tokens are chosen for knowledge injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    /// Tokens whose lemma appears in the knowledge base.
    KbLinked,
    /// Non-stopword, non-punctuation, non-special tokens.
    ContentWords,
    /// Every token that is not a mask slot.
    AllNonMask,
}

fn content_word_positions(template: &PromptTemplate) -> Vec<usize> {
    template
        .surfaces
        .iter()
        .enumerate()
        .filter(|(i, s)| !template.mask_positions.contains(i) && is_content_word(s))
        .map(|(i, _)| i)
        .collect()
}

/// Populate `selected_positions` according to the policy. If `KbLinked`
/// selects nothing (e.g. an empty KB), falls back to `ContentWords` with a
/// warning. The result always satisfies `r < m'`.
pub fn select_prompt_tokens(
    template: &PromptTemplate,
    kb: &KnowledgeTable,
    policy: SelectionPolicy,
) -> PromptTemplate {
    let mut out = template.clone();
    out.selected_positions = match policy {
        SelectionPolicy::KbLinked => {
            let linked: Vec<usize> = template
                .surfaces
                .iter()
                .enumerate()
                .filter(|(i, s)| !template.mask_positions.contains(i) && kb.has_lemma_of(s))
                .map(|(i, _)| i)
                .collect();
            if linked.is_empty() {
                log::warn!("kb_linked selection matched no prompt tokens; using content words");
                content_word_positions(template)
            } else {
                linked
            }
        }
        SelectionPolicy::ContentWords => content_word_positions(template),
        SelectionPolicy::AllNonMask => (0..template.len())
            .filter(|i| !template.mask_positions.contains(i))
            .collect(),
    };
    debug_assert!(out.selected_positions.len() < out.len());
    debug_assert!(out.selected_positions.iter().all(|p| !out.mask_positions.contains(p)));
    out
}

/// Per-position role of an assembled input id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentTag {
    Cls,
    Prompt,
    Sep,
    Passage,
}

/// The model input `[CLS] prompt [SEP] passage [SEP]` with absolute
/// positions of the mask slots and of the passage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssembledInput {
    pub input_ids: Vec<TokenId>,
    pub segment_map: Vec<SegmentTag>,
    /// Template mask positions shifted by the leading `[CLS]`.
    pub prompt_mask_positions: Vec<usize>,
    /// Absolute index range of the passage tokens, inclusive.
    pub passage_span: TokenSpan,
}

impl AssembledInput {
    pub fn len(&self) -> usize {
        self.input_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.input_ids.is_empty()
    }

    /// Absolute positions of the template's selected tokens.
    pub fn selected_abs(&self, template: &PromptTemplate) -> Vec<usize> {
        template.selected_positions.iter().map(|&p| p + 1).collect()
    }
}

/// Lay out `[CLS] prompt [SEP] passage [SEP]`. The passage is never
/// truncated: an input that does not fit is an error naming the sizes.
pub fn assemble_input(
    template: &PromptTemplate,
    passage: &Passage,
    max_len: usize,
) -> Result<AssembledInput> {
    let total = template.len() + passage.len() + 3;
    if total > max_len {
        return Err(Error::Overflow(format!(
            "prompt ({}) + passage ({}) + 3 specials = {} exceeds max_len {}",
            template.len(),
            passage.len(),
            total,
            max_len
        )));
    }
    let mut input_ids = Vec::with_capacity(total);
    let mut segment_map = Vec::with_capacity(total);
    input_ids.push(CLS);
    segment_map.push(SegmentTag::Cls);
    input_ids.extend_from_slice(&template.tokens);
    segment_map.extend(std::iter::repeat_n(SegmentTag::Prompt, template.len()));
    input_ids.push(SEP);
    segment_map.push(SegmentTag::Sep);
    let passage_start = input_ids.len();
    input_ids.extend_from_slice(&passage.tokens);
    segment_map.extend(std::iter::repeat_n(SegmentTag::Passage, passage.len()));
    input_ids.push(SEP);
    segment_map.push(SegmentTag::Sep);
    Ok(AssembledInput {
        prompt_mask_positions: template.mask_positions.iter().map(|&p| p + 1).collect(),
        passage_span: TokenSpan::new(passage_start, passage_start + passage.len() - 1),
        input_ids,
        segment_map,
    })
}

/// Per-rule match counts over a query corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleStats {
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
    pub r4: usize,
    pub fallback: usize,
}

impl RuleStats {
    pub fn record(&mut self, rule: RuleId) {
        match rule {
            RuleId::R1 => self.r1 += 1,
            RuleId::R2 => self.r2 += 1,
            RuleId::R3 => self.r3 += 1,
            RuleId::R4 => self.r4 += 1,
            RuleId::Fallback => self.fallback += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.r1 + self.r2 + self.r3 + self.r4 + self.fallback
    }
}

/// Run the rewrite over a corpus of queries and tally rule usage.
pub fn rule_coverage<S: AsRef<str>>(queries: &[S], l_mask: usize) -> RuleStats {
    let mut stats = RuleStats::default();
    for q in queries {
        stats.record(rules::rewrite_query(q.as_ref(), l_mask).1);
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocab {
        Vocab::build(&[
            "what was one of the norman's major exports?",
            "fighting horsemen and cavalry",
        ])
        .unwrap()
    }

    #[test]
    fn build_prompt_counts_and_contiguity() {
        let v = vocab();
        for l_mask in 1..=10 {
            let t = build_prompt("What was one of the Norman's major exports?", l_mask, &v);
            assert_eq!(t.l_mask(), l_mask);
            assert!(t.mask_positions.windows(2).all(|w| w[1] == w[0] + 1));
            assert_eq!(t.rule_id, RuleId::R1);
        }
    }

    #[test]
    fn masks_resolve_to_the_shared_mask_id() {
        let v = vocab();
        let t = build_prompt("What was one of the Norman's major exports?", 3, &v);
        for &p in &t.mask_positions {
            assert_eq!(t.tokens[p], MASK);
        }
    }

    #[test]
    fn kb_linked_selection() {
        let v = vocab();
        let t = build_prompt("What was one of the Norman's major exports?", 3, &v);
        let mut kb = KnowledgeTable::new(2);
        kb.insert("e1", "norman", vec![1.0, 0.0]).unwrap();
        kb.insert("e2", "export", vec![0.0, 1.0]).unwrap();
        let sel = select_prompt_tokens(&t, &kb, SelectionPolicy::KbLinked);
        // Oracle: manual lemma lookup — "norman's" and "exports" are the only
        // prompt tokens whose lemmas hit the stub KB.
        let picked: Vec<&str> =
            sel.selected_positions.iter().map(|&i| sel.surfaces[i].as_str()).collect();
        assert_eq!(picked, vec!["norman's", "exports"]);
    }

    #[test]
    fn empty_kb_falls_back_to_content_words() {
        let v = vocab();
        let t = build_prompt("What was one of the Norman's major exports?", 3, &v);
        let kb = KnowledgeTable::new(2);
        let sel = select_prompt_tokens(&t, &kb, SelectionPolicy::KbLinked);
        let content = select_prompt_tokens(&t, &kb, SelectionPolicy::ContentWords);
        assert_eq!(sel.selected_positions, content.selected_positions);
        assert!(!sel.selected_positions.is_empty());
    }

    #[test]
    fn all_non_mask_counts() {
        let v = vocab();
        // 10-token prompt with 3 masks: "[M] [M] [M] was one of the norman's
        // major exports ." is 11 tokens; select a synthetic check instead.
        let t = build_prompt("What was one of the Norman's major exports?", 3, &v);
        let kb = KnowledgeTable::new(2);
        let sel = select_prompt_tokens(&t, &kb, SelectionPolicy::AllNonMask);
        assert_eq!(sel.selected_positions.len(), t.len() - 3);
        assert!(sel.selected_positions.len() < t.len());
    }

    #[test]
    fn assemble_layout_and_spans() {
        let v = Vocab::build(&["q1 q2 q3 q4 q5 q6 q7 q8 p1 p2 p3 p4 p5 p6 p7 p8 p9 pa pb pc"]).unwrap();
        // Build an 8-token template by hand to pin the index arithmetic.
        let t = PromptTemplate {
            surface: "q1 q2 q3 [MASK] [MASK] [MASK] q4 q5".into(),
            tokens: v.tokenize("q1 q2 q3 [MASK] [MASK] [MASK] q4 q5"),
            surfaces: "q1 q2 q3 [MASK] [MASK] [MASK] q4 q5"
                .split(' ')
                .map(str::to_string)
                .collect(),
            mask_positions: vec![3, 4, 5],
            selected_positions: vec![],
            rule_id: RuleId::Fallback,
        };
        let p = Passage::from_text("p1 p2 p3 p4 p5 p6 p7 p8 p9 pa pb pc", &v).unwrap();
        let a = assemble_input(&t, &p, 64).unwrap();
        assert_eq!(a.len(), 23);
        assert_eq!(a.passage_span, TokenSpan::new(10, 21));
        assert_eq!(a.prompt_mask_positions, vec![4, 5, 6]);
        assert_eq!(&a.input_ids[10..=21], p.tokens.as_slice());
        assert_eq!(a.segment_map[0], SegmentTag::Cls);
        assert_eq!(a.segment_map[9], SegmentTag::Sep);
        assert_eq!(a.segment_map[22], SegmentTag::Sep);
    }

    #[test]
    fn overflow_is_an_error() {
        let v = vocab();
        let t = build_prompt("What was one of the Norman's major exports?", 3, &v);
        let p = Passage::from_text("fighting horsemen and cavalry", &v).unwrap();
        assert!(matches!(assemble_input(&t, &p, 10), Err(Error::Overflow(_))));
    }

    #[test]
    fn rule_stats_tally() {
        let queries = [
            "What was one of the Norman's major exports?",
            "Where is the company that Sachin Warrier worked for as a software engineer?",
            "Why did Rudolf Hess stop serving Hitler in 1941?",
            "How much longer after he was born did Werder Bremen get founded?",
        ];
        let stats = rule_coverage(&queries, 2);
        assert_eq!(stats.r1, 1);
        assert_eq!(stats.r2, 1);
        assert_eq!(stats.r4, 1);
        assert_eq!(stats.fallback, 1);
        assert_eq!(stats.total(), 4);
    }
}
