//! Entity-embedding store indexed by lemma, and additive injection of those
//! embeddings into passage token representations.
//!
//! KB file format: TSV, one row per entity —
//! `entity_id<TAB>lemma<TAB>v0<TAB>v1<TAB>...` — all rows must share one
//! embedding dimension.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::lexicon::is_content_word;
use crate::text::vocab::{Vocab, NUM_SPECIALS};

/// Deterministic rule-table lemmatizer: lowercase, strip possessive markers,
/// then apply the first matching inflection rule.
///
/// Rules, in order: `-ies -> -y`, `-es` after a sibilant stem, plain `-s`
/// (but not `-ss`), `-ing`, `-ed`. No gemination repair: this is a small
/// closed table, not a morphological analyzer.
pub fn lemma(token: &str) -> String {
    let mut t = token.to_lowercase();
    for marker in ["'s", "\u{2019}s"] {
        if let Some(stripped) = t.strip_suffix(marker) {
            t = stripped.to_string();
            break;
        }
    }
    while t.ends_with('\'') || t.ends_with('\u{2019}') {
        t.pop();
    }
    let n = t.len();
    if n > 4 && t.ends_with("ies") {
        return format!("{}y", &t[..n - 3]);
    }
    if n > 4 && t.ends_with("es") {
        let stem = &t[..n - 2];
        if stem.ends_with('s') || stem.ends_with('x') || stem.ends_with('z')
            || stem.ends_with("ch") || stem.ends_with("sh")
        {
            return stem.to_string();
        }
    }
    if n > 3 && t.ends_with('s') && !t.ends_with("ss") {
        return t[..n - 1].to_string();
    }
    if n > 5 && t.ends_with("ing") {
        return t[..n - 3].to_string();
    }
    if n > 4 && t.ends_with("ed") {
        return t[..n - 2].to_string();
    }
    t
}

/// Lemma-indexed entity embedding store. Immutable after load.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeTable {
    entity_embeddings: BTreeMap<String, Vec<f64>>,
    lemma_index: BTreeMap<String, Vec<String>>,
    d_kb: usize,
}

impl KnowledgeTable {
    pub fn new(d_kb: usize) -> Self {
        KnowledgeTable {
            entity_embeddings: BTreeMap::new(),
            lemma_index: BTreeMap::new(),
            d_kb,
        }
    }

    pub fn d_kb(&self) -> usize {
        self.d_kb
    }

    pub fn num_entities(&self) -> usize {
        self.entity_embeddings.len()
    }

    pub fn num_lemmas(&self) -> usize {
        self.lemma_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_embeddings.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.lemma_index.keys().map(String::as_str)
    }

    pub fn insert(&mut self, entity_id: &str, entity_lemma: &str, embedding: Vec<f64>) -> Result<()> {
        if embedding.len() != self.d_kb {
            return Err(Error::shape(
                "knowledge table insert",
                format!("dimension {}", self.d_kb),
                format!("dimension {}", embedding.len()),
            ));
        }
        if self.entity_embeddings.contains_key(entity_id) {
            return Err(Error::Data(format!("duplicate entity id {entity_id:?}")));
        }
        self.entity_embeddings.insert(entity_id.to_string(), embedding);
        self.lemma_index
            .entry(entity_lemma.to_string())
            .or_default()
            .push(entity_id.to_string());
        Ok(())
    }

    /// Does any entity share this token's lemma?
    pub fn has_lemma_of(&self, token: &str) -> bool {
        self.lemma_index.contains_key(&lemma(token))
    }

    /// Mean embedding over all entities whose lemma equals `lemma(token)`.
    /// Absence is a value, not an error.
    pub fn kb_embedding(&self, token: &str) -> Option<Array1<f64>> {
        let ids = self.lemma_index.get(&lemma(token))?;
        let mut acc = Array1::<f64>::zeros(self.d_kb);
        for id in ids {
            let emb = &self.entity_embeddings[id];
            for (a, &x) in acc.iter_mut().zip(emb.iter()) {
                *a += x;
            }
        }
        acc /= ids.len() as f64;
        Some(acc)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (entity_lemma, ids) in &self.lemma_index {
            for id in ids {
                out.push_str(id);
                out.push('\t');
                out.push_str(entity_lemma);
                for x in &self.entity_embeddings[id] {
                    out.push('\t');
                    out.push_str(&format!("{x}"));
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_tsv(data: &str) -> Result<Self> {
        let mut table: Option<KnowledgeTable> = None;
        for (idx, line) in data.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let record_err = |message: String| Error::MalformedRecord {
                context: format!("kb line {}", idx + 1),
                message,
            };
            let id = fields.next().filter(|s| !s.is_empty())
                .ok_or_else(|| record_err("missing entity id".into()))?;
            let entity_lemma = fields.next().filter(|s| !s.is_empty())
                .ok_or_else(|| record_err("missing lemma".into()))?;
            let embedding: Vec<f64> = fields
                .map(|f| f.parse::<f64>().map_err(|e| record_err(format!("bad float {f:?}: {e}"))))
                .collect::<Result<_>>()?;
            if embedding.is_empty() {
                return Err(record_err("missing embedding values".into()));
            }
            let table = table.get_or_insert_with(|| KnowledgeTable::new(embedding.len()));
            if embedding.len() != table.d_kb {
                return Err(record_err(format!(
                    "dimension {} differs from first row's {}",
                    embedding.len(),
                    table.d_kb
                )));
            }
            table.insert(id, entity_lemma, embedding)?;
        }
        table.ok_or_else(|| Error::Data("knowledge base file has no rows".into()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_tsv())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_tsv(&fs::read_to_string(path)?)
    }
}

/// Linear adapter from KB embedding space to the model's hidden size.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeProjection {
    /// `d_kb x h`.
    pub weight: Array2<f64>,
    pub trainable: bool,
}

impl KnowledgeProjection {
    pub fn identity(d: usize) -> Self {
        KnowledgeProjection { weight: Array2::eye(d), trainable: false }
    }

    pub fn apply(&self, v: &Array1<f64>) -> Array1<f64> {
        v.dot(&self.weight)
    }
}

/// Add the projected mean entity embedding to every passage row whose token
/// has a KB match; all other rows pass through bit-identical.
pub fn inject_passage_knowledge(
    passage_embeddings: &Array2<f64>,
    passage_tokens: &[String],
    kb: &KnowledgeTable,
    proj: &KnowledgeProjection,
) -> Result<Array2<f64>> {
    if passage_embeddings.nrows() != passage_tokens.len() {
        return Err(Error::shape(
            "passage knowledge injection",
            format!("{} rows", passage_tokens.len()),
            format!("{} rows", passage_embeddings.nrows()),
        ));
    }
    if proj.weight.nrows() != kb.d_kb() {
        return Err(Error::shape(
            "passage knowledge injection",
            format!("projection input {}", kb.d_kb()),
            format!("projection input {}", proj.weight.nrows()),
        ));
    }
    if proj.weight.ncols() != passage_embeddings.ncols() {
        return Err(Error::shape(
            "passage knowledge injection",
            format!("projection output {}", passage_embeddings.ncols()),
            format!("projection output {}", proj.weight.ncols()),
        ));
    }
    let mut enhanced = passage_embeddings.clone();
    for (i, token) in passage_tokens.iter().enumerate() {
        if let Some(e) = kb.kb_embedding(token) {
            let delta = proj.apply(&e);
            let mut row = enhanced.row_mut(i);
            row += &delta;
        }
    }
    Ok(enhanced)
}

/// Content-word lemmas of a vocabulary, sorted.
pub fn content_lemmas(vocab: &Vocab) -> Vec<String> {
    let mut set = BTreeSet::new();
    for id in NUM_SPECIALS..vocab.len() {
        let surface = vocab.surface(id as u32).unwrap();
        if is_content_word(surface) {
            set.insert(lemma(surface));
        }
    }
    set.into_iter().collect()
}

/// Deterministic stand-in for a pretrained entity store: covers the
/// requested fraction of the vocabulary's content-word lemmas with
/// unit-norm random embeddings, one or two entities per lemma.
pub fn generate_synthetic_kb(vocab: &Vocab, coverage: f64, d_kb: usize, seed: u64) -> KnowledgeTable {
    assert!((0.0..=1.0).contains(&coverage), "coverage must lie in [0, 1]");
    let mut table = KnowledgeTable::new(d_kb);
    let lemmas = content_lemmas(vocab);
    let n_covered = (coverage * lemmas.len() as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..lemmas.len()).collect();
    // Fisher-Yates so the covered subset is seed-determined, not alphabetical.
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut counter = 0usize;
    for &li in order.iter().take(n_covered) {
        let n_entities = rng.random_range(1..=2);
        for _ in 0..n_entities {
            let mut v: Vec<f64> = (0..d_kb).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            table
                .insert(&format!("e{counter:05}"), &lemmas[li], v)
                .expect("synthetic ids are unique");
            counter += 1;
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    // Oracle: rule-table trace.
    #[test]
    fn lemma_rule_table() {
        assert_eq!(lemma("exports"), "export");
        assert_eq!(lemma("Norman's"), "norman");
        assert_eq!(lemma("the"), "the");
        assert_eq!(lemma("cities"), "city");
        assert_eq!(lemma("boxes"), "box");
        assert_eq!(lemma("glass"), "glass");
        assert_eq!(lemma("founded"), "found");
        assert_eq!(lemma("fighting"), "fight");
    }

    #[test]
    fn kb_embedding_is_mean_over_lemma_matches() {
        let mut kb = KnowledgeTable::new(2);
        kb.insert("e1", "norman", vec![1.0, 0.0]).unwrap();
        kb.insert("e2", "norman", vec![0.0, 1.0]).unwrap();
        let e = kb.kb_embedding("normans").unwrap();
        assert_eq!(e.as_slice().unwrap(), &[0.5, 0.5]);
    }

    #[test]
    fn missing_lemma_is_absent() {
        let kb = KnowledgeTable::new(2);
        assert!(kb.kb_embedding("anything").is_none());
    }

    #[test]
    fn single_match_returns_it_exactly() {
        let mut kb = KnowledgeTable::new(3);
        kb.insert("e1", "export", vec![0.25, -1.5, 3.0]).unwrap();
        let e = kb.kb_embedding("exports").unwrap();
        assert_eq!(e.as_slice().unwrap(), &[0.25, -1.5, 3.0]);
    }

    #[test]
    fn injection_is_local_to_matched_rows() {
        let mut kb = KnowledgeTable::new(2);
        kb.insert("e1", "fox", vec![1.0, 2.0]).unwrap();
        let emb = Array2::from_shape_fn((4, 2), |(i, j)| (i * 2 + j) as f64 * 0.1);
        let tokens: Vec<String> =
            ["the", "quick", "fox", "ran"].iter().map(|s| s.to_string()).collect();
        let proj = KnowledgeProjection::identity(2);
        let g = inject_passage_knowledge(&emb, &tokens, &kb, &proj).unwrap();
        for i in [0usize, 1, 3] {
            assert_eq!(g.row(i), emb.row(i), "row {i} must pass through untouched");
        }
        // Oracle: direct vector arithmetic.
        assert_eq!(g[[2, 0]], emb[[2, 0]] + 1.0);
        assert_eq!(g[[2, 1]], emb[[2, 1]] + 2.0);
    }

    #[test]
    fn empty_kb_injection_is_identity() {
        let kb = KnowledgeTable::new(2);
        let emb = Array2::from_shape_fn((3, 2), |(i, j)| (i + j) as f64);
        let tokens: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let g =
            inject_passage_knowledge(&emb, &tokens, &kb, &KnowledgeProjection::identity(2)).unwrap();
        assert_eq!(g, emb);
    }

    #[test]
    fn dimension_mismatch_is_a_shape_error() {
        let kb = KnowledgeTable::new(3);
        let emb = Array2::zeros((2, 2));
        let tokens: Vec<String> = vec!["a".into(), "b".into()];
        let err = inject_passage_knowledge(&emb, &tokens, &kb, &KnowledgeProjection::identity(2));
        assert!(matches!(err, Err(Error::Shape { .. })));
    }

    #[test]
    fn tsv_round_trip() {
        let mut kb = KnowledgeTable::new(2);
        kb.insert("e1", "fox", vec![0.1, -0.2]).unwrap();
        kb.insert("e2", "dog", vec![1.5, 2.5]).unwrap();
        let parsed = KnowledgeTable::from_tsv(&kb.to_tsv()).unwrap();
        assert_eq!(kb, parsed);
    }

    #[test]
    fn tsv_rejects_ragged_dimensions() {
        let data = "e1\tfox\t0.1\t0.2\ne2\tdog\t1.0\n";
        assert!(KnowledgeTable::from_tsv(data).is_err());
    }

    #[test]
    fn synthetic_kb_is_deterministic() {
        let vocab = Vocab::build(&["alice works in paris", "bob lives in rome"]).unwrap();
        let a = generate_synthetic_kb(&vocab, 0.5, 4, 7);
        let b = generate_synthetic_kb(&vocab, 0.5, 4, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn synthetic_kb_coverage_extremes() {
        let vocab = Vocab::build(&["alice works in paris today"]).unwrap();
        let none = generate_synthetic_kb(&vocab, 0.0, 4, 1);
        assert!(none.is_empty());
        // Oracle: coverage count over the vocabulary's content lemmas.
        let full = generate_synthetic_kb(&vocab, 1.0, 4, 1);
        let expected = content_lemmas(&vocab);
        let got: Vec<String> = full.lemmas().map(str::to_string).collect();
        assert_eq!(got, expected);
    }
}
