//! Closed word lists shared by the prompt rules, span filtering, and
//! synthetic KB generation.

/// Auxiliary verbs accepted where the rewrite rules expect a `be/done` slot.
pub const AUXILIARIES: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "did", "do", "does", "has", "have", "had",
];

/// Interrogatives handled by the generic wh-replacement rule.
pub const WH_GENERIC: &[&str] = &["what", "who", "whose", "whom", "which", "how"];

/// Small closed stopword list. Used for prompt-token selection, span
/// filtering, and deciding which vocabulary entries count as content words.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "the", "of", "in", "on", "at", "to", "for", "with", "by", "from", "as", "and",
    "or", "but", "not", "no", "so", "if", "than", "then", "that", "this", "these", "those",
    "it", "its", "he", "his", "she", "her", "they", "their", "them", "we", "our", "you",
    "your", "i", "my", "is", "are", "was", "were", "be", "been", "being", "am", "do", "does",
    "did", "has", "have", "had", "will", "would", "can", "could", "shall", "should", "may",
    "might", "must", "what", "who", "whose", "whom", "which", "how", "where", "when", "why",
    "there", "here", "about", "into", "over", "after", "before", "between", "because",
];

/// Characters tokenized as standalone punctuation tokens.
pub const SPLIT_PUNCT: &[char] = &[
    ',', '.', '?', '!', ';', ':', '(', ')', '[', ']', '{', '}', '"', '“', '”',
];

/// Punctuation that terminates a sentence.
pub const SENTENCE_PUNCT: &[&str] = &[".", "?", "!"];

pub fn is_auxiliary(word: &str) -> bool {
    AUXILIARIES.contains(&word)
}

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(&word)
}

/// True for tokens that consist entirely of punctuation characters.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_punctuation() || SPLIT_PUNCT.contains(&c))
}

pub fn is_sentence_punct(token: &str) -> bool {
    SENTENCE_PUNCT.contains(&token)
}

/// Content word: carries at least one alphanumeric character and is neither
/// a stopword nor punctuation.
pub fn is_content_word(token: &str) -> bool {
    token.chars().any(|c| c.is_alphanumeric()) && !is_stopword(token) && !is_punctuation(token)
}
