//! Gloss tokenization: lowercase split on non-alphanumeric characters, a
//! bundled English stopword list, and a first-match POS tagger backed by the
//! lemma index.

use std::collections::HashSet;

use super::{LexicalStore, Pos};

/// One content token of a gloss definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlossToken {
    pub surface: String,
    pub lemma: String,
    pub pos: Pos,
}

pub(super) fn stopword_set() -> HashSet<&'static str> {
    include_str!("../../data/stopwords_en.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// Split a definition into lowercase alphanumeric runs and drop stopwords.
pub(crate) fn content_words(text: &str, store: &LexicalStore) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty() && !store.is_stopword(t))
        .map(str::to_string)
        .collect()
}

/// Tag a content word with the first lookup POS under which morphy finds an
/// indexed lemma; words unknown to WordNet default to themselves as nouns.
pub(crate) fn tag_word(word: &str, store: &LexicalStore) -> (String, Pos) {
    for pos in Pos::LOOKUP {
        if let Some(lemma) = store.morphy(word, pos).into_iter().next() {
            return (lemma, pos);
        }
    }
    (word.to_string(), Pos::Noun)
}

pub(super) fn tokenize_definition(definition: &str, store: &LexicalStore) -> Vec<GlossToken> {
    content_words(definition, store)
        .into_iter()
        .map(|surface| {
            let (lemma, pos) = tag_word(&surface, store);
            GlossToken {
                surface,
                lemma,
                pos,
            }
        })
        .collect()
}
