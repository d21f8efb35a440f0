//! Graph formulation and depth-first walk: for a root sense, the graph is
//! root -> relation sub-vertices -> sense tags of the root's gloss, and the
//! walk emits them in that order as one training sequence.

use rayon::prelude::*;

use crate::corpus::{TaggedSentence, TaggedToken};
use crate::wordnet::{LexicalStore, Pos, RelationType, SenseId, StoreError};

/// The per-sense walk graph. Sub-vertices are the root's relation targets
/// over the fourteen enrichment relations; the tail is the sense-tagged
/// gloss in gloss order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkGraph {
    pub root: SenseId,
    pub sub_vertices: Vec<SenseId>,
    pub tail: Vec<SenseId>,
}

/// Build the walk graph for a root sense whose gloss has already been
/// disambiguated into `gloss_tags`. A relation-free root yields an empty
/// sub-vertex list.
pub fn build_graph(
    root: SenseId,
    gloss_tags: &[SenseId],
    store: &LexicalStore,
) -> Result<WalkGraph, StoreError> {
    let sub_vertices = store.related(root, &RelationType::ALL)?;
    Ok(WalkGraph {
        root,
        sub_vertices,
        tail: gloss_tags.to_vec(),
    })
}

/// Depth-first traversal: root, then its sub-vertices, then the tail.
/// Duplicates are preserved; the output length is `1 + subs + tail`.
pub fn walk(graph: &WalkGraph) -> Vec<SenseId> {
    let mut seq = Vec::with_capacity(1 + graph.sub_vertices.len() + graph.tail.len());
    seq.push(graph.root);
    seq.extend_from_slice(&graph.sub_vertices);
    seq.extend_from_slice(&graph.tail);
    seq
}

/// Result of enriching a gloss corpus: one sequence per resolvable gloss, in
/// input order, plus the number of glosses skipped because their owning
/// synset could not be determined.
#[derive(Debug)]
pub struct EnrichedCorpus {
    pub sequences: Vec<Vec<SenseId>>,
    pub skipped: usize,
}

/// Enrich an annotated gloss corpus: each sentence's owning synset becomes
/// the walk root and its sense tags the tail. Generation is parallel over
/// glosses; output order equals input order.
pub fn generate_enriched_corpus<I>(store: &LexicalStore, annotated_wngt: I) -> EnrichedCorpus
where
    I: IntoIterator<Item = TaggedSentence>,
{
    let sentences: Vec<TaggedSentence> = annotated_wngt.into_iter().collect();
    let results: Vec<Option<Vec<SenseId>>> = sentences
        .par_iter()
        .map(|sentence| {
            let root = find_root(&sentence.doc_id, store)?;
            let tags: Vec<SenseId> = sentence
                .tokens
                .iter()
                .filter_map(|t| t.sense)
                .collect();
            let graph = build_graph(root, &tags, store).ok()?;
            Some(walk(&graph))
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    EnrichedCorpus {
        sequences: results.into_iter().flatten().collect(),
        skipped,
    }
}

/// Determine a gloss sentence's owning synset from its id string: the first
/// 9-character window that parses as a sense id present in the store.
pub fn find_root(doc_id: &str, store: &LexicalStore) -> Option<SenseId> {
    let bytes = doc_id.as_bytes();
    if bytes.len() < 9 {
        return None;
    }
    for start in 0..=bytes.len() - 9 {
        if let Some(window) = doc_id.get(start..start + 9) {
            if let Ok(id) = SenseId::parse(window) {
                if store.contains(id) {
                    return Some(id);
                }
            }
        }
    }
    None
}

/// Synthesize the gloss corpus from the store itself: one untagged sentence
/// per synset, in database order, with the owning sense id as the sentence
/// id. Used when no external gloss corpus is supplied.
pub fn gloss_sentences(store: &LexicalStore) -> Vec<TaggedSentence> {
    store
        .synsets()
        .map(|synset| {
            let tokens: Vec<TaggedToken> = store
                .gloss_tokens(synset.id)
                .unwrap_or_default()
                .into_iter()
                .map(|g| TaggedToken {
                    surface: g.surface,
                    lemma: Some(g.lemma),
                    pos: Some(g.pos),
                    sense: None,
                    token_id: None,
                })
                .collect();
            TaggedSentence {
                tokens: if tokens.is_empty() {
                    // A gloss of nothing but stopwords still owns a sequence:
                    // the walk emits the root and its relations regardless.
                    vec![TaggedToken::untagged("")]
                } else {
                    tokens
                },
                doc_id: synset.id.render(),
            }
        })
        .collect()
}

/// Compatibility check used by annotators and evaluators: can `pos` be the
/// part of speech of `sense`?
pub fn pos_compatible(pos: Option<Pos>, sense: SenseId) -> bool {
    pos.is_none_or(|p| p.matches(sense.pos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sid(offset: u32, pos: Pos) -> SenseId {
        SenseId::new(offset, pos).unwrap()
    }

    #[test]
    fn walk_emits_root_subs_tail() {
        // the figure-1 shape: root v1 with subs v11..v14 and tail v2, v3, v4
        let graph = WalkGraph {
            root: sid(1, Pos::Noun),
            sub_vertices: vec![
                sid(11, Pos::Noun),
                sid(12, Pos::Noun),
                sid(13, Pos::Noun),
                sid(14, Pos::Noun),
            ],
            tail: vec![sid(2, Pos::Noun), sid(3, Pos::Noun), sid(4, Pos::Noun)],
        };
        let seq = walk(&graph);
        assert_eq!(
            seq,
            vec![
                sid(1, Pos::Noun),
                sid(11, Pos::Noun),
                sid(12, Pos::Noun),
                sid(13, Pos::Noun),
                sid(14, Pos::Noun),
                sid(2, Pos::Noun),
                sid(3, Pos::Noun),
                sid(4, Pos::Noun)
            ]
        );
        assert_eq!(seq.len(), 1 + graph.sub_vertices.len() + graph.tail.len());
    }

    #[test]
    fn walk_of_bare_root_is_singleton() {
        let graph = WalkGraph {
            root: sid(7, Pos::Verb),
            sub_vertices: vec![],
            tail: vec![],
        };
        assert_eq!(walk(&graph), vec![sid(7, Pos::Verb)]);
    }

    #[test]
    fn walk_preserves_duplicates() {
        let dup = sid(797697, Pos::Verb);
        let graph = WalkGraph {
            root: sid(802318, Pos::Verb),
            sub_vertices: vec![dup],
            tail: vec![dup],
        };
        let seq = walk(&graph);
        assert_eq!(seq.iter().filter(|s| **s == dup).count(), 2);
    }
}
