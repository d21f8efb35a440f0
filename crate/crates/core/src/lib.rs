//! Multi-sense embeddings from a relation-enriched sense corpus.
//!
//! The pipeline: parse WordNet 3.0 into a [`wordnet::LexicalStore`], fully
//! annotate the gloss and Semcor corpora in two stages ([`annotate`]), enrich
//! each gloss with its relation targets via a graph walk ([`walk`]), train
//! skip-gram/hierarchical-softmax sense vectors ([`train`]), and evaluate
//! with sense-aware similarity measures ([`similarity`]) on word sense
//! disambiguation ([`wsd`]) and word similarity ([`wordsim`]) benchmarks.

pub mod annotate;
pub mod corpus;
pub mod similarity;
pub mod train;
pub mod walk;
pub mod wordnet;
pub mod wordsim;
pub mod wsd;
