//! Two-stage corpus annotation. Stage 1 is a knowledge-based pass: each
//! untagged content word takes the sense whose lexical signature accumulates
//! the highest normalized overlap with the signatures of its sentence
//! context. Stage 2 trains an intermediate embedding model on the stage-1
//! output and re-disambiguates the originally-untagged positions by maximum
//! embedding similarity. Gold tags are never altered.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::corpus::{TaggedSentence, TaggedToken};
use crate::train::{self, EmbeddingTable, TrainConfig, TrainError};
use crate::wordnet::{LexicalStore, RelationType, SenseId};
use crate::wsd::{disambiguate, WsdMode};

/// The lexical information of a sense: a lowercase, stopword-free multiset
/// of its lemmas, its gloss content lemmas, and the same for its direct
/// relations. Multiword lemmas contribute their component words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseSignature {
    pub sense: Option<SenseId>,
    bag: Vec<(Arc<str>, u32)>,
    total: u32,
}

impl SenseSignature {
    pub fn from_lemmas<I, S>(sense: Option<SenseId>, lemmas: I) -> SenseSignature
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<Arc<str>, u32> = HashMap::new();
        for lemma in lemmas {
            let lemma = lemma.as_ref().to_lowercase();
            if lemma.is_empty() {
                continue;
            }
            *counts.entry(Arc::from(lemma.as_str())).or_insert(0) += 1;
        }
        let mut bag: Vec<(Arc<str>, u32)> = counts.into_iter().collect();
        bag.sort_by(|a, b| a.0.cmp(&b.0));
        let total = bag.iter().map(|(_, c)| c).sum();
        SenseSignature { sense, bag, total }
    }

    /// Build the signature of a sense from the store: own lemmas and gloss
    /// content lemmas, plus those of every direct relation target over the
    /// fourteen enrichment relations.
    pub fn for_sense(store: &LexicalStore, id: SenseId) -> SenseSignature {
        let mut lemmas: Vec<String> = Vec::new();
        let absorb = |sid: SenseId, lemmas: &mut Vec<String>| {
            if let Ok(synset) = store.synset(sid) {
                for lemma in &synset.lemmas {
                    for part in lemma.split('_') {
                        let part = part.to_lowercase();
                        if !part.is_empty() && !store.is_stopword(&part) {
                            lemmas.push(part);
                        }
                    }
                }
            }
            if let Ok(tokens) = store.gloss_tokens(sid) {
                lemmas.extend(tokens.into_iter().map(|t| t.lemma));
            }
        };
        absorb(id, &mut lemmas);
        if let Ok(targets) = store.related(id, &RelationType::ALL) {
            for target in targets {
                absorb(target, &mut lemmas);
            }
        }
        SenseSignature::from_lemmas(Some(id), lemmas)
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    /// Multiset intersection size with another signature.
    fn intersection(&self, other: &SenseSignature) -> u32 {
        let mut i = 0;
        let mut j = 0;
        let mut common = 0;
        while i < self.bag.len() && j < other.bag.len() {
            match self.bag[i].0.cmp(&other.bag[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    common += self.bag[i].1.min(other.bag[j].1);
                    i += 1;
                    j += 1;
                }
            }
        }
        common
    }
}

/// Normalized gloss overlap: multiset intersection size over the summed bag
/// sizes, in [0, 0.5].
pub fn lesk_similarity(a: &SenseSignature, b: &SenseSignature) -> f64 {
    let denom = a.total + b.total;
    if denom == 0 {
        return 0.0;
    }
    a.intersection(b) as f64 / denom as f64
}

/// Precomputed signatures for every synset in the store.
pub struct SignatureBank {
    bags: HashMap<SenseId, SenseSignature>,
}

impl SignatureBank {
    pub fn build(store: &LexicalStore) -> SignatureBank {
        let ids: Vec<SenseId> = store.synsets().map(|s| s.id).collect();
        let bags = ids
            .into_par_iter()
            .map(|id| (id, SenseSignature::for_sense(store, id)))
            .collect();
        SignatureBank { bags }
    }

    pub fn signature(&self, id: SenseId) -> &SenseSignature {
        &self.bags[&id]
    }
}

/// Counters accumulated across both stages.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct TaggingReport {
    pub total_tokens: usize,
    pub content_tokens: usize,
    /// Tokens that arrived with a sense tag.
    pub pre_tagged: usize,
    /// Tokens tagged by the stage-1 overlap score.
    pub stage1_tagged: usize,
    /// Stage-1 decisions that fell back to the first sense.
    pub stage1_fallbacks: usize,
    /// Originally-untagged positions whose tag changed in stage 2.
    pub stage2_changed: usize,
    /// Content tokens with no WordNet senses (left untagged).
    pub untaggable: usize,
}

impl fmt::Display for TaggingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tokens={}", self.total_tokens)?;
        writeln!(f, "content_tokens={}", self.content_tokens)?;
        writeln!(f, "pre_tagged={}", self.pre_tagged)?;
        writeln!(f, "stage1_tagged={}", self.stage1_tagged)?;
        writeln!(f, "stage1_fallbacks={}", self.stage1_fallbacks)?;
        writeln!(f, "stage2_changed={}", self.stage2_changed)?;
        write!(f, "untaggable={}", self.untaggable)
    }
}

fn candidate_senses(token: &TaggedToken, store: &LexicalStore) -> Vec<SenseId> {
    match (&token.lemma, token.pos) {
        (Some(lemma), Some(pos)) => store.senses_of(lemma, Some(pos)),
        _ => Vec::new(),
    }
}

/// Stage 1 for one sentence. Every untagged content token with at least one
/// sense receives one: the argmax of summed signature overlaps against the
/// sentence context, first sense on ties or an all-zero score. Context
/// scores are computed against the sentence as it arrived.
pub fn stage1_disambiguate(
    sentence: &TaggedSentence,
    store: &LexicalStore,
    bank: &SignatureBank,
) -> TaggedSentence {
    let (tagged, _) = stage1_with_stats(sentence, store, bank);
    tagged
}

fn stage1_with_stats(
    sentence: &TaggedSentence,
    store: &LexicalStore,
    bank: &SignatureBank,
) -> (TaggedSentence, TaggingReport) {
    let mut report = TaggingReport {
        total_tokens: sentence.tokens.len(),
        ..TaggingReport::default()
    };

    // context contribution per token: the tagged sense's signature, or all
    // candidate signatures for untagged tokens
    enum Contribution {
        Tagged(SenseId),
        Candidates(Vec<SenseId>),
        None,
    }
    let contributions: Vec<Contribution> = sentence
        .tokens
        .iter()
        .map(|token| match token.sense {
            Some(s) => Contribution::Tagged(s),
            None => {
                let senses = candidate_senses(token, store);
                if senses.is_empty() {
                    Contribution::None
                } else {
                    Contribution::Candidates(senses)
                }
            }
        })
        .collect();

    let mut tokens = sentence.tokens.clone();
    for i in 0..tokens.len() {
        let token = &tokens[i];
        if token.is_content() {
            report.content_tokens += 1;
        }
        if token.sense.is_some() {
            report.pre_tagged += 1;
            continue;
        }
        let candidates = candidate_senses(token, store);
        if candidates.is_empty() {
            if token.is_content() {
                report.untaggable += 1;
            }
            continue;
        }

        let mut best_idx = 0usize;
        let mut best_score = f64::NEG_INFINITY;
        for (c, candidate) in candidates.iter().enumerate() {
            let sig = bank.signature(*candidate);
            let mut score = 0.0;
            for (j, contribution) in contributions.iter().enumerate() {
                if j == i {
                    continue;
                }
                match contribution {
                    Contribution::Tagged(s) => {
                        score += lesk_similarity(sig, bank.signature(*s));
                    }
                    Contribution::Candidates(senses) => {
                        for s in senses {
                            score += lesk_similarity(sig, bank.signature(*s));
                        }
                    }
                    Contribution::None => {}
                }
            }
            if score > best_score {
                best_score = score;
                best_idx = c;
            }
        }
        // an all-zero score row degenerates to the first sense, which is
        // also where ties land via the strict comparison above
        if best_score <= 0.0 {
            best_idx = 0;
            report.stage1_fallbacks += 1;
        }
        tokens[i].sense = Some(candidates[best_idx]);
        report.stage1_tagged += 1;
    }

    (
        TaggedSentence {
            tokens,
            doc_id: sentence.doc_id.clone(),
        },
        report,
    )
}

fn merge_reports(mut acc: TaggingReport, other: &TaggingReport) -> TaggingReport {
    acc.total_tokens += other.total_tokens;
    acc.content_tokens += other.content_tokens;
    acc.pre_tagged += other.pre_tagged;
    acc.stage1_tagged += other.stage1_tagged;
    acc.stage1_fallbacks += other.stage1_fallbacks;
    acc.stage2_changed += other.stage2_changed;
    acc.untaggable += other.untaggable;
    acc
}

/// Stage 1 over a corpus, parallel over sentences, order preserved.
pub fn stage1_corpus(
    sentences: &[TaggedSentence],
    store: &LexicalStore,
    bank: &SignatureBank,
) -> (Vec<TaggedSentence>, TaggingReport) {
    let results: Vec<(TaggedSentence, TaggingReport)> = sentences
        .par_iter()
        .map(|s| stage1_with_stats(s, store, bank))
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut report = TaggingReport::default();
    for (sentence, r) in results {
        report = merge_reports(report, &r);
        out.push(sentence);
    }
    (out, report)
}

/// Stage 2: re-disambiguate the originally-untagged positions by maximum
/// embedding similarity against the intermediate model. Gold positions are
/// untouched; coverage never decreases. Returns the retagged corpus and the
/// number of changed positions.
pub fn stage2_retag(
    sentences: &[TaggedSentence],
    originally_untagged: &[Vec<usize>],
    intermediate: &EmbeddingTable,
    store: &LexicalStore,
) -> (Vec<TaggedSentence>, usize) {
    assert_eq!(sentences.len(), originally_untagged.len());
    let results: Vec<(TaggedSentence, usize)> = sentences
        .par_iter()
        .zip(originally_untagged.par_iter())
        .map(|(sentence, positions)| {
            let mut tokens = sentence.tokens.clone();
            let mut changed = 0usize;
            for &i in positions {
                if tokens[i].sense.is_none() {
                    continue; // untaggable then, untaggable now
                }
                let context: Vec<TaggedToken> = tokens
                    .iter()
                    .enumerate()
                    .filter(|(j, t)| *j != i && t.is_content())
                    .map(|(_, t)| t.clone())
                    .collect();
                if let Ok(prediction) =
                    disambiguate(&tokens[i], &context, intermediate, store, WsdMode::MaxS)
                {
                    if tokens[i].sense != Some(prediction.chosen) {
                        changed += 1;
                    }
                    tokens[i].sense = Some(prediction.chosen);
                }
            }
            (
                TaggedSentence {
                    tokens,
                    doc_id: sentence.doc_id.clone(),
                },
                changed,
            )
        })
        .collect();
    let mut out = Vec::with_capacity(results.len());
    let mut changed = 0;
    for (sentence, c) in results {
        changed += c;
        out.push(sentence);
    }
    (out, changed)
}

/// Extract the sense-token sequences of annotated sentences (tokens without
/// a sense are dropped).
pub fn sense_sequences(sentences: &[TaggedSentence]) -> Vec<Vec<SenseId>> {
    sentences
        .iter()
        .map(|s| s.tokens.iter().filter_map(|t| t.sense).collect())
        .collect()
}

/// The full two-stage pass: stage 1, intermediate model at the given
/// configuration, stage 2 on the originally-untagged positions.
pub fn two_stage(
    sentences: &[TaggedSentence],
    store: &LexicalStore,
    bank: &SignatureBank,
    intermediate_config: &TrainConfig,
) -> Result<(Vec<TaggedSentence>, TaggingReport), TrainError> {
    let originally_untagged: Vec<Vec<usize>> = sentences
        .iter()
        .map(|s| {
            s.tokens
                .iter()
                .enumerate()
                .filter(|(_, t)| t.sense.is_none())
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let (stage1, mut report) = stage1_corpus(sentences, store, bank);
    let intermediate = train::train(&sense_sequences(&stage1), intermediate_config)?;
    let (stage2, changed) = stage2_retag(&stage1, &originally_untagged, &intermediate, store);
    report.stage2_changed = changed;
    Ok((stage2, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(words: &[&str]) -> SenseSignature {
        SenseSignature::from_lemmas(None, words.iter().map(|w| w.to_string()))
    }

    #[test]
    fn identical_bags_score_half() {
        let a = sig(&["consent", "give", "permission"]);
        assert_eq!(lesk_similarity(&a, &a), 0.5);
    }

    #[test]
    fn disjoint_bags_score_zero() {
        let a = sig(&["consent", "give"]);
        let b = sig(&["river", "water"]);
        assert_eq!(lesk_similarity(&a, &b), 0.0);
    }

    #[test]
    fn hand_computed_overlap() {
        // {consent, give, permission} vs {give, allow}: 1 / (3 + 2) = 0.2
        let a = sig(&["consent", "give", "permission"]);
        let b = sig(&["give", "allow"]);
        assert!((lesk_similarity(&a, &b) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn multiset_counts_matter() {
        let a = sig(&["give", "give", "take"]);
        let b = sig(&["give", "give"]);
        // intersection = 2, sizes 3 + 2
        assert!((lesk_similarity(&a, &b) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn empty_bags_are_zero_not_nan() {
        let a = sig(&[]);
        assert_eq!(lesk_similarity(&a, &a), 0.0);
    }
}
