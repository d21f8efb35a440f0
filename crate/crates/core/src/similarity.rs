//! Distributional similarity measures over multi-sense embeddings: cosine,
//! the four prior pairwise measures plus the context-averaging variants and
//! global similarity, and the four sense-specific measures with their
//! cumulative (multi-context) forms.

use thiserror::Error;

use crate::train::EmbeddingTable;
use crate::wordnet::{LexicalStore, Pos, SenseId};

/// The sense vectors of one word, in WordNet sense order.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseVectorSet {
    pub word: String,
    pub vectors: Vec<(SenseId, Vec<f32>)>,
}

impl SenseVectorSet {
    /// Collect the in-table sense vectors of a word. Returns `None` when no
    /// sense of the word has a vector.
    pub fn for_word(
        word: &str,
        pos: Option<Pos>,
        table: &EmbeddingTable,
        store: &LexicalStore,
    ) -> Option<SenseVectorSet> {
        let vectors: Vec<(SenseId, Vec<f32>)> = store
            .senses_of(word, pos)
            .into_iter()
            .filter_map(|id| table.vector(id).map(|v| (id, v.to_vec())))
            .collect();
        if vectors.is_empty() {
            None
        } else {
            Some(SenseVectorSet {
                word: word.to_string(),
                vectors,
            })
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Componentwise mean of all sense vectors.
    pub fn mean_vector(&self) -> Vec<f64> {
        mean_of(self.vectors.iter().map(|(_, v)| v.as_slice()))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("similarity measure over an empty sense set for {0:?}")]
    EmptySenseSet(String),
    #[error("similarity measure with no context words")]
    EmptyContext,
}

/// Cosine similarity; a zero-norm operand yields 0 by convention so that
/// "no similarity" backoff logic treats it uniformly.
pub fn cosine(u: &[f32], v: &[f32]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let mut dot = 0.0f64;
    let mut nu = 0.0f64;
    let mut nv = 0.0f64;
    for (a, b) in u.iter().zip(v.iter()) {
        let (a, b) = (*a as f64, *b as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu.sqrt() * nv.sqrt())
    }
}

fn cosine_f64(u: &[f64], v: &[f32]) -> f64 {
    let mut dot = 0.0f64;
    let mut nu = 0.0f64;
    let mut nv = 0.0f64;
    for (a, b) in u.iter().zip(v.iter()) {
        let b = *b as f64;
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu.sqrt() * nv.sqrt())
    }
}

fn mean_of<'a>(vecs: impl Iterator<Item = &'a [f32]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for v in vecs {
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        for (acc, x) in sum.iter_mut().zip(v.iter()) {
            *acc += *x as f64;
        }
        n += 1;
    }
    if n > 0 {
        for acc in sum.iter_mut() {
            *acc /= n as f64;
        }
    }
    sum
}

fn require_nonempty(set: &SenseVectorSet) -> Result<(), MeasureError> {
    if set.is_empty() {
        Err(MeasureError::EmptySenseSet(set.word.clone()))
    } else {
        Ok(())
    }
}

/// Average pairwise cosine over all sense pairs of the two words.
pub fn avg_sim(w: &SenseVectorSet, w2: &SenseVectorSet) -> Result<f64, MeasureError> {
    require_nonempty(w)?;
    require_nonempty(w2)?;
    let mut sum = 0.0;
    for (_, u) in &w.vectors {
        for (_, v) in &w2.vectors {
            sum += cosine(u, v);
        }
    }
    Ok(sum / (w.len() * w2.len()) as f64)
}

/// Maximum pairwise cosine over all sense pairs of the two words.
pub fn max_sim(w: &SenseVectorSet, w2: &SenseVectorSet) -> Result<f64, MeasureError> {
    require_nonempty(w)?;
    require_nonempty(w2)?;
    let mut best = f64::NEG_INFINITY;
    for (_, u) in &w.vectors {
        for (_, v) in &w2.vectors {
            best = best.max(cosine(u, v));
        }
    }
    Ok(best)
}

/// Mean of all sense vectors of all context words.
fn context_mean(context: &[SenseVectorSet]) -> Vec<f64> {
    mean_of(
        context
            .iter()
            .flat_map(|set| set.vectors.iter().map(|(_, v)| v.as_slice())),
    )
}

/// Context-averaged variant: mean over senses of `w` of the cosine against
/// the averaged context embedding. Falls back to `avg_sim(w, w2)` on an
/// empty context.
pub fn avg_sim_c(
    w: &SenseVectorSet,
    w2: &SenseVectorSet,
    context: &[SenseVectorSet],
) -> Result<f64, MeasureError> {
    require_nonempty(w)?;
    require_nonempty(w2)?;
    if context.iter().all(|c| c.is_empty()) {
        return avg_sim(w, w2);
    }
    let mean = context_mean(context);
    let sum: f64 = w
        .vectors
        .iter()
        .map(|(_, v)| cosine_f64(&mean, v))
        .sum();
    Ok(sum / w.len() as f64)
}

/// Context-averaged variant: maximum over senses of `w` of the cosine
/// against the averaged context embedding. Same fallback as [`avg_sim_c`].
pub fn max_sim_c(
    w: &SenseVectorSet,
    w2: &SenseVectorSet,
    context: &[SenseVectorSet],
) -> Result<f64, MeasureError> {
    require_nonempty(w)?;
    require_nonempty(w2)?;
    if context.iter().all(|c| c.is_empty()) {
        return max_sim(w, w2);
    }
    let mean = context_mean(context);
    Ok(w.vectors
        .iter()
        .map(|(_, v)| cosine_f64(&mean, v))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Cosine of the two words' averaged sense embeddings.
pub fn global_sim(w: &SenseVectorSet, w2: &SenseVectorSet) -> Result<f64, MeasureError> {
    require_nonempty(w)?;
    require_nonempty(w2)?;
    let a = w.mean_vector();
    let b = w2.mean_vector();
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        Ok(0.0)
    } else {
        Ok(dot / (na.sqrt() * nb.sqrt()))
    }
}

/// Average similarity of a specific sense vector against the senses of a
/// paired word.
pub fn avg_sim_s(s: &[f32], w2: &SenseVectorSet) -> Result<f64, MeasureError> {
    require_nonempty(w2)?;
    let sum: f64 = w2.vectors.iter().map(|(_, v)| cosine(s, v)).sum();
    Ok(sum / w2.len() as f64)
}

/// Maximum similarity of a specific sense vector against the senses of a
/// paired word.
pub fn max_sim_s(s: &[f32], w2: &SenseVectorSet) -> Result<f64, MeasureError> {
    require_nonempty(w2)?;
    Ok(w2
        .vectors
        .iter()
        .map(|(_, v)| cosine(s, v))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Cumulative average similarity: the sum of [`avg_sim_s`] over all context
/// words.
pub fn sum_avg_sim_s(s: &[f32], contexts: &[SenseVectorSet]) -> Result<f64, MeasureError> {
    if contexts.is_empty() {
        return Err(MeasureError::EmptyContext);
    }
    let mut total = 0.0;
    for ctx in contexts {
        total += avg_sim_s(s, ctx)?;
    }
    Ok(total)
}

/// Cumulative maximum similarity: the sum of [`max_sim_s`] over all context
/// words.
pub fn sum_max_sim_s(s: &[f32], contexts: &[SenseVectorSet]) -> Result<f64, MeasureError> {
    if contexts.is_empty() {
        return Err(MeasureError::EmptyContext);
    }
    let mut total = 0.0;
    for ctx in contexts {
        total += max_sim_s(s, ctx)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sid(n: u32) -> SenseId {
        SenseId::new(n, Pos::Noun).unwrap()
    }

    fn set(word: &str, vecs: &[&[f32]]) -> SenseVectorSet {
        SenseVectorSet {
            word: word.into(),
            vectors: vecs
                .iter()
                .enumerate()
                .map(|(i, v)| (sid(i as u32 + 1), v.to_vec()))
                .collect(),
        }
    }

    #[test]
    fn cosine_identity_orthogonal_and_hand_value() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]) - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]), 0.0);
        let c = cosine(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
        // 32 / (sqrt(14) * sqrt(77))
        assert!((c - 0.9746318461970762).abs() < 1e-12);
    }

    #[test]
    fn cosine_zero_vector_convention() {
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 2.0]), 0.0);
        assert_eq!(cosine(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn avg_sim_orthogonal_decomposition() {
        let w = set("w", &[&[1.0, 0.0], &[0.0, 1.0]]);
        let w2 = set("w2", &[&[1.0, 0.0]]);
        assert!((avg_sim(&w, &w2).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(max_sim(&w, &w2).unwrap(), 1.0);
    }

    #[test]
    fn identical_single_sense_words_score_one_under_every_measure() {
        let w = set("w", &[&[0.3, 0.4]]);
        let w2 = set("w2", &[&[0.3, 0.4]]);
        assert!((avg_sim(&w, &w2).unwrap() - 1.0).abs() < 1e-12);
        assert!((max_sim(&w, &w2).unwrap() - 1.0).abs() < 1e-12);
        assert!((global_sim(&w, &w2).unwrap() - 1.0).abs() < 1e-12);
        assert!((avg_sim_c(&w, &w2, &[w2.clone()]).unwrap() - 1.0).abs() < 1e-12);
        assert!((max_sim_c(&w, &w2, &[w2.clone()]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_sets_are_errors() {
        let w = set("w", &[&[1.0, 0.0]]);
        let empty = SenseVectorSet {
            word: "none".into(),
            vectors: vec![],
        };
        assert!(avg_sim(&w, &empty).is_err());
        assert!(max_sim(&empty, &w).is_err());
        assert!(global_sim(&w, &empty).is_err());
        assert!(avg_sim_s(&[1.0, 0.0], &empty).is_err());
        assert!(sum_avg_sim_s(&[1.0, 0.0], &[]).is_err());
    }

    #[test]
    fn context_fallback_to_pair_measure() {
        let w = set("w", &[&[1.0, 0.0], &[0.0, 1.0]]);
        let w2 = set("w2", &[&[1.0, 0.0]]);
        assert_eq!(
            avg_sim_c(&w, &w2, &[]).unwrap(),
            avg_sim(&w, &w2).unwrap()
        );
        assert_eq!(
            max_sim_c(&w, &w2, &[]).unwrap(),
            max_sim(&w, &w2).unwrap()
        );
    }

    #[test]
    fn sense_specific_cancellation_and_max() {
        let s = [1.0f32, 0.0];
        let w2 = set("w2", &[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert!(avg_sim_s(&s, &w2).unwrap().abs() < 1e-15);
        assert_eq!(max_sim_s(&s, &w2).unwrap(), 1.0);
    }

    #[test]
    fn sum_variants_reduce_and_accumulate() {
        let s = [0.6f32, 0.8];
        let ctx = set("c", &[&[0.6, 0.8]]);
        let single = sum_avg_sim_s(&s, std::slice::from_ref(&ctx)).unwrap();
        assert!((single - avg_sim_s(&s, &ctx).unwrap()).abs() < 1e-15);
        let many = vec![ctx.clone(), ctx.clone(), ctx.clone()];
        assert!((sum_max_sim_s(&s, &many).unwrap() - 3.0).abs() < 1e-12);
    }
}
