//! Word similarity with relation-averaged sense vectors and Spearman
//! correlation against benchmark gold scores.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::WordPairRecord;
use crate::similarity::{avg_sim, global_sim, max_sim, SenseVectorSet};
use crate::train::EmbeddingTable;
use crate::wordnet::{LexicalStore, Pos, RelationType, SenseId};

/// Pairwise measure choices for the word-similarity task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMeasure {
    AvgSim,
    MaxSim,
    GlobalSim,
}

impl PairMeasure {
    pub fn label(self) -> &'static str {
        match self {
            PairMeasure::AvgSim => "AvgSim",
            PairMeasure::MaxSim => "MaxSim",
            PairMeasure::GlobalSim => "globalSim",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum WordsimError {
    #[error("no sense of {0:?} has a vector in the table")]
    OutOfVocabulary(String),
    #[error("correlation needs at least 2 scored pairs, found {0}")]
    TooFewPairs(usize),
    #[error("correlation undefined: {0} list is constant")]
    ConstantList(&'static str),
    #[error("rank lists have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("every pair was out of vocabulary")]
    AllPairsOov,
}

/// Per-sense vectors averaged with the vectors of the sense's relation
/// targets over the word-similarity relation set. A sense with no in-table
/// targets keeps its own vector.
pub fn relation_averaged_vectors(
    word: &str,
    table: &EmbeddingTable,
    store: &LexicalStore,
    relations: &[RelationType],
) -> Result<SenseVectorSet, WordsimError> {
    let senses = lookup_senses(word, store);
    let mut vectors: Vec<(SenseId, Vec<f32>)> = Vec::new();
    for id in senses {
        let Some(own) = table.vector(id) else { continue };
        let mut sum: Vec<f64> = own.iter().map(|x| *x as f64).collect();
        let mut n = 1usize;
        if let Ok(targets) = store.related(id, relations) {
            for target in targets {
                if let Some(tv) = table.vector(target) {
                    for (acc, x) in sum.iter_mut().zip(tv.iter()) {
                        *acc += *x as f64;
                    }
                    n += 1;
                }
            }
        }
        let averaged: Vec<f32> = sum.iter().map(|x| (*x / n as f64) as f32).collect();
        vectors.push((id, averaged));
    }
    if vectors.is_empty() {
        return Err(WordsimError::OutOfVocabulary(word.to_string()));
    }
    Ok(SenseVectorSet {
        word: word.to_string(),
        vectors,
    })
}

/// Surface form first, then morphy base forms per POS (n, v, a, r order),
/// deduplicated, preserving per-POS sense order.
fn lookup_senses(word: &str, store: &LexicalStore) -> Vec<SenseId> {
    let direct = store.senses_of(word, None);
    if !direct.is_empty() {
        return direct;
    }
    let mut out: Vec<SenseId> = Vec::new();
    for pos in Pos::LOOKUP {
        for base in store.morphy(word, pos) {
            for id in store.senses_of(&base, Some(pos)) {
                if !out.contains(&id) {
                    out.push(id);
                }
            }
        }
    }
    out
}

/// Score one word pair under the chosen measure over relation-averaged
/// vector sets.
pub fn score_pair(
    a: &str,
    b: &str,
    measure: PairMeasure,
    table: &EmbeddingTable,
    store: &LexicalStore,
    relations: &[RelationType],
) -> Result<f64, WordsimError> {
    let wa = relation_averaged_vectors(a, table, store, relations)?;
    let wb = relation_averaged_vectors(b, table, store, relations)?;
    let score = match measure {
        PairMeasure::AvgSim => avg_sim(&wa, &wb),
        PairMeasure::MaxSim => max_sim(&wa, &wb),
        PairMeasure::GlobalSim => global_sim(&wa, &wb),
    };
    Ok(score.expect("vector sets are non-empty by construction"))
}

/// Fractional ranks with ties averaged.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*a].partial_cmp(&values[*b]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // average rank for the tie block, 1-based
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for k in i..=j {
            out[order[k]] = rank;
        }
        i = j + 1;
    }
    out
}

fn has_ties(values: &[f64]) -> bool {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.windows(2).any(|w| w[0] == w[1])
}

/// Spearman rank correlation: Pearson correlation of fractional ranks, with
/// ties receiving averaged ranks. Tie-free lists use the equivalent
/// rank-difference form `1 - 6 sum(d^2) / (n(n^2-1))`, which is exact on
/// monotone input. A constant list makes the correlation undefined and is
/// reported as an error, not as zero.
pub fn spearman(predicted: &[f64], gold: &[f64]) -> Result<f64, WordsimError> {
    if predicted.len() != gold.len() {
        return Err(WordsimError::LengthMismatch(predicted.len(), gold.len()));
    }
    if predicted.len() < 2 {
        return Err(WordsimError::TooFewPairs(predicted.len()));
    }
    let rp = ranks(predicted);
    let rg = ranks(gold);
    if !has_ties(predicted) && !has_ties(gold) {
        let n = rp.len() as f64;
        let sum_d2: f64 = rp
            .iter()
            .zip(rg.iter())
            .map(|(p, g)| (p - g) * (p - g))
            .sum();
        return Ok(1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0)));
    }
    let n = rp.len() as f64;
    let mean_p = rp.iter().sum::<f64>() / n;
    let mean_g = rg.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_p = 0.0;
    let mut var_g = 0.0;
    for (p, g) in rp.iter().zip(rg.iter()) {
        cov += (p - mean_p) * (g - mean_g);
        var_p += (p - mean_p) * (p - mean_p);
        var_g += (g - mean_g) * (g - mean_g);
    }
    if var_p == 0.0 {
        return Err(WordsimError::ConstantList("predicted"));
    }
    if var_g == 0.0 {
        return Err(WordsimError::ConstantList("gold"));
    }
    Ok(cov / (var_p.sqrt() * var_g.sqrt()))
}

/// One scored pair for the report file.
#[derive(Debug, Clone)]
pub struct RankedPair {
    pub record: WordPairRecord,
    pub predicted: f64,
}

#[derive(Debug)]
pub struct WordsimReport {
    pub dataset: String,
    pub measure: PairMeasure,
    /// Spearman rho times 100 over the scored pairs.
    pub rho_x100: f64,
    pub pairs: Vec<RankedPair>,
    pub skipped: usize,
}

/// Evaluate a benchmark: score every pair, skip and count out-of-vocabulary
/// pairs, and correlate the rest against gold.
pub fn evaluate_wordsim(
    dataset_name: &str,
    records: &[WordPairRecord],
    measure: PairMeasure,
    table: &EmbeddingTable,
    store: &LexicalStore,
    relations: &[RelationType],
) -> Result<WordsimReport, WordsimError> {
    let scored: Vec<Option<RankedPair>> = records
        .par_iter()
        .map(|record| {
            score_pair(&record.word_a, &record.word_b, measure, table, store, relations)
                .ok()
                .map(|predicted| RankedPair {
                    record: record.clone(),
                    predicted,
                })
        })
        .collect();
    let skipped = scored.iter().filter(|s| s.is_none()).count();
    let pairs: Vec<RankedPair> = scored.into_iter().flatten().collect();
    if pairs.is_empty() {
        return Err(WordsimError::AllPairsOov);
    }
    let predicted: Vec<f64> = pairs.iter().map(|p| p.predicted).collect();
    let gold: Vec<f64> = pairs.iter().map(|p| p.record.gold).collect();
    let rho = spearman(&predicted, &gold)?;
    Ok(WordsimReport {
        dataset: dataset_name.to_string(),
        measure,
        rho_x100: rho * 100.0,
        pairs,
        skipped,
    })
}

/// Write the report file: one line per pair `word_a word_b gold predicted`,
/// then `rho_x100=<value> pairs=<n> skipped=<k>`.
pub fn write_wordsim_report(
    report: &WordsimReport,
    path: impl AsRef<Path>,
) -> std::io::Result<()> {
    let mut out = std::fs::File::create(path)?;
    for pair in &report.pairs {
        writeln!(
            out,
            "{} {} {} {:.6}",
            pair.record.word_a, pair.record.word_b, pair.record.gold, pair.predicted
        )?;
    }
    writeln!(
        out,
        "rho_x100={:.2} pairs={} skipped={}",
        report.rho_x100,
        report.pairs.len(),
        report.skipped
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_monotone_is_exactly_one() {
        let gold = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [0.1, 0.4, 0.5, 0.8, 0.99];
        assert_eq!(spearman(&up, &gold).unwrap(), 1.0);
        let down = [0.99, 0.8, 0.5, 0.4, 0.1];
        assert_eq!(spearman(&down, &gold).unwrap(), -1.0);
    }

    #[test]
    fn spearman_handles_ties_with_average_ranks() {
        // hand computation: predicted (1, 2, 2, 4, 5) -> ranks (1, 2.5, 2.5, 4, 5)
        let predicted = [1.0, 2.0, 2.0, 4.0, 5.0];
        let gold = [1.0, 2.0, 3.0, 4.0, 5.0];
        let rho = spearman(&predicted, &gold).unwrap();
        // ranks_p = (1, 2.5, 2.5, 4, 5), ranks_g = (1..5); Pearson by hand:
        // cov = 9.5, var_p = 9.5, var_g = 10 -> rho = 9.5/sqrt(95)
        assert!((rho - 9.5 / 95.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn spearman_invariant_under_monotone_transform() {
        let gold = [0.3, -0.2, 0.9, 0.1];
        let predicted = [0.25f64, 0.01, 0.8, 0.17];
        let transformed: Vec<f64> = predicted.iter().map(|x| (3.0 * x).exp()).collect();
        let a = spearman(&predicted, &gold).unwrap();
        let b = spearman(&transformed, &gold).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn spearman_degenerate_inputs_error() {
        assert_eq!(
            spearman(&[1.0], &[1.0]).unwrap_err(),
            WordsimError::TooFewPairs(1)
        );
        assert_eq!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            WordsimError::ConstantList("predicted")
        );
        assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn rank_assignment_with_tie_block() {
        let r = ranks(&[10.0, 20.0, 20.0, 30.0]);
        assert_eq!(r, vec![1.0, 2.5, 2.5, 4.0]);
    }
}
