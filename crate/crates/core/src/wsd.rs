//! Embedding-based word sense disambiguation with WordNet-first-sense
//! backoff, and the benchmark evaluator producing F1 with per-POS and
//! combined breakdowns.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{EvalDataset, TaggedToken};
use crate::similarity::{avg_sim_s, max_sim_s, sum_avg_sim_s, sum_max_sim_s, SenseVectorSet};
use crate::train::EmbeddingTable;
use crate::wordnet::{LexicalStore, Pos, SenseId};

/// Similarity concept for one run: AvgS pairs AvgSimS with SumAvgSimS, MaxS
/// pairs MaxSimS with SumMaxSimS. A run never mixes the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsdMode {
    AvgS,
    MaxS,
}

impl WsdMode {
    pub fn label(self) -> &'static str {
        match self {
            WsdMode::AvgS => "AvgS",
            WsdMode::MaxS => "MaxS",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WsdPrediction {
    pub instance_id: String,
    pub chosen: SenseId,
    pub score: f64,
    pub backoff_used: bool,
}

#[derive(Debug, Error)]
pub enum WsdError {
    #[error("target {lemma:?} ({pos:?}) has no WordNet senses")]
    UnresolvableTarget { lemma: String, pos: Option<Pos> },
    #[error("target token has no lemma or POS")]
    IncompleteTarget,
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Disambiguate one target token against its sentential context.
///
/// Candidates are the target's senses that have vectors; one context word
/// scores with AvgSimS/MaxSimS, several with the Sum variants. No context,
/// no scoring candidate, or no positive score falls back to the WordNet
/// first sense with `backoff_used` set. Ties break toward the lower sense
/// number.
pub fn disambiguate(
    target: &TaggedToken,
    context: &[TaggedToken],
    table: &EmbeddingTable,
    store: &LexicalStore,
    mode: WsdMode,
) -> Result<WsdPrediction, WsdError> {
    let (lemma, pos) = match (&target.lemma, target.pos) {
        (Some(l), Some(p)) => (l.as_str(), p),
        _ => return Err(WsdError::IncompleteTarget),
    };
    let senses = store.senses_of(lemma, Some(pos));
    if senses.is_empty() {
        return Err(WsdError::UnresolvableTarget {
            lemma: lemma.to_string(),
            pos: Some(pos),
        });
    }
    let first = senses[0];
    let instance_id = target.token_id.clone().unwrap_or_default();

    let context_sets: Vec<SenseVectorSet> = context
        .iter()
        .filter(|t| t.is_content())
        .filter_map(|t| {
            SenseVectorSet::for_word(t.lemma.as_deref().unwrap_or(""), t.pos, table, store)
        })
        .collect();
    let candidates: Vec<(SenseId, &[f32])> = senses
        .iter()
        .filter_map(|id| table.vector(*id).map(|v| (*id, v)))
        .collect();

    let backoff = |score: f64| WsdPrediction {
        instance_id: instance_id.clone(),
        chosen: first,
        score,
        backoff_used: true,
    };
    if context_sets.is_empty() || candidates.is_empty() {
        return Ok(backoff(0.0));
    }

    let mut best: Option<(SenseId, f64)> = None;
    for (id, vector) in &candidates {
        let score = if context_sets.len() == 1 {
            match mode {
                WsdMode::AvgS => avg_sim_s(vector, &context_sets[0]),
                WsdMode::MaxS => max_sim_s(vector, &context_sets[0]),
            }
        } else {
            match mode {
                WsdMode::AvgS => sum_avg_sim_s(vector, &context_sets),
                WsdMode::MaxS => sum_max_sim_s(vector, &context_sets),
            }
        }
        .expect("context sets are non-empty by construction");
        // strict comparison keeps the earliest (lowest sense number) on ties
        if best.is_none() || score > best.unwrap().1 {
            best = Some((*id, score));
        }
    }
    let (chosen, score) = best.unwrap();
    if score <= 0.0 {
        return Ok(backoff(score));
    }
    Ok(WsdPrediction {
        instance_id,
        chosen,
        score,
        backoff_used: false,
    })
}

/// Precision/recall/F1 row, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrfRow {
    pub attempted: usize,
    pub correct: usize,
    pub total_gold: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfRow {
    pub fn compute(attempted: usize, correct: usize, total_gold: usize) -> PrfRow {
        let precision = if attempted > 0 {
            100.0 * correct as f64 / attempted as f64
        } else {
            0.0
        };
        let recall = if total_gold > 0 {
            100.0 * correct as f64 / total_gold as f64
        } else {
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        PrfRow {
            attempted,
            correct,
            total_gold,
            precision,
            recall,
            f1,
        }
    }
}

/// Evaluation report: overall row plus per-POS rows, the per-instance
/// prediction log, and exclusion counts.
#[derive(Debug)]
pub struct WsdReport {
    pub dataset: String,
    pub system: String,
    pub overall: PrfRow,
    pub per_pos: Vec<(&'static str, PrfRow)>,
    pub predictions: Vec<(WsdPrediction, bool)>,
    /// Instances with no resolvable gold sense (excluded entirely).
    pub excluded_gold: usize,
    /// Instances whose target lemma has no WordNet senses (count against
    /// recall only).
    pub unresolvable_targets: usize,
    pub notes: Vec<String>,
}

fn pos_label(pos: Option<Pos>) -> &'static str {
    match pos.map(Pos::index_pos) {
        Some(Pos::Noun) => "Nouns",
        Some(Pos::Verb) => "Verbs",
        Some(Pos::Adj) => "Adj.",
        Some(Pos::Adv) => "Adv.",
        _ => "Other",
    }
}

enum InstanceOutcome {
    Predicted(Option<Pos>, WsdPrediction, bool),
    Unresolvable(Option<Pos>),
}

/// Score one run over one or more datasets (several datasets form the
/// concatenated "ALL" evaluation, a micro-average over instances). Pass the
/// WN-first-sense system by supplying an empty table, or use
/// [`wn_first_sense_baseline`].
pub fn evaluate_wsd(
    datasets: &[&EvalDataset],
    table: &EmbeddingTable,
    store: &LexicalStore,
    mode: WsdMode,
) -> WsdReport {
    let system = format!("embeddings-{}", mode.label());
    evaluate_with(datasets, store, system, |target, context| {
        disambiguate(target, context, table, store, mode)
    })
}

/// Answer every instance with the WordNet first sense.
pub fn wn_first_sense_baseline(datasets: &[&EvalDataset], store: &LexicalStore) -> WsdReport {
    evaluate_with(datasets, store, "WN-1st-sense".to_string(), |target, _| {
        let (lemma, pos) = match (&target.lemma, target.pos) {
            (Some(l), Some(p)) => (l.as_str(), p),
            _ => return Err(WsdError::IncompleteTarget),
        };
        match store.first_sense(lemma, pos) {
            Some(first) => Ok(WsdPrediction {
                instance_id: target.token_id.clone().unwrap_or_default(),
                chosen: first,
                score: 0.0,
                backoff_used: true,
            }),
            None => Err(WsdError::UnresolvableTarget {
                lemma: lemma.to_string(),
                pos: Some(pos),
            }),
        }
    })
}

fn evaluate_with<F>(
    datasets: &[&EvalDataset],
    _store: &LexicalStore,
    system: String,
    predict: F,
) -> WsdReport
where
    F: Fn(&TaggedToken, &[TaggedToken]) -> Result<WsdPrediction, WsdError> + Sync,
{
    let mut excluded_gold = 0usize;
    let mut notes = Vec::new();

    // (sentence, token index, gold set, pos) for every scorable instance
    let mut outcomes: Vec<InstanceOutcome> = Vec::new();
    for dataset in datasets {
        let sentence_outcomes: Vec<Vec<InstanceOutcome>> = dataset
            .sentences
            .par_iter()
            .map(|sentence| {
                let mut local = Vec::new();
                for (i, token) in sentence.tokens.iter().enumerate() {
                    let Some(id) = &token.token_id else { continue };
                    let Some(gold) = dataset.gold.get(id) else { continue };
                    if gold.is_empty() {
                        continue; // excluded: counted below from the dataset
                    }
                    let context: Vec<TaggedToken> = sentence
                        .tokens
                        .iter()
                        .enumerate()
                        .filter(|(j, t)| *j != i && t.is_content())
                        .map(|(_, t)| t.clone())
                        .collect();
                    match predict(token, &context) {
                        Ok(prediction) => {
                            let correct = gold.contains(&prediction.chosen);
                            local.push(InstanceOutcome::Predicted(
                                token.pos,
                                prediction,
                                correct,
                            ));
                        }
                        Err(_) => local.push(InstanceOutcome::Unresolvable(token.pos)),
                    }
                }
                local
            })
            .collect();
        outcomes.extend(sentence_outcomes.into_iter().flatten());
        excluded_gold += dataset.unresolvable_instances.len();
        if dataset.unresolved_key_count > 0 {
            notes.push(format!(
                "{}: {} gold keys did not resolve",
                dataset.name, dataset.unresolved_key_count
            ));
        }
    }

    let mut per_pos_counts: HashMap<&'static str, (usize, usize, usize)> = HashMap::new();
    let mut attempted = 0;
    let mut correct = 0;
    let mut total_gold = 0;
    let mut unresolvable_targets = 0;
    let mut predictions = Vec::new();
    for outcome in outcomes {
        match outcome {
            InstanceOutcome::Predicted(pos, prediction, ok) => {
                attempted += 1;
                total_gold += 1;
                if ok {
                    correct += 1;
                }
                let entry = per_pos_counts.entry(pos_label(pos)).or_default();
                entry.0 += 1;
                entry.1 += ok as usize;
                entry.2 += 1;
                predictions.push((prediction, ok));
            }
            InstanceOutcome::Unresolvable(pos) => {
                total_gold += 1;
                unresolvable_targets += 1;
                per_pos_counts.entry(pos_label(pos)).or_default().2 += 1;
            }
        }
    }

    let per_pos = ["Nouns", "Verbs", "Adj.", "Adv.", "Other"]
        .into_iter()
        .filter_map(|label| {
            per_pos_counts
                .get(label)
                .map(|(a, c, t)| (label, PrfRow::compute(*a, *c, *t)))
        })
        .collect();

    let dataset = datasets
        .iter()
        .map(|d| d.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    WsdReport {
        dataset,
        system,
        overall: PrfRow::compute(attempted, correct, total_gold),
        per_pos,
        predictions,
        excluded_gold,
        unresolvable_targets,
        notes,
    }
}

/// Write the per-instance report file: one line per instance
/// `instance_id chosen_sense score backoff_flag correct_flag`, followed by a
/// summary block of P/R/F1 rows.
pub fn write_wsd_report(report: &WsdReport, path: impl AsRef<Path>) -> Result<(), WsdError> {
    let path = path.as_ref();
    let mut out = std::fs::File::create(path).map_err(|e| WsdError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    (|| -> std::io::Result<()> {
        for (p, correct) in &report.predictions {
            writeln!(
                out,
                "{} {} {:.6} {} {}",
                p.instance_id,
                p.chosen,
                p.score,
                p.backoff_used as u8,
                *correct as u8
            )?;
        }
        writeln!(out, "# dataset={} system={}", report.dataset, report.system)?;
        writeln!(
            out,
            "# excluded_gold={} unresolvable_targets={}",
            report.excluded_gold, report.unresolvable_targets
        )?;
        for note in &report.notes {
            writeln!(out, "# note: {note}")?;
        }
        writeln!(out, "# label attempted correct total P R F1")?;
        let mut rows = vec![("ALL", &report.overall)];
        rows.extend(report.per_pos.iter().map(|(l, r)| (*l, r)));
        for (label, row) in rows {
            writeln!(
                out,
                "# {} {} {} {} {:.2} {:.2} {:.2}",
                label, row.attempted, row.correct, row.total_gold, row.precision, row.recall,
                row.f1
            )?;
        }
        Ok(())
    })()
    .map_err(|e| WsdError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prf_arithmetic_matches_hand_computation() {
        // 4 gold, 3 attempted, 2 correct
        let row = PrfRow::compute(3, 2, 4);
        assert!((row.precision - 66.66666666666667).abs() < 1e-9);
        assert!((row.recall - 50.0).abs() < 1e-9);
        assert!((row.f1 - 57.142857142857146).abs() < 1e-9);
    }

    #[test]
    fn prf_all_correct_and_half_correct() {
        let perfect = PrfRow::compute(6, 6, 6);
        assert_eq!(perfect.f1, 100.0);
        let half = PrfRow::compute(6, 3, 6);
        assert_eq!(half.f1, 50.0);
    }

    #[test]
    fn prf_zero_cases() {
        let none = PrfRow::compute(0, 0, 4);
        assert_eq!(none.precision, 0.0);
        assert_eq!(none.f1, 0.0);
    }
}
