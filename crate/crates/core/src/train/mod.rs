//! Skip-gram training with hierarchical softmax over sense-token sentences.
//!
//! For every surviving token, each token within a per-position window of
//! random radius in [1, window] predicts it through sigmoid decisions along
//! its Huffman path; updates go to the input-side vectors, which form the
//! resulting table. With one worker and a fixed seed the run is
//! bit-deterministic; extra workers share the parameter matrix under relaxed
//! atomic updates.

mod rng;
mod table;
mod vocab;

pub use rng::Lcg;
pub use table::{EmbeddingTable, TableMeta};
pub use vocab::{build_vocabulary, VocabEntry, Vocabulary};

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::wordnet::SenseId;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyVocabulary,
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
    #[error("NaN during training at epoch {epoch}, token index {token_index}")]
    NanDetected { epoch: usize, token_index: u64 },
    #[error("vector for {token} has non-finite components")]
    NonFiniteVector { token: SenseId },
    #[error("{path}:{line}: model format error: {msg}")]
    ModelFormat {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Training hyperparameters. The two presets carry the task-specific values
/// (WSD: 200/40/1/100/1e-5; word similarity: 100/15/1/100/1e-3); the
/// learning-rate schedule and seed are shared defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dimension: usize,
    pub window: usize,
    pub min_count: u64,
    pub epochs: usize,
    pub subsample: f64,
    pub initial_lr: f64,
    pub final_lr: f64,
    pub seed: u64,
    pub workers: usize,
}

impl TrainConfig {
    pub fn wsd_preset() -> TrainConfig {
        TrainConfig {
            dimension: 200,
            window: 40,
            min_count: 1,
            epochs: 100,
            subsample: 1e-5,
            initial_lr: 0.025,
            final_lr: 1e-4,
            seed: 1,
            workers: 1,
        }
    }

    pub fn wordsim_preset() -> TrainConfig {
        TrainConfig {
            dimension: 100,
            window: 15,
            min_count: 1,
            epochs: 100,
            subsample: 1e-3,
            initial_lr: 0.025,
            final_lr: 1e-4,
            seed: 1,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: &str| Err(TrainError::BadConfig(msg.to_string()));
        if self.dimension == 0 {
            return bad("dimension must be positive");
        }
        if self.window == 0 {
            return bad("window must be positive");
        }
        if self.min_count == 0 {
            return bad("min_count must be positive");
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return bad("subsample must be in (0, 1]");
        }
        if !(self.initial_lr > 0.0) || !(self.final_lr > 0.0) {
            return bad("learning rates must be positive");
        }
        if self.final_lr >= self.initial_lr {
            return bad("final_lr must be below initial_lr");
        }
        if self.workers == 0 {
            return bad("workers must be positive");
        }
        Ok(())
    }

    fn digest(&self) -> String {
        format!(
            "d{}w{}m{}e{}s{:e}l{:e}-{:e}x{}",
            self.dimension,
            self.window,
            self.min_count,
            self.epochs,
            self.subsample,
            self.initial_lr,
            self.final_lr,
            self.seed
        )
    }
}

/// Probability of keeping a token of relative frequency `freq/total` at
/// subsampling threshold `t`: min(1, sqrt(t / f_rel)).
pub fn subsample_keep_probability(freq: u64, total: u64, t: f64) -> f64 {
    debug_assert!(total > 0 && t > 0.0 && t <= 1.0);
    let f_rel = freq as f64 / total as f64;
    if f_rel <= t {
        1.0
    } else {
        (t / f_rel).sqrt()
    }
}

/// One progress report per epoch, rendered as
/// `epoch i/N tokens t lr r loss l`.
#[derive(Debug, Clone)]
pub struct Progress {
    pub epoch: usize,
    pub total_epochs: usize,
    pub tokens: u64,
    pub lr: f64,
    pub loss: f64,
}

impl std::fmt::Display for Progress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "epoch {}/{} tokens {} lr {:.6} loss {:.6}",
            self.epoch, self.total_epochs, self.tokens, self.lr, self.loss
        )
    }
}

// Shared parameter cell: relaxed load/store of f32 bits. Multi-worker
// training accepts approximate consistency; the single-worker path is exact.
struct Cell(AtomicU32);

impl Cell {
    fn get(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn set(&self, x: f32) {
        self.0.store(x.to_bits(), Ordering::Relaxed);
    }

    fn add(&self, x: f32) {
        self.set(self.get() + x);
    }
}

/// Log-likelihood of one hierarchical-softmax path decision sequence:
/// sum over d of ln sigmoid(f_d) when code_d is 0 and ln sigmoid(-f_d) when
/// code_d is 1, with f_d the input/inner-node dot product.
pub fn path_log_likelihood(input: &[f64], nodes: &[Vec<f64>], code: &[bool]) -> f64 {
    debug_assert_eq!(nodes.len(), code.len());
    let mut ll = 0.0;
    for (node, bit) in nodes.iter().zip(code.iter()) {
        let f: f64 = input.iter().zip(node.iter()).map(|(a, b)| a * b).sum();
        let x = if *bit { -f } else { f };
        // ln sigmoid(x), stable for both signs
        ll += if x >= 0.0 {
            -(1.0 + (-x).exp()).ln()
        } else {
            x - (1.0 + x.exp()).ln()
        };
    }
    ll
}

/// Analytic gradients of [`path_log_likelihood`] with respect to the input
/// vector and each inner-node vector.
pub fn path_gradients(
    input: &[f64],
    nodes: &[Vec<f64>],
    code: &[bool],
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut d_input = vec![0.0; input.len()];
    let mut d_nodes = Vec::with_capacity(nodes.len());
    for (node, bit) in nodes.iter().zip(code.iter()) {
        let f: f64 = input.iter().zip(node.iter()).map(|(a, b)| a * b).sum();
        let sigma = 1.0 / (1.0 + (-f).exp());
        let g = (if *bit { 0.0 } else { 1.0 }) - sigma;
        for (acc, n) in d_input.iter_mut().zip(node.iter()) {
            *acc += g * n;
        }
        d_nodes.push(input.iter().map(|x| g * x).collect());
    }
    (d_input, d_nodes)
}

/// Train an embedding table. See the module docs for the update rule; the
/// returned table holds the input-side vectors only, in vocabulary order.
pub fn train(corpus: &[Vec<SenseId>], config: &TrainConfig) -> Result<EmbeddingTable, TrainError> {
    train_with_progress(corpus, config, |_| {})
}

pub fn train_with_progress(
    corpus: &[Vec<SenseId>],
    config: &TrainConfig,
    mut progress: impl FnMut(&Progress),
) -> Result<EmbeddingTable, TrainError> {
    config.validate()?;
    let vocab = build_vocabulary(corpus, config.min_count)?;
    let dim = config.dimension;
    let v = vocab.len();

    // map corpus onto vocabulary indices, dropping out-of-vocabulary tokens
    let sentences: Vec<Vec<u32>> = corpus
        .iter()
        .map(|s| {
            s.iter()
                .filter_map(|t| vocab.index_of(*t).map(|i| i as u32))
                .collect()
        })
        .filter(|s: &Vec<u32>| !s.is_empty())
        .collect();
    let corpus_tokens: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    let total_tokens = (corpus_tokens * config.epochs as u64).max(1);

    // per-token keep probabilities under the subsampling threshold
    let keep: Vec<f64> = (0..v)
        .map(|i| {
            subsample_keep_probability(vocab.entry(i).count, vocab.total_count, config.subsample)
        })
        .collect();

    // seeded init: input vectors uniform in [-0.5/D, 0.5/D], inner nodes zero
    let mut init_rng = Lcg::new(config.seed);
    let input: Vec<Cell> = (0..v * dim)
        .map(|_| Cell(AtomicU32::new(((init_rng.next_f64() as f32 - 0.5) / dim as f32).to_bits())))
        .collect();
    let inner: Vec<Cell> = (0..vocab.inner_count().max(1) * dim)
        .map(|_| Cell(AtomicU32::new(0f32.to_bits())))
        .collect();

    let abort: AtomicBool = AtomicBool::new(false);
    let failure: Mutex<Option<TrainError>> = Mutex::new(None);

    let workers = config.workers.min(sentences.len().max(1));
    // contiguous sentence chunks with their starting token offsets, so the
    // learning-rate schedule is deterministic for any worker count
    let mut chunks: Vec<(usize, usize, u64)> = Vec::new(); // (start, end, token_base)
    {
        let per = sentences.len().div_ceil(workers.max(1)).max(1);
        let mut base = 0u64;
        let mut start = 0usize;
        while start < sentences.len() {
            let end = (start + per).min(sentences.len());
            chunks.push((start, end, base));
            base += sentences[start..end].iter().map(|s| s.len() as u64).sum::<u64>();
            start = end;
        }
    }

    let mut epoch_stats: Vec<(u64, f64, u64)> = Vec::new(); // tokens, loss sum, pairs
    for epoch in 0..config.epochs {
        let stats: Vec<(u64, f64, u64)> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .enumerate()
                .map(|(w, (start, end, token_base))| {
                    let sentences = &sentences;
                    let vocab = &vocab;
                    let keep = &keep;
                    let input = &input;
                    let inner = &inner;
                    let abort = &abort;
                    let failure = &failure;
                    let epoch_base = epoch as u64 * corpus_tokens;
                    scope.spawn(move || {
                        run_worker(WorkerCtx {
                            sentences: &sentences[*start..*end],
                            vocab,
                            keep,
                            input,
                            inner,
                            config,
                            epoch,
                            rng: Lcg::derive(config.seed, epoch as u64, w as u64),
                            token_base: epoch_base + token_base,
                            total_tokens,
                            abort,
                            failure,
                        })
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        if abort.load(Ordering::SeqCst) {
            return Err(failure
                .lock()
                .unwrap()
                .take()
                .unwrap_or(TrainError::BadConfig("training aborted".into())));
        }
        let tokens: u64 = stats.iter().map(|s| s.0).sum();
        let loss_sum: f64 = stats.iter().map(|s| s.1).sum();
        let pairs: u64 = stats.iter().map(|s| s.2).sum();
        epoch_stats.push((tokens, loss_sum, pairs));
        let processed = (epoch as u64 + 1) * corpus_tokens;
        let lr = schedule(config, processed, total_tokens);
        progress(&Progress {
            epoch: epoch + 1,
            total_epochs: config.epochs,
            tokens: processed,
            lr,
            loss: if pairs > 0 { loss_sum / pairs as f64 } else { 0.0 },
        });
    }

    let mut table = EmbeddingTable::new(dim);
    for i in 0..v {
        let vector: Vec<f32> = (0..dim).map(|c| input[i * dim + c].get()).collect();
        table.push(vocab.entry(i).token, &vector);
    }
    table.meta = TableMeta {
        config_digest: config.digest(),
        corpus_digest: format!("{}t{}s", corpus_tokens, sentences.len()),
    };
    table.validate_finite()?;
    Ok(table)
}

fn schedule(config: &TrainConfig, processed: u64, total: u64) -> f64 {
    let frac = (processed as f64 / total as f64).min(1.0);
    config.initial_lr + (config.final_lr - config.initial_lr) * frac
}

struct WorkerCtx<'a> {
    sentences: &'a [Vec<u32>],
    vocab: &'a Vocabulary,
    keep: &'a [f64],
    input: &'a [Cell],
    inner: &'a [Cell],
    config: &'a TrainConfig,
    epoch: usize,
    rng: Lcg,
    token_base: u64,
    total_tokens: u64,
    abort: &'a AtomicBool,
    failure: &'a Mutex<Option<TrainError>>,
}

/// Per-epoch worker pass over a contiguous sentence chunk. Returns
/// (tokens processed, loss sum, pair count).
fn run_worker(mut ctx: WorkerCtx<'_>) -> (u64, f64, u64) {
    let dim = ctx.config.dimension;
    let window = ctx.config.window as u64;
    let mut processed = 0u64;
    let mut loss_sum = 0.0f64;
    let mut pairs = 0u64;
    let mut kept: Vec<u32> = Vec::new();
    let mut hidden_err: Vec<f32> = vec![0.0; dim];

    for sentence in ctx.sentences {
        if ctx.abort.load(Ordering::Relaxed) {
            break;
        }
        kept.clear();
        for &tok in sentence {
            processed += 1;
            if ctx.keep[tok as usize] >= 1.0 || ctx.rng.next_f64() < ctx.keep[tok as usize] {
                kept.push(tok);
            }
        }
        let lr_here = schedule(
            ctx.config,
            ctx.token_base + processed,
            ctx.total_tokens,
        );
        for center in 0..kept.len() {
            let radius = 1 + ctx.rng.below(window) as usize;
            let lo = center.saturating_sub(radius);
            let hi = (center + radius).min(kept.len() - 1);
            let entry = ctx.vocab.entry(kept[center] as usize);
            if entry.code.is_empty() {
                continue;
            }
            for ctx_pos in lo..=hi {
                if ctx_pos == center {
                    continue;
                }
                let l1 = kept[ctx_pos] as usize * dim;
                hidden_err.fill(0.0);
                let mut pair_loss = 0.0f64;
                for (d, bit) in entry.code.iter().enumerate() {
                    let l2 = entry.path[d] as usize * dim;
                    let mut f = 0.0f32;
                    for c in 0..dim {
                        f += ctx.input[l1 + c].get() * ctx.inner[l2 + c].get();
                    }
                    let sigma = 1.0 / (1.0 + (-f).exp());
                    let label = if *bit { 0.0f32 } else { 1.0f32 };
                    let g = (label - sigma) * lr_here as f32;
                    let x = if *bit { -f as f64 } else { f as f64 };
                    pair_loss -= if x >= 0.0 {
                        -(1.0 + (-x).exp()).ln()
                    } else {
                        x - (1.0 + x.exp()).ln()
                    };
                    for c in 0..dim {
                        hidden_err[c] += g * ctx.inner[l2 + c].get();
                    }
                    for c in 0..dim {
                        ctx.inner[l2 + c].add(g * ctx.input[l1 + c].get());
                    }
                }
                if pair_loss.is_nan() {
                    ctx.abort.store(true, Ordering::SeqCst);
                    let mut slot = ctx.failure.lock().unwrap();
                    if slot.is_none() {
                        *slot = Some(TrainError::NanDetected {
                            epoch: ctx.epoch,
                            token_index: ctx.token_base + processed,
                        });
                    }
                    return (processed, loss_sum, pairs);
                }
                loss_sum += pair_loss;
                pairs += 1;
                for c in 0..dim {
                    ctx.input[l1 + c].add(hidden_err[c]);
                }
            }
        }
    }
    (processed, loss_sum, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordnet::Pos;

    fn sid(n: u32) -> SenseId {
        SenseId::new(n, Pos::Noun).unwrap()
    }

    #[test]
    fn subsample_boundaries() {
        // f_rel == t keeps everything
        assert_eq!(subsample_keep_probability(1, 100, 0.01), 1.0);
        // f_rel == 4t halves
        assert!((subsample_keep_probability(4, 100, 0.01) - 0.5).abs() < 1e-12);
        // rare tokens clamp to 1
        assert_eq!(subsample_keep_probability(1, 1000, 0.01), 1.0);
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::wsd_preset().validate().is_ok());
        assert!(TrainConfig::wordsim_preset().validate().is_ok());
        let mut c = TrainConfig::wsd_preset();
        c.final_lr = c.initial_lr;
        assert!(c.validate().is_err());
        let mut c = TrainConfig::wsd_preset();
        c.subsample = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn presets_pin_table_values() {
        let wsd = TrainConfig::wsd_preset();
        assert_eq!(
            (wsd.dimension, wsd.window, wsd.min_count, wsd.epochs, wsd.subsample),
            (200, 40, 1, 100, 1e-5)
        );
        let ws = TrainConfig::wordsim_preset();
        assert_eq!(
            (ws.dimension, ws.window, ws.min_count, ws.epochs, ws.subsample),
            (100, 15, 1, 100, 1e-3)
        );
    }

    fn tiny_corpus() -> Vec<Vec<SenseId>> {
        vec![
            vec![sid(1), sid(2), sid(3)],
            vec![sid(2), sid(1), sid(3), sid(1)],
            vec![sid(3), sid(2)],
        ]
    }

    #[test]
    fn zero_epochs_yields_seeded_init() {
        let mut config = TrainConfig::wsd_preset();
        config.dimension = 4;
        config.epochs = 0;
        config.seed = 9;
        let a = train(&tiny_corpus(), &config).unwrap();
        let b = train(&tiny_corpus(), &config).unwrap();
        assert_eq!(a.vector(sid(1)).unwrap(), b.vector(sid(1)).unwrap());
        // init is the documented uniform range
        for (_, vec) in a.iter() {
            for x in vec {
                assert!(x.abs() <= 0.5 / 4.0 + f32::EPSILON);
            }
        }
    }

    #[test]
    fn single_worker_training_is_bit_deterministic() {
        let mut config = TrainConfig::wsd_preset();
        config.dimension = 8;
        config.window = 2;
        config.epochs = 3;
        config.subsample = 1.0;
        let a = train(&tiny_corpus(), &config).unwrap();
        let b = train(&tiny_corpus(), &config).unwrap();
        for (tok, vec) in a.iter() {
            assert_eq!(vec, b.vector(tok).unwrap());
        }
    }

    #[test]
    fn single_token_corpus_is_a_noop() {
        let mut config = TrainConfig::wsd_preset();
        config.dimension = 4;
        config.epochs = 2;
        let corpus = vec![vec![sid(1), sid(1), sid(1)]];
        let table = train(&corpus, &config).unwrap();
        assert_eq!(table.len(), 1);
        table.validate_finite().unwrap();
    }

    #[test]
    fn progress_line_format() {
        let p = Progress {
            epoch: 3,
            total_epochs: 10,
            tokens: 1234,
            lr: 0.0205,
            loss: 0.6931,
        };
        assert_eq!(p.to_string(), "epoch 3/10 tokens 1234 lr 0.020500 loss 0.693100");
    }

    #[test]
    fn f32_update_tracks_f64_gradient() {
        // one path decision: f32 loop update vs the f64 analytic gradient
        let input = [0.3f32, -0.2, 0.05];
        let node = [0.1f32, 0.4, -0.3];
        let code = [true];
        let lr = 0.025f64;

        let input64: Vec<f64> = input.iter().map(|x| *x as f64).collect();
        let nodes64 = vec![node.iter().map(|x| *x as f64).collect::<Vec<f64>>()];
        let (d_in, d_nodes) = path_gradients(&input64, &nodes64, &code);

        // mirror of the training-loop arithmetic
        let mut f = 0.0f32;
        for c in 0..3 {
            f += input[c] * node[c];
        }
        let sigma = 1.0 / (1.0 + (-f).exp());
        let g = (0.0 - sigma) * lr as f32;
        for c in 0..3 {
            let updated_node = node[c] + g * input[c];
            let expect = node[c] as f64 + lr * d_nodes[0][c];
            assert!((updated_node as f64 - expect).abs() < 1e-6);
            let updated_in = input[c] + g * node[c];
            let expect_in = input[c] as f64 + lr * d_in[c];
            assert!((updated_in as f64 - expect_in).abs() < 1e-6);
        }
    }
}
