//! Skip-gram with negative sampling over a tokenized corpus.
//!
//! The per-step loss for a (center, context) pair with negatives `n` is
//! `L = -log sigmoid(u_ctx . v_c) - sum_n log sigmoid(-u_n . v_c)`.
//! Training updates the input vector of the center token and the output
//! vectors of the context and negative tokens by plain gradient descent.

use std::fs::File;
use std::io::{BufRead, BufReader, Seek, SeekFrom};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hogwild::Hogwild;
use crate::store::EmbeddingSet;
use crate::vocab::{subsample_keep_probability, SamplingTable, Vocabulary};
use crate::{Error, Result};

/// Dot products are clamped to this magnitude before exponentiation; the
/// sigmoid error introduced is below 1e-13.
pub const DOT_CLAMP: f32 = 30.0;

const SAMPLING_EXPONENT: f64 = 0.75;

/// Trainer hyperparameters.
#[derive(Debug, Clone)]
pub struct TrainingConfig {
    pub dim: usize,
    pub window: usize,
    pub min_count: u64,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_initial: f32,
    pub lr_final: f32,
    pub sample: f64,
    pub seed: u64,
    pub workers: usize,
    /// Emit a tokens/sec + running-loss line to stderr every this many
    /// corpus tokens. `None` disables progress reporting.
    pub progress_every: Option<u64>,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dim: 300,
            window: 10,
            min_count: 50,
            negatives: 5,
            epochs: 5,
            lr_initial: 0.025,
            lr_final: 1e-4,
            sample: 1e-3,
            seed: 1,
            workers: 1,
            progress_every: None,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be at least 1".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidConfig("window must be at least 1".into()));
        }
        if self.negatives < 1 {
            return Err(Error::InvalidConfig("negatives must be at least 1".into()));
        }
        if !(self.lr_final < self.lr_initial) {
            return Err(Error::InvalidConfig(
                "lr_final must be smaller than lr_initial".into(),
            ));
        }
        if self.workers < 1 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Input and output vector tables, one row per vocabulary id. The output
/// table only exists during training.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    dim: usize,
    input: Vec<f32>,
    output: Vec<f32>,
}

impl EmbeddingMatrix {
    /// Input rows uniform in `[-0.5/dim, 0.5/dim)` from the seeded
    /// generator; output rows all zero.
    pub fn init(rows: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let input = (0..rows * dim)
            .map(|_| (rng.random::<f32>() - 0.5) / dim as f32)
            .collect();
        EmbeddingMatrix {
            dim,
            input,
            output: vec![0.0; rows * dim],
        }
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            dim,
            input: vec![0.0; rows * dim],
            output: vec![0.0; rows * dim],
        }
    }

    pub fn rows(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.input.len() / self.dim
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input_row(&self, id: usize) -> &[f32] {
        &self.input[id * self.dim..(id + 1) * self.dim]
    }

    pub fn input_row_mut(&mut self, id: usize) -> &mut [f32] {
        &mut self.input[id * self.dim..(id + 1) * self.dim]
    }

    pub fn output_row(&self, id: usize) -> &[f32] {
        &self.output[id * self.dim..(id + 1) * self.dim]
    }

    pub fn output_row_mut(&mut self, id: usize) -> &mut [f32] {
        &mut self.output[id * self.dim..(id + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(self.output.iter()).all(|x| x.is_finite())
    }

    /// Exposes the trained input vectors as an embedding set in
    /// vocabulary id order.
    pub fn to_embedding_set(&self, vocab: &Vocabulary) -> EmbeddingSet {
        debug_assert_eq!(vocab.len(), self.rows());
        let surfaces = vocab
            .entries()
            .iter()
            .map(|e| e.surface.clone())
            .collect::<Vec<_>>();
        EmbeddingSet::new(surfaces, self.input.clone(), self.dim)
            .expect("vocabulary surfaces are unique and whitespace-free")
    }
}

#[inline]
fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn clamped_dot(a: &[f32], b: &[f32]) -> f32 {
    let mut dot = 0.0f32;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
    }
    dot.clamp(-DOT_CLAMP, DOT_CLAMP)
}

/// One gradient-descent step on the pair loss; returns the pre-update
/// loss. `negative_ids` must not contain `context`.
pub fn sgns_step(
    matrix: &mut EmbeddingMatrix,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f32,
) -> f32 {
    let mut scratch = vec![0.0f32; matrix.dim()];
    sgns_step_scratch(matrix, center, context, negatives, lr, &mut scratch)
}

fn sgns_step_scratch(
    matrix: &mut EmbeddingMatrix,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f32,
    scratch: &mut [f32],
) -> f32 {
    debug_assert!(!negatives.contains(&context));
    let dim = matrix.dim;
    let center_off = center * dim;
    scratch.fill(0.0);
    let mut loss = 0.0f32;

    {
        let center_row = &matrix.input[center_off..center_off + dim];
        let context_row = &mut matrix.output[context * dim..(context + 1) * dim];
        let s = sigmoid(clamped_dot(center_row, context_row));
        loss -= s.ln();
        let g = lr * (s - 1.0);
        for k in 0..dim {
            let u_old = context_row[k];
            context_row[k] = u_old - g * center_row[k];
            scratch[k] -= g * u_old;
        }
    }

    for &negative in negatives {
        let center_row = &matrix.input[center_off..center_off + dim];
        let neg_row = &mut matrix.output[negative * dim..(negative + 1) * dim];
        let dot = clamped_dot(center_row, neg_row);
        let s = sigmoid(dot);
        // -ln(sigmoid(-dot)) = -ln(1 - sigmoid(dot))
        loss -= (1.0 - s).ln();
        let g = lr * s;
        for k in 0..dim {
            let u_old = neg_row[k];
            neg_row[k] = u_old - g * center_row[k];
            scratch[k] -= g * u_old;
        }
    }

    let center_row = &mut matrix.input[center_off..center_off + dim];
    for k in 0..dim {
        center_row[k] += scratch[k];
    }
    loss
}

/// The pair loss without any update.
fn pair_loss_eval(matrix: &EmbeddingMatrix, center: usize, context: usize, negatives: &[usize]) -> f32 {
    let center_row = matrix.input_row(center);
    let mut loss = -sigmoid(clamped_dot(center_row, matrix.output_row(context))).ln();
    for &negative in negatives {
        let s = sigmoid(clamped_dot(center_row, matrix.output_row(negative)));
        loss -= (1.0 - s).ln();
    }
    loss
}

/// Outcome of a training run.
#[derive(Debug)]
pub struct TrainResult {
    pub matrix: EmbeddingMatrix,
    /// Mean per-pair loss of each epoch, in order.
    pub epoch_mean_loss: Vec<f64>,
    /// Total (center, context) pairs trained on.
    pub pairs: u64,
}

struct PassContext<'a> {
    corpus: &'a Path,
    vocab: &'a Vocabulary,
    table: &'a SamplingTable,
    keep: &'a [f64],
    cfg: &'a TrainingConfig,
    file_len: u64,
    expected_pairs: f64,
    pairs_done: &'a AtomicU64,
    tokens_done: &'a AtomicU64,
    started: Instant,
}

/// Trains embeddings over a tokenized corpus (one tweet per line,
/// tokens space-separated, the `preprocess` output format).
///
/// Every kept token position samples an effective window uniform in
/// `[1, window]` and trains on all in-window pairs with `negatives`
/// noise tokens drawn from the `count^0.75` distribution, resampling on
/// collision with the context id. The learning rate decays linearly from
/// `lr_initial` to `lr_final` over the expected pair total. With
/// `workers > 1` updates are lock-free and racy; run-to-run determinism
/// is guaranteed only at `workers = 1`.
pub fn train(corpus: &Path, vocab: &Vocabulary, cfg: &TrainingConfig) -> Result<TrainResult> {
    cfg.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let matrix = EmbeddingMatrix::init(vocab.len(), cfg.dim, cfg.seed);
    if cfg.epochs == 0 {
        return Ok(TrainResult {
            matrix,
            epoch_mean_loss: Vec::new(),
            pairs: 0,
        });
    }
    let table = SamplingTable::new(vocab, SAMPLING_EXPONENT)?;
    let keep = keep_probabilities(vocab, cfg.sample);
    let file_len = std::fs::metadata(corpus)
        .map_err(|e| Error::io(corpus, e))?
        .len();
    let expected_pairs = expected_pair_total(vocab, &keep, cfg);

    let handle = Hogwild::new(matrix);
    let pairs_done = AtomicU64::new(0);
    let tokens_done = AtomicU64::new(0);
    let ctx = PassContext {
        corpus,
        vocab,
        table: &table,
        keep: &keep,
        cfg,
        file_len,
        expected_pairs,
        pairs_done: &pairs_done,
        tokens_done: &tokens_done,
        started: Instant::now(),
    };

    let mut epoch_mean_loss = Vec::with_capacity(cfg.epochs);
    let mut pairs_total = 0u64;
    for epoch in 0..cfg.epochs {
        let (loss_sum, pairs) = run_pass(&ctx, &handle, true, epoch, cfg.workers)?;
        epoch_mean_loss.push(loss_sum / pairs.max(1) as f64);
        pairs_total += pairs;
        debug_assert!(handle.get().is_finite(), "non-finite weight after epoch");
    }

    Ok(TrainResult {
        matrix: handle.into_inner(),
        epoch_mean_loss,
        pairs: pairs_total,
    })
}

/// Mean per-pair loss of one deterministic no-update pass (the pair and
/// negative streams of epoch 0 at `cfg.seed`).
pub fn epoch_loss(
    corpus: &Path,
    vocab: &Vocabulary,
    matrix: &EmbeddingMatrix,
    cfg: &TrainingConfig,
) -> Result<f64> {
    cfg.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let table = SamplingTable::new(vocab, SAMPLING_EXPONENT)?;
    let keep = keep_probabilities(vocab, cfg.sample);
    let file_len = std::fs::metadata(corpus)
        .map_err(|e| Error::io(corpus, e))?
        .len();
    let pairs_done = AtomicU64::new(0);
    let tokens_done = AtomicU64::new(0);
    let handle = Hogwild::new(matrix.clone());
    let ctx = PassContext {
        corpus,
        vocab,
        table: &table,
        keep: &keep,
        cfg,
        file_len,
        expected_pairs: expected_pair_total(vocab, &keep, cfg),
        pairs_done: &pairs_done,
        tokens_done: &tokens_done,
        started: Instant::now(),
    };
    let (loss_sum, pairs) = run_pass(&ctx, &handle, false, 0, 1)?;
    Ok(loss_sum / pairs.max(1) as f64)
}

fn keep_probabilities(vocab: &Vocabulary, sample: f64) -> Vec<f64> {
    let total = vocab.total_count();
    vocab
        .entries()
        .iter()
        .map(|e| subsample_keep_probability(e.count, total, sample))
        .collect()
}

fn expected_pair_total(vocab: &Vocabulary, keep: &[f64], cfg: &TrainingConfig) -> f64 {
    let kept_tokens: f64 = vocab
        .entries()
        .iter()
        .zip(keep)
        .map(|(e, k)| e.count as f64 * k)
        .sum();
    // 2 * E[effective window] pairs per center, ignoring edge truncation.
    (kept_tokens * (cfg.window + 1) as f64 * cfg.epochs as f64).max(1.0)
}

fn run_pass(
    ctx: &PassContext<'_>,
    handle: &Hogwild<EmbeddingMatrix>,
    update: bool,
    epoch: usize,
    workers: usize,
) -> Result<(f64, u64)> {
    // A worker owns lines whose first byte lies in its slice of the file.
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|worker| {
                let matrix = handle.clone();
                scope.spawn(move || {
                    let start = ctx.file_len * worker as u64 / workers as u64;
                    let end = if worker + 1 == workers {
                        ctx.file_len
                    } else {
                        ctx.file_len * (worker + 1) as u64 / workers as u64
                    };
                    worker_pass(ctx, &matrix, update, epoch, worker, start, end)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .collect::<Vec<_>>()
    });

    let mut loss_sum = 0.0f64;
    let mut pairs = 0u64;
    for result in results {
        let (l, p) = result?;
        loss_sum += l;
        pairs += p;
    }
    Ok((loss_sum, pairs))
}

fn worker_pass(
    ctx: &PassContext<'_>,
    handle: &Hogwild<EmbeddingMatrix>,
    update: bool,
    epoch: usize,
    worker: usize,
    start: u64,
    end: u64,
) -> Result<(f64, u64)> {
    let cfg = ctx.cfg;
    let mut rng = ChaCha8Rng::seed_from_u64(
        cfg.seed
            ^ (epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ (worker as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
    );

    let file = File::open(ctx.corpus).map_err(|e| Error::io(ctx.corpus, e))?;
    let mut reader = BufReader::new(file);
    let mut pos = start;
    if start > 0 {
        reader
            .seek(SeekFrom::Start(start))
            .map_err(|e| Error::io(ctx.corpus, e))?;
        let mut skipped = Vec::new();
        let n = reader
            .read_until(b'\n', &mut skipped)
            .map_err(|e| Error::io(ctx.corpus, e))?;
        pos += n as u64;
    }

    let lr_span = cfg.lr_initial - cfg.lr_final;
    let mut scratch = vec![0.0f32; cfg.dim];
    let mut ids: Vec<usize> = Vec::new();
    let mut negatives: Vec<usize> = Vec::with_capacity(cfg.negatives);
    let mut line = String::new();
    let mut loss_sum = 0.0f64;
    let mut pairs = 0u64;
    let mut running_loss = 0.0f64;
    let mut running_pairs = 0u64;
    let mut next_progress = ctx.cfg.progress_every.map(|n| {
        let done = ctx.tokens_done.load(Ordering::Relaxed);
        (done / n + 1) * n
    });

    while pos < end {
        line.clear();
        let n = reader
            .read_line(&mut line)
            .map_err(|e| Error::io(ctx.corpus, e))?;
        if n == 0 {
            break;
        }
        pos += n as u64;

        ids.clear();
        let mut line_tokens = 0u64;
        for token in line.split_whitespace() {
            line_tokens += 1;
            if let Some(id) = ctx.vocab.id(token) {
                let draw: f64 = rng.random();
                if draw < ctx.keep[id] {
                    ids.push(id);
                }
            }
        }

        let progress = ctx.pairs_done.load(Ordering::Relaxed) as f64 / ctx.expected_pairs;
        let lr = (cfg.lr_initial - lr_span * progress as f32).max(cfg.lr_final);

        let mut line_pairs = 0u64;
        let mut line_loss = 0.0f64;
        for i in 0..ids.len() {
            let b = rng.random_range(1..=cfg.window);
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(ids.len().saturating_sub(1));
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let center = ids[i];
                let context = ids[j];
                negatives.clear();
                let mut attempts = 0usize;
                while negatives.len() < cfg.negatives && attempts < 128 {
                    attempts += 1;
                    let candidate = ctx.table.sample(&mut rng);
                    if candidate != context {
                        negatives.push(candidate);
                    } else if ctx.vocab.len() == 1 {
                        break;
                    }
                }
                let loss = if update {
                    let matrix = handle.get_mut();
                    sgns_step_scratch(matrix, center, context, &negatives, lr, &mut scratch)
                } else {
                    pair_loss_eval(handle.get(), center, context, &negatives)
                };
                line_loss += loss as f64;
                line_pairs += 1;
            }
        }
        loss_sum += line_loss;
        pairs += line_pairs;
        running_loss += line_loss;
        running_pairs += line_pairs;
        ctx.pairs_done.fetch_add(line_pairs, Ordering::Relaxed);
        let total_tokens = ctx.tokens_done.fetch_add(line_tokens, Ordering::Relaxed) + line_tokens;

        if let Some(threshold) = next_progress {
            if total_tokens >= threshold {
                let elapsed = ctx.started.elapsed().as_secs_f64().max(1e-9);
                let mean = running_loss / running_pairs.max(1) as f64;
                eprintln!(
                    "epoch {} | {} tokens | {:.0} tokens/s | mean loss {:.4}",
                    epoch + 1,
                    total_tokens,
                    total_tokens as f64 / elapsed,
                    mean
                );
                running_loss = 0.0;
                running_pairs = 0;
                next_progress = Some((total_tokens / ctx.cfg.progress_every.unwrap() + 1)
                    * ctx.cfg.progress_every.unwrap());
            }
        }
    }
    Ok((loss_sum, pairs))
}
