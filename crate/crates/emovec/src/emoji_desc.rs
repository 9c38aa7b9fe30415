//! Emoji vectors learned from Unicode names and keywords.
//!
//! A description vector is the sum of the word vectors of an emoji's
//! description, with out-of-vocabulary words contributing zero. Emoji
//! vectors are then fit against the description vectors with a binary
//! logistic loss: the emoji's own description is the positive example
//! and uniformly drawn descriptions of other emojis are negatives. Word
//! vectors stay frozen; only the emoji vectors move.

use std::fs;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::store::EmbeddingSet;
use crate::tokenizer::{collapse_repeats, is_emoji_token};
use crate::{Error, Result};

/// An emoji and its normalized description words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmojiDescription {
    pub emoji: String,
    pub words: Vec<String>,
}

/// Hyperparameters for emoji-vector training.
#[derive(Debug, Clone)]
pub struct DescriptionTrainConfig {
    pub lr: f64,
    pub epochs: usize,
    pub negatives_per_positive: usize,
    pub seed: u64,
}

impl Default for DescriptionTrainConfig {
    fn default() -> Self {
        DescriptionTrainConfig {
            lr: 0.1,
            epochs: 80,
            negatives_per_positive: 1,
            seed: 1,
        }
    }
}

impl DescriptionTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.lr < 0.0 {
            return Err(Error::InvalidConfig("lr must not be negative".into()));
        }
        if self.negatives_per_positive < 1 {
            return Err(Error::InvalidConfig(
                "negatives_per_positive must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Normalizes a description word the same way the tokenizer normalizes
/// corpus words (lowercase, collapse, punctuation strip) so lookups hit
/// the training vocabulary.
fn normalize_description_word(raw: &str) -> Option<String> {
    let collapsed = collapse_repeats(&raw.to_lowercase(), 3, 2);
    let stripped: String = collapsed.chars().filter(|c| c.is_alphanumeric()).collect();
    if stripped.is_empty() {
        None
    } else {
        Some(stripped)
    }
}

/// Parses the description file format: one emoji per line,
/// `emoji<TAB>word word word...`. Empty lines are skipped.
pub fn parse_descriptions(text: &str) -> Result<Vec<EmojiDescription>> {
    let mut descriptions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let (emoji, words) = raw.split_once('\t').ok_or_else(|| Error::DescriptionFormat {
            line: line_no,
            reason: "expected emoji<TAB>description words".into(),
        })?;
        if !is_emoji_token(emoji) {
            return Err(Error::DescriptionFormat {
                line: line_no,
                reason: format!("{emoji:?} is not a single emoji token"),
            });
        }
        let words: Vec<String> = words
            .split_whitespace()
            .filter_map(normalize_description_word)
            .collect();
        if words.is_empty() {
            return Err(Error::DescriptionFormat {
                line: line_no,
                reason: "description words must be non-empty".into(),
            });
        }
        descriptions.push(EmojiDescription {
            emoji: emoji.to_string(),
            words,
        });
    }
    Ok(descriptions)
}

pub fn load_descriptions(path: &Path) -> Result<Vec<EmojiDescription>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_descriptions(&text)
}

/// Sum of the word vectors of a description; out-of-vocabulary words
/// contribute the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptionVector {
    pub vector: Vec<f32>,
    /// True when no description word was in the vocabulary (the vector
    /// is all zero and carries no signal).
    pub all_oov: bool,
}

pub fn description_vector(desc: &EmojiDescription, words: &EmbeddingSet) -> DescriptionVector {
    let mut vector = vec![0.0f32; words.dim()];
    let mut matched = 0usize;
    for word in &desc.words {
        if let Some(row) = words.get(word) {
            for (acc, value) in vector.iter_mut().zip(row) {
                *acc += value;
            }
            matched += 1;
        }
    }
    DescriptionVector {
        vector,
        all_oov: matched == 0,
    }
}

const DOT_CLAMP: f64 = 30.0;

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn clamped_dot(x: &[f64], v: &[f64]) -> f64 {
    x.iter()
        .zip(v)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .clamp(-DOT_CLAMP, DOT_CLAMP)
}

/// Binary logistic loss between an emoji vector and a description
/// vector: `-log sigmoid(x.v)` for a positive pair, `-log sigmoid(-x.v)`
/// for a negative one.
pub fn pair_loss(x: &[f64], v: &[f64], positive: bool) -> f64 {
    assert_eq!(x.len(), v.len(), "pair_loss requires equal dims");
    let dot = clamped_dot(x, v);
    if positive {
        -sigmoid(dot).ln()
    } else {
        -sigmoid(-dot).ln()
    }
}

/// Gradient of [`pair_loss`] with respect to `x`:
/// `(sigmoid(x.v) - y) * v` with `y` = 1 for positive pairs, 0 otherwise.
pub fn pair_loss_grad_x(x: &[f64], v: &[f64], positive: bool) -> Vec<f64> {
    assert_eq!(x.len(), v.len(), "pair_loss_grad_x requires equal dims");
    let coefficient = sigmoid(clamped_dot(x, v)) - f64::from(positive);
    v.iter().map(|value| coefficient * value).collect()
}

/// Outcome of emoji-vector training.
#[derive(Debug)]
pub struct DescTrainResult {
    /// One vector per input description, keyed by emoji surface.
    pub embeddings: EmbeddingSet,
    /// Mean positive-pair loss at initialization.
    pub initial_loss: f64,
    /// Mean positive-pair loss after the final epoch.
    pub final_loss: f64,
    /// Descriptions whose words were all out of vocabulary.
    pub all_oov: usize,
}

/// Trains one vector per emoji against the (frozen) word vectors. Each
/// epoch takes, per emoji, one gradient step on the positive pair and
/// `negatives_per_positive` steps on uniformly drawn other descriptions.
pub fn train_emoji_vectors(
    descriptions: &[EmojiDescription],
    words: &EmbeddingSet,
    cfg: &DescriptionTrainConfig,
) -> Result<DescTrainResult> {
    cfg.validate()?;
    if descriptions.len() < 2 {
        return Err(Error::TooFewDescriptions);
    }
    {
        let mut seen = std::collections::HashSet::new();
        for desc in descriptions {
            if !seen.insert(desc.emoji.as_str()) {
                return Err(Error::DuplicateSurface(desc.emoji.clone()));
            }
        }
    }

    let dim = words.dim();
    let mut all_oov = 0usize;
    let targets: Vec<Vec<f64>> = descriptions
        .iter()
        .map(|desc| {
            let dv = description_vector(desc, words);
            if dv.all_oov {
                all_oov += 1;
            }
            dv.vector.iter().map(|&x| x as f64).collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut emoji_vectors: Vec<Vec<f64>> = (0..descriptions.len())
        .map(|_| {
            (0..dim)
                .map(|_| (rng.random::<f64>() - 0.5) / dim as f64)
                .collect()
        })
        .collect();

    let mean_positive_loss = |xs: &[Vec<f64>]| -> f64 {
        xs.iter()
            .zip(&targets)
            .map(|(x, v)| pair_loss(x, v, true))
            .sum::<f64>()
            / xs.len() as f64
    };
    let initial_loss = mean_positive_loss(&emoji_vectors);

    for _ in 0..cfg.epochs {
        for j in 0..descriptions.len() {
            let gradient = pair_loss_grad_x(&emoji_vectors[j], &targets[j], true);
            for (x, g) in emoji_vectors[j].iter_mut().zip(&gradient) {
                *x -= cfg.lr * g;
            }
            for _ in 0..cfg.negatives_per_positive {
                let draw = rng.random_range(0..descriptions.len() - 1);
                let other = if draw >= j { draw + 1 } else { draw };
                let gradient = pair_loss_grad_x(&emoji_vectors[j], &targets[other], false);
                for (x, g) in emoji_vectors[j].iter_mut().zip(&gradient) {
                    *x -= cfg.lr * g;
                }
            }
        }
    }
    let final_loss = mean_positive_loss(&emoji_vectors);

    let embeddings = EmbeddingSet::new(
        descriptions.iter().map(|d| d.emoji.clone()).collect(),
        emoji_vectors
            .iter()
            .flat_map(|x| x.iter().map(|&v| v as f32))
            .collect(),
        dim,
    )?;
    Ok(DescTrainResult {
        embeddings,
        initial_loss,
        final_loss,
        all_oov,
    })
}

/// Word embedding augmented with emoji vectors; on a surface collision
/// the emoji vector wins.
pub fn build_augmented(words: &EmbeddingSet, emojis: &EmbeddingSet) -> Result<EmbeddingSet> {
    EmbeddingSet::merge(words, emojis)
}
