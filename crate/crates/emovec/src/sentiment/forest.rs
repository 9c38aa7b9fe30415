//! Random forest of Gini-split decision trees.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Classifier, SentimentLabel};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct RfParams {
    pub trees: usize,
    pub max_depth: usize,
    /// Features evaluated per split; `None` means `floor(sqrt(dim))`.
    pub features_per_split: Option<usize>,
    /// Draw a bootstrap resample per tree. Turning this off trains every
    /// tree on the full sample (useful for single-tree fits).
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for RfParams {
    fn default() -> Self {
        RfParams {
            trees: 100,
            max_depth: 12,
            features_per_split: None,
            bootstrap: true,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    /// Class distribution over the samples that reached this leaf; the
    /// counts sum to the leaf's sample count.
    Leaf { counts: [u32; 3] },
    Split {
        feature: usize,
        threshold: f32,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    fn leaf_counts(&self, x: &[f32]) -> &[u32; 3] {
        match self {
            Node::Leaf { counts } => counts,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    left.leaf_counts(x)
                } else {
                    right.leaf_counts(x)
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RandomForestModel {
    trees: Vec<Node>,
}

impl RandomForestModel {
    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }
}

fn majority(counts: &[u32; 3]) -> SentimentLabel {
    let mut best = 0usize;
    for c in 1..3 {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    SentimentLabel::ALL[best]
}

impl Classifier for RandomForestModel {
    /// Majority vote over the per-tree leaf majorities; ties go to the
    /// lexicographically first class name.
    fn predict(&self, x: &[f32]) -> SentimentLabel {
        let mut votes = [0u32; 3];
        for tree in &self.trees {
            votes[majority(tree.leaf_counts(x)) as usize] += 1;
        }
        majority(&votes)
    }
}

fn gini(counts: &[u32; 3], total: f64) -> f64 {
    let mut impurity = 1.0;
    for &c in counts {
        let p = c as f64 / total;
        impurity -= p * p;
    }
    impurity
}

struct TreeBuilder<'a> {
    xs: &'a [Vec<f32>],
    ys: &'a [SentimentLabel],
    features_per_split: usize,
    max_depth: usize,
    dim: usize,
}

impl TreeBuilder<'_> {
    fn class_counts(&self, indices: &[usize]) -> [u32; 3] {
        let mut counts = [0u32; 3];
        for &i in indices {
            counts[self.ys[i] as usize] += 1;
        }
        counts
    }

    fn build(&self, indices: &mut Vec<usize>, depth: usize, rng: &mut ChaCha8Rng) -> Node {
        let counts = self.class_counts(indices);
        let n = indices.len();
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if depth >= self.max_depth || pure || n < 2 {
            return Node::Leaf { counts };
        }

        let parent_impurity = gini(&counts, n as f64);
        let mut best_gain = 0.0f64;
        let mut best: Option<(usize, f32)> = None;

        let chosen = rand::seq::index::sample(rng, self.dim, self.features_per_split);
        let mut ordered: Vec<(f32, usize)> = Vec::with_capacity(n);
        for feature in chosen {
            ordered.clear();
            ordered.extend(indices.iter().map(|&i| (self.xs[i][feature], i)));
            ordered.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

            let mut left = [0u32; 3];
            for pos in 1..n {
                let (prev_value, prev_index) = ordered[pos - 1];
                left[self.ys[prev_index] as usize] += 1;
                let value = ordered[pos].0;
                if value <= prev_value {
                    continue;
                }
                let n_left = pos as f64;
                let n_right = (n - pos) as f64;
                let mut right = counts;
                for c in 0..3 {
                    right[c] -= left[c];
                }
                let weighted = (n_left * gini(&left, n_left)
                    + n_right * gini(&right, n_right))
                    / n as f64;
                let gain = parent_impurity - weighted;
                if gain > best_gain {
                    // Midpoint rounding may land on the upper value; fall
                    // back to the lower one so both sides stay non-empty.
                    let mut threshold = (prev_value + value) / 2.0;
                    if threshold >= value {
                        threshold = prev_value;
                    }
                    best_gain = gain;
                    best = Some((feature, threshold));
                }
            }
        }

        let Some((feature, threshold)) = best else {
            return Node::Leaf { counts };
        };
        let mut left_indices = Vec::new();
        let mut right_indices = Vec::new();
        for &i in indices.iter() {
            if self.xs[i][feature] <= threshold {
                left_indices.push(i);
            } else {
                right_indices.push(i);
            }
        }
        debug_assert!(!left_indices.is_empty() && !right_indices.is_empty());
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.build(&mut left_indices, depth + 1, rng)),
            right: Box::new(self.build(&mut right_indices, depth + 1, rng)),
        }
    }
}

/// Grows `params.trees` trees, each on a bootstrap resample (unless
/// disabled), splitting on the best Gini gain among the sampled features
/// and stopping at `max_depth`, purity, or nodes of fewer than two
/// samples. Single-class input is legal and yields single-leaf trees.
pub fn train_rf(
    xs: &[Vec<f32>],
    ys: &[SentimentLabel],
    params: &RfParams,
) -> Result<RandomForestModel> {
    if xs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    debug_assert_eq!(xs.len(), ys.len());
    let dim = xs[0].len();
    debug_assert!(xs.iter().all(|x| x.len() == dim));
    let features_per_split = params
        .features_per_split
        .unwrap_or_else(|| (dim as f64).sqrt().floor() as usize)
        .clamp(1, dim.max(1));

    let builder = TreeBuilder {
        xs,
        ys,
        features_per_split,
        max_depth: params.max_depth,
        dim,
    };
    let mut trees = Vec::with_capacity(params.trees);
    for t in 0..params.trees {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(t as u64));
        let mut indices: Vec<usize> = if params.bootstrap {
            (0..xs.len()).map(|_| rng.random_range(0..xs.len())).collect()
        } else {
            (0..xs.len()).collect()
        };
        trees.push(builder.build(&mut indices, 0, &mut rng));
    }
    Ok(RandomForestModel { trees })
}
