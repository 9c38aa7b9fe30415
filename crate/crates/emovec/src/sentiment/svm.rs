//! One-vs-rest linear SVM trained with stochastic subgradient descent.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Classifier, SentimentLabel};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SvmParams {
    /// L2 regularization strength.
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            lambda: 1e-4,
            epochs: 20,
            seed: 1,
        }
    }
}

/// Per-class weight vectors and biases; prediction is the argmax class
/// score with ties going to the lexicographically first class name.
#[derive(Debug, Clone)]
pub struct LinearSvmModel {
    pub(crate) weights: [Vec<f64>; 3],
    pub(crate) biases: [f64; 3],
}

impl LinearSvmModel {
    pub fn score(&self, class: SentimentLabel, x: &[f32]) -> f64 {
        let c = class as usize;
        dot(&self.weights[c], x) + self.biases[c]
    }
}

fn dot(w: &[f64], x: &[f32]) -> f64 {
    w.iter().zip(x).map(|(a, &b)| a * f64::from(b)).sum()
}

impl Classifier for LinearSvmModel {
    fn predict(&self, x: &[f32]) -> SentimentLabel {
        let mut best = SentimentLabel::ALL[0];
        let mut best_score = self.score(best, x);
        for &class in &SentimentLabel::ALL[1..] {
            let score = self.score(class, x);
            if score > best_score {
                best = class;
                best_score = score;
            }
        }
        best
    }
}

/// Trains three one-vs-rest hinge-loss + L2 objectives with the
/// 1/(lambda*t) step schedule, shuffling example order each epoch from
/// the seeded generator. The bias is learned as a constant-one feature
/// and shares the shrink step, which keeps the early large-step phase
/// from leaving a permanent offset.
pub fn train_svm(
    xs: &[Vec<f32>],
    ys: &[SentimentLabel],
    params: &SvmParams,
) -> Result<LinearSvmModel> {
    if xs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    debug_assert_eq!(xs.len(), ys.len());
    {
        let first = ys[0];
        if ys.iter().all(|&y| y == first) {
            return Err(Error::SingleClass);
        }
    }
    let dim = xs[0].len();
    debug_assert!(xs.iter().all(|x| x.len() == dim));

    let mut weights = [vec![0.0f64; dim], vec![0.0f64; dim], vec![0.0f64; dim]];
    let mut biases = [0.0f64; 3];

    for class in SentimentLabel::ALL {
        let c = class as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(c as u64));
        let mut order: Vec<usize> = (0..xs.len()).collect();
        let w = &mut weights[c];
        let b = &mut biases[c];
        let mut t = 0u64;
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for &i in &order {
                t += 1;
                let eta = 1.0 / (params.lambda * t as f64);
                let y = if ys[i] == class { 1.0 } else { -1.0 };
                let margin = y * (dot(w, &xs[i]) + *b);
                let shrink = 1.0 - eta * params.lambda;
                if margin < 1.0 {
                    for (wk, &xk) in w.iter_mut().zip(&xs[i]) {
                        *wk = shrink * *wk + eta * y * f64::from(xk);
                    }
                    *b = shrink * *b + eta * y;
                } else {
                    for wk in w.iter_mut() {
                        *wk *= shrink;
                    }
                    *b *= shrink;
                }
            }
        }
    }

    Ok(LinearSvmModel { weights, biases })
}
