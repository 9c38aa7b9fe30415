//! Fixtures shared by the integration suites.
#![allow(dead_code)]

use emovec::sentiment::{EmojiRanking, LabeledTweet, SentimentLabel};
use emovec::store::EmbeddingSet;
use emovec::tokenizer::is_emoji_token;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Synthetic corpus where 😍 co-occurs only with {love, cute} and 🤢
/// only with {eww, yuck} inside a window of 2; everything else is filler
/// chatter. One sentence per line, already tokenized.
pub fn planted_corpus(n_sentences: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = |rng: &mut ChaCha8Rng| format!("f{:02}", rng.random_range(0..40));
    let mut out = String::new();
    for _ in 0..n_sentences {
        let roll: f64 = rng.random();
        let mut words: Vec<String> = Vec::new();
        if roll < 0.70 {
            for _ in 0..rng.random_range(6..=10) {
                words.push(filler(&mut rng));
            }
        } else {
            let (emoji, near, far) = if roll < 0.85 {
                ("😍", "cute", "love")
            } else {
                ("🤢", "yuck", "eww")
            };
            for _ in 0..rng.random_range(2..=4) {
                words.push(filler(&mut rng));
            }
            // The +-2 window around the emoji holds only its companions.
            words.push(far.into());
            words.push(near.into());
            words.push(emoji.into());
            words.push(near.into());
            words.push(far.into());
            for _ in 0..rng.random_range(2..=4) {
                words.push(filler(&mut rng));
            }
        }
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}

/// Tokenized corpus with strong co-occurrence structure: every sentence
/// draws all its words from one topic cluster, so the loss keeps
/// improving over several epochs instead of plateauing at the noise
/// floor immediately.
pub fn structured_corpus(n_sentences: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_topics = 20usize;
    let words_per_topic = 8usize;
    let mut out = String::new();
    for _ in 0..n_sentences {
        let topic = rng.random_range(0..n_topics);
        let words: Vec<String> = (0..rng.random_range(8..=12))
            .map(|_| format!("t{topic:02}w{}", rng.random_range(0..words_per_topic)))
            .collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}

/// Double-precision mirror of the skip-gram step: loss and analytic
/// gradients for one (center, context, negatives) pair, kept independent
/// of the f32 implementation so finite differences can check it.
pub mod sgns_mirror {
    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    pub fn loss(v_center: &[f64], u_context: &[f64], u_negatives: &[Vec<f64>]) -> f64 {
        let mut total = -sigmoid(dot(v_center, u_context)).ln();
        for u_negative in u_negatives {
            total -= sigmoid(-dot(v_center, u_negative)).ln();
        }
        total
    }

    /// Gradients with respect to the center input vector, the context
    /// output vector, and each negative output vector.
    pub fn grads(
        v_center: &[f64],
        u_context: &[f64],
        u_negatives: &[Vec<f64>],
    ) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
        let dim = v_center.len();
        let positive_coefficient = sigmoid(dot(v_center, u_context)) - 1.0;
        let mut grad_center: Vec<f64> = (0..dim)
            .map(|k| positive_coefficient * u_context[k])
            .collect();
        let grad_context: Vec<f64> = (0..dim)
            .map(|k| positive_coefficient * v_center[k])
            .collect();
        let mut grad_negatives = Vec::with_capacity(u_negatives.len());
        for u_negative in u_negatives {
            let coefficient = sigmoid(dot(v_center, u_negative));
            for k in 0..dim {
                grad_center[k] += coefficient * u_negative[k];
            }
            grad_negatives.push((0..dim).map(|k| coefficient * v_center[k]).collect());
        }
        (grad_center, grad_context, grad_negatives)
    }
}

/// Emoji surfaces shared by fixtures that need a few of each polarity.
pub const POSITIVE_EMOJIS: [&str; 3] = ["😍", "😊", "❤"];
pub const NEGATIVE_EMOJIS: [&str; 3] = ["🤢", "😡", "💀"];
pub const NEUTRAL_EMOJIS: [&str; 2] = ["🌀", "⏰"];

/// Labeled-tweet fixture where sentiment is carried jointly by words and
/// planted emojis: every positive/negative tweet carries a class emoji,
/// but only some carry a class word, so stripping emojis costs accuracy.
/// Returns the tweets, an embedding covering the fixture vocabulary, and
/// a frequency ranking of the fixture emojis.
pub fn sentiment_fixture(
    n_tweets: usize,
    seed: u64,
) -> (Vec<LabeledTweet>, EmbeddingSet, EmojiRanking) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 24usize;

    let mut surfaces: Vec<String> = Vec::new();
    for i in 0..50 {
        surfaces.push(format!("n{i:02}"));
    }
    for i in 0..10 {
        surfaces.push(format!("p{i:02}"));
        surfaces.push(format!("q{i:02}"));
    }
    for emoji in POSITIVE_EMOJIS
        .iter()
        .chain(&NEGATIVE_EMOJIS)
        .chain(&NEUTRAL_EMOJIS)
    {
        surfaces.push(emoji.to_string());
    }
    let vectors: Vec<f32> = (0..surfaces.len() * dim)
        .map(|_| rng.random::<f32>() * 2.0 - 1.0)
        .collect();
    let set = EmbeddingSet::new(surfaces, vectors, dim).unwrap();

    let mut tweets = Vec::with_capacity(n_tweets);
    for i in 0..n_tweets {
        let neutral = |rng: &mut ChaCha8Rng| format!("n{:02}", rng.random_range(0..50));
        let label = match i % 3 {
            0 => SentimentLabel::Positive,
            1 => SentimentLabel::Negative,
            _ => SentimentLabel::Neutral,
        };
        let mut words: Vec<String> = (0..6).map(|_| neutral(&mut rng)).collect();
        match label {
            SentimentLabel::Positive => {
                if rng.random::<f64>() < 0.55 {
                    words.push(format!("p{:02}", rng.random_range(0..10)));
                }
                words.push(POSITIVE_EMOJIS[rng.random_range(0..3)].to_string());
                if rng.random::<f64>() < 0.4 {
                    words.push(POSITIVE_EMOJIS[rng.random_range(0..3)].to_string());
                }
            }
            SentimentLabel::Negative => {
                if rng.random::<f64>() < 0.55 {
                    words.push(format!("q{:02}", rng.random_range(0..10)));
                }
                words.push(NEGATIVE_EMOJIS[rng.random_range(0..3)].to_string());
                if rng.random::<f64>() < 0.4 {
                    words.push(NEGATIVE_EMOJIS[rng.random_range(0..3)].to_string());
                }
            }
            SentimentLabel::Neutral => {
                words.push(neutral(&mut rng));
                if rng.random::<f64>() < 0.3 {
                    words.push(NEUTRAL_EMOJIS[rng.random_range(0..2)].to_string());
                }
            }
        }
        tweets.push(LabeledTweet {
            text: words.join(" "),
            label,
        });
    }

    let ranking_text: String = POSITIVE_EMOJIS
        .iter()
        .chain(&NEUTRAL_EMOJIS)
        .chain(&NEGATIVE_EMOJIS)
        .map(|e| format!("{e}\n"))
        .collect();
    let ranking = EmojiRanking::parse(&ranking_text).unwrap();
    (tweets, set, ranking)
}

/// `n` distinct single-scalar emoji surfaces scanned from the emoji
/// code-point planes.
pub fn emoji_pool(n: usize) -> Vec<String> {
    let ranges = [
        0x1F300u32..=0x1F5FF,
        0x1F600..=0x1F64F,
        0x1F680..=0x1F6FF,
        0x1F900..=0x1F9FF,
        0x1FA70..=0x1FAFF,
        0x2600..=0x26FF,
        0x2700..=0x27BF,
    ];
    let mut pool = Vec::with_capacity(n);
    for range in ranges {
        for code_point in range {
            if let Some(c) = char::from_u32(code_point) {
                let s = c.to_string();
                if is_emoji_token(&s) {
                    pool.push(s);
                    if pool.len() == n {
                        return pool;
                    }
                }
            }
        }
    }
    panic!("only found {} emoji surfaces, needed {n}", pool.len());
}

/// Random embedding set with `n_words` word surfaces and `n_emojis`
/// emoji surfaces.
pub fn random_embedding_set(
    n_words: usize,
    n_emojis: usize,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> EmbeddingSet {
    let emojis = emoji_pool(n_emojis.max(1));
    let mut surfaces: Vec<String> = (0..n_words).map(|i| format!("word{i:04}")).collect();
    surfaces.extend(emojis.into_iter().take(n_emojis));
    let vectors: Vec<f32> = (0..surfaces.len() * dim)
        .map(|_| rng.random::<f32>() * 2.0 - 1.0)
        .collect();
    EmbeddingSet::new(surfaces, vectors, dim).unwrap()
}
