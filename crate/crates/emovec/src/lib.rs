//! Joint word and emoji vector embeddings trained from raw tweet text.
//!
//! The crate covers the full pipeline:
//!
//! * [`tokenizer`] — tweet normalization: placeholder replacement for
//!   mentions/URLs/emails, hashtag-sign removal, emoji segmentation with
//!   duplicate removal, repeated-character collapsing, stop-word and
//!   number filtering.
//! * [`vocab`] — frequency-filtered vocabulary and the `count^0.75`
//!   negative-sampling distribution.
//! * [`sgns`] — skip-gram with negative sampling, trained with lock-free
//!   parallel SGD over a tokenized corpus.
//! * [`store`] — binary/text persistence and cosine nearest-neighbor
//!   queries over an embedding set.
//! * [`emoji_desc`] — emoji vectors learned from Unicode names and
//!   keywords: description vectors are sums of word vectors, emoji
//!   vectors are fit with a binary logistic loss against them.
//! * [`sentiment`] — three-class sentiment evaluation harness:
//!   sum-of-embedding features, linear SVM and random forest, common/rare
//!   emoji subsets and with/without-emoji ablation.

pub mod emoji_desc;
mod error;
pub mod hogwild;
pub mod sentiment;
pub mod sgns;
pub mod store;
pub mod tokenizer;
pub mod vocab;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;

pub use sgns::{EmbeddingMatrix, TrainingConfig};
pub use store::EmbeddingSet;
pub use tokenizer::{Token, TokenKind, Tokenizer, TokenizerConfig};
pub use vocab::{SamplingTable, Vocabulary};
