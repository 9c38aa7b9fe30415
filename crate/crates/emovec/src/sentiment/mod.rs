//! Three-class sentiment evaluation harness.
//!
//! Tweets are featurized by summing the embedding vectors of their
//! tokens. Two classifiers (linear SVM, random forest) are trained on a
//! stratified split and scored on the full test set and on the subsets
//! of tweets containing common and rare emojis, each with and without
//! emoji tokens.

mod forest;
mod svm;

pub use forest::{train_rf, RandomForestModel, RfParams};
pub use svm::{train_svm, LinearSvmModel, SvmParams};

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::store::EmbeddingSet;
use crate::tokenizer::{is_emoji_token, Token, TokenKind, Tokenizer};
use crate::{Error, Result};

/// Sentiment class. The declaration order matches the lexicographic
/// order of the class names, which is the tie-breaking order everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] = [
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
        SentimentLabel::Positive,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Positive => "positive",
        }
    }

    pub fn parse(s: &str) -> Option<SentimentLabel> {
        match s.trim().to_lowercase().as_str() {
            "negative" => Some(SentimentLabel::Negative),
            "neutral" => Some(SentimentLabel::Neutral),
            "positive" => Some(SentimentLabel::Positive),
            _ => None,
        }
    }
}

/// One labeled example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTweet {
    pub text: String,
    pub label: SentimentLabel,
}

/// Anything that maps a feature vector to a class.
pub trait Classifier {
    fn predict(&self, x: &[f32]) -> SentimentLabel;
}

/// Parses the labeled dataset: CSV with a header containing "text" and
/// "label" columns (matched case-insensitively; extra columns ignored).
pub fn parse_dataset_csv<R: Read>(reader: R) -> Result<Vec<LabeledTweet>> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| Error::DatasetFormat {
            line: 1,
            reason: e.to_string(),
        })?
        .clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(name))
    };
    let text_column = find("text").ok_or_else(|| Error::DatasetFormat {
        line: 1,
        reason: "missing \"text\" column".into(),
    })?;
    let label_column = find("label").ok_or_else(|| Error::DatasetFormat {
        line: 1,
        reason: "missing \"label\" column".into(),
    })?;

    let mut tweets = Vec::new();
    for record in csv_reader.into_records() {
        let record = record.map_err(|e| Error::DatasetFormat {
            line: e
                .position()
                .map(|p| p.line())
                .unwrap_or(0),
            reason: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let text = record.get(text_column).ok_or_else(|| Error::DatasetFormat {
            line,
            reason: "row is missing the text column".into(),
        })?;
        let label_field = record.get(label_column).ok_or_else(|| Error::DatasetFormat {
            line,
            reason: "row is missing the label column".into(),
        })?;
        let label = SentimentLabel::parse(label_field).ok_or_else(|| Error::DatasetFormat {
            line,
            reason: format!("unknown label {label_field:?}"),
        })?;
        tweets.push(LabeledTweet {
            text: text.to_string(),
            label,
        });
    }
    Ok(tweets)
}

pub fn load_dataset(path: &Path) -> Result<Vec<LabeledTweet>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dataset_csv(file)
}

/// Emoji surfaces ordered most-frequent first.
#[derive(Debug, Clone)]
pub struct EmojiRanking {
    surfaces: Vec<String>,
    ranks: HashMap<String, usize>,
}

impl EmojiRanking {
    /// Parses the ranking format: one emoji per line, descending
    /// frequency. Surfaces must be unique emoji tokens.
    pub fn parse(text: &str) -> Result<EmojiRanking> {
        let mut surfaces = Vec::new();
        let mut ranks = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let surface = raw.trim();
            if surface.is_empty() {
                continue;
            }
            if !is_emoji_token(surface) {
                return Err(Error::RankingFormat {
                    line: line_no,
                    reason: format!("{surface:?} is not a single emoji token"),
                });
            }
            if ranks.insert(surface.to_string(), surfaces.len()).is_some() {
                return Err(Error::RankingFormat {
                    line: line_no,
                    reason: format!("duplicate emoji {surface:?}"),
                });
            }
            surfaces.push(surface.to_string());
        }
        Ok(EmojiRanking { surfaces, ranks })
    }

    pub fn load(path: &Path) -> Result<EmojiRanking> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn len(&self) -> usize {
        self.surfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn surfaces(&self) -> &[String] {
        &self.surfaces
    }

    /// Rank of an emoji, 0 = most frequent.
    pub fn rank(&self, surface: &str) -> Option<usize> {
        self.ranks.get(surface).copied()
    }
}

/// Sum-of-embeddings tweet representation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f32>,
    /// True when no token contributed a vector (empty tweet or all
    /// tokens out of vocabulary after the optional emoji ablation).
    pub empty: bool,
}

/// Featurizes a tweet: tokenize, optionally drop emoji tokens, sum the
/// vectors of in-vocabulary tokens.
pub fn featurize(
    text: &str,
    tokenizer: &Tokenizer,
    set: &EmbeddingSet,
    drop_emojis: bool,
) -> FeatureVector {
    featurize_tokens(&tokenizer.tokenize(text), set, drop_emojis)
}

fn featurize_tokens(tokens: &[Token], set: &EmbeddingSet, drop_emojis: bool) -> FeatureVector {
    let mut values = vec![0.0f32; set.dim()];
    let mut matched = 0usize;
    for token in tokens {
        if drop_emojis && token.kind == TokenKind::Emoji {
            continue;
        }
        if let Some(row) = set.get(&token.surface) {
            for (acc, value) in values.iter_mut().zip(row) {
                *acc += value;
            }
            matched += 1;
        }
    }
    FeatureVector {
        values,
        empty: matched == 0,
    }
}

fn emoji_membership(tokens: &[Token], ranking: &EmojiRanking, common_count: usize) -> (bool, bool) {
    let mut has_common = false;
    let mut has_rare = false;
    for token in tokens {
        if token.kind != TokenKind::Emoji {
            continue;
        }
        if let Some(rank) = ranking.rank(&token.surface) {
            if rank < common_count {
                has_common = true;
            } else {
                has_rare = true;
            }
        }
    }
    (has_common, has_rare)
}

/// Splits tweets into the subsets containing at least one common-pool
/// emoji and at least one rare-pool emoji (`ranking[..common_count]` and
/// `ranking[common_count..]`). A tweet with both kinds lands in both
/// subsets; returned values are indices into `tweets`.
pub fn split_common_rare(
    tweets: &[LabeledTweet],
    tokenizer: &Tokenizer,
    ranking: &EmojiRanking,
    common_count: usize,
) -> (Vec<usize>, Vec<usize>) {
    assert!(common_count <= ranking.len());
    let mut common = Vec::new();
    let mut rare = Vec::new();
    for (i, tweet) in tweets.iter().enumerate() {
        let tokens = tokenizer.tokenize(&tweet.text);
        let (has_common, has_rare) = emoji_membership(&tokens, ranking, common_count);
        if has_common {
            common.push(i);
        }
        if has_rare {
            rare.push(i);
        }
    }
    (common, rare)
}

/// Fraction of exact label matches.
pub fn evaluate<C: Classifier + ?Sized>(
    model: &C,
    features: &[FeatureVector],
    labels: &[SentimentLabel],
) -> Result<f64> {
    debug_assert_eq!(features.len(), labels.len());
    if features.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let hits = features
        .iter()
        .zip(labels)
        .filter(|(x, &y)| model.predict(&x.values) == y)
        .count();
    Ok(hits as f64 / features.len() as f64)
}

/// Seeded stratified split; per class, `fraction` of the examples
/// (rounded) go to the training side.
pub fn stratified_split(
    labels: &[SentimentLabel],
    fraction: f64,
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in SentimentLabel::ALL {
        let mut indices: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == class)
            .map(|(i, _)| i)
            .collect();
        indices.shuffle(&mut rng);
        let n_train = ((indices.len() as f64) * fraction).round() as usize;
        let n_train = n_train.min(indices.len());
        train.extend_from_slice(&indices[..n_train]);
        test.extend_from_slice(&indices[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Which test tweets a cell scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subset {
    All,
    Common,
    Rare,
}

impl Subset {
    pub const ALL: [Subset; 3] = [Subset::All, Subset::Common, Subset::Rare];

    pub fn as_str(&self) -> &'static str {
        match self {
            Subset::All => "all",
            Subset::Common => "common",
            Subset::Rare => "rare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    RandomForest,
    Svm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 2] = [ClassifierKind::RandomForest, ClassifierKind::Svm];

    pub fn as_str(&self) -> &'static str {
        match self {
            ClassifierKind::RandomForest => "rf",
            ClassifierKind::Svm => "svm",
        }
    }
}

/// One accuracy measurement.
#[derive(Debug, Clone)]
pub struct ReportCell {
    pub embedding: String,
    pub classifier: ClassifierKind,
    pub subset: Subset,
    pub with_emojis: bool,
    /// `None` when the cell failed; see `error`.
    pub accuracy: Option<f64>,
    pub error: Option<String>,
    pub n_test: usize,
    /// Test tweets in this cell whose feature vector was all zero.
    pub zero_features: usize,
}

/// Accuracy grid over embedding x classifier x subset x ablation, plus
/// the reproducibility metadata of the run.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub meta: Vec<(String, String)>,
    pub cells: Vec<ReportCell>,
}

impl EvalReport {
    pub fn accuracy(
        &self,
        embedding: &str,
        classifier: ClassifierKind,
        subset: Subset,
        with_emojis: bool,
    ) -> Option<f64> {
        self.cells
            .iter()
            .find(|c| {
                c.embedding == embedding
                    && c.classifier == classifier
                    && c.subset == subset
                    && c.with_emojis == with_emojis
            })
            .and_then(|c| c.accuracy)
    }

    /// CSV with `# key=value` metadata comments, then one row per cell.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for (key, value) in &self.meta {
            writeln!(writer, "# {key}={value}")?;
        }
        let mut csv_writer = csv::Writer::from_writer(writer);
        csv_writer.write_record([
            "embedding",
            "classifier",
            "subset",
            "emojis",
            "accuracy",
            "n_test",
            "zero_features",
            "status",
        ])?;
        for cell in &self.cells {
            csv_writer.write_record([
                cell.embedding.as_str(),
                cell.classifier.as_str(),
                cell.subset.as_str(),
                if cell.with_emojis { "with" } else { "without" },
                &cell
                    .accuracy
                    .map(|a| format!("{a:.4}"))
                    .unwrap_or_default(),
                &cell.n_test.to_string(),
                &cell.zero_features.to_string(),
                &cell
                    .error
                    .as_ref()
                    .map(|e| format!("error: {e}"))
                    .unwrap_or_else(|| "ok".to_string()),
            ])?;
        }
        csv_writer.flush()
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    /// Aligned-text grid, one block per ablation: rows are embeddings,
    /// columns are subset x classifier accuracies.
    pub fn render_table(&self) -> String {
        let mut embeddings: Vec<&str> = Vec::new();
        for cell in &self.cells {
            if !embeddings.contains(&cell.embedding.as_str()) {
                embeddings.push(&cell.embedding);
            }
        }
        let name_width = embeddings
            .iter()
            .map(|e| e.chars().count())
            .chain(["embedding".chars().count()])
            .max()
            .unwrap_or(9)
            .max(9);

        let mut out = String::new();
        for with_emojis in [true, false] {
            out.push_str(if with_emojis {
                "with emojis\n"
            } else {
                "without emojis\n"
            });
            out.push_str(&format!("{:<name_width$}", "embedding"));
            for subset in Subset::ALL {
                for classifier in ClassifierKind::ALL {
                    out.push_str(&format!(
                        "{:>12}",
                        format!("{}/{}", subset.as_str(), classifier.as_str())
                    ));
                }
            }
            out.push('\n');
            for embedding in &embeddings {
                out.push_str(&format!("{embedding:<name_width$}"));
                for subset in Subset::ALL {
                    for classifier in ClassifierKind::ALL {
                        let value = self
                            .accuracy(embedding, classifier, subset, with_emojis)
                            .map(|a| format!("{a:.4}"))
                            .unwrap_or_else(|| "err".to_string());
                        out.push_str(&format!("{value:>12}"));
                    }
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluation-run knobs.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub split_seed: u64,
    pub split_fraction: f64,
    pub common_count: usize,
    pub svm: SvmParams,
    pub rf: RfParams,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            split_seed: 1,
            split_fraction: 0.8,
            common_count: 173,
            svm: SvmParams::default(),
            rf: RfParams::default(),
        }
    }
}

/// Runs the full evaluation matrix: for every embedding, classifier and
/// ablation the model is trained on the stratified training split, then
/// scored on the full test set and the common/rare emoji subsets.
/// Classifier failures mark their cells as failed without aborting the
/// rest of the matrix.
pub fn run_matrix(
    tweets: &[LabeledTweet],
    tokenizer: &Tokenizer,
    embeddings: &[(String, EmbeddingSet)],
    ranking: &EmojiRanking,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if tweets.is_empty() {
        return Err(Error::EvalInput("dataset is empty".into()));
    }
    for class in SentimentLabel::ALL {
        if !tweets.iter().any(|t| t.label == class) {
            return Err(Error::EvalInput(format!(
                "dataset has no {:?} examples; all three classes are required",
                class.as_str()
            )));
        }
    }
    if !(opts.split_fraction > 0.0 && opts.split_fraction < 1.0) {
        return Err(Error::EvalInput(format!(
            "split fraction must lie in (0, 1), got {}",
            opts.split_fraction
        )));
    }
    if opts.common_count > ranking.len() {
        return Err(Error::EvalInput(format!(
            "common count {} exceeds the ranking size {}",
            opts.common_count,
            ranking.len()
        )));
    }
    if embeddings.is_empty() {
        return Err(Error::EvalInput("no embeddings given".into()));
    }

    let token_lists: Vec<Vec<Token>> = tweets
        .iter()
        .map(|t| tokenizer.tokenize(&t.text))
        .collect();
    let membership: Vec<(bool, bool)> = token_lists
        .iter()
        .map(|tokens| emoji_membership(tokens, ranking, opts.common_count))
        .collect();
    let labels: Vec<SentimentLabel> = tweets.iter().map(|t| t.label).collect();
    let (train_indices, test_indices) = stratified_split(&labels, opts.split_fraction, opts.split_seed);

    let mut cells = Vec::new();
    for (name, set) in embeddings {
        for with_emojis in [true, false] {
            let features: Vec<FeatureVector> = token_lists
                .iter()
                .map(|tokens| featurize_tokens(tokens, set, !with_emojis))
                .collect();
            let train_x: Vec<Vec<f32>> = train_indices
                .iter()
                .map(|&i| features[i].values.clone())
                .collect();
            let train_y: Vec<SentimentLabel> =
                train_indices.iter().map(|&i| labels[i]).collect();

            for classifier in ClassifierKind::ALL {
                let model: Result<Box<dyn Classifier>> = match classifier {
                    ClassifierKind::RandomForest => {
                        train_rf(&train_x, &train_y, &opts.rf).map(|m| Box::new(m) as _)
                    }
                    ClassifierKind::Svm => {
                        train_svm(&train_x, &train_y, &opts.svm).map(|m| Box::new(m) as _)
                    }
                };
                for subset in Subset::ALL {
                    let cell_indices: Vec<usize> = test_indices
                        .iter()
                        .copied()
                        .filter(|&i| match subset {
                            Subset::All => true,
                            Subset::Common => membership[i].0,
                            Subset::Rare => membership[i].1,
                        })
                        .collect();
                    let cell_features: Vec<FeatureVector> =
                        cell_indices.iter().map(|&i| features[i].clone()).collect();
                    let cell_labels: Vec<SentimentLabel> =
                        cell_indices.iter().map(|&i| labels[i]).collect();
                    let zero_features = cell_features.iter().filter(|f| f.empty).count();
                    let outcome = match &model {
                        Ok(m) => evaluate(m.as_ref(), &cell_features, &cell_labels),
                        Err(e) => Err(Error::EvalInput(e.to_string())),
                    };
                    let (accuracy, error) = match outcome {
                        Ok(a) => (Some(a), None),
                        Err(e) => (None, Some(e.to_string())),
                    };
                    cells.push(ReportCell {
                        embedding: name.clone(),
                        classifier,
                        subset,
                        with_emojis,
                        accuracy,
                        error,
                        n_test: cell_indices.len(),
                        zero_features,
                    });
                }
            }
        }
    }

    let meta = vec![
        ("split_seed".to_string(), opts.split_seed.to_string()),
        ("split_fraction".to_string(), opts.split_fraction.to_string()),
        ("common_count".to_string(), opts.common_count.to_string()),
        ("ranking_size".to_string(), ranking.len().to_string()),
        ("svm_lambda".to_string(), opts.svm.lambda.to_string()),
        ("svm_epochs".to_string(), opts.svm.epochs.to_string()),
        ("svm_seed".to_string(), opts.svm.seed.to_string()),
        ("rf_trees".to_string(), opts.rf.trees.to_string()),
        ("rf_max_depth".to_string(), opts.rf.max_depth.to_string()),
        ("rf_bootstrap".to_string(), opts.rf.bootstrap.to_string()),
        ("rf_seed".to_string(), opts.rf.seed.to_string()),
        ("n_tweets".to_string(), tweets.len().to_string()),
        ("n_train".to_string(), train_indices.len().to_string()),
        ("n_test".to_string(), test_indices.len().to_string()),
    ];
    Ok(EvalReport { meta, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_set(entries: &[(&str, &[f32])]) -> EmbeddingSet {
        let dim = entries[0].1.len();
        EmbeddingSet::new(
            entries.iter().map(|(s, _)| s.to_string()).collect(),
            entries.iter().flat_map(|(_, v)| v.iter().copied()).collect(),
            dim,
        )
        .unwrap()
    }

    #[test]
    fn featurize_sums_and_ablates() {
        let set = tiny_set(&[("got", &[1.0, 0.0]), ("💉", &[0.0, 2.0])]);
        let tokenizer = Tokenizer::default();
        let with = featurize("got 💉", &tokenizer, &set, false);
        assert_eq!(with.values, vec![1.0, 2.0]);
        assert!(!with.empty);

        let without = featurize("got 💉", &tokenizer, &set, true);
        assert_eq!(without.values, vec![1.0, 0.0]);
    }

    #[test]
    fn featurize_flags_all_oov() {
        let set = tiny_set(&[("known", &[1.0])]);
        let tokenizer = Tokenizer::default();
        let feature = featurize("unknown words only", &tokenizer, &set, false);
        assert_eq!(feature.values, vec![0.0]);
        assert!(feature.empty);

        let single = featurize("known", &tokenizer, &set, false);
        assert_eq!(single.values, vec![1.0]);
    }

    #[test]
    fn featurize_is_additive_over_concatenation() {
        let set = tiny_set(&[
            ("alpha", &[1.0, -2.0]),
            ("beta", &[0.5, 0.25]),
            ("gamma", &[3.0, 1.0]),
        ]);
        let tokenizer = Tokenizer::default();
        let left = featurize("alpha beta", &tokenizer, &set, false);
        let right = featurize("gamma", &tokenizer, &set, false);
        let joined = featurize("alpha beta gamma", &tokenizer, &set, false);
        for k in 0..2 {
            assert!((joined.values[k] - (left.values[k] + right.values[k])).abs() < 1e-5);
        }
    }

    #[test]
    fn dataset_parsing() {
        let csv = "text,label\nhello 😍,positive\nmeh,NEUTRAL\nbad day,negative\n";
        let tweets = parse_dataset_csv(csv.as_bytes()).unwrap();
        assert_eq!(tweets.len(), 3);
        assert_eq!(tweets[1].label, SentimentLabel::Neutral);

        assert!(matches!(
            parse_dataset_csv("text,label\nhello,sometimes\n".as_bytes()),
            Err(Error::DatasetFormat { line: 2, .. })
        ));
        assert!(matches!(
            parse_dataset_csv("body,label\nx,positive\n".as_bytes()),
            Err(Error::DatasetFormat { line: 1, .. })
        ));
    }

    #[test]
    fn ranking_parsing() {
        let ranking = EmojiRanking::parse("😂\n❤\n🔥\n").unwrap();
        assert_eq!(ranking.len(), 3);
        assert_eq!(ranking.rank("❤"), Some(1));
        assert_eq!(ranking.rank("💀"), None);

        assert!(matches!(
            EmojiRanking::parse("😂\nword\n"),
            Err(Error::RankingFormat { line: 2, .. })
        ));
        assert!(matches!(
            EmojiRanking::parse("😂\n😂\n"),
            Err(Error::RankingFormat { line: 2, .. })
        ));
    }

    #[test]
    fn membership_rules() {
        let tweets = vec![
            LabeledTweet {
                text: "nice day 😂".into(),
                label: SentimentLabel::Positive,
            },
            LabeledTweet {
                text: "no emoji here".into(),
                label: SentimentLabel::Neutral,
            },
            LabeledTweet {
                text: "both 😂 and 🔥".into(),
                label: SentimentLabel::Negative,
            },
        ];
        let ranking = EmojiRanking::parse("😂\n❤\n🔥\n").unwrap();
        let tokenizer = Tokenizer::default();
        let (common, rare) = split_common_rare(&tweets, &tokenizer, &ranking, 2);
        assert_eq!(common, vec![0, 2]);
        assert_eq!(rare, vec![2]);
    }

    #[test]
    fn stratified_split_preserves_proportions() {
        let labels: Vec<SentimentLabel> = (0..100)
            .map(|i| match i % 10 {
                0..=2 => SentimentLabel::Positive,
                3..=5 => SentimentLabel::Negative,
                _ => SentimentLabel::Neutral,
            })
            .collect();
        let (train, test) = stratified_split(&labels, 0.8, 7);
        assert_eq!(train.len() + test.len(), 100);
        for class in SentimentLabel::ALL {
            let total = labels.iter().filter(|&&l| l == class).count() as f64;
            let in_train = train.iter().filter(|&&i| labels[i] == class).count() as f64;
            assert!((in_train - total * 0.8).abs() <= 1.0);
        }
        let (train_b, test_b) = stratified_split(&labels, 0.8, 7);
        assert_eq!(train, train_b);
        assert_eq!(test, test_b);
    }

    #[test]
    fn evaluate_empty_errors() {
        let model = train_rf(
            &[vec![0.0f32], vec![1.0]],
            &[SentimentLabel::Negative, SentimentLabel::Positive],
            &RfParams::default(),
        )
        .unwrap();
        assert!(matches!(
            evaluate(&model, &[], &[]),
            Err(Error::EmptyTestSet)
        ));
    }

    fn matrix_fixture() -> (Vec<LabeledTweet>, EmbeddingSet, EmojiRanking) {
        let mut tweets = Vec::new();
        for i in 0..60 {
            let (text, label) = match i % 3 {
                0 => (format!("great stuff 😍 number{i}"), SentimentLabel::Positive),
                1 => (format!("horrible stuff 🤢 number{i}"), SentimentLabel::Negative),
                _ => (format!("plain stuff number{i}"), SentimentLabel::Neutral),
            };
            tweets.push(LabeledTweet { text, label });
        }
        let set = tiny_set(&[
            ("great", &[1.0, 0.0, 0.1]),
            ("horrible", &[-1.0, 0.0, 0.2]),
            ("plain", &[0.0, 1.0, -0.1]),
            ("stuff", &[0.1, 0.1, 0.1]),
            ("😍", &[2.0, -1.0, 0.4]),
            ("🤢", &[-2.0, -1.0, 0.3]),
        ]);
        let ranking = EmojiRanking::parse("😍\n🤢\n").unwrap();
        (tweets, set, ranking)
    }

    #[test]
    fn matrix_has_full_cross_product() {
        let (tweets, set, ranking) = matrix_fixture();
        let opts = EvalOptions {
            common_count: 1,
            rf: RfParams {
                trees: 10,
                max_depth: 4,
                ..RfParams::default()
            },
            ..EvalOptions::default()
        };
        let embeddings = vec![
            ("first".to_string(), set.clone()),
            ("second".to_string(), set.clone()),
        ];
        let tokenizer = Tokenizer::default();
        let report = run_matrix(&tweets, &tokenizer, &embeddings, &ranking, &opts).unwrap();
        assert_eq!(report.cells.len(), 24);
        for cell in &report.cells {
            if let Some(a) = cell.accuracy {
                assert!((0.0..=1.0).contains(&a));
            }
        }
        // The same embedding under two names gives identical columns.
        for classifier in ClassifierKind::ALL {
            for subset in Subset::ALL {
                for with in [true, false] {
                    assert_eq!(
                        report.accuracy("first", classifier, subset, with),
                        report.accuracy("second", classifier, subset, with),
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_rejects_missing_classes() {
        let (mut tweets, set, ranking) = matrix_fixture();
        tweets.retain(|t| t.label != SentimentLabel::Neutral);
        let tokenizer = Tokenizer::default();
        let embeddings = vec![("e".to_string(), set)];
        assert!(matches!(
            run_matrix(
                &tweets,
                &tokenizer,
                &embeddings,
                &ranking,
                &EvalOptions {
                    common_count: 1,
                    ..EvalOptions::default()
                }
            ),
            Err(Error::EvalInput(_))
        ));
    }

    #[test]
    fn report_csv_is_deterministic() {
        let (tweets, set, ranking) = matrix_fixture();
        let opts = EvalOptions {
            common_count: 1,
            rf: RfParams {
                trees: 5,
                max_depth: 3,
                ..RfParams::default()
            },
            ..EvalOptions::default()
        };
        let embeddings = vec![("e".to_string(), set)];
        let tokenizer = Tokenizer::default();
        let a = run_matrix(&tweets, &tokenizer, &embeddings, &ranking, &opts).unwrap();
        let b = run_matrix(&tweets, &tokenizer, &embeddings, &ranking, &opts).unwrap();
        let mut csv_a = Vec::new();
        a.write_csv(&mut csv_a).unwrap();
        let mut csv_b = Vec::new();
        b.write_csv(&mut csv_b).unwrap();
        assert_eq!(csv_a, csv_b);
        assert!(String::from_utf8(csv_a).unwrap().contains("# split_seed=1"));

        let table = a.render_table();
        assert!(table.contains("with emojis"));
        assert!(table.contains("without emojis"));
    }
}
