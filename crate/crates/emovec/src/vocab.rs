//! Frequency-filtered vocabulary and the negative-sampling distribution.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, RngExt};

use crate::{Error, Result};

/// One vocabulary entry; the entry's position in the table is its id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub surface: String,
    pub count: u64,
}

/// Token table ordered by descending count, ties broken lexicographically
/// by surface. Ids are dense indices `0..len`.
#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds the vocabulary from raw counts, keeping tokens with
    /// `count >= min_count`.
    pub fn from_counts(counts: HashMap<String, u64>, min_count: u64) -> Self {
        let min_count = min_count.max(1);
        let mut entries: Vec<VocabEntry> = counts
            .into_iter()
            .filter(|(_, count)| *count >= min_count)
            .map(|(surface, count)| VocabEntry { surface, count })
            .collect();
        entries.sort_by(|a, b| {
            b.count
                .cmp(&a.count)
                .then_with(|| a.surface.cmp(&b.surface))
        });
        let index = entries
            .iter()
            .enumerate()
            .map(|(id, e)| (e.surface.clone(), id))
            .collect();
        Vocabulary { entries, index }
    }

    pub fn from_tokens<I, S>(tokens: I, min_count: u64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for token in tokens {
            *counts.entry(token.as_ref().to_string()).or_insert(0) += 1;
        }
        Self::from_counts(counts, min_count)
    }

    /// Counts whitespace-separated tokens from a tokenized corpus file,
    /// one tweet per line, without loading the corpus into memory.
    pub fn from_corpus_file(path: &Path, min_count: u64) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::new(file);
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut line = String::new();
        loop {
            line.clear();
            let n = reader.read_line(&mut line).map_err(|e| Error::io(path, e))?;
            if n == 0 {
                break;
            }
            for token in line.split_whitespace() {
                if let Some(count) = counts.get_mut(token) {
                    *count += 1;
                } else {
                    counts.insert(token.to_string(), 1);
                }
            }
        }
        Ok(Self::from_counts(counts, min_count))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, surface: &str) -> Option<usize> {
        self.index.get(surface).copied()
    }

    pub fn entry(&self, id: usize) -> &VocabEntry {
        &self.entries[id]
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    /// Total count over retained entries.
    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Writes the dump format: one `surface<TAB>count` line per entry in
    /// id order.
    pub fn write_tsv<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        for entry in &self.entries {
            writeln!(writer, "{}\t{}", entry.surface, entry.count)?;
        }
        Ok(())
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = std::io::BufWriter::new(file);
        self.write_tsv(&mut writer).map_err(|e| Error::io(path, e))
    }

    /// Parses the dump format back. Line order defines ids; counts must
    /// be non-increasing and surfaces unique and whitespace-free.
    pub fn parse_tsv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        let mut prev_count = u64::MAX;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            if raw.is_empty() {
                continue;
            }
            let (surface, count) = raw.split_once('\t').ok_or_else(|| Error::VocabFormat {
                line: line_no,
                reason: "expected surface<TAB>count".into(),
            })?;
            if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                return Err(Error::VocabFormat {
                    line: line_no,
                    reason: "surface must be non-empty and whitespace-free".into(),
                });
            }
            let count: u64 = count.trim().parse().map_err(|_| Error::VocabFormat {
                line: line_no,
                reason: format!("bad count {count:?}"),
            })?;
            if count == 0 {
                return Err(Error::VocabFormat {
                    line: line_no,
                    reason: "count must be positive".into(),
                });
            }
            if count > prev_count {
                return Err(Error::VocabFormat {
                    line: line_no,
                    reason: "counts must be non-increasing".into(),
                });
            }
            prev_count = count;
            if index.insert(surface.to_string(), entries.len()).is_some() {
                return Err(Error::VocabFormat {
                    line: line_no,
                    reason: format!("duplicate surface {surface:?}"),
                });
            }
            entries.push(VocabEntry {
                surface: surface.to_string(),
                count,
            });
        }
        Ok(Vocabulary { entries, index })
    }

    pub fn load_tsv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text)
    }
}

/// Cumulative distribution over vocabulary ids proportional to
/// `count^alpha`, used to draw negative samples.
#[derive(Debug, Clone)]
pub struct SamplingTable {
    cumulative: Vec<f64>,
}

impl SamplingTable {
    pub fn new(vocab: &Vocabulary, alpha: f64) -> Result<Self> {
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "sampling exponent must lie in (0, 1], got {alpha}"
            )));
        }
        let mut cumulative = Vec::with_capacity(vocab.len());
        let mut total = 0.0f64;
        for entry in vocab.entries() {
            total += (entry.count as f64).powf(alpha);
            cumulative.push(total);
        }
        for value in &mut cumulative {
            *value /= total;
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(SamplingTable { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Probability mass of one id.
    pub fn probability(&self, id: usize) -> f64 {
        let lower = if id == 0 { 0.0 } else { self.cumulative[id - 1] };
        self.cumulative[id] - lower
    }

    /// Draws one id.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let r: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c <= r)
            .min(self.cumulative.len() - 1)
    }
}

/// Keep probability for frequent-word subsampling:
/// `min(1, (sqrt(f/sample) + 1) * sample / f)` with `f = count/total`.
/// `sample = 0` disables subsampling and always keeps the token.
pub fn subsample_keep_probability(count: u64, total: u64, sample: f64) -> f64 {
    if sample <= 0.0 || count == 0 || total == 0 {
        return 1.0;
    }
    let frequency = count as f64 / total as f64;
    (((frequency / sample).sqrt() + 1.0) * sample / frequency).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threshold_filters_entries() {
        let vocab = Vocabulary::from_tokens(["a", "a", "b"], 2);
        assert_eq!(vocab.len(), 1);
        assert_eq!(vocab.entry(0).surface, "a");
        assert_eq!(vocab.entry(0).count, 2);
        assert_eq!(vocab.id("a"), Some(0));
        assert_eq!(vocab.id("b"), None);
    }

    #[test]
    fn ids_by_count_then_surface() {
        let vocab = Vocabulary::from_tokens(["a", "a", "b"], 1);
        assert_eq!(vocab.id("a"), Some(0));
        assert_eq!(vocab.id("b"), Some(1));

        let tied = Vocabulary::from_tokens(["z", "m", "a"], 1);
        let order: Vec<&str> = tied.entries().iter().map(|e| e.surface.as_str()).collect();
        assert_eq!(order, ["a", "m", "z"]);
    }

    #[test]
    fn empty_stream_is_empty_vocab() {
        let vocab = Vocabulary::from_tokens(Vec::<&str>::new(), 1);
        assert!(vocab.is_empty());
        assert!(SamplingTable::new(&vocab, 0.75).is_err());
    }

    #[test]
    fn rebuilding_is_deterministic() {
        let tokens = ["x", "y", "x", "z", "z", "z"];
        let a = Vocabulary::from_tokens(tokens, 1);
        let b = Vocabulary::from_tokens(tokens, 1);
        assert_eq!(a.entries(), b.entries());
    }

    #[test]
    fn higher_min_count_is_subset() {
        let tokens: Vec<String> = (0..100)
            .flat_map(|i| std::iter::repeat(format!("w{}", i % 13)).take(i % 7 + 1))
            .collect();
        let low = Vocabulary::from_tokens(&tokens, 2);
        let high = Vocabulary::from_tokens(&tokens, 5);
        for entry in high.entries() {
            assert!(low.id(&entry.surface).is_some());
        }
    }

    #[test]
    fn sampling_probabilities_match_power_law() {
        let vocab = Vocabulary::from_tokens(
            std::iter::repeat("a")
                .take(81)
                .chain(std::iter::repeat("b").take(16)),
            1,
        );
        let table = SamplingTable::new(&vocab, 0.75).unwrap();
        // 81^0.75 = 27, 16^0.75 = 8.
        assert!((table.probability(vocab.id("a").unwrap()) - 27.0 / 35.0).abs() < 1e-12);
        assert!((table.probability(vocab.id("b").unwrap()) - 8.0 / 35.0).abs() < 1e-12);
    }

    #[test]
    fn single_token_probability_is_one() {
        let vocab = Vocabulary::from_tokens(["only"], 1);
        let table = SamplingTable::new(&vocab, 0.75).unwrap();
        assert_eq!(table.probability(0), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(table.sample(&mut rng), 0);
    }

    #[test]
    fn equal_counts_split_evenly() {
        let vocab = Vocabulary::from_tokens(["a", "a", "a", "a", "b", "b", "b", "b"], 1);
        let table = SamplingTable::new(&vocab, 0.75).unwrap();
        assert!((table.probability(0) - 0.5).abs() < 1e-12);
        assert!((table.probability(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let tokens: Vec<String> = (0..60)
            .flat_map(|i| std::iter::repeat(format!("t{i}")).take(i + 1))
            .collect();
        let vocab = Vocabulary::from_tokens(&tokens, 1);
        let table = SamplingTable::new(&vocab, 0.75).unwrap();
        let sum: f64 = (0..table.len()).map(|id| table.probability(id)).sum();
        assert!((sum - 1.0).abs() < 1e-9);
        assert!((0..table.len()).all(|id| table.probability(id) > 0.0));
    }

    #[test]
    fn empirical_frequencies_track_probabilities() {
        let tokens: Vec<String> = (0..40)
            .flat_map(|i| std::iter::repeat(format!("t{i:02}")).take((i + 1) * (i + 1)))
            .collect();
        let vocab = Vocabulary::from_tokens(&tokens, 1);
        let table = SamplingTable::new(&vocab, 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws = 1_000_000usize;
        let mut hits = vec![0u64; vocab.len()];
        for _ in 0..draws {
            hits[table.sample(&mut rng)] += 1;
        }
        for id in 0..vocab.len() {
            let empirical = hits[id] as f64 / draws as f64;
            assert!(
                (empirical - table.probability(id)).abs() < 0.01,
                "id {id}: empirical {empirical}, expected {}",
                table.probability(id)
            );
        }
    }

    #[test]
    fn subsample_examples() {
        assert_eq!(subsample_keep_probability(10, 100, 0.0), 1.0);
        // f == sample sits exactly at the keep-everything boundary.
        assert_eq!(subsample_keep_probability(1, 10_000, 1e-4), 1.0);
        // f = 0.01, sample = 1e-4 -> (sqrt(100) + 1) / 100.
        let p = subsample_keep_probability(100, 10_000, 1e-4);
        assert!((p - 0.11).abs() < 1e-12);
    }

    #[test]
    fn tsv_round_trip() {
        let vocab = Vocabulary::from_tokens(["b", "b", "b", "a", "a", "😂", "😂"], 1);
        let mut buf = Vec::new();
        vocab.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let reloaded = Vocabulary::parse_tsv(&text).unwrap();
        assert_eq!(reloaded.entries(), vocab.entries());
        assert_eq!(reloaded.id("😂"), vocab.id("😂"));
    }

    #[test]
    fn tsv_parse_errors() {
        assert!(matches!(
            Vocabulary::parse_tsv("a 3\n"),
            Err(Error::VocabFormat { line: 1, .. })
        ));
        assert!(matches!(
            Vocabulary::parse_tsv("a\t1\nb\t2\n"),
            Err(Error::VocabFormat { line: 2, .. })
        ));
        assert!(matches!(
            Vocabulary::parse_tsv("a\t3\na\t3\n"),
            Err(Error::VocabFormat { line: 2, .. })
        ));
    }
}
