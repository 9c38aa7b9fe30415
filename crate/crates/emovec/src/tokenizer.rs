//! Tweet text normalization.
//!
//! The pipeline applies, in this fixed order: HTML-entity removal;
//! URL/mention/email replacement with placeholder words; hashtag-sign
//! removal; emoji segmentation with consecutive-duplicate removal;
//! lowercasing; repeated-character collapsing; punctuation stripping;
//! and removal of reserved words, stop-words and purely numeric tokens.
//! Entity replacement has to run before punctuation stripping or URLs
//! shatter into word fragments.

use std::collections::HashSet;
use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use unicode_segmentation::UnicodeSegmentation;

use crate::{Error, Result};

/// Replacement word for user mentions.
pub const MENTION_PLACEHOLDER: &str = "mentionn";
/// Replacement word for URLs.
pub const LINK_PLACEHOLDER: &str = "linkks";
/// Replacement word for email addresses.
pub const EMAIL_PLACEHOLDER: &str = "emailss";

/// Built-in English stop-word list, one word per line, already lowercased
/// and apostrophe-free so entries compare equal to normalized tokens.
pub const BUILTIN_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

static HTML_ENTITY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"&(?:[A-Za-z][A-Za-z0-9]{1,31}|#[0-9]{1,7}|#[xX][0-9A-Fa-f]{1,6});").unwrap()
});
static URL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)https?://\S+|\bt\.co/\S+").unwrap());
static EMAIL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)[a-z0-9._%+-]+@[a-z0-9.-]+\.[a-z]{2,}").unwrap());
static MENTION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(^|[^\w@])@[a-z0-9_]{1,15}\b").unwrap());
static EXTENDED_PICTOGRAPHIC: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\p{Extended_Pictographic}").unwrap());

/// What a normalized token stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Word,
    Emoji,
    Placeholder,
}

/// A normalized lexical unit: a word, a single emoji grapheme cluster, or
/// one of the mention/link/email placeholder words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    fn word(surface: String) -> Self {
        let kind = match surface.as_str() {
            MENTION_PLACEHOLDER | LINK_PLACEHOLDER | EMAIL_PLACEHOLDER => TokenKind::Placeholder,
            _ => TokenKind::Word,
        };
        Token { surface, kind }
    }

    fn emoji(surface: String) -> Self {
        Token {
            surface,
            kind: TokenKind::Emoji,
        }
    }
}

/// Tokenizer knobs. `collapse_threshold`/`collapse_to` control the
/// repeated-character rule: every run of at least `collapse_threshold`
/// identical scalars is shortened to `collapse_to` copies.
#[derive(Debug, Clone)]
pub struct TokenizerConfig {
    pub stopwords: HashSet<String>,
    pub reserved_words: HashSet<String>,
    pub collapse_threshold: usize,
    pub collapse_to: usize,
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            stopwords: builtin_stopwords(),
            reserved_words: ["rt".to_string()].into_iter().collect(),
            collapse_threshold: 3,
            collapse_to: 2,
            lowercase: true,
        }
    }
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.collapse_threshold < 2 {
            return Err(Error::InvalidConfig(
                "collapse_threshold must be at least 2".into(),
            ));
        }
        if self.collapse_to < 1 || self.collapse_to >= self.collapse_threshold {
            return Err(Error::InvalidConfig(
                "collapse_to must satisfy 1 <= collapse_to < collapse_threshold".into(),
            ));
        }
        Ok(())
    }
}

/// The built-in stop-word set.
pub fn builtin_stopwords() -> HashSet<String> {
    BUILTIN_STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| w.to_lowercase())
        .collect()
}

/// Loads a stop-word file (one word per line). Words are normalized like
/// tokens — lowercased with punctuation dropped — so a list containing
/// "don't" still matches the token "dont".
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(|w| {
            w.trim()
                .to_lowercase()
                .chars()
                .filter(|c| c.is_alphanumeric())
                .collect::<String>()
        })
        .filter(|w| !w.is_empty())
        .collect())
}

/// A segment of raw text: either one emoji grapheme cluster or a maximal
/// stretch of non-emoji text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Emoji(String),
    Text(String),
}

fn is_regional_indicator(c: char) -> bool {
    ('\u{1F1E6}'..='\u{1F1FF}').contains(&c)
}

fn is_regional_pair(grapheme: &str) -> bool {
    let mut chars = grapheme.chars();
    matches!(
        (chars.next(), chars.next(), chars.next()),
        (Some(a), Some(b), None) if is_regional_indicator(a) && is_regional_indicator(b)
    )
}

fn is_emoji_grapheme(grapheme: &str) -> bool {
    EXTENDED_PICTOGRAPHIC.is_match(grapheme) || is_regional_pair(grapheme)
}

/// True when `s` is exactly one emoji token: a single grapheme cluster
/// with the `Extended_Pictographic` property (ZWJ and modifier sequences
/// count as one cluster) or a regional-indicator pair.
pub fn is_emoji_token(s: &str) -> bool {
    let mut graphemes = s.graphemes(true);
    match (graphemes.next(), graphemes.next()) {
        (Some(g), None) => is_emoji_grapheme(g),
        _ => false,
    }
}

/// Splits text at emoji boundaries. Each emoji grapheme cluster becomes
/// its own segment and runs of identical consecutive emoji clusters are
/// reduced to one.
pub fn segment_emojis(text: &str) -> Vec<Segment> {
    let mut segments: Vec<Segment> = Vec::new();
    let mut buf = String::new();
    for grapheme in text.graphemes(true) {
        if is_emoji_grapheme(grapheme) {
            if !buf.is_empty() {
                segments.push(Segment::Text(std::mem::take(&mut buf)));
            }
            let duplicate = matches!(
                segments.last(),
                Some(Segment::Emoji(prev)) if prev == grapheme
            );
            if !duplicate {
                segments.push(Segment::Emoji(grapheme.to_string()));
            }
        } else {
            buf.push_str(grapheme);
        }
    }
    if !buf.is_empty() {
        segments.push(Segment::Text(buf));
    }
    segments
}

/// Replaces every maximal run of at least `threshold` identical Unicode
/// scalars with exactly `to` copies. `word` is expected to be lowercased
/// already; runs are counted in scalars, not bytes.
pub fn collapse_repeats(word: &str, threshold: usize, to: usize) -> String {
    debug_assert!(threshold >= 2 && to >= 1 && to < threshold);
    let mut out = String::with_capacity(word.len());
    let mut chars = word.chars().peekable();
    while let Some(c) = chars.next() {
        let mut run = 1usize;
        while chars.peek() == Some(&c) {
            chars.next();
            run += 1;
        }
        let keep = if run >= threshold { to } else { run };
        for _ in 0..keep {
            out.push(c);
        }
    }
    out
}

/// Tweet tokenizer. All methods are pure functions of the input and the
/// configuration; one instance can be shared by any number of threads.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    cfg: TokenizerConfig,
}

impl Default for Tokenizer {
    fn default() -> Self {
        Tokenizer {
            cfg: TokenizerConfig::default(),
        }
    }
}

impl Tokenizer {
    pub fn new(cfg: TokenizerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Tokenizer { cfg })
    }

    pub fn config(&self) -> &TokenizerConfig {
        &self.cfg
    }

    /// Converts one tweet into its normalized token sequence. Any input
    /// yields a (possibly empty) sequence; surviving units keep their
    /// left-to-right order.
    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let text = HTML_ENTITY.replace_all(text, " ");
        let text = URL.replace_all(&text, format!(" {LINK_PLACEHOLDER} ").as_str());
        let text = EMAIL.replace_all(&text, format!(" {EMAIL_PLACEHOLDER} ").as_str());
        let text = MENTION.replace_all(&text, format!("${{1}} {MENTION_PLACEHOLDER} ").as_str());
        let text = text.replace('#', "");

        let mut out: Vec<Token> = Vec::new();
        for segment in segment_emojis(&text) {
            match segment {
                Segment::Emoji(surface) => {
                    // Words removed between two identical emojis must not
                    // leave a duplicate pair behind.
                    let duplicate = matches!(
                        out.last(),
                        Some(prev) if prev.kind == TokenKind::Emoji && prev.surface == surface
                    );
                    if !duplicate {
                        out.push(Token::emoji(surface));
                    }
                }
                Segment::Text(body) => {
                    for raw in body.split_whitespace() {
                        if let Some(word) = self.normalize_word(raw) {
                            out.push(Token::word(word));
                        }
                    }
                }
            }
        }
        out
    }

    /// Lowercase, collapse, strip punctuation, then filter reserved
    /// words, stop-words and purely numeric tokens. Returns `None` when
    /// the word is dropped.
    fn normalize_word(&self, raw: &str) -> Option<String> {
        let cfg = &self.cfg;
        let lowered = if cfg.lowercase {
            raw.to_lowercase()
        } else {
            raw.to_string()
        };
        let collapsed = collapse_repeats(&lowered, cfg.collapse_threshold, cfg.collapse_to);
        let stripped: String = collapsed.chars().filter(|c| c.is_alphanumeric()).collect();
        if stripped.is_empty() {
            return None;
        }
        // Stripping can merge fragments into a fresh long run ("bb&b" ->
        // "bbb"); collapse once more so tokenize is idempotent.
        let stripped = collapse_repeats(&stripped, cfg.collapse_threshold, cfg.collapse_to);
        // Reserved words and stop-words match case-insensitively so "RT"
        // is dropped even with lowercasing turned off.
        let folded = if cfg.lowercase {
            stripped.clone()
        } else {
            stripped.to_lowercase()
        };
        if cfg.reserved_words.contains(&folded) || cfg.stopwords.contains(&folded) {
            return None;
        }
        if stripped.chars().all(char::is_numeric) {
            return None;
        }
        Some(stripped)
    }
}
