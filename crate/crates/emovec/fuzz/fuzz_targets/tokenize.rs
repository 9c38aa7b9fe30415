#![no_main]

use emovec::tokenizer::{segment_emojis, TokenKind, Tokenizer};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let tokenizer = Tokenizer::default();
    let tokens = tokenizer.tokenize(text);

    for token in &tokens {
        assert!(!token.surface.is_empty());
        if token.kind != TokenKind::Emoji {
            let folded = token.surface.to_lowercase();
            assert!(!tokenizer.config().stopwords.contains(&folded));
            assert!(!tokenizer.config().reserved_words.contains(&folded));
            assert!(!token.surface.chars().all(char::is_numeric));
        }
    }
    for pair in tokens.windows(2) {
        assert!(
            !(pair[0].kind == TokenKind::Emoji
                && pair[1].kind == TokenKind::Emoji
                && pair[0].surface == pair[1].surface),
            "consecutive identical emoji"
        );
    }

    // Tokenizing its own joined output must be a fixed point.
    let joined = tokens
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    let again = tokenizer.tokenize(&joined);
    assert_eq!(
        tokens.iter().map(|t| &t.surface).collect::<Vec<_>>(),
        again.iter().map(|t| &t.surface).collect::<Vec<_>>(),
    );

    // Segmentation never emits empty or mis-tagged segments.
    for segment in segment_emojis(text) {
        match segment {
            emovec::tokenizer::Segment::Emoji(e) => {
                assert!(emovec::tokenizer::is_emoji_token(&e))
            }
            emovec::tokenizer::Segment::Text(t) => assert!(!t.is_empty()),
        }
    }
});
