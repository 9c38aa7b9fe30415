#![no_main]

use emovec::emoji_desc::parse_descriptions;
use emovec::tokenizer::is_emoji_token;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(descriptions) = parse_descriptions(text) {
        for description in descriptions {
            assert!(is_emoji_token(&description.emoji));
            assert!(!description.words.is_empty());
            for word in &description.words {
                assert!(!word.is_empty());
                assert!(word.chars().all(char::is_alphanumeric));
            }
        }
    }
});
