#![no_main]

use emovec::sentiment::EmojiRanking;
use emovec::tokenizer::is_emoji_token;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(ranking) = EmojiRanking::parse(text) {
        for (rank, surface) in ranking.surfaces().iter().enumerate() {
            assert!(is_emoji_token(surface));
            assert_eq!(ranking.rank(surface), Some(rank));
        }
    }
});
