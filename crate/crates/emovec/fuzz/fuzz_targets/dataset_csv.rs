#![no_main]

use emovec::sentiment::parse_dataset_csv;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(tweets) = parse_dataset_csv(data) {
        for tweet in tweets {
            // Labels always land on one of the three classes.
            assert!(["negative", "neutral", "positive"].contains(&tweet.label.as_str()));
        }
    }
});
