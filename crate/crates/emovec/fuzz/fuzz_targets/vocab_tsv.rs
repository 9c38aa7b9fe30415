#![no_main]

use emovec::vocab::Vocabulary;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(vocab) = Vocabulary::parse_tsv(text) {
        // Counts non-increasing by id, ids dense, index consistent.
        let mut previous = u64::MAX;
        for (id, entry) in vocab.entries().iter().enumerate() {
            assert!(entry.count >= 1 && entry.count <= previous);
            previous = entry.count;
            assert_eq!(vocab.id(&entry.surface), Some(id));
        }

        let mut buffer = Vec::new();
        vocab.write_tsv(&mut buffer).unwrap();
        let reparsed = Vocabulary::parse_tsv(std::str::from_utf8(&buffer).unwrap()).unwrap();
        assert_eq!(reparsed.entries(), vocab.entries());
    }
});
