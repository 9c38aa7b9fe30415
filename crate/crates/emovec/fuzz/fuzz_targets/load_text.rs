#![no_main]

use emovec::store::EmbeddingSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(set) = EmbeddingSet::parse_text(text) {
        // Accepted input must re-serialize into something that parses
        // back with the same shape.
        let mut buffer = Vec::new();
        set.write_text(&mut buffer).unwrap();
        let reparsed = EmbeddingSet::parse_text(std::str::from_utf8(&buffer).unwrap()).unwrap();
        assert_eq!(reparsed.surfaces(), set.surfaces());
        assert_eq!(reparsed.dim(), set.dim());
    }
});
