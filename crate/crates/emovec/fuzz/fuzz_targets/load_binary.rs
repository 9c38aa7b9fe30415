#![no_main]

use emovec::store::EmbeddingSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(set) = EmbeddingSet::parse_binary(data) {
        // Anything that parses must survive a write/parse cycle with
        // identical surfaces and bit-identical vectors.
        let mut buffer = Vec::new();
        set.write_binary(&mut buffer).unwrap();
        let reparsed = EmbeddingSet::parse_binary(&buffer).unwrap();
        assert_eq!(reparsed.surfaces(), set.surfaces());
        assert_eq!(reparsed.dim(), set.dim());
        for id in 0..set.len() {
            let original: Vec<u32> = set.vector(id).iter().map(|v| v.to_bits()).collect();
            let cycled: Vec<u32> = reparsed.vector(id).iter().map(|v| v.to_bits()).collect();
            assert_eq!(original, cycled);
        }
    }
});
