#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(corpus) = hedp::corpus::parse_corpus(text) {
        let _ = hedp::corpus::validate_corpus(&corpus);
        let rendered = corpus.render();
        let reparsed = hedp::corpus::parse_corpus(&rendered).expect("rendered corpus re-parses");
        assert_eq!(reparsed, corpus, "render/parse round trip diverged");
    }
});
