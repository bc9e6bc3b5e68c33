#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(modes) = hedp::catalog::load_catalog(text) {
        for mode in &modes {
            let _ = hedp::catalog::validate_mode(mode);
            let reparsed =
                hedp::dsl::parse_scenario(&mode.dsl_source).expect("rendered scenario re-parses");
            assert_eq!(reparsed, mode.ast, "render/parse round trip diverged");
        }
    }
});
