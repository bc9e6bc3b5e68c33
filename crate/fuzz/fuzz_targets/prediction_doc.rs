#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = serde_json::from_str::<hedp::engine::PredictionReport>(text) {
        let _ = report.config.validate();
        let _ = hedp::engine::render_text(&report);
        let _ = hedp::engine::render_csv(&report);
    }
});
