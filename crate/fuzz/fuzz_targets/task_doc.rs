#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(task) = serde_json::from_str::<hedp::model::TaskModel>(text) {
        let _ = hedp::model::validate_task(&task);
    }
});
