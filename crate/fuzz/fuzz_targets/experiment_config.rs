#![no_main]

use condorcet_lab::config::ExperimentConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if data.len() > 64 * 1024 {
        return;
    }
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(config) = ExperimentConfig::from_json(text) else {
        return;
    };
    if let Ok(plan) = config.validate() {
        // A resolved config must validate to the same plan again.
        let resolved = config.resolved(&plan);
        assert!(resolved.validate().is_ok());
        let _ = serde_json::to_string(&resolved);
    }
});
