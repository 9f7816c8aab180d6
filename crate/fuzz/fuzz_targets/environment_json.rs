//! Environment documents: any JSON text either fails to parse or resolves to
//! a valid preference matrix.

#![no_main]

use condorcet_core::input::parse_environment;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(env) = parse_environment(text) else {
        return;
    };
    let m = &env.matrix;
    for i in 0..m.n() {
        assert_eq!(m.get(i, i), 1.0);
        for j in 0..i {
            assert!((m.get(i, j) + m.get(j, i) - 1.0).abs() <= 1e-12);
        }
    }
    if let Some(u) = &env.utilities {
        assert_eq!(u.n(), m.n());
    }
});
