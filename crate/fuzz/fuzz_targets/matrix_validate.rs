//! Raw matrices: the first byte picks n, the rest are read as little-endian
//! f64 entries.

#![no_main]

use condorcet_core::PreferenceMatrix;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else {
        return;
    };
    let n = (head % 8) as usize + 1;
    let values: Vec<f64> = rest
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let rows: Vec<Vec<f64>> = values.chunks(n).map(<[f64]>::to_vec).collect();
    let Ok(m) = PreferenceMatrix::new(&rows) else {
        return;
    };
    if let Some(w) = m.condorcet_winner() {
        assert!(m.condorcet_gap().is_some_and(|(g, p)| g == w && p < 0.5));
    }
    for x in [1, 3, 5] {
        let b = m.boosted(x).expect("odd x");
        if let Some(w) = b.condorcet_winner() {
            assert_eq!(Some(w), m.condorcet_winner());
        }
    }
});
