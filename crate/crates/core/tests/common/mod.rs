#![allow(dead_code)]

use cantor_spectra::tree::{make_trie, FiniteTrie};
use cantor_spectra::{MeasureParams, Word};
use rand::Rng;

pub fn params(q: u32, b: u32) -> MeasureParams {
    MeasureParams::new(q, b).unwrap()
}

pub fn word(q: u32, s: &str) -> Word {
    Word::parse(q, s).unwrap()
}

/// A trie with a random admissible label on every word of length `1..=depth`
/// that is not all zeros.
pub fn random_trie(p: MeasureParams, depth: usize, rng: &mut impl Rng) -> FiniteTrie {
    let q = p.q();
    let mut entries = Vec::new();
    for len in 1..=depth {
        for w in Word::all(q, len) {
            if w.is_zero() {
                continue;
            }
            let last = w.last().unwrap() as i64;
            let choices: Vec<i64> = (-1..=p.max_label())
                .filter(|d| (d - last).rem_euclid(q as i64) == 0)
                .collect();
            entries.push((w, choices[rng.gen_range(0..choices.len())]));
        }
    }
    make_trie(p, entries).unwrap()
}
