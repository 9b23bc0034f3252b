mod common;

use cantor_spectra::gap::{gap_value, min_gap, sup_gap, SearchLimits};
use cantor_spectra::measure::{compute_constants, fourier_mu_shifted, partial_product_hm_shifted};
use cantor_spectra::tree::{make_kappa, pi_inf, pi_n, TreeMapping};
use cantor_spectra::Word;
use common::{params, random_trie};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `D_{τ,δ}(δ′)` straight from the definition over a finite label list.
fn gap_by_definition(q: u32, labels: &[i64]) -> u64 {
    let a: Vec<usize> = (0..labels.len()).filter(|&m| labels[m] != 0).map(|m| m + 1).collect();
    let mut total = a.len() as u64;
    for (j, &m) in a.iter().enumerate() {
        if labels[m - 1].rem_euclid(q as i64) != 0 {
            let prev = if j == 0 { 0 } else { a[j - 1] };
            total += (m - prev - 1) as u64;
        }
    }
    total
}

#[test]
fn gap_value_matches_definition() {
    let p = params(2, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let t = random_trie(p, 7, &mut rng);
        for delta in Word::all(2, 3) {
            for ext in Word::all(2, 3) {
                let g = gap_value(&t, &delta, &ext, 32);
                let labels: Vec<i64> = t
                    .labels_along(&delta.concat(&ext), 7)
                    .into_iter()
                    .skip(3)
                    .map(Option::unwrap)
                    .collect();
                assert_eq!(g.value, gap_by_definition(2, &labels), "{delta} {ext}");
            }
        }
    }
}

#[test]
fn min_gap_matches_exhaustive_search() {
    let p = params(2, 6);
    let limits = SearchLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let depth = 6;
        let t = random_trie(p, depth, &mut rng);
        for delta in Word::all(2, 2) {
            let best = (0..=depth - 2)
                .flat_map(|n| Word::all(2, n))
                .map(|ext| gap_value(&t, &delta, &ext, 32).value)
                .min()
                .unwrap();
            let m = min_gap(&t, &delta, &limits).unwrap();
            assert!(m.exact);
            assert_eq!(m.value, Some(best), "{delta}");
        }
    }
}

#[test]
fn kappa_extensions_keep_the_transform_large() {
    let p = params(2, 6);
    let kappa = make_kappa(p).unwrap();
    let c = compute_constants(&p, 1e-4f64).unwrap();
    let r = c.r0.min(1.0 / 6.0).min(c.r1 / 30.0);
    let sup = sup_gap(&kappa, 4, &SearchLimits::default()).unwrap().value.unwrap();
    let factor = r.powi(2 * sup as i32 + 2);
    let limits = SearchLimits::default();
    for xi in [-0.19, -0.1, 0.14, 0.3, 0.5, 0.75] {
        for n in 1..=4 {
            for delta in Word::all(2, n) {
                let ext = min_gap(&kappa, &delta, &limits).unwrap().witness.unwrap();
                let full = delta.concat(&ext);
                let lambda = pi_inf(&kappa, &full, 128).unwrap();
                let lambda = lambda.value().unwrap();
                let lhs = fourier_mu_shifted(&p, xi, lambda, 1e-12).unwrap();
                let base = pi_n(&kappa, &delta, n).unwrap();
                let h = partial_product_hm_shifted::<f64>(&p, n as u32, xi, &base).norm();
                assert!(lhs.norm() + lhs.error_bound + 1e-8 >= factor * h, "{xi} {delta}");
            }
        }
    }
}

#[test]
fn certificates_serialize() {
    let kappa = make_kappa(params(2, 6)).unwrap();
    let c = cantor_spectra::gap::certify_spectrum(&kappa, 6, &SearchLimits::default()).unwrap();
    let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    assert_eq!(v["verdict"], "spectrum");
    assert_eq!(v["theorem"], "bounded-gap");
    assert_eq!(v["parameters"]["q"], 2);
    let w = &v["witnesses"];
    assert!(w.is_array());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]
    #[test]
    fn partial_gap_grows_along_extensions(seed in any::<u64>(), cut in 0usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = params(2, 6);
        let t = random_trie(p, 7, &mut rng);
        let delta = Word::new(2, (0..2).map(|_| rng.gen_range(0..2)).collect()).unwrap();
        let long = Word::new(2, (0..5).map(|_| rng.gen_range(0..2)).collect()).unwrap();
        let short = long.prefix(cut);
        let labels = |ext: &Word| -> Vec<i64> {
            t.labels_along(&delta.concat(ext), 2 + ext.len())
                .into_iter()
                .skip(2)
                .map(Option::unwrap)
                .collect()
        };
        prop_assert!(gap_by_definition(2, &labels(&short)) <= gap_by_definition(2, &labels(&long)));
    }

    #[test]
    fn min_gap_below_zero_tail(seed in any::<u64>()) {
        let t = random_trie(params(2, 4), 6, &mut ChaCha8Rng::seed_from_u64(seed));
        for delta in Word::all(2, 3) {
            let m = min_gap(&t, &delta, &SearchLimits::default()).unwrap();
            let zero_tail = gap_value(&t, &delta, &Word::empty(2), 64);
            prop_assert!(m.value.unwrap() <= zero_tail.value);
        }
    }
}
