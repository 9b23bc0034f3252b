//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::Instant;

use cantor_spectra::frame::{frame_scan, filter_identity_deviation, qn, XiGrid};
use cantor_spectra::gap::{
    certify_spectrum, defect_lower_bound, min_gap, n_tau, refute_series, SearchLimits,
};
use cantor_spectra::measure::{
    compute_constants, fourier_mu, fourier_mu_shifted, in_tb, shifted_lower_bound,
    partial_product_hm_certified, positions_value, truncation_bound,
};
use cantor_spectra::ortho::{in_zero_set, is_maximal_at_depth, is_orthogonal_set, tree_from_set};
use cantor_spectra::rescale::{classify_k_lambda4, divide_set, verify_repetend};
use cantor_spectra::tree::{
    enumerate_lambda, make_kappa, make_tau24, make_trie, pi_n, rescaled_counterexample,
    TreeMapping,
};
use cantor_spectra::{MeasureParams, Verdict, Word};
use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(q: u32, b: u32) -> MeasureParams {
    MeasureParams::new(q, b).unwrap()
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn filter_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e3a);
    let mut worst = 0.0f64;
    for (q, b) in [(2, 4), (2, 6), (3, 6)] {
        let p = params(q, b);
        for _ in 0..20 {
            let mut entries = Vec::new();
            for len in 1..=6 {
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
            let t = make_trie(p, entries).map_err(e)?;
            let xis: Vec<f64> = (0..100).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            for m in 1..=6 {
                let dev = filter_identity_deviation(&t, m, &xis).map_err(e)?;
                worst = worst.max(dev);
                ensure(dev < 1e-9, || format!("({q},{b}) m={m}: deviation {dev:e}"))?;
            }
        }
    }
    Ok(format!("max deviation {worst:.2e} over 60 mappings"))
}

fn generated_sets_orthogonal() -> Outcome {
    let tau = make_tau24();
    let set = enumerate_lambda(&tau, 10, 64).map_err(e)?;
    ensure(set.values.len() == 1024, || format!("|Λ_10| = {}", set.values.len()))?;
    let r = is_orthogonal_set(&tau.params(), &set.values).map_err(e)?;
    ensure(r.orthogonal, || format!("tau24 pair {:?}", r.violating_pair))?;
    let kappa = make_kappa(params(2, 6)).map_err(e)?;
    let kset = enumerate_lambda(&kappa, 4, 64).map_err(e)?;
    ensure(kset.unresolved.is_empty(), || "kappa level 4 unresolved".into())?;
    let r = is_orthogonal_set(&kappa.params(), &kset.values).map_err(e)?;
    ensure(r.orthogonal, || format!("kappa pair {:?}", r.violating_pair))?;
    Ok(format!("tau24: 1024 elements, kappa(2,6): {} elements", kset.values.len()))
}

fn injectivity() -> Outcome {
    let tau = make_tau24();
    let kappa = make_kappa(params(2, 6)).map_err(e)?;
    let mappings: [&dyn TreeMapping; 2] = [&tau, &kappa];
    for t in mappings {
        for n in 1..=8 {
            let mut seen = HashSet::new();
            for w in Word::all(2, n) {
                let v = pi_n(t, &w, n).map_err(e)?;
                ensure(seen.insert(v.clone()), || format!("{} n={n}: repeat {v}", t.name()))?;
            }
        }
    }
    Ok("tau24 and kappa(2,6), n <= 8".into())
}

fn gap_facts() -> Outcome {
    let limits = SearchLimits::default();
    let tau = make_tau24();
    let mut words = 0;
    for n in 1..=8 {
        for d in Word::all(2, n) {
            let m = min_gap(&tau, &d, &limits).map_err(e)?;
            ensure(m.exact && m.value == Some(0), || format!("tau24 {d}: {m:?}"))?;
            words += 1;
        }
    }
    let kappa = make_kappa(params(2, 6)).map_err(e)?;
    let mut largest = 0;
    for n in 1..=5 {
        for d in Word::all(2, n) {
            let m = min_gap(&kappa, &d, &limits).map_err(e)?;
            let v = m.value.ok_or_else(|| format!("kappa {d}: no value"))?;
            ensure(m.exact && v <= 5, || format!("kappa {d}: {m:?}"))?;
            largest = largest.max(v);
            words += 1;
        }
    }
    Ok(format!("{words} words; kappa max min_gap {largest}"))
}

fn mult_order(base: u64, modulus: u64) -> u32 {
    if modulus == 1 {
        return 1;
    }
    let (mut x, mut n) = (base % modulus, 1);
    while x != 1 {
        x = x * base % modulus;
        n += 1;
    }
    n
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Repetend of some `i/K` over digits `{0,1}` in base 4, found without the
/// digit graph. Short periods enumerate every word; longer ones use that a
/// purely periodic expansion of `i/K` has period dividing `ord_{K'}(4)` and
/// is unique, so its digits can be read off.
fn brute_force_repetend(k: u64) -> Option<(u64, Vec<i64>)> {
    let mut orders = BTreeSet::new();
    for d in 1..=k {
        if k % d == 0 {
            orders.insert(mult_order(4, d));
        }
    }
    for &n in &orders {
        if n > 12 {
            continue;
        }
        let modulus = 4u128.pow(n) - 1;
        for bits in 1u64..(1 << n) {
            let x: u128 = (0..n)
                .filter(|j| bits >> j & 1 == 1)
                .map(|j| 4u128.pow(j))
                .sum();
            if (k as u128 * x) % modulus == 0 {
                let w = (0..n).map(|j| (bits >> j & 1) as i64).collect();
                return Some(((k as u128 * x / modulus) as u64, w));
            }
        }
    }
    for i in 1..k {
        let reduced = k / gcd(i, k);
        let n = mult_order(4, reduced);
        let modulus = BigInt::from(4u32).pow(n) - 1u32;
        let x = BigInt::from(i) * &modulus / BigInt::from(k);
        let mut digits = Vec::new();
        let mut v = x.clone();
        for _ in 0..n {
            let r: BigInt = &v % 4u32;
            digits.push(i64::try_from(r).unwrap());
            v /= 4u32;
        }
        if v.is_zero() && digits.iter().all(|&d| d <= 1) && digits.iter().any(|&d| d == 1) {
            return Some((i, digits));
        }
    }
    None
}

fn k_classification() -> Outcome {
    let p = params(2, 4);
    let mut not_maximal = 0;
    for k in (3..=99).step_by(2) {
        let c = classify_k_lambda4(k).map_err(e)?;
        let oracle = brute_force_repetend(k as u64);
        let expected = if oracle.is_some() {
            Verdict::NotMaximal
        } else {
            Verdict::Spectrum
        };
        ensure(c.verdict == expected, || {
            format!("K={k}: {:?} vs oracle {oracle:?}", c.verdict)
        })?;
        if let Some(w) = &c.witness {
            not_maximal += 1;
            let i = verify_repetend(&p, k, &w.w).map_err(e)?;
            ensure(i == Some(w.i), || format!("K={k}: witness {w:?} fails exactly"))?;
        }
        if k % 3 == 0 {
            ensure(c.verdict == Verdict::NotMaximal, || format!("K={k} should not be maximal"))?;
        }
    }
    for k in [5, 25] {
        ensure(classify_k_lambda4(k).map_err(e)?.verdict == Verdict::Spectrum, || {
            format!("K={k} should be a spectrum")
        })?;
    }
    Ok(format!("49 odd K, {not_maximal} not maximal, oracle agrees"))
}

fn counterexample_pipeline() -> Outcome {
    let p = params(2, 6);
    let kappa = make_kappa(p).map_err(e)?;
    let limits = SearchLimits::default();
    let cert = certify_spectrum(&kappa, 8, &limits).map_err(e)?;
    ensure(cert.verdict == Verdict::Spectrum, || format!("kappa: {:?}", cert.verdict))?;
    ensure(cert.premises["gap_sup_bound"] == 5, || "kappa bound is not 5".into())?;

    let truncation = enumerate_lambda(&kappa, 4, 64).map_err(e)?;
    let divided = divide_set(&truncation.values, 5).map_err(e)?;
    let trie = tree_from_set(&p, &divided)
        .map_err(e)?
        .trie()
        .ok_or("divided set is inconsistent")?;
    let maximal = is_maximal_at_depth(&trie, 30);
    ensure(maximal.maximal, || format!("not maximal at {:?}", maximal.failing_node))?;

    let tau = rescaled_counterexample(p).map_err(e)?;
    let mut n_values = Vec::new();
    for n in 1..=6 {
        let r = n_tau(&tau, n, 96).map_err(e)?;
        let v = r.value.ok_or_else(|| format!("N_tau({n}) not determined"))?;
        ensure(!r.partial && v >= n as u64, || format!("N_tau({n}) = {v}"))?;
        if n <= 4 {
            let from_set = n_tau(&trie, n, 96).map_err(e)?;
            if let Some(s) = from_set.value {
                ensure(s >= n as u64, || format!("set trie N_tau({n}) = {s}"))?;
            }
        }
        n_values.push(v);
    }

    let c = compute_constants(&p, 1e-5).map_err(e)?;
    ensure(c.r2 < 1.0, || format!("r2 = {}", c.r2))?;
    let series = refute_series(&tau, &c, 6, 96).map_err(e)?;
    ensure(series.verdict == Verdict::NotSpectrum, || {
        format!("series verdict {:?}", series.verdict)
    })?;
    let tail = series.premises["tail_bound"].as_f64().unwrap_or(f64::INFINITY);
    ensure(tail.is_finite(), || "no tail bound".into())?;

    let d = defect_lower_bound(&tau, &c, 0.3, 4, 1e-8).map_err(e)?;
    ensure(d.value > 0.0, || format!("defect {d:?}"))?;
    for n in 1..=10 {
        let r = qn(&tau, 0.3f64, n, 1e-8).map_err(e)?;
        ensure(r.q_value <= 1.0 - d.value + r.error_bound, || {
            format!("Q_{n}(0.3) = {} exceeds 1 - d", r.q_value)
        })?;
    }
    Ok(format!(
        "r2={:.4}, N_tau(1..6)={n_values:?}, d={:.3e} (ln d = {:.1})",
        c.r2,
        d.value,
        d.ln_value()
    ))
}

fn fourier_numerics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xf0f0);
    for (q, b) in [(2, 4), (2, 6), (3, 6)] {
        let p = params(q, b);
        for _ in 0..1000 {
            let xi: f64 = rng.gen_range(-10.0..=10.0);
            let a = partial_product_hm_certified(&p, 20, xi);
            let c = partial_product_hm_certified(&p, 40, xi);
            let bound = truncation_bound(&p, 20, xi) + a.error_bound + c.error_bound;
            let diff = (a.value - c.value).norm();
            ensure(diff <= bound, || format!("({q},{b}) xi={xi}: {diff:e} > {bound:e}"))?;
        }
        let (mut zeros, mut others) = (0, 0);
        while zeros < 50 || others < 50 {
            let x = BigInt::from(rng.gen_range(-2000i64..=2000));
            let x = x * BigInt::from(b).pow(rng.gen_range(0..4));
            let v = fourier_mu(&p, num_traits::ToPrimitive::to_f64(&x).unwrap(), 1e-12)
                .map_err(e)?;
            if in_zero_set(&p, &x) && zeros < 50 {
                zeros += 1;
                ensure(v.norm() <= v.error_bound + 1e-12, || {
                    format!("({q},{b}) |μ̂({x})| = {:e}", v.norm())
                })?;
            } else if !in_zero_set(&p, &x) && others < 50 {
                others += 1;
                ensure(v.norm() > v.error_bound, || format!("({q},{b}) μ̂({x}) not separated"))?;
            }
        }
        for _ in 0..50 {
            let xi = rng.gen_range(-10.0..=10.0f64);
            let v = fourier_mu(&p, xi, 1e-12).map_err(e)?;
            ensure(xi.fract() == 0.0 || v.norm() > v.error_bound, || {
                format!("({q},{b}) μ̂({xi}) not separated from 0")
            })?;
        }
    }
    Ok("3 parameter pairs, 1000 truncations, 50 zeros and 100 non-members each".into())
}

fn bessel_monotone() -> Outcome {
    let tau = make_tau24();
    let grid = XiGrid {
        xi_min: -0.3,
        xi_max: 0.63,
        steps: 50,
    };
    let mut prev: Vec<(f64, f64)> = vec![(0.0, 0.0); 50];
    for n in 0..=12 {
        let rows = frame_scan(&tau, &grid, n, 1e-10f64).map_err(e)?;
        for (r, (pv, pe)) in rows.iter().zip(prev.iter_mut()) {
            ensure(r.q_value <= 1.0 + r.error_bound, || format!("Q_{n}({}) > 1", r.xi))?;
            ensure(r.q_value + r.error_bound + *pe >= *pv, || {
                format!("Q_{n}({}) decreased", r.xi)
            })?;
            (*pv, *pe) = (r.q_value, r.error_bound);
        }
    }
    let at = |n| qn(&tau, 0.3f64, n, 1e-10);
    let (a, b, c) = (at(4).map_err(e)?, at(8).map_err(e)?, at(12).map_err(e)?);
    ensure(b.q_value - a.q_value > a.error_bound + b.error_bound, || "Q_8 ≯ Q_4".into())?;
    ensure(c.q_value - b.q_value > b.error_bound + c.error_bound, || "Q_12 ≯ Q_8".into())?;

    let p = params(2, 6);
    let rescaled = rescaled_counterexample(p).map_err(e)?;
    let consts = compute_constants(&p, 1e-5).map_err(e)?;
    let d = defect_lower_bound(&rescaled, &consts, 0.3, 4, 1e-8).map_err(e)?;
    let mut stall = Vec::new();
    for n in [4, 6, 8, 10] {
        let r = qn(&rescaled, 0.3f64, n, 1e-10).map_err(e)?;
        ensure(r.q_value <= 1.0 - d.value + r.error_bound, || format!("rescaled Q_{n}"))?;
        stall.push(r.q_value);
    }
    Ok(format!(
        "tau24 Q(0.3): {:.6} < {:.6} < {:.6}; rescaled Q(0.3): {:.6} → {:.6}",
        a.q_value,
        b.q_value,
        c.q_value,
        stall[0],
        stall[3]
    ))
}

fn shifted_bound_inequality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x32);
    let mut checks = 0;
    let mut tightest = f64::INFINITY;
    for (q, b) in [(2u32, 4u32), (2, 6)] {
        let p = params(q, b);
        let c = compute_constants(&p, 1e-5).map_err(e)?;
        let ([lo, hi], _) = p.tb_bounds();
        for _ in 0..200 {
            let count = rng.gen_range(1..=4);
            let mut positions = Vec::new();
            let mut n = 0;
            for _ in 0..count {
                n += rng.gen_range(1..=3);
                let d = loop {
                    let d = rng.gen_range(-1..=p.max_label());
                    if d != 0 {
                        break d;
                    }
                };
                positions.push((n, d));
            }
            let lambda = positions_value(&p, &positions);
            let bound = shifted_lower_bound(&p, &c, &positions).map_err(e)?;
            let mut sampled = 0;
            while sampled < 20 {
                let xi = rng.gen_range(lo..hi);
                if !in_tb(&p, xi) {
                    continue;
                }
                sampled += 1;
                let v = fourier_mu_shifted(&p, xi, &lambda, 1e-14).map_err(e)?;
                let lhs = v.norm() + v.error_bound;
                ensure(lhs >= bound, || {
                    format!("({q},{b}) {positions:?} xi={xi}: {lhs:e} < {bound:e}")
                })?;
                tightest = tightest.min(lhs / bound);
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} checks, smallest ratio {tightest:.3}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("filter identity over random mappings", filter_identity),
        ("orthogonality of generated sets", generated_sets_orthogonal),
        ("injectivity of pi_n", injectivity),
        ("gap facts for tau24 and kappa", gap_facts),
        ("K classification against brute force", k_classification),
        ("counterexample pipeline (2,6)", counterexample_pipeline),
        ("certified Fourier numerics", fourier_numerics),
        ("Bessel bound and monotonicity", bessel_monotone),
        ("lower bound on shifted transforms", shifted_bound_inequality),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
