//! Integer rescalings `KΛ` and repetends of `i/K`.

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::certificate::{Certificate, Theorem, Verdict};
use crate::error::{Error, Result};
use crate::measure::MeasureParams;
use crate::tree::{make_tau24, LabelLanguage, TreeMapping, Word};
use crate::Rational;

/// `i/K = (Σ_{j≤N} W_j b^{j−1}) / (b^N − 1)` with `W ≠ 0^N` and `i ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepetendWitness {
    pub k: i64,
    pub n: usize,
    pub w: Vec<i64>,
    pub i: i64,
    /// Pre-period level on the realizing branch.
    pub m: usize,
    pub branch_prefix: Option<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepetendSearch {
    pub witness: Option<RepetendWitness>,
    /// Whether every cycle of the digit graph was within reach of the period bound.
    pub exhaustive: bool,
    pub nodes: usize,
}

fn check_coprime(p: &MeasureParams, k: i64) -> Result<()> {
    if k <= 0 || k.gcd(&(p.b() as i64)) != 1 {
        return Err(Error::NotCoprime { k, b: p.b() });
    }
    Ok(())
}

fn check_digits(p: &MeasureParams, w: &[i64]) -> Result<()> {
    match w.iter().find(|&&d| d < -1 || d > p.max_label()) {
        Some(&label) => Err(Error::LabelRange {
            label,
            max: p.max_label(),
        }),
        None => Ok(()),
    }
}

/// The integer `i = K·(Σ W_j b^{j−1})/(b^N − 1)` when it is a nonzero integer.
pub fn verify_repetend(p: &MeasureParams, k: i64, w: &[i64]) -> Result<Option<i64>> {
    check_coprime(p, k)?;
    check_digits(p, w)?;
    if w.is_empty() {
        return Ok(None);
    }
    let b = BigInt::from(p.b());
    let mut numer = BigInt::zero();
    let mut power = BigInt::one();
    for &d in w {
        numer += &power * d;
        power *= &b;
    }
    let value = Rational::new(numer * k, power - 1u32);
    if !value.is_integer() || value.is_zero() {
        return Ok(None);
    }
    Ok(value.to_integer().to_i64())
}

/// Shortest cycle through a nonzero node of the digit graph
/// `x → b·x − d·K`, nodes `x/K ∈ [min d/(b−1), max d/(b−1)]`.
pub fn find_repetend(
    p: &MeasureParams,
    k: i64,
    language: &LabelLanguage,
    n_bound: usize,
) -> Result<RepetendSearch> {
    check_coprime(p, k)?;
    let digits = language.digits();
    check_digits(p, &digits)?;
    let (Some(&dmin), Some(&dmax)) = (digits.first(), digits.last()) else {
        return Ok(RepetendSearch {
            witness: None,
            exhaustive: true,
            nodes: 0,
        });
    };
    let (b, k128) = (p.b() as i128, k as i128);
    let lo = Integer::div_ceil(&(k128 * dmin as i128), &(b - 1));
    let hi = Integer::div_floor(&(k128 * dmax as i128), &(b - 1));
    let nodes = (hi - lo + 1).max(0) as usize;
    let index = |x: i128| (x - lo) as usize;
    let successors = |x: i128| {
        digits
            .iter()
            .map(move |&d| (d, b * x - d as i128 * k128))
            .filter(move |&(_, y)| (lo..=hi).contains(&y))
    };

    for start in lo..=hi {
        if start == 0 {
            continue;
        }
        // BFS back to `start`; parent links record (previous node, digit).
        let mut parent: Vec<Option<(i128, i64)>> = vec![None; nodes];
        let mut dist = vec![usize::MAX; nodes];
        let mut queue = VecDeque::from([start]);
        dist[index(start)] = 0;
        let mut closing = None;
        'bfs: while let Some(x) = queue.pop_front() {
            let dx = dist[index(x)];
            if dx >= n_bound {
                continue;
            }
            for (d, y) in successors(x) {
                if y == start {
                    closing = Some((x, d, dx + 1));
                    break 'bfs;
                }
                if dist[index(y)] == usize::MAX {
                    dist[index(y)] = dx + 1;
                    parent[index(y)] = Some((x, d));
                    queue.push_back(y);
                }
            }
        }
        let Some((last, d_last, len)) = closing else {
            continue;
        };
        let mut edges = vec![d_last];
        let mut x = last;
        while x != start {
            let (prev, d) = parent[index(x)].expect("BFS tree reaches the start");
            edges.push(d);
            x = prev;
        }
        debug_assert_eq!(edges.len(), len);
        // Collected from the closing edge backwards, which is W's order.
        let w = edges;
        let i = start as i64;
        debug_assert_eq!(verify_repetend(p, k, &w)?, Some(i));
        return Ok(RepetendSearch {
            witness: Some(RepetendWitness {
                k,
                n: w.len(),
                w,
                i,
                m: 0,
                branch_prefix: None,
            }),
            exhaustive: true,
            nodes,
        });
    }
    Ok(RepetendSearch {
        witness: None,
        exhaustive: n_bound >= nodes,
        nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KClassification {
    pub k: i64,
    pub verdict: Verdict,
    pub witness: Option<RepetendWitness>,
}

/// `KΛ₄` for odd `K ≥ 3`: not maximal exactly when `i/K` has a `{0,1}` repetend.
pub fn classify_k_lambda4(k: i64) -> Result<KClassification> {
    if k < 3 || k % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "K must be odd and at least 3, got {k}"
        )));
    }
    let tau = make_tau24();
    let p = tau.params();
    let language = tau.label_language().expect("tau24 declares its labels");
    let search = find_repetend(&p, k, &language, usize::MAX)?;
    let witness = search.witness.map(|mut w| {
        w.branch_prefix = Some(Word::empty(2));
        w
    });
    Ok(KClassification {
        k,
        verdict: if witness.is_some() {
            Verdict::NotMaximal
        } else {
            Verdict::Spectrum
        },
        witness,
    })
}

/// Number of prefixes tried when locating a branch for a candidate repetend.
const PREFIX_BUDGET: usize = 1 << 12;

/// A prefix `u` with `τ` labels equal to `W` cyclically on `u·(W mod q)^∞`
/// from level `|u|+1` through `depth`.
fn realizing_prefix(t: &dyn TreeMapping, w: &[i64], depth: usize) -> Option<Word> {
    let q = t.params().q();
    let period: Vec<u32> = w.iter().map(|d| d.rem_euclid(q as i64) as u32).collect();
    let mut tried = 0usize;
    for len in 0..depth {
        for prefix in Word::all(q, len) {
            tried += 1;
            if tried > PREFIX_BUDGET {
                return None;
            }
            let mut branch = prefix.clone();
            while branch.len() < depth {
                let j = (branch.len() - len) % period.len();
                branch.push(period[j]);
            }
            let labels = t.labels_along(&branch, depth);
            let realized = (len..depth).all(|n| labels[n] == Some(w[(n - len) % w.len()]));
            if realized {
                return Some(prefix);
            }
        }
    }
    None
}

/// Maximality of `KΛ(τ)`, and with it the spectral property, via repetends.
///
/// Needs a proven gap bound on `τ`; the repetend search runs on the declared
/// label language, otherwise `candidate` is verified against branches of `τ`.
pub fn classify_scaled(
    t: &dyn TreeMapping,
    k: i64,
    depth: usize,
    candidate: Option<&[i64]>,
) -> Result<Certificate> {
    let p = t.params();
    check_coprime(&p, k)?;
    let mut c = Certificate::new(Verdict::Inconclusive, Theorem::Repetend, p.q(), p.b());
    c.parameters.level = Some(depth);
    c.premise("mapping", t.name());
    c.premise("k", k);
    let Some(gap) = t.analytic_gap_sup() else {
        c.caveat("no analytic gap bound; maximality would not settle the spectral property");
        return Ok(c);
    };
    c.premise("gap_sup_bound", gap);

    if let Some(language) = t.label_language() {
        let search = find_repetend(&p, k, &language, usize::MAX)?;
        c.premise("repetend_side", "graph-search");
        c.premise("label_language", &language);
        c.premise("graph_nodes", search.nodes);
        match search.witness {
            Some(mut w) => {
                w.branch_prefix = realizing_prefix(t, &w.w, depth.max(w.n));
                if w.branch_prefix.is_none() {
                    c.caveat("no branch realizing the repetend was found within the depth");
                }
                w.m = w.branch_prefix.as_ref().map_or(0, Word::len);
                c.witness(&w);
                c.verdict = Verdict::NotMaximal;
            }
            None => {
                c.premise("no_repetend", true);
                c.verdict = Verdict::Spectrum;
            }
        }
        return Ok(c);
    }

    let Some(w) = candidate else {
        c.caveat("the mapping declares no label language and no candidate repetend was given");
        return Ok(c);
    };
    c.premise("repetend_side", "candidate");
    let Some(i) = verify_repetend(&p, k, w)? else {
        c.caveat("the candidate is not a repetend of any i/K");
        return Ok(c);
    };
    match realizing_prefix(t, w, depth.max(w.len())) {
        Some(prefix) => {
            c.witness(RepetendWitness {
                k,
                n: w.len(),
                w: w.to_vec(),
                i,
                m: prefix.len(),
                branch_prefix: Some(prefix),
            });
            c.caveat("branch realization checked to finite depth");
            c.verdict = Verdict::NotMaximal;
        }
        None => {
            c.caveat("the candidate is not realized by a branch within the depth");
        }
    }
    Ok(c)
}

/// `{s / divisor : s ∈ S}`, exact.
pub fn divide_set(set: &BTreeSet<BigInt>, divisor: u64) -> Result<BTreeSet<BigInt>> {
    if divisor == 0 {
        return Err(Error::NonPositive {
            what: "divisor",
            value: 0.0,
        });
    }
    let d = BigInt::from(divisor);
    set.iter()
        .map(|s| {
            let (quot, rem) = s.div_rem(&d);
            if rem.is_zero() {
                Ok(quot)
            } else {
                Err(Error::NotDivisible {
                    element: s.clone(),
                    divisor: d.clone(),
                })
            }
        })
        .collect()
}

/// `{K·s : s ∈ S}`.
pub fn scale_set(set: &BTreeSet<BigInt>, k: i64) -> BTreeSet<BigInt> {
    set.iter().map(|s| s * k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{make_kappa, make_trie};

    fn p24() -> MeasureParams {
        MeasureParams::new(2, 4).unwrap()
    }

    #[test]
    fn verify_examples() {
        let p = p24();
        assert_eq!(verify_repetend(&p, 3, &[1]).unwrap(), Some(1));
        assert_eq!(verify_repetend(&p, 5, &[1]).unwrap(), None);
        assert_eq!(verify_repetend(&p, 7, &[0, 0, 0]).unwrap(), None);
        assert!(matches!(
            verify_repetend(&p, 6, &[1]),
            Err(Error::NotCoprime { k: 6, b: 4 })
        ));
        assert!(verify_repetend(&p, 3, &[3]).is_err());
    }

    #[test]
    fn find_examples() {
        let p = p24();
        let lang = make_tau24().label_language().unwrap();
        let w = find_repetend(&p, 3, &lang, 64).unwrap().witness.unwrap();
        assert_eq!((w.n, w.w.as_slice(), w.i), (1, &[1][..], 1));
        let none = find_repetend(&p, 7, &lang, 64).unwrap();
        assert!(none.witness.is_none() && none.exhaustive);
        let w = find_repetend(&p, 9, &lang, 64).unwrap().witness.unwrap();
        assert_eq!((w.n, w.i), (1, 3));
    }

    #[test]
    fn lambda4_table() {
        let verdicts: Vec<Verdict> = (3..=15)
            .step_by(2)
            .map(|k| classify_k_lambda4(k).unwrap().verdict)
            .collect();
        use Verdict::*;
        assert_eq!(
            verdicts,
            [NotMaximal, Spectrum, Spectrum, NotMaximal, Spectrum, Spectrum, NotMaximal]
        );
        assert!(classify_k_lambda4(4).is_err());
        assert!(classify_k_lambda4(1).is_err());
    }

    #[test]
    fn scaled_certificates() {
        let tau = make_tau24();
        assert_eq!(classify_scaled(&tau, 5, 16, None).unwrap().verdict, Verdict::Spectrum);
        let c = classify_scaled(&tau, 3, 16, None).unwrap();
        assert_eq!(c.verdict, Verdict::NotMaximal);
        assert_eq!(c.witnesses[0]["branch_prefix"], "");

        let trie = make_trie(p24(), []).unwrap();
        let c = classify_scaled(&trie, 5, 16, None).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        let kappa = make_kappa(MeasureParams::new(2, 6).unwrap()).unwrap();
        assert_eq!(classify_scaled(&kappa, 7, 16, None).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn division() {
        let s: BTreeSet<BigInt> = [0u64, 4_353_564_685].into_iter().map(BigInt::from).collect();
        let d = divide_set(&s, 5).unwrap();
        assert!(d.contains(&BigInt::from(870_712_937u64)));
        let z: BTreeSet<BigInt> = [BigInt::zero()].into();
        assert_eq!(divide_set(&z, 7).unwrap(), z);
        let bad: BTreeSet<BigInt> = [0, 13].into_iter().map(BigInt::from).collect();
        assert!(matches!(
            divide_set(&bad, 5),
            Err(Error::NotDivisible { element, .. }) if element == BigInt::from(13)
        ));
        assert!(divide_set(&z, 0).is_err());
    }
}
