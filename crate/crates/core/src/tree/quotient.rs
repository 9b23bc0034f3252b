use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::kappa::{KappaMapping, KappaWalker};
use super::{make_kappa, LinearBound, MappingKind, TreeMapping, Word};
use crate::error::Result;
use crate::measure::MeasureParams;
use crate::ortho::digit_expansion;

/// The tree mapping of `Λ(κ)/(b−1)`.
///
/// The label of `w` is the `|w|`-th digit of `Π_{κ,∞}(η)/(b−1)` where `η` is
/// the unique `κ`-word of length `|w|` whose first `|w|` quotient digits have
/// symbols `w`; those digits depend on `Π_{κ,|w|}(η)` only, so `η` is built
/// one symbol at a time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientMapping {
    kappa: KappaMapping,
}

/// `τ_{q,b}`, the mapping behind the maximal orthogonal non-spectrum `Λ(κ)/(b−1)`.
pub fn rescaled_counterexample(p: MeasureParams) -> Result<QuotientMapping> {
    Ok(QuotientMapping {
        kappa: make_kappa(p)?,
    })
}

struct Walk {
    q: u32,
    b: BigInt,
    kappa: KappaWalker,
    partner: Vec<u32>,
    /// `Π_{κ,k}` of the partner.
    pi_kappa: BigInt,
    /// `Σ_{i≤k} c_i b^{i−1}` for the digits emitted so far.
    pi_tau: BigInt,
    /// `b^k`.
    bk: BigInt,
}

impl Walk {
    fn new(m: &QuotientMapping) -> Self {
        let p = m.kappa.params();
        Self {
            q: p.q(),
            b: BigInt::from(p.b()),
            kappa: m.kappa.walker(),
            partner: Vec::new(),
            pi_kappa: BigInt::zero(),
            pi_tau: BigInt::zero(),
            bk: BigInt::one(),
        }
    }

    /// Next digit, steering the partner so that its symbol is `target`.
    fn step(&mut self, target: u32) -> i64 {
        let bk1 = &self.bk * &self.b;
        // (b − 1)^{−1} ≡ −(b^{k+1} − 1)/(b − 1) (mod b^{k+1})
        let inv = (-((&bk1 - 1u32) / (&self.b - 1u32))).mod_floor(&bk1);
        let b_minus_one = self.b.clone() - 1u32;
        for s in 0..self.q {
            let mut kappa = self.kappa.clone();
            let label = kappa.step(s);
            let pi_kappa = &self.pi_kappa + &self.bk * label;
            let y = (&pi_kappa * &inv).mod_floor(&bk1);
            let d = ((&y - &self.pi_tau) / &self.bk).mod_floor(&self.b);
            let c: i64 = if d == b_minus_one {
                -1
            } else {
                i64::try_from(d).expect("digit below b")
            };
            if c.rem_euclid(self.q as i64) == target as i64 {
                self.kappa = kappa;
                self.partner.push(s);
                self.pi_kappa = pi_kappa;
                self.pi_tau += &self.bk * c;
                self.bk = bk1;
                return c;
            }
        }
        unreachable!("the quotient digit symbol is a bijection of the partner symbol")
    }
}

impl QuotientMapping {
    pub fn kappa(&self) -> &KappaMapping {
        &self.kappa
    }

    /// Levels scanned for a support certificate of `w`.
    pub fn certificate_cap(&self, w: &Word) -> usize {
        3 * w.len() + 3 * self.kappa.params().b() as usize + 24
    }

    /// The `κ`-word paired with `w`.
    pub fn partner(&self, w: &Word) -> Word {
        let mut walk = Walk::new(self);
        for &s in w.symbols() {
            walk.step(s);
        }
        Word::new(self.kappa.params().q(), walk.partner).expect("partner symbols are below q")
    }

    /// Digits of `Π_{κ,∞}(σ)/(b−1)` for a `κ`-stem `σ`.
    fn element_digits(&self, sigma: &Word) -> Vec<i64> {
        let p = self.kappa.params();
        let depth = self.kappa.support_depth(sigma).unwrap_or(0);
        let labels = self.kappa.labels_along(sigma, depth);
        let mut lambda = BigInt::zero();
        for l in labels.iter().rev() {
            lambda = lambda * p.b() + l.expect("kappa labels are total");
        }
        let v = lambda / (p.b() - 1);
        digit_expansion(p.b(), &v).digits
    }
}

impl TreeMapping for QuotientMapping {
    fn params(&self) -> MeasureParams {
        self.kappa.params()
    }

    fn kind(&self) -> MappingKind {
        MappingKind::RuleBased
    }

    fn name(&self) -> String {
        "rescaled-counterexample".into()
    }

    fn label(&self, w: &Word) -> Option<i64> {
        let mut walk = Walk::new(self);
        let mut c = 0;
        for &s in w.symbols() {
            c = walk.step(s);
        }
        Some(c)
    }

    fn labels_along(&self, w: &Word, depth: usize) -> Vec<Option<i64>> {
        let mut walk = Walk::new(self);
        (1..=depth).map(|k| Some(walk.step(w.at(k)))).collect()
    }

    /// Found by following the partner: once its stem `σ` is the stem of the
    /// element whose quotient branch is `w0^∞`, the support is the length of
    /// that element's expansion.
    fn support_depth(&self, w: &Word) -> Option<usize> {
        let stem = w.stem();
        if stem.is_empty() {
            return Some(0);
        }
        let q = self.params().q() as i64;
        let mut walk = Walk::new(self);
        let mut checked = 0usize;
        for k in 1..=self.certificate_cap(w) {
            walk.step(w.at(k));
            let sigma_len = walk.partner.iter().rposition(|&s| s != 0).map_or(0, |i| i + 1);
            if sigma_len == 0 || sigma_len == checked {
                continue;
            }
            checked = sigma_len;
            let sigma = Word::new(self.params().q(), walk.partner[..sigma_len].to_vec())
                .expect("partner symbols are below q");
            let digits = self.element_digits(&sigma);
            let symbols: Vec<u32> = digits.iter().map(|d| d.rem_euclid(q) as u32).collect();
            let branch = Word::new(self.params().q(), symbols).expect("residues are below q");
            if branch.stem() == stem {
                return Some(digits.len());
            }
        }
        None
    }

    fn n_tau_bound(&self) -> Option<LinearBound> {
        Some(LinearBound {
            slope: 1,
            intercept: 0,
            from: 2,
        })
    }
}
