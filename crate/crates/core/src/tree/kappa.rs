use super::{MappingKind, TreeMapping, Word};
use crate::error::{Error, Result};
use crate::measure::MeasureParams;

/// The mapping `κ` whose set `Λ_{q,b} = Λ(κ)` is a spectrum while
/// `Λ_{q,b}/(b−1)` is a maximal orthogonal set that is not.
///
/// Along the zero-extension of a stem `δ` of length `n` ending in `j ≠ 0`
/// the labels are `j` at level `n`, `q` at levels `n+1..=n+K_δ` and at level
/// `2n+2b−1`, and 0 elsewhere; `K_δ ∈ {0, …, b−2}` makes the label sum
/// along `δ0^∞` divisible by `b − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KappaMapping {
    p: MeasureParams,
    q_inv: i64,
}

pub fn make_kappa(p: MeasureParams) -> Result<KappaMapping> {
    let (q, b) = (p.q(), p.b());
    if b <= 4 || q + 3 > b {
        return Err(Error::InvalidArgument(format!(
            "kappa needs b > 4 and q <= b - 3, got q={q}, b={b}"
        )));
    }
    let m = b as i64 - 1;
    let q_inv = (1..m)
        .find(|x| (x * q as i64) % m == 1)
        .expect("q divides b, so q is invertible mod b - 1");
    Ok(KappaMapping { p, q_inv })
}

/// Incremental evaluation of `κ` along a branch.
#[derive(Debug, Clone)]
pub(crate) struct KappaWalker {
    q: i64,
    b: i64,
    q_inv: i64,
    level: usize,
    sum: i64,
    stem_len: usize,
    k_delta: usize,
}

impl KappaWalker {
    /// Label of the next word on the branch, whose last symbol is `s`.
    pub(crate) fn step(&mut self, s: u32) -> i64 {
        self.level += 1;
        let m = self.b - 1;
        let label = if s != 0 {
            let j = s as i64;
            let k_plus_one = ((-(self.sum + j)).rem_euclid(m) * self.q_inv).rem_euclid(m);
            let k_plus_one = if k_plus_one == 0 { m } else { k_plus_one };
            self.stem_len = self.level;
            self.k_delta = (k_plus_one - 1) as usize;
            j
        } else if self.stem_len == 0 {
            0
        } else {
            let offset = self.level - self.stem_len;
            if offset <= self.k_delta || offset == self.stem_len + 2 * self.b as usize - 1 {
                self.q
            } else {
                0
            }
        };
        self.sum = (self.sum + label).rem_euclid(m);
        label
    }
}

impl KappaMapping {
    pub(crate) fn walker(&self) -> KappaWalker {
        KappaWalker {
            q: self.p.q() as i64,
            b: self.p.b() as i64,
            q_inv: self.q_inv,
            level: 0,
            sum: 0,
            stem_len: 0,
            k_delta: 0,
        }
    }

    /// `K_δ` for a word ending in a nonzero symbol.
    pub fn k_delta(&self, stem: &Word) -> Option<usize> {
        if stem.last().unwrap_or(0) == 0 {
            return None;
        }
        let mut walker = self.walker();
        for &s in stem.symbols() {
            walker.step(s);
        }
        Some(walker.k_delta)
    }
}

impl TreeMapping for KappaMapping {
    fn params(&self) -> MeasureParams {
        self.p
    }

    fn kind(&self) -> MappingKind {
        MappingKind::RuleBased
    }

    fn name(&self) -> String {
        "kappa".into()
    }

    fn label(&self, w: &Word) -> Option<i64> {
        let mut walker = self.walker();
        let mut label = 0;
        for &s in w.symbols() {
            label = walker.step(s);
        }
        Some(label)
    }

    fn labels_along(&self, w: &Word, depth: usize) -> Vec<Option<i64>> {
        let mut walker = self.walker();
        (1..=depth).map(|k| Some(walker.step(w.at(k)))).collect()
    }

    fn support_depth(&self, w: &Word) -> Option<usize> {
        let n = w.stem_len();
        Some(if n == 0 { 0 } else { 2 * n + 2 * self.p.b() as usize - 1 })
    }

    fn analytic_gap_sup(&self) -> Option<u64> {
        Some(self.p.b() as u64 - 1)
    }
}
