//! Words, tree mappings and the projections `Π_{τ,n}`, `Π_{τ,∞}`.

mod kappa;
mod quotient;
mod standard;
mod trie;
mod word;

use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::MeasureParams;

pub use kappa::{make_kappa, KappaMapping};
pub use quotient::{rescaled_counterexample, QuotientMapping};
pub use standard::{make_standard, make_tau24, StandardMapping};
pub use trie::{make_trie, DefaultLabel, FiniteTrie, TrieFile};
pub use word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MappingKind {
    FiniteTrie,
    RuleBased,
}

/// Lower bound `N_τ(n) ≥ slope·n + intercept`, valid for all `n ≥ from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearBound {
    pub slope: u64,
    pub intercept: i64,
    pub from: u64,
}

impl LinearBound {
    pub fn at(&self, n: u64) -> Option<u64> {
        (n >= self.from).then(|| (self.slope as i64 * n as i64 + self.intercept).max(0) as u64)
    }
}

/// Label values that occur on branches of a mapping, grouped by residue mod `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelLanguage {
    pub per_residue: Vec<Vec<i64>>,
}

impl LabelLanguage {
    /// Every digit `−1, …, b−2` in its residue class.
    pub fn full(p: &MeasureParams) -> Self {
        let q = p.q() as i64;
        let mut per_residue = vec![Vec::new(); q as usize];
        for d in -1..=p.max_label() {
            per_residue[d.rem_euclid(q) as usize].push(d);
        }
        Self { per_residue }
    }

    pub fn digits(&self) -> Vec<i64> {
        let mut all: Vec<i64> = self.per_residue.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        all
    }
}

/// A labeling `τ` of the `q`-ary tree by digits `−1, …, b−2`.
///
/// Implementations are immutable; `label` returns `None` only where the
/// mapping leaves a node undetermined (partial tries).
pub trait TreeMapping: Send + Sync {
    fn params(&self) -> MeasureParams;

    fn kind(&self) -> MappingKind;

    fn name(&self) -> String;

    /// `τ(w)`; the root carries label 0.
    fn label(&self, w: &Word) -> Option<i64>;

    /// Labels of `(w0^∞)|_k` for `k = 1..=depth`.
    fn labels_along(&self, w: &Word, depth: usize) -> Vec<Option<i64>> {
        (1..=depth).map(|k| self.label(&w.prefix(k))).collect()
    }

    /// A level beyond which every label along `w0^∞` is known to vanish.
    fn support_depth(&self, _w: &Word) -> Option<usize> {
        None
    }

    /// Proven bound on `sup_δ D_{τ,δ}`.
    fn analytic_gap_sup(&self) -> Option<u64> {
        None
    }

    /// Proven linear lower bound on `N_τ(n)`.
    fn n_tau_bound(&self) -> Option<LinearBound> {
        None
    }

    fn analytic_n_tau(&self, n: u64) -> Option<u64> {
        self.n_tau_bound().and_then(|g| g.at(n))
    }

    /// Label values realized along branches, when the mapping can describe them.
    fn label_language(&self) -> Option<LabelLanguage> {
        None
    }
}

/// `Σ_{k≤n} τ((w0^∞)|_k) b^{k−1}`.
pub fn pi_n(t: &dyn TreeMapping, w: &Word, n: usize) -> Result<BigInt> {
    let labels = t.labels_along(w, n);
    sum_labels(t.params().b(), w, &labels)
}

fn sum_labels(b: u32, w: &Word, labels: &[Option<i64>]) -> Result<BigInt> {
    let mut acc = BigInt::zero();
    for (k, l) in labels.iter().enumerate().rev() {
        let l = l.ok_or_else(|| Error::UndeterminedLabel(w.prefix(k + 1).to_string()))?;
        acc = acc * b + l;
    }
    Ok(acc)
}

/// Outcome of summing labels along `w0^∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PiInf {
    /// Labels vanish from level `zero_from` on; `certified` when a support
    /// guarantee (rather than a finite scan) established it.
    Regular {
        #[serde(serialize_with = "crate::json::big")]
        value: BigInt,
        zero_from: usize,
        certified: bool,
    },
    /// The label at the scan depth is nonzero.
    NotRegular { deepest_nonzero: usize },
    /// Some label on the branch is not determined.
    Undetermined { level: usize },
}

impl PiInf {
    pub fn value(&self) -> Option<&BigInt> {
        match self {
            PiInf::Regular { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// `Π_{τ,∞}(w)` when `w` is regular within `depth` or by the support hook.
pub fn pi_inf(t: &dyn TreeMapping, w: &Word, depth: usize) -> Result<PiInf> {
    if depth < w.len() {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} is shorter than the word {w}"
        )));
    }
    let support = t.support_depth(w);
    let scan = support.unwrap_or(depth).max(1);
    let labels = t.labels_along(w, scan);
    if let Some(k) = labels.iter().position(Option::is_none) {
        return Ok(PiInf::Undetermined { level: k + 1 });
    }
    let last_nonzero = labels.iter().rposition(|l| *l != Some(0)).map_or(0, |i| i + 1);
    if support.is_none() && last_nonzero == scan {
        return Ok(PiInf::NotRegular {
            deepest_nonzero: last_nonzero,
        });
    }
    Ok(PiInf::Regular {
        value: sum_labels(t.params().b(), w, &labels)?,
        zero_from: last_nonzero + 1,
        certified: support.is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityStatus {
    Main,
    Regular,
    IrregularAtDepth,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub word: String,
    pub status: RegularityStatus,
    pub zero_from_level: Option<usize>,
    pub search_depth: usize,
}

pub fn regularity(t: &dyn TreeMapping, w: &Word, depth: usize) -> Result<RegularityReport> {
    let (status, zero_from_level) = match pi_inf(t, w, depth)? {
        PiInf::Regular { zero_from, .. } if zero_from <= w.len() + 1 => {
            (RegularityStatus::Main, Some(zero_from))
        }
        PiInf::Regular { zero_from, .. } => (RegularityStatus::Regular, Some(zero_from)),
        PiInf::NotRegular { .. } => (RegularityStatus::IrregularAtDepth, None),
        PiInf::Undetermined { .. } => (RegularityStatus::Unknown, None),
    };
    Ok(RegularityReport {
        word: w.to_string(),
        status,
        zero_from_level,
        search_depth: depth,
    })
}

/// A truncation `Λ_n` of `Λ(τ)` together with the words that could not be resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LambdaSet {
    #[serde(serialize_with = "crate::json::big_set")]
    pub values: BTreeSet<BigInt>,
    /// Words (or prefixes covering whole subtrees) whose regularity was not settled.
    pub unresolved: Vec<Word>,
}

/// `{Π_{τ,∞}(w) : w ∈ Σ_q^level regular}`.
pub fn enumerate_lambda(t: &dyn TreeMapping, level: usize, depth: usize) -> Result<LambdaSet> {
    if depth < level {
        return Err(Error::InvalidArgument(format!(
            "depth {depth} is below level {level}"
        )));
    }
    let q = t.params().q();
    let mut out = LambdaSet::default();
    let mut stack = vec![Word::empty(q)];
    while let Some(w) = stack.pop() {
        if w.len() == level {
            match pi_inf(t, &w, depth)? {
                PiInf::Regular { value, .. } => {
                    out.values.insert(value);
                }
                _ => out.unresolved.push(w),
            }
            continue;
        }
        for s in (0..q).rev() {
            let c = w.child(s);
            if t.label(&c).is_some() {
                stack.push(c);
            } else {
                out.unresolved.push(c);
            }
        }
    }
    out.unresolved.sort();
    Ok(out)
}

/// First word at which a tree-mapping condition fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseViolation {
    pub word: String,
    /// `"zero-word"`, `"residue"` or `"codomain"`.
    pub clause: &'static str,
    pub label: i64,
}

pub(crate) fn check_clauses(p: &MeasureParams, w: &Word, label: i64) -> Option<ClauseViolation> {
    let violation = |clause| {
        Some(ClauseViolation {
            word: w.to_string(),
            clause,
            label,
        })
    };
    if label < -1 || label > p.max_label() {
        return violation("codomain");
    }
    if w.is_zero() && label != 0 {
        return violation("zero-word");
    }
    let last = w.last().unwrap_or(0) as i64;
    if (label - last).rem_euclid(p.q() as i64) != 0 {
        return violation("residue");
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaximalityReport {
    pub depth: usize,
    pub maximal: bool,
    pub nodes_checked: usize,
    pub failing_node: Option<String>,
    /// One `(node, extension)` pair per checked node.
    #[serde(skip)]
    pub witnesses: Vec<(Word, Word)>,
}

/// Candidate extensions tried per node before giving up.
const MAXIMALITY_BUDGET: usize = 1 << 14;

/// Maximality within `depth`: every determined node `v` with `|v| ≤ depth/2`
/// has an extension `u`, `|u| < depth`, whose labels along `u0^∞` vanish at
/// levels `|u|+1..=depth`.
pub fn is_maximal_at_depth(t: &dyn TreeMapping, depth: usize) -> MaximalityReport {
    let q = t.params().q();
    let half = depth / 2;
    let mut report = MaximalityReport {
        depth,
        maximal: true,
        nodes_checked: 0,
        failing_node: None,
        witnesses: Vec::new(),
    };
    let mut stack = vec![Word::empty(q)];
    while let Some(v) = stack.pop() {
        report.nodes_checked += 1;
        match find_vanishing_extension(t, &v, depth) {
            Some(u) => report.witnesses.push((v.clone(), u)),
            None => {
                report.maximal = false;
                report.failing_node = Some(v.to_string());
                return report;
            }
        }
        if v.len() < half {
            for s in (0..q).rev() {
                let c = v.child(s);
                if t.label(&c).is_some() {
                    stack.push(c);
                }
            }
        }
    }
    report
}

fn find_vanishing_extension(t: &dyn TreeMapping, v: &Word, depth: usize) -> Option<Word> {
    let q = t.params().q();
    let mut queue = VecDeque::from([v.clone()]);
    let mut tried = 0;
    while let Some(u) = queue.pop_front() {
        if u.len() >= depth || tried >= MAXIMALITY_BUDGET {
            return None;
        }
        tried += 1;
        let labels = t.labels_along(&u, depth);
        if labels[u.len()..].iter().all(|l| *l == Some(0)) {
            return Some(u);
        }
        for s in 0..q {
            let c = u.child(s);
            if t.label(&c).is_some() {
                queue.push_back(c);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    pub words_checked: usize,
    pub undetermined: usize,
    pub violation: Option<ClauseViolation>,
    pub maximality: MaximalityReport,
}

impl ValidationReport {
    pub fn valid(&self) -> bool {
        self.violation.is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        match &self.violation {
            None => Ok(self),
            Some(v) => Err(Error::TreeClause {
                word: v.word.clone(),
                clause: v.clause,
                label: v.label,
            }),
        }
    }
}

/// Checks the zero-word, residue and codomain conditions on every determined word of
/// length `≤ depth` in lexicographic order, then maximality within `depth`.
pub fn validate_tree_mapping(t: &dyn TreeMapping, depth: usize) -> Result<ValidationReport> {
    if depth == 0 {
        return Err(Error::InvalidArgument("validation depth must be positive".into()));
    }
    let p = t.params();
    let q = p.q();
    let mut report = ValidationReport {
        depth,
        words_checked: 0,
        undetermined: 0,
        violation: None,
        maximality: MaximalityReport {
            depth,
            maximal: false,
            nodes_checked: 0,
            failing_node: None,
            witnesses: Vec::new(),
        },
    };
    let mut stack: Vec<Word> = (0..q).rev().map(|s| Word::empty(q).child(s)).collect();
    while let Some(w) = stack.pop() {
        let Some(label) = t.label(&w) else {
            report.undetermined += 1;
            continue;
        };
        report.words_checked += 1;
        if let Some(v) = check_clauses(&p, &w, label) {
            report.violation = Some(v);
            return Ok(report);
        }
        if w.len() < depth {
            stack.extend((0..q).rev().map(|s| w.child(s)));
        }
    }
    report.maximality = is_maximal_at_depth(t, depth.max(2));
    Ok(report)
}
