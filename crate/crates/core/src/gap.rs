//! The gap quantity `D_{τ,δ}(δ′)`, its infimum over extensions, `N_τ(n)`,
//! and the certify / refute engine built on them.
//!
//! Offsets are relative to the end of `δ`: offset `m ≥ 1` is level `|δ| + m`
//! of the branch `δδ′0^∞`, so the labels of `δ` itself never count.

use num_rational::Ratio;
use serde::Serialize;

use crate::certificate::{Certificate, Theorem, Verdict};
use crate::error::{Error, Result};
use crate::frame::qn_upper;
use crate::measure::{in_tb, Constants};
use crate::tree::{validate_tree_mapping, TreeMapping, Word};

/// Limits shared by the searches of this module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchLimits {
    /// Nodes visited by one branch-and-bound run.
    pub budget: usize,
    /// Largest relative offset scanned.
    pub horizon: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            budget: 100_000,
            horizon: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapValue {
    #[serde(rename = "A")]
    pub a: Vec<u64>,
    #[serde(rename = "B")]
    pub b: Vec<u64>,
    pub value: u64,
    /// Set when the zero tail could not be certified within the horizon.
    pub partial: bool,
}

/// Running value of the gap formula as offsets are appended in order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct GapAcc {
    value: u64,
    last: u64,
}

impl GapAcc {
    fn push(&mut self, q: u32, offset: u64, label: i64) -> bool {
        if label == 0 {
            return false;
        }
        self.value += 1;
        if label.rem_euclid(q as i64) != 0 {
            self.value += offset - self.last - 1;
        }
        self.last = offset;
        true
    }
}

/// `D_{τ,δ}(δ′)` along `δδ′0^∞`; an empty `δ′` is the zero tail.
pub fn gap_value(t: &dyn TreeMapping, delta: &Word, ext: &Word, horizon: usize) -> GapValue {
    let q = t.params().q();
    let full = delta.concat(ext);
    let limit = delta.len() + horizon;
    let (end, mut partial) = match t.support_depth(&full) {
        Some(s) if s.max(full.len()) <= limit => (s.max(full.len()), false),
        _ => (limit, true),
    };
    let labels = t.labels_along(&full, end);
    let mut acc = GapAcc::default();
    let mut gap = GapValue {
        a: Vec::new(),
        b: Vec::new(),
        value: 0,
        partial: false,
    };
    for (i, l) in labels.iter().enumerate().skip(delta.len()) {
        let offset = (i + 1 - delta.len()) as u64;
        let Some(label) = *l else {
            partial = true;
            break;
        };
        if acc.push(q, offset, label) {
            gap.a.push(offset);
            if label.rem_euclid(q as i64) != 0 {
                gap.b.push(offset);
            }
        }
    }
    gap.value = acc.value;
    gap.partial = partial;
    gap
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinGap {
    pub value: Option<u64>,
    /// The minimizing extension; empty means the zero tail of `δ`.
    pub witness: Option<Word>,
    /// True when the search space was exhausted up to pruning.
    pub exact: bool,
    pub nodes: usize,
}

/// `D_{τ,δ} = inf_{δ′} D_{τ,δ}(δ′)` by depth-first branch and bound.
///
/// Extensions are visited in lexicographic order with the shorter word first;
/// a subtree is pruned once its partial value reaches the incumbent, and the
/// incumbent only moves on a strict improvement.
pub fn min_gap(t: &dyn TreeMapping, delta: &Word, limits: &SearchLimits) -> Result<MinGap> {
    if limits.budget == 0 {
        return Err(Error::NonPositive {
            what: "budget",
            value: 0.0,
        });
    }
    let q = t.params().q();
    let mut best: Option<(u64, Word)> = None;
    let mut nodes = 0usize;
    let mut complete = true;
    let mut stack = vec![(Word::empty(q), GapAcc::default())];
    let incumbent = |best: &Option<(u64, Word)>| best.as_ref().map_or(u64::MAX, |b| b.0);

    while let Some((ext, acc)) = stack.pop() {
        if acc.value >= incumbent(&best) {
            continue;
        }
        if nodes == limits.budget {
            complete = false;
            break;
        }
        nodes += 1;

        let whole = gap_value(t, delta, &ext, limits.horizon);
        if whole.partial {
            complete = false;
        } else if whole.value < incumbent(&best) {
            best = Some((whole.value, ext.clone()));
        }

        if ext.len() >= limits.horizon {
            if acc.value < incumbent(&best) {
                complete = false;
            }
            continue;
        }
        let base = delta.concat(&ext);
        for s in (0..q).rev() {
            let child = base.child(s);
            match t.label(&child) {
                Some(label) => {
                    let mut next = acc;
                    next.push(q, ext.len() as u64 + 1, label);
                    if next.value < incumbent(&best) {
                        stack.push((ext.child(s), next));
                    }
                }
                None => complete = false,
            }
        }
    }
    Ok(MinGap {
        value: best.as_ref().map(|b| b.0),
        witness: best.map(|b| b.1),
        exact: complete,
        nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupGap {
    pub value: Option<u64>,
    pub analytic: bool,
    /// For the empirical scan: every `min_gap` was exact.
    pub exact: bool,
    pub worst: Option<Word>,
}

/// Largest `min_gap` over determined words of length `1..=level`.
pub fn scan_gaps(t: &dyn TreeMapping, level: usize, limits: &SearchLimits) -> Result<SupGap> {
    let q = t.params().q();
    let mut out = SupGap {
        value: None,
        analytic: false,
        exact: true,
        worst: None,
    };
    let mut stack: Vec<Word> = (0..q).rev().map(|s| Word::empty(q).child(s)).collect();
    while let Some(delta) = stack.pop() {
        if t.label(&delta).is_none() {
            out.exact = false;
            continue;
        }
        let m = min_gap(t, &delta, limits)?;
        out.exact &= m.exact;
        match m.value {
            Some(v) if out.value.is_none_or(|cur| v > cur) => {
                out.value = Some(v);
                out.worst = Some(delta.clone());
            }
            Some(_) => {}
            None => out.exact = false,
        }
        if delta.len() < level {
            stack.extend((0..q).rev().map(|s| delta.child(s)));
        }
    }
    Ok(out)
}

/// `sup_δ D_{τ,δ}`: the analytic bound when the mapping has one, else the scan.
pub fn sup_gap(t: &dyn TreeMapping, level: usize, limits: &SearchLimits) -> Result<SupGap> {
    match t.analytic_gap_sup() {
        Some(v) => Ok(SupGap {
            value: Some(v),
            analytic: true,
            exact: true,
            worst: None,
        }),
        None => scan_gaps(t, level, limits),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NTau {
    pub n: usize,
    pub value: Option<u64>,
    pub witness: Option<Word>,
    /// Some words were skipped because their zero tail was not certified.
    pub partial: bool,
    pub words_certified: usize,
    pub words_skipped: usize,
}

/// `N_τ(n)`: the least zero-tail gap over words of length `n` ending in a
/// nonzero symbol, taken over the words whose tail is certified.
pub fn n_tau(t: &dyn TreeMapping, n: usize, horizon: usize) -> Result<NTau> {
    if n == 0 {
        return Err(Error::InvalidArgument("N_tau is defined for n >= 1".into()));
    }
    let q = t.params().q();
    let mut out = NTau {
        n,
        value: None,
        witness: None,
        partial: false,
        words_certified: 0,
        words_skipped: 0,
    };
    for head in Word::all(q, n - 1) {
        for j in 1..q {
            let delta = head.child(j);
            let g = gap_value(t, &delta, &Word::empty(q), horizon);
            if g.partial {
                out.words_skipped += 1;
                out.partial = true;
                continue;
            }
            out.words_certified += 1;
            if out.value.is_none_or(|v| g.value < v) {
                out.value = Some(g.value);
                out.witness = Some(delta);
            }
        }
    }
    Ok(out)
}

fn base_certificate(
    t: &dyn TreeMapping,
    verdict: Verdict,
    theorem: Theorem,
    level: usize,
    limits: &SearchLimits,
) -> Certificate {
    let p = t.params();
    let mut c = Certificate::new(verdict, theorem, p.q(), p.b());
    c.parameters.level = Some(level);
    c.parameters.budget = Some(limits.budget);
    c.premise("mapping", t.name());
    c.premise("horizon", limits.horizon);
    c
}

/// Bounded gap criterion: spectrum when `sup_δ D_{τ,δ}` has an analytic bound.
pub fn certify_spectrum(
    t: &dyn TreeMapping,
    level: usize,
    limits: &SearchLimits,
) -> Result<Certificate> {
    let validation = validate_tree_mapping(t, level.max(1))?;
    if let Some(v) = &validation.violation {
        return Err(Error::Unvalidated(format!(
            "{} condition fails at {:?} with label {}",
            v.clause, v.word, v.label
        )));
    }
    let sup = sup_gap(t, level, limits)?;
    let scan = if sup.analytic {
        scan_gaps(t, level, limits)?
    } else {
        sup.clone()
    };
    let mut c = base_certificate(t, Verdict::Inconclusive, Theorem::BoundedGap, level, limits);
    c.premise("validated_depth", validation.depth);
    c.premise("words_checked", validation.words_checked);
    c.premise("maximal_at_depth", &validation.maximality);
    c.premise("empirical_gap_max", scan.value);
    c.premise("empirical_scan_exact", scan.exact);
    if let Some(w) = &scan.worst {
        c.witness(serde_json::json!({ "word": w, "min_gap": scan.value }));
    }
    if validation.undetermined > 0 {
        c.premise("undetermined_words", validation.undetermined);
        c.caveat("some labels are undetermined; those words were not scanned");
    }
    if sup.analytic {
        let bound = sup.value.expect("analytic bounds carry a value");
        c.premise("gap_sup_bound", bound);
        c.premise("gap_sup_source", "analytic");
        if scan.value.is_some_and(|v| v > bound) {
            c.caveat("the finite scan exceeds the analytic gap bound");
            return Ok(c);
        }
        if !validation.maximality.maximal {
            c.caveat("maximality scan failed at the validation depth");
            return Ok(c);
        }
        c.verdict = Verdict::Spectrum;
        c.caveat("maximality checked to finite depth; the construction supplies it at every depth");
    } else {
        c.premise("gap_sup_source", "empirical");
        c.caveat("finite-depth scan: the bounded gap premise quantifies over all words");
    }
    Ok(c)
}

/// Linear gap criterion `D_{τ,δ} ≥ ε₀ n` for words ending in a nonzero symbol.
pub fn refute_linear(
    t: &dyn TreeMapping,
    epsilon0: Ratio<u64>,
    level: usize,
    limits: &SearchLimits,
) -> Result<Certificate> {
    if *epsilon0.numer() == 0 {
        return Err(Error::NonPositive {
            what: "epsilon0",
            value: 0.0,
        });
    }
    let q = t.params().q();
    let mut c = base_certificate(t, Verdict::Inconclusive, Theorem::LinearGap, level, limits);
    c.premise("epsilon0", format!("{epsilon0}"));
    let mut first_failure = None;
    let mut scanned = 0usize;
    let mut exact = true;
    'scan: for n in 1..=level {
        for head in Word::all(q, n - 1) {
            for j in 1..q {
                let delta = head.child(j);
                if t.label(&delta).is_none() {
                    exact = false;
                    continue;
                }
                let m = min_gap(t, &delta, limits)?;
                scanned += 1;
                exact &= m.exact;
                if let Some(v) = m.value {
                    // v ≥ ε₀ n  ⇔  v·den ≥ num·n
                    if v * epsilon0.denom() < epsilon0.numer() * n as u64 {
                        first_failure = Some((delta, v));
                        break 'scan;
                    }
                }
            }
        }
    }
    c.premise("words_scanned", scanned);
    c.premise("scan_exact", exact);
    if let Some((delta, v)) = &first_failure {
        c.premise("premise_holds_on_scan", false);
        c.witness(serde_json::json!({ "word": delta, "min_gap": v }));
        return Ok(c);
    }
    c.premise("premise_holds_on_scan", true);
    match t.n_tau_bound() {
        Some(g) if covers_linear(g.slope, g.intercept, g.from, epsilon0) => {
            c.premise("n_tau_bound", g);
            c.premise(
                "reduction",
                "N_tau(n) >= eps0 n for n >= from, so the series of r2^(2 N_tau(n)) converges",
            );
            c.verdict = Verdict::NotSpectrum;
        }
        _ => {
            c.caveat("finite-depth scan: the linear gap premise quantifies over all words");
        }
    }
    Ok(c)
}

fn covers_linear(slope: u64, intercept: i64, from: u64, eps: Ratio<u64>) -> bool {
    // slope·n + intercept ≥ ε₀ n for all n ≥ from
    let (num, den) = (*eps.numer() as i128, *eps.denom() as i128);
    let slack = slope as i128 * den - num;
    slack >= 0 && slack * from as i128 + intercept as i128 * den >= 0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct SeriesRow {
    n: usize,
    analytic: Option<u64>,
    scanned: Option<u64>,
    scan_partial: bool,
}

/// Upper estimate of `r₂` from its grid value: `|H′| ≤ π b (q−1)/q`.
fn r2_upper(c: &Constants<f64>, q: u32, b: u32) -> f64 {
    let lipschitz = std::f64::consts::PI * b as f64 * (q as f64 - 1.0) / q as f64;
    (c.r2 + lipschitz * c.grid_resolution / 2.0).min(1.0)
}

/// Series criterion `Σ_n r₂^{2N_τ(n)} < ∞`.
pub fn refute_series(
    t: &dyn TreeMapping,
    c: &Constants<f64>,
    n_max: usize,
    horizon: usize,
) -> Result<Certificate> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let p = t.params();
    let limits = SearchLimits {
        horizon,
        ..SearchLimits::default()
    };
    let mut cert = base_certificate(t, Verdict::Inconclusive, Theorem::SeriesDefect, n_max, &limits);
    cert.parameters.budget = None;
    cert.tolerance("grid_resolution", c.grid_resolution);
    cert.premise("r2", c.r2);
    cert.caveat("grid-estimated constants");

    let mut rows = Vec::new();
    let mut partial_sum = 0.0;
    let mut partial_product = 1.0;
    let mut contradicted = false;
    for n in 1..=n_max {
        let analytic = t.analytic_n_tau(n as u64);
        let scan = n_tau(t, n, horizon)?;
        if let (Some(a), Some(s)) = (analytic, scan.value) {
            contradicted |= !scan.partial && s < a;
        }
        let used = analytic.or(scan.value).unwrap_or(0);
        let y = c.r2.powf(2.0 * used as f64);
        partial_sum += y;
        partial_product *= 1.0 - y;
        rows.push(SeriesRow {
            n,
            analytic,
            scanned: scan.value,
            scan_partial: scan.partial,
        });
    }
    cert.premise("n_tau", &rows);
    cert.premise("partial_sum", partial_sum);
    cert.premise("partial_product", partial_product);
    if contradicted {
        cert.caveat("a scanned N_tau(n) falls below the analytic bound");
        return Ok(cert);
    }
    match t.n_tau_bound() {
        Some(g) if g.slope > 0 && c.r2 < 1.0 => {
            let r2 = r2_upper(c, p.q(), p.b());
            let ratio = r2.powf(2.0 * g.slope as f64);
            let start = (n_max as u64 + 1).max(g.from);
            let first = r2.powf(2.0 * g.at(start).unwrap_or(0) as f64);
            cert.premise("n_tau_bound", g);
            cert.premise("r2_upper", r2);
            cert.premise("tail_ratio", ratio);
            cert.premise("tail_bound", first / (1.0 - ratio));
            if ratio < 1.0 {
                cert.verdict = Verdict::NotSpectrum;
            }
        }
        _ => {
            cert.caveat("no analytic lower bound on N_tau; the series cannot be bounded");
        }
    }
    Ok(cert)
}

/// A certified lower bound `d ≤ 1 − Q(ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectBound {
    pub xi: f64,
    pub n0: usize,
    pub value: f64,
    /// `ln` of the infinite product factor.
    pub ln_product: f64,
    /// Upper bound on `Q_{N₀}(ξ)` including unresolved words.
    pub q_n0_upper: f64,
    pub q_n0_error: f64,
    pub uncovered_words: usize,
    pub terms_summed: usize,
    pub r2_upper: f64,
}

impl DefectBound {
    pub fn ln_value(&self) -> f64 {
        let rest = 1.0 - self.q_n0_upper - self.q_n0_error;
        if rest > 0.0 {
            self.ln_product + rest.ln()
        } else {
            f64::NEG_INFINITY
        }
    }
}

/// `1 − Q(ξ) ≥ Π_{n>N₀}(1 − r₂^{2N_τ(n)}) · (1 − Q_{N₀}(ξ))` using the analytic
/// lower bound on `N_τ` for the product; the product is summed in log space
/// until the geometric tail is below `tol`.
pub fn defect_lower_bound(
    t: &dyn TreeMapping,
    c: &Constants<f64>,
    xi: f64,
    n0: usize,
    tol: f64,
) -> Result<DefectBound> {
    let p = t.params();
    if !in_tb(&p, xi) {
        return Err(Error::OutsideTb(xi));
    }
    if !(tol > 0.0) {
        return Err(Error::NonPositive {
            what: "tolerance",
            value: tol,
        });
    }
    let g = t
        .n_tau_bound()
        .filter(|g| g.slope > 0 && g.from <= n0 as u64 + 1 && g.at(n0 as u64 + 1).unwrap_or(0) >= 1)
        .ok_or_else(|| {
            Error::Unavailable("no analytic bound N_tau(n) >= g(n) >= 1 for n > N0".into())
        })?;
    let r2 = r2_upper(c, p.q(), p.b());
    if r2 >= 1.0 {
        return Err(Error::Unavailable("r2 is not below 1".into()));
    }
    let ratio = r2.powf(2.0 * g.slope as f64);
    let mut ln_product = 0.0;
    let mut n = n0 as u64 + 1;
    let mut terms = 0usize;
    loop {
        let y = r2.powf(2.0 * g.at(n).expect("n is past the bound's start") as f64);
        // Σ_{m≥n} −ln(1−y_m) ≤ y_n / ((1−ratio)(1−y_n))
        let tail = y / ((1.0 - ratio) * (1.0 - y));
        if tail <= tol {
            ln_product -= tail;
            break;
        }
        ln_product += (-y).ln_1p();
        terms += 1;
        n += 1;
    }
    let (q_upper, q_err, uncovered) = qn_upper(t, xi, n0, tol)?;
    let rest = 1.0 - q_upper - q_err;
    let value = if rest > 0.0 { ln_product.exp() * rest } else { 0.0 };
    Ok(DefectBound {
        xi,
        n0,
        value,
        ln_product,
        q_n0_upper: q_upper,
        q_n0_error: q_err,
        uncovered_words: uncovered,
        terms_summed: terms,
        r2_upper: r2,
    })
}
