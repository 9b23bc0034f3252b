//! Partial sums `Q_n(ξ) = Σ_{λ∈Λ_n} |μ̂(ξ+λ)|²` of the frame function.

use std::fmt::Write as _;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::{fourier_mu_shifted, partial_product_hm_shifted};
use crate::tree::{enumerate_lambda, pi_n, LambdaSet, TreeMapping, Word};
use crate::{lit, Scalar};

/// Extra levels scanned for regularity beyond the word length when a mapping
/// offers no support guarantee.
const REGULARITY_SLACK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameScanRow<T> {
    pub xi: T,
    pub n: usize,
    pub q_value: T,
    pub error_bound: T,
    pub terms: usize,
    /// Words of length `n` left out because their regularity was not settled.
    pub unresolved: usize,
}

/// Kahan summation in the given order.
fn compensated_sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut c = T::zero();
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

/// `Σ |μ̂(ξ+λ)|²` over `lambda` in ascending order, with its error bound.
pub(crate) fn sum_squares<T: Scalar>(
    t: &dyn TreeMapping,
    xi: T,
    lambda: &[BigInt],
    tol: T,
) -> Result<(T, T)> {
    if lambda.is_empty() {
        return Ok((T::zero(), T::zero()));
    }
    let p = t.params();
    let per_term = tol / lit::<T>(lambda.len() as f64);
    let terms: Vec<(T, T)> = lambda
        .par_iter()
        .map(|l| {
            let v = fourier_mu_shifted(&p, xi, l, per_term)?;
            let m = v.norm();
            let e = v.error_bound;
            Ok((m * m, e * (lit::<T>(2.0) * m + e)))
        })
        .collect::<Result<_>>()?;
    let value = compensated_sum(terms.iter().map(|x| x.0));
    let err = compensated_sum(terms.iter().map(|x| x.1))
        + lit::<T>(4.0 * terms.len() as f64) * T::epsilon() * value.abs();
    Ok((value, err))
}

fn lambda_level(t: &dyn TreeMapping, n: usize) -> Result<LambdaSet> {
    enumerate_lambda(t, n, n + REGULARITY_SLACK)
}

fn row<T: Scalar>(
    t: &dyn TreeMapping,
    xi: T,
    n: usize,
    tol: T,
    lambda: &[BigInt],
    unresolved: usize,
) -> Result<FrameScanRow<T>> {
    let (q_value, error_bound) = sum_squares(t, xi, lambda, tol)?;
    Ok(FrameScanRow {
        xi,
        n,
        q_value,
        error_bound,
        terms: lambda.len(),
        unresolved,
    })
}

/// `Q_n(ξ)` over the resolved part of `Λ_n`; `n = 0` gives `|μ̂(ξ)|²`.
pub fn qn<T: Scalar>(t: &dyn TreeMapping, xi: T, n: usize, tol: T) -> Result<FrameScanRow<T>> {
    let set = lambda_level(t, n)?;
    let lambda: Vec<BigInt> = set.values.into_iter().collect();
    row(t, xi, n, tol, &lambda, set.unresolved.len())
}

/// An upper bound for `Q_n(ξ)` that also covers unresolved words: a word
/// `δ` contributes at most `|H_n(ξ + Π_{τ,n}(δ))|²` since `H_n` only sees
/// `λ mod q b^{n−1}`.
pub fn qn_upper(t: &dyn TreeMapping, xi: f64, n: usize, tol: f64) -> Result<(f64, f64, usize)> {
    let p = t.params();
    let set = lambda_level(t, n)?;
    let lambda: Vec<BigInt> = set.values.iter().cloned().collect();
    let (mut value, mut err) = sum_squares(t, xi, &lambda, tol)?;
    let mut uncovered = Vec::new();
    for prefix in &set.unresolved {
        let remaining = n - prefix.len();
        for tail in Word::all(p.q(), remaining) {
            uncovered.push(prefix.concat(&tail));
        }
    }
    let bounds: Vec<f64> = uncovered
        .par_iter()
        .map(|w| {
            let base = pi_n(t, w, n)?;
            let h = partial_product_hm_shifted::<f64>(&p, n as u32, xi, &base).norm();
            Ok(h * h)
        })
        .collect::<Result<_>>()?;
    value += compensated_sum(bounds.iter().copied());
    err += (bounds.len() as f64) * (n as f64 + 4.0) * 64.0 * f64::EPSILON;
    Ok((value, err, uncovered.len()))
}

/// Largest `|Σ_{δ∈Σ_q^m} |H_m(ξ + Π_{τ,m}(δ))|² − 1|` over `xis`.
pub fn filter_identity_deviation<T: Scalar>(t: &dyn TreeMapping, m: usize, xis: &[T]) -> Result<T> {
    let p = t.params();
    let count = (p.q() as f64).powi(m as i32);
    if m == 0 || count > 1e6 {
        return Err(Error::InvalidArgument(format!(
            "level {m} needs {count} terms; allowed range is 1..=1e6 terms"
        )));
    }
    let bases: Vec<BigInt> = Word::all(p.q(), m)
        .map(|w| pi_n(t, &w, m))
        .collect::<Result<_>>()?;
    let deviations: Vec<T> = xis
        .par_iter()
        .map(|&xi| {
            let total = compensated_sum(bases.iter().map(|l| {
                let h = partial_product_hm_shifted(&p, m as u32, xi, l).norm();
                h * h
            }));
            (total - T::one()).abs()
        })
        .collect();
    Ok(deviations.into_iter().fold(T::zero(), |a, d| a.max(d)))
}

/// Equally spaced points `xi_min..=xi_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub steps: usize,
}

impl XiGrid {
    pub fn points(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.xi_min],
            n => (0..n)
                .map(|k| self.xi_min + (self.xi_max - self.xi_min) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// `Q_n` on a grid inside `(−1/(b−1), (b−2)/(b−1))`.
pub fn frame_scan<T: Scalar>(
    t: &dyn TreeMapping,
    grid: &XiGrid,
    n: usize,
    tol: T,
) -> Result<Vec<FrameScanRow<T>>> {
    let points = grid.points();
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let ([lo, hi], _) = t.params().tb_bounds();
    if let Some(x) = points.iter().find(|&&x| !(x > lo && x < hi)) {
        return Err(Error::InvalidArgument(format!(
            "grid point {x} lies outside ({lo}, {hi})"
        )));
    }
    let set = lambda_level(t, n)?;
    let lambda: Vec<BigInt> = set.values.into_iter().collect();
    points
        .into_iter()
        .map(|x| row(t, lit::<T>(x), n, tol, &lambda, set.unresolved.len()))
        .collect()
}

/// CSV with header `xi,n,q_value,error_bound,terms`.
pub fn to_csv<T: Scalar>(rows: &[FrameScanRow<T>]) -> String {
    let mut out = String::from("xi,n,q_value,error_bound,terms\n");
    for r in rows {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{},{},{:.17e},{:.6e},{}",
            f(r.xi),
            r.n,
            f(r.q_value),
            f(r.error_bound),
            r.terms
        );
    }
    out
}
