//! The filter `H_{q,b}`, its finite products and the Fourier transform of
//! `μ_{q,b}`.

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::{lit, Scalar};

/// The pair `(q, b)`: `q` contractions with ratio `1/b` and translations `i/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MeasureParams {
    q: u32,
    b: u32,
}

impl MeasureParams {
    pub fn new(q: u32, b: u32) -> Result<Self> {
        if q < 2 || !b.is_multiple_of(q) || b / q < 2 {
            return Err(Error::InadmissibleParams { q, b });
        }
        Ok(Self { q, b })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn b(&self) -> u32 {
        self.b
    }

    /// Largest digit label, `b − 2`.
    #[inline]
    pub fn max_label(&self) -> i64 {
        self.b as i64 - 2
    }

    /// `sup supp μ_{q,b} = (q−1)b / (q(b−1))`.
    pub fn support_max<T: Scalar>(&self) -> T {
        let (q, b) = (self.q as f64, self.b as f64);
        lit((q - 1.0) * b / (q * (b - 1.0)))
    }

    /// Endpoints of `T_b`: outer open interval and the removed inner one.
    pub fn tb_bounds(&self) -> ([f64; 2], [f64; 2]) {
        let b = self.b as f64;
        (
            [-1.0 / (b - 1.0), (b - 2.0) / (b - 1.0)],
            [-1.0 / (b * (b - 1.0)), (b - 2.0) / (b * (b - 1.0))],
        )
    }
}

/// A complex value with a bound on its distance to the exact quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedComplex<T> {
    pub value: Complex<T>,
    pub error_bound: T,
}

impl<T: Scalar> CertifiedComplex<T> {
    pub fn norm(&self) -> T {
        self.value.norm()
    }
}

/// Grid estimates of `r0`, `r1`, `r2`.
///
/// `r0` and `r1` are grid minima, so they are upper estimates of the true
/// infima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants<T> {
    pub r0: T,
    pub r1: T,
    pub r2: T,
    pub support_max: T,
    pub grid_resolution: T,
}

/// `(1/q) Σ_l exp(−2πi l t)`, i.e. `H_{q,b}` at a point with `bξ/q = t`.
fn h_from_turns<T: Scalar>(q: u32, t: T) -> Complex<T> {
    let t = t - t.floor();
    let mut acc = Complex::new(T::zero(), T::zero());
    for l in 0..q {
        let angle = -T::TAU() * lit::<T>(l as f64) * t;
        let (s, c) = angle.sin_cos();
        acc = acc + Complex::new(c, s);
    }
    acc / lit::<T>(q as f64)
}

/// Rounding bound for one factor whose turn argument carries error `dt`.
fn factor_rounding<T: Scalar>(q: u32, dt: T) -> T {
    let q = lit::<T>(q as f64);
    T::TAU() * q * dt + (lit::<T>(4.0) * T::PI() * q + lit(8.0)) * T::epsilon()
}

/// `H_{q,b}(ξ) = (1/q) Σ_{l<q} e^{−2πi l b ξ / q}`.
pub fn filter_h<T: Scalar>(p: &MeasureParams, xi: T) -> Complex<T> {
    h_from_turns(p.q, xi * lit::<T>(p.b as f64) / lit::<T>(p.q as f64))
}

/// Product and accumulated rounding bound of `Π_{j=1..m} H(ξ/b^j)`.
fn hm_with_rounding<T: Scalar>(p: &MeasureParams, m: u32, xi: T) -> (Complex<T>, T) {
    let b = lit::<T>(p.b as f64);
    let q = lit::<T>(p.q as f64);
    let mut x = xi;
    let mut prod = Complex::new(T::one(), T::zero());
    let mut err = T::zero();
    for j in 1..=m {
        x = x / b;
        let raw = x * b / q;
        let dt = (lit::<T>(j as f64 + 3.0) * raw.abs() + lit(2.0)) * T::epsilon();
        prod = prod * h_from_turns(p.q, raw);
        err = err + factor_rounding(p.q, dt);
    }
    (prod, err)
}

/// `H_m(ξ) = Π_{j=1..m} H_{q,b}(ξ/b^j)`.
pub fn partial_product_hm<T: Scalar>(p: &MeasureParams, m: u32, xi: T) -> Complex<T> {
    hm_with_rounding(p, m, xi).0
}

/// `H_m(ξ)` with a bound on its floating point rounding error.
pub fn partial_product_hm_certified<T: Scalar>(
    p: &MeasureParams,
    m: u32,
    xi: T,
) -> CertifiedComplex<T> {
    let (value, error_bound) = hm_with_rounding(p, m, xi);
    CertifiedComplex { value, error_bound }
}

/// Smallest `m` with `2π·support_max·|x| / b^m ≤ tol`, together with that bound.
fn truncation_depth(p: &MeasureParams, x: f64, tol: f64) -> (u32, f64) {
    let c = std::f64::consts::TAU * p.support_max::<f64>();
    let mut bound = c * x.abs();
    let mut m = 0;
    while bound > tol {
        bound /= p.b as f64;
        m += 1;
    }
    (m, bound)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositive {
            what: "tolerance",
            value: tol,
        })
    }
}

/// `μ̂_{q,b}(ξ)` truncated where the tail factor is within `tol` of 1.
pub fn fourier_mu<T: Scalar>(p: &MeasureParams, xi: T, tol: T) -> Result<CertifiedComplex<T>> {
    let tol64 = tol.to_f64().unwrap_or(f64::NAN);
    check_tol(tol64)?;
    let (m, trunc) = truncation_depth(p, xi.to_f64().unwrap_or(f64::INFINITY), tol64);
    let (value, rounding) = hm_with_rounding(p, m, xi);
    Ok(CertifiedComplex {
        value,
        error_bound: lit::<T>(trunc) + rounding,
    })
}

/// Residue of `λ` modulo `q b^{j−1}` for `j = 1, 2, …` while the modulus does
/// not exceed `|λ|`; beyond that the shift enters unreduced.
enum Shift {
    Small(i128),
    Big(BigInt),
}

impl Shift {
    fn new(lambda: &BigInt) -> Self {
        match lambda.to_i128() {
            Some(v) if v.checked_abs().is_some_and(|a| a < i128::MAX / 64) => Shift::Small(v),
            _ => Shift::Big(lambda.clone()),
        }
    }

    /// `(λ mod M) + ξ` divided by `M` where `M = modulus`, computed in `f64`.
    /// `modulus` is tracked exactly while below `|λ|`.
    fn turns(&self, modulus: &Modulus, xi: f64) -> f64 {
        match (self, modulus) {
            (Shift::Small(l), Modulus::Small(m)) => (l.rem_euclid(*m) as f64 + xi) / *m as f64,
            (Shift::Big(l), Modulus::Big(m)) => {
                let r = l.mod_floor(m);
                (r.to_f64().unwrap_or(f64::INFINITY) + xi) / m.to_f64().unwrap_or(f64::INFINITY)
            }
            (s, Modulus::Float(m)) => (s.to_f64() + xi) / m,
            _ => unreachable!("shift and modulus representations always agree"),
        }
    }

    fn to_f64(&self) -> f64 {
        match self {
            Shift::Small(v) => *v as f64,
            Shift::Big(v) => v.to_f64().unwrap_or(f64::INFINITY),
        }
    }

    fn needs_reduction(&self, modulus: &Modulus) -> bool {
        match (self, modulus) {
            (Shift::Small(l), Modulus::Small(m)) => l.abs() >= *m,
            (Shift::Big(l), Modulus::Big(m)) => &l.abs() >= m,
            _ => false,
        }
    }
}

enum Modulus {
    Small(i128),
    Big(BigInt),
    Float(f64),
}

/// `H_m(ξ + λ)` for an integer shift `λ`, reducing `λ` exactly per factor.
fn hm_shifted_with_rounding<T: Scalar>(
    p: &MeasureParams,
    m: u32,
    xi: f64,
    lambda: &BigInt,
) -> (Complex<T>, T) {
    let shift = Shift::new(lambda);
    let mut modulus = match shift {
        Shift::Small(_) => Modulus::Small(p.q as i128),
        Shift::Big(_) => Modulus::Big(BigInt::from(p.q)),
    };
    let mut prod = Complex::new(T::one(), T::zero());
    let mut err = T::zero();
    for _ in 0..m {
        if !shift.needs_reduction(&modulus) {
            let f = match &modulus {
                Modulus::Small(v) => *v as f64,
                Modulus::Big(v) => v.to_f64().unwrap_or(f64::INFINITY),
                Modulus::Float(v) => *v,
            };
            modulus = Modulus::Float(f);
        }
        let t = shift.turns(&modulus, xi);
        let dt = lit::<T>((4.0 * t.abs() + 4.0) * f64::EPSILON) + lit::<T>(2.0) * T::epsilon();
        prod = prod * h_from_turns(p.q, lit::<T>(t - t.floor()));
        err = err + factor_rounding(p.q, dt);
        modulus = match modulus {
            Modulus::Small(v) => Modulus::Small(v * p.b as i128),
            Modulus::Big(v) => Modulus::Big(v * p.b),
            Modulus::Float(v) => Modulus::Float(v * p.b as f64),
        };
    }
    (prod, err)
}

/// `H_m(ξ + λ)` with the integer part of the argument handled exactly.
pub fn partial_product_hm_shifted<T: Scalar>(
    p: &MeasureParams,
    m: u32,
    xi: T,
    lambda: &BigInt,
) -> Complex<T> {
    hm_shifted_with_rounding(p, m, xi.to_f64().unwrap_or(f64::NAN), lambda).0
}

/// `μ̂_{q,b}(ξ + λ)` for an integer `λ` of any size.
pub fn fourier_mu_shifted<T: Scalar>(
    p: &MeasureParams,
    xi: T,
    lambda: &BigInt,
    tol: T,
) -> Result<CertifiedComplex<T>> {
    let tol64 = tol.to_f64().unwrap_or(f64::NAN);
    check_tol(tol64)?;
    let xi64 = xi.to_f64().unwrap_or(f64::NAN);
    let magnitude = lambda.to_f64().unwrap_or(f64::INFINITY).abs() + xi64.abs();
    let (m, trunc) = truncation_depth(p, magnitude, tol64);
    let (value, rounding) = hm_shifted_with_rounding(p, m, xi64, lambda);
    Ok(CertifiedComplex {
        value,
        error_bound: lit::<T>(trunc) + rounding,
    })
}

/// Membership in `T_b`; the endpoints of the removed inner interval belong to `T_b`.
pub fn in_tb<T: Scalar>(p: &MeasureParams, xi: T) -> bool {
    let x = xi.to_f64().unwrap_or(f64::NAN);
    let ([lo, hi], [ilo, ihi]) = p.tb_bounds();
    x > lo && x < hi && !(x > ilo && x < ihi)
}

/// `n + 1` equally spaced points covering `[lo, hi]` with spacing at most `step`.
fn grid(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = (((hi - lo) / step).ceil() as usize).max(1);
    let h = (hi - lo) / n as f64;
    (0..=n).map(move |i| if i == n { hi } else { lo + i as f64 * h })
}

/// Grid estimates of `r0`, `r1`, `r2` at spacing `resolution`.
///
/// All three quantities are symmetric in `ξ ↦ −ξ`, so only `ξ ≥ 0` is scanned.
pub fn compute_constants<T: Scalar>(p: &MeasureParams, resolution: T) -> Result<Constants<T>> {
    let res = resolution.to_f64().unwrap_or(f64::NAN);
    if !(res > 0.0 && res.is_finite()) {
        return Err(Error::NonPositive {
            what: "grid resolution",
            value: res,
        });
    }
    let b = p.b as f64;
    let radius = (b - 2.0) / (b - 1.0);
    let mu_tol = lit::<T>(1e-12).max(T::epsilon() * lit(16.0));

    let mut r0 = T::infinity();
    for x in grid(0.0, radius, res) {
        let v = fourier_mu(p, lit::<T>(x), mu_tol)?.norm();
        r0 = r0.min(v);
    }

    let h = 1e-7_f64.max(T::epsilon().to_f64().unwrap_or(0.0).sqrt());
    let mut r1 = T::infinity();
    for j in 1..p.q {
        let shift = j as f64 / b;
        for x in grid(0.0, radius, res) {
            let x = if x == 0.0 { h } else { x };
            let v = filter_h(p, lit::<T>(x / b + shift)).norm() / lit::<T>(x);
            r1 = r1.min(v);
        }
    }

    let mut r2 = T::zero();
    for x in grid(1.0 / (b * b * (b - 1.0)), (b - 2.0) / (b * (b - 1.0)), res) {
        r2 = r2.max(filter_h(p, lit::<T>(x)).norm());
    }

    Ok(Constants {
        r0,
        r1,
        r2,
        support_max: p.support_max(),
        grid_resolution: resolution,
    })
}

/// Lower bound `r0^{K+1} (r1/(b(b−1)))^{#B} b^{−Σ_{j∈B}(n_j−n_{j−1}−1)}` for
/// `|μ̂(ξ+λ)|`, `ξ ∈ T_b`, `λ = Σ d_j b^{n_j−1}`.
pub fn shifted_lower_bound<T: Scalar>(
    p: &MeasureParams,
    c: &Constants<T>,
    positions: &[(u32, i64)],
) -> Result<T> {
    let b = lit::<T>(p.b as f64);
    let mut prev = 0u32;
    let mut log = lit::<T>(positions.len() as f64 + 1.0) * c.r0.ln();
    let r1_term = (c.r1 / (b * (b - T::one()))).ln();
    for &(n, d) in positions {
        if n <= prev {
            return Err(Error::InvalidArgument(format!(
                "positions must be strictly increasing and positive, got {n} after {prev}"
            )));
        }
        if d == 0 || d < -1 || d > p.max_label() {
            return Err(Error::LabelRange {
                label: d,
                max: p.max_label(),
            });
        }
        if d.rem_euclid(p.q as i64) != 0 {
            log = log + r1_term - lit::<T>((n - prev - 1) as f64) * b.ln();
        }
        prev = n;
    }
    Ok(log.exp())
}

/// `λ = Σ d_j b^{n_j−1}` for a position list as accepted by [`shifted_lower_bound`].
pub fn positions_value(p: &MeasureParams, positions: &[(u32, i64)]) -> BigInt {
    let b = BigInt::from(p.b);
    positions.iter().fold(BigInt::zero(), |acc, &(n, d)| {
        acc + BigInt::from(d) * num_traits::pow(b.clone(), (n - 1) as usize)
    })
}

/// `2π·support_max·|ξ| / b^m`, the truncation bound after `m` factors.
pub fn truncation_bound(p: &MeasureParams, m: u32, xi: f64) -> f64 {
    std::f64::consts::TAU * p.support_max::<f64>() * xi.abs() / (p.b as f64).powi(m as i32)
}

/// `b^k` as a big integer.
pub(crate) fn big_pow(b: u32, k: usize) -> BigInt {
    num_traits::pow(BigInt::from(b), k)
}
