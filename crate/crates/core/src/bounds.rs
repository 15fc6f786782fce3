//! Closed-form bounds on blocking sets and trifferent codes, the q-ary
//! entropy, the MRRW function and the constant c_q.
//!
//! Logarithms to base q are evaluated as ratios of natural logarithms.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{big_pow, qbin};

/// Natural logarithm of a big integer, via mantissa and binary exponent.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().expect("64 bits").ln() + shift as f64 * std::f64::consts::LN_2
}

fn log_q(q: u32, x: f64) -> f64 {
    x.ln() / (q as f64).ln()
}

/// log_q(q^4 / (q^3 − q + 1)).
pub fn plane_log_ratio(q: u32) -> f64 {
    let qf = q as f64;
    (4.0 * qf.ln() - (qf * qf * qf - qf + 1.0).ln()) / qf.ln()
}

/// (q^s − 1)(k − s + 1) + 1.
pub fn lb_affine(q: u32, k: usize, s: usize) -> BigUint {
    (big_pow(q, s as u64) - 1u32) * BigUint::from(k - s + 1) + 1u32
}

/// q^s (1 + ln [k s]_q).
pub fn ub_fractional(q: u32, k: usize, s: usize) -> f64 {
    (q as f64).powi(s as i32) * (1.0 + ln_big(&qbin(k as i64, s as i64, q)))
}

/// The bound achieved by random subspaces (q >= 3) or random points (q = 2).
pub fn ub_thm_main(q: u32, k: usize, s: usize) -> f64 {
    let a = (s * (k - s) + s + 2) as f64;
    let qs = (q as f64).powi(s as i32);
    if q == 2 {
        a / log_q(2, qs / (qs - 1.0)) + 1.0
    } else {
        (qs - 1.0) * a / plane_log_ratio(q) + 1.0
    }
}

/// (q + 1) 2k / log_q(q^4/(q^3−q+1)).
pub fn strong_upper_random(q: u32, k: usize) -> f64 {
    (q as f64 + 1.0) * 2.0 * k as f64 / plane_log_ratio(q)
}

/// The previously known upper bound on the smallest strong blocking set.
pub fn strong_upper_previous(q: u32, k: usize) -> f64 {
    if q == 2 {
        (2.0 * k as f64 - 1.0) / log_q(2, 4.0 / 3.0)
    } else {
        let qf = q as f64;
        let c = 2.0 / (1.0 + 1.0 / ((qf + 1.0).powi(2) * qf.ln()));
        (qf + 1.0) * (c * (k as f64 - 1.0)).ceil()
    }
}

/// (q + 1)(k − 1).
pub fn strong_lower(q: u32, k: usize) -> usize {
    (q as usize + 1) * (k - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    /// The quantity bounded, e.g. `b_q(k,s)`.
    pub quantity: String,
    pub side: Side,
    pub value: f64,
    /// Exact integer value when the bound is an integer formula.
    pub exact: Option<String>,
    /// Asymptotic statements carry an unquantified o(1) and are never used
    /// as finite-k claims.
    pub asymptotic: bool,
    pub note: Option<String>,
}

/// How two upper bounds on the same quantity compare as k grows.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub better: String,
    pub worse: String,
    pub better_at_k: bool,
    /// Smallest k at which `better` is strictly smaller.
    pub first_k: Option<usize>,
    /// From this k on, `better` is strictly smaller for every k.
    pub always_from_k: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub q: u32,
    /// Dimension; for trifferent reports, the code length.
    pub k: usize,
    pub s: Option<usize>,
    pub entries: Vec<BoundEntry>,
    pub comparisons: Vec<Comparison>,
    /// Lower entries exceeding upper entries for the same quantity; empty
    /// when the report is consistent.
    pub violations: Vec<String>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    fn finish(mut self) -> Self {
        let finite = |e: &&BoundEntry| !e.asymptotic && e.value.is_finite();
        for lo in self.entries.iter().filter(finite).filter(|e| e.side == Side::Lower) {
            for hi in self.entries.iter().filter(finite).filter(|e| e.side == Side::Upper) {
                if lo.quantity == hi.quantity && lo.value > hi.value * (1.0 + 1e-12) {
                    self.violations.push(format!("{} = {} exceeds {} = {}", lo.name, lo.value, hi.name, hi.value));
                }
            }
        }
        self
    }
}

fn entry(name: &str, quantity: &str, side: Side, value: f64) -> BoundEntry {
    BoundEntry {
        name: name.into(),
        quantity: quantity.into(),
        side,
        value,
        exact: None,
        asymptotic: false,
        note: None,
    }
}

fn exact_entry(name: &str, quantity: &str, side: Side, value: BigUint) -> BoundEntry {
    BoundEntry {
        value: value.to_f64().unwrap_or(f64::INFINITY),
        exact: Some(value.to_string()),
        ..entry(name, quantity, side, 0.0)
    }
}

/// First k in `lo..hi` at which `better(k) < worse(k)`.
fn first_k(lo: usize, hi: usize, better: impl Fn(usize) -> f64, worse: impl Fn(usize) -> f64) -> Option<usize> {
    (lo..hi).find(|&k| better(k) < worse(k))
}

/// Where the random-subspace bound on b_q(k, s) drops below the fractional
/// cover bound. The fractional bound grows like q^s s(k−s) ln q, which
/// eventually dominates, but not for the smallest k.
pub fn affine_upper_comparison(q: u32, k: usize, s: usize) -> Comparison {
    const SCAN: usize = 2000;
    let better = |k: usize| ub_thm_main(q, k, s);
    let worse = |k: usize| ub_fractional(q, k, s);
    let first = first_k(s, SCAN, better, worse);
    let last_bad = (s..SCAN).rev().find(|&k| better(k) >= worse(k));
    let always = match last_bad {
        None => Some(s),
        Some(b) if b + 1 < SCAN => Some(b + 1),
        Some(_) => None,
    };
    Comparison {
        better: "random_subspaces".into(),
        worse: "fractional_cover".into(),
        better_at_k: better(k) < worse(k),
        first_k: first,
        always_from_k: always,
    }
}

/// Where the random-plane strong blocking bound drops below the previous
/// one. The previous bound for q >= 3 is at least (q+1) c' (k−1) with
/// c' = 2/(1 + 1/((q+1)^2 ln q)), so once the linear inequality holds it
/// holds for every larger k.
pub fn strong_upper_comparison(q: u32, k: usize) -> Comparison {
    let better = |k: usize| strong_upper_random(q, k);
    let worse = |k: usize| strong_upper_previous(q, k);
    let always = if q >= 3 {
        let qf = q as f64;
        let c = 2.0 / (1.0 + 1.0 / ((qf + 1.0).powi(2) * qf.ln()));
        let slope = 2.0 / plane_log_ratio(q);
        (c > slope).then(|| {
            // k (c − slope) > c, then scan down over ceiling effects.
            let k0 = (c / (c - slope)).floor() as usize + 1;
            (2..k0).rev().take_while(|&k| better(k) < worse(k)).last().unwrap_or(k0)
        })
    } else {
        None
    };
    let scan_to = always.map_or(100_000, |a| a + 1);
    Comparison {
        better: "strong_upper_random_planes".into(),
        worse: "strong_upper_previous".into(),
        better_at_k: better(k) < worse(k),
        first_k: first_k(2, scan_to, better, worse),
        always_from_k: always,
    }
}

/// Bounds on b_q(k, s) (when `s` is given) and on the smallest strong
/// blocking set in PG(k−1, q).
pub fn bounds(q: u32, k: usize, s: Option<usize>) -> Result<BoundReport> {
    crate::algebra::prime_power(q).ok_or(Error::NotAPrimePower(q))?;
    let mut entries = Vec::new();
    let mut comparisons = Vec::new();
    if let Some(s) = s {
        if s == 0 || s > k {
            return Err(Error::InvalidArgument(format!("need 1 <= s <= k, got s = {s}, k = {k}")));
        }
        let quantity = "b_q(k,s)";
        entries.push(exact_entry("affine_lower", quantity, Side::Lower, lb_affine(q, k, s)));
        entries.push(entry("fractional_cover", quantity, Side::Upper, ub_fractional(q, k, s)));
        if s >= 2 {
            entries.push(entry("random_subspaces", quantity, Side::Upper, ub_thm_main(q, k, s)));
            comparisons.push(affine_upper_comparison(q, k, s));
            if s >= 3 && q >= 3 {
                let a = (s * (k - s) + s + 2) as f64;
                let qf = q as f64;
                entries.push(entry(
                    "strong_random_subspaces",
                    "min strong (s-1)-blocking set",
                    Side::Upper,
                    (qf.powi(s as i32) - 1.0) / (qf - 1.0) * a / plane_log_ratio(q),
                ));
            }
        }
    }
    if k >= 2 {
        let quantity = "b'_q(k)";
        entries.push(exact_entry(
            "strong_lower",
            quantity,
            Side::Lower,
            BigUint::from(strong_lower(q, k)),
        ));
        entries.push(entry("strong_upper_random_planes", quantity, Side::Upper, strong_upper_random(q, k)));
        entries.push(entry("strong_upper_previous", quantity, Side::Upper, strong_upper_previous(q, k)));
        comparisons.push(strong_upper_comparison(q, k));
        let cq = compute_cq(q, DEFAULT_TOLERANCE)?;
        entries.push(BoundEntry {
            asymptotic: true,
            note: Some(format!(
                "coefficient c (q+1)(k-1) with c = {:.9} just below c_q; the o(1) term is unspecified",
                cq.c_q
            )),
            ..entry("strong_lower_asymptotic", quantity, Side::Lower, cq.c_q * strong_lower(q, k) as f64)
        });
    }
    Ok(BoundReport { q, k, s, entries, comparisons, violations: Vec::new() }.finish())
}

/// H_q(x) = x log_q(q−1) − x log_q x − (1−x) log_q(1−x), with 0 log 0 = 0.
pub fn entropy_q(q: u32, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) || q < 2 {
        return Err(Error::OutOfDomain { value: x, domain: "[0, 1]".into() });
    }
    let xlogx = |t: f64| if t <= 0.0 { 0.0 } else { t * log_q(q, t) };
    let a = if q == 2 { 0.0 } else { x * log_q(q, (q - 1) as f64) };
    Ok(a - xlogx(x) - xlogx(1.0 - x))
}

/// M_q(δ) = H_q((1/q)(q − 1 − (q−2)δ − 2 sqrt((q−1)δ(1−δ)))).
pub fn mrrw(q: u32, delta: f64) -> Result<f64> {
    let qf = q as f64;
    let top = 1.0 - 1.0 / qf;
    if !(0.0..=top + 1e-15).contains(&delta) {
        return Err(Error::OutOfDomain { value: delta, domain: format!("[0, {top}]") });
    }
    let d = delta.min(top);
    let inner = (qf - 1.0 - (qf - 2.0) * d - 2.0 * ((qf - 1.0) * d * (1.0 - d)).sqrt()) / qf;
    entropy_q(q, inner.clamp(0.0, 1.0))
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct CqResult {
    pub q: u32,
    /// Lower end of the final bracket, where the defining function is
    /// still negative.
    pub c_q: f64,
    pub bracket: (f64, f64),
    pub tolerance: f64,
    pub residuals: (f64, f64),
    pub iterations: usize,
}

/// f(x) = M_q((q−1)/(x(q+1))) − 1/(x(q+1)).
pub fn cq_residual(q: u32, x: f64) -> Result<f64> {
    let qf = q as f64;
    Ok(mrrw(q, (qf - 1.0) / (x * (qf + 1.0)))? - 1.0 / (x * (qf + 1.0)))
}

/// c_q by bisection on a bracket [1, X], doubling X until the sign changes.
pub fn compute_cq(q: u32, tolerance: f64) -> Result<CqResult> {
    crate::algebra::prime_power(q).ok_or(Error::NotAPrimePower(q))?;
    if !(tolerance >= 1e-12) {
        return Err(Error::InvalidArgument(format!("tolerance {tolerance} below 1e-12")));
    }
    let mut lo = 1.0;
    let f_lo = cq_residual(q, lo)?;
    if f_lo >= 0.0 {
        return Err(Error::BracketFailure(format!("f(1) = {f_lo} is not negative")));
    }
    let mut hi = 2.0;
    let mut f_hi = cq_residual(q, hi)?;
    while f_hi <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BracketFailure("no sign change below 1e12".into()));
        }
        f_hi = cq_residual(q, hi)?;
    }
    let mut f_lo = f_lo;
    let mut iterations = 0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        let f_mid = cq_residual(q, mid)?;
        if f_mid <= 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        iterations += 1;
    }
    Ok(CqResult { q, c_q: lo, bracket: (lo, hi), tolerance, residuals: (f_lo, f_hi), iterations })
}

/// Bounds on the largest (linear) trifferent code of length n, as base-3
/// logarithms.
pub fn trifferent_bounds(n: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("length must be at least 1".into()));
    }
    let nf = n as f64;
    let l3 = |x: f64| x.ln() / 3f64.ln();
    let mut e = Vec::new();
    let note = Some("base-3 logarithm of the size bound".to_string());
    e.push(BoundEntry {
        asymptotic: true,
        note: note.clone(),
        ..entry("linear_lower", "log3 T_L(n)", Side::Lower, -1.0 + nf / 4.0 * l3(9.0 / 5.0))
    });
    e.push(BoundEntry {
        asymptotic: true,
        note: note.clone(),
        ..entry("linear_upper", "log3 T_L(n)", Side::Upper, nf / 4.55)
    });
    e.push(BoundEntry { note: note.clone(), ..entry("general_upper", "log3 T(n)", Side::Upper, l3(2.0) + nf * l3(1.5)) });
    e.push(BoundEntry {
        asymptotic: true,
        note,
        ..entry("general_lower", "log3 T(n)", Side::Lower, nf / 4.0 * l3(9.0 / 5.0))
    });
    // (1/3) 3^{n log_3(81/25) / 8} = (1/3)(9/5)^{n/4}.
    let lhs = -1.0 + nf * l3(81.0 / 25.0) / 8.0;
    let rhs = e[0].value;
    let mut report = BoundReport { q: 3, k: n, s: None, entries: e, comparisons: Vec::new(), violations: Vec::new() };
    if (lhs - rhs).abs() > 1e-12 * rhs.abs().max(1.0) {
        report.violations.push(format!("identity check failed: {lhs} != {rhs}"));
    }
    Ok(report.finish())
}
