//! Exact-arithmetic checks of the counting estimates for Gaussian binomials
//! and n_q(k, s).

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::geometry::qbin::{big_pow, count_affine, n_q_formula, qbin};

/// Terms of the exponential series used for the certified bound.
const EXP_TERMS: u32 = 40;

#[derive(Debug, Clone, Serialize)]
pub struct EstimateCheck {
    pub name: String,
    pub holds: bool,
    /// Exact rationals, written `p/q` (or `p` when integral).
    pub lhs: String,
    pub rhs: String,
    pub relation: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub k: i64,
    pub s: i64,
    pub q: u32,
    /// Decimal strings; these overflow 64 bits quickly.
    pub qbin: String,
    pub affine_count: String,
    pub n_q: String,
    pub estimate_checks: Vec<EstimateCheck>,
}

impl CountReport {
    pub fn all_hold(&self) -> bool {
        self.estimate_checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&EstimateCheck> {
        self.estimate_checks.iter().find(|c| c.name == name)
    }
}

fn rat(n: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rat_i(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn fmt_rat(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lower and upper rational bounds on e^x for `0 <= x < EXP_TERMS + 2`:
/// the truncated series, and the truncated series plus a geometric bound
/// on the tail.
pub fn exp_bounds(x: &BigRational) -> (BigRational, BigRational) {
    let mut term = BigRational::one();
    let mut sum = BigRational::one();
    for i in 1..=EXP_TERMS {
        term = term * x / rat_i(i as i64);
        sum += &term;
    }
    let next = term * x / rat_i(EXP_TERMS as i64 + 1);
    let ratio = x / rat_i(EXP_TERMS as i64 + 2);
    let tail = next / (BigRational::one() - ratio);
    (sum.clone(), sum + tail)
}

fn check(name: &str, lhs: BigRational, relation: &str, rhs: BigRational) -> EstimateCheck {
    let holds = match relation {
        "<=" => lhs <= rhs,
        "=" => lhs == rhs,
        _ => unreachable!(),
    };
    EstimateCheck {
        name: name.to_string(),
        holds,
        lhs: fmt_rat(&lhs),
        rhs: fmt_rat(&rhs),
        relation: relation.to_string(),
    }
}

/// Evaluates every estimate whose hypotheses hold at (k, s, q).
///
/// The exponential factor of the upper Gaussian-binomial estimate is replaced
/// by its truncated Taylor series, a rational lower bound of e^x, so a
/// reported `holds` is certified.
pub fn check_estimates(k: i64, s: i64, q: u32) -> CountReport {
    let qb = qbin(k, s, q);
    let qr = rat_i(q as i64);
    let mut checks = Vec::new();

    if 1 <= s && s <= k {
        let normalized = rat(qb.clone()) / rat(big_pow(q, (s * (k - s)) as u64));
        checks.push(check("qbinestimate_a_lower", BigRational::one(), "<=", normalized.clone()));

        let x = qr.clone() / ((&qr * &qr - rat_i(1)) * (&qr - rat_i(1)));
        let (exp_lo, _) = exp_bounds(&x);
        let bound = qr.clone() / (&qr - rat_i(1)) * exp_lo;
        checks.push(check("qbinestimate_a_upper", normalized.clone(), "<=", bound));

        if s >= 3 && k >= s + 3 {
            let lower = qr.pow(3) / ((&qr * &qr - rat_i(1)) * (&qr - rat_i(1)));
            checks.push(check("qbinestimate_b", lower, "<=", normalized));
        }

        if s >= 2 {
            let nq = rat(n_q_formula(k, s, q));
            let factor = (qr.pow(3) - &qr + rat_i(1)) / qr.pow(4);
            checks.push(check("grensqvdm", nq, "<=", factor * rat(qb.clone())));
        }

        // q-Vandermonde in the form used for the n_q estimate.
        let mut sum = BigUint::zero();
        for i in 1..=s {
            if i > k - s {
                break;
            }
            let e = ((k - s - i) * (s - i)) as u64;
            sum += qbin(s - 1, s - i, q) * qbin(k - s, i, q) * big_pow(q, e);
        }
        checks.push(check("q_vandermonde", rat(qbin(k - 1, s, q)), "=", rat(sum)));

        checks.push(check(
            "count_hyp",
            rat(n_q_formula(k, 1, q)),
            "=",
            rat(qbin(k - 1, 1, q)),
        ));
    }

    let n_q = if 1 <= s && s <= k { n_q_formula(k, s, q) } else { BigUint::zero() };
    CountReport {
        k,
        s,
        q,
        qbin: qb.to_string(),
        affine_count: count_affine(k, s, q).to_string(),
        n_q: n_q.to_string(),
        estimate_checks: checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_bounds_bracket_e() {
        let (lo, hi) = exp_bounds(&BigRational::one());
        let e = std::f64::consts::E;
        let lo_f = lo.numer().to_string().parse::<f64>().unwrap()
            / lo.denom().to_string().parse::<f64>().unwrap();
        assert!((lo_f - e).abs() < 1e-12);
        assert!(lo < hi);
        // e < 2.7182818285
        let upper = BigRational::new(BigInt::from(27182818285u64), BigInt::from(10_000_000_000u64));
        assert!(hi < upper);
    }

    #[test]
    fn grensqvdm_at_4_2_3() {
        let r = check_estimates(4, 2, 3);
        let c = r.check("grensqvdm").unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, "37");
        assert_eq!(c.rhs, "3250/81");
        assert_eq!(r.qbin, "130");
        assert_eq!(r.n_q, "37");
    }

    #[test]
    fn estimate_b_only_under_hypotheses() {
        assert!(check_estimates(6, 3, 2).check("qbinestimate_b").unwrap().holds);
        assert!(check_estimates(5, 3, 2).check("qbinestimate_b").is_none());
        assert!(check_estimates(6, 2, 2).check("qbinestimate_b").is_none());
    }

    #[test]
    fn out_of_range_s() {
        let r = check_estimates(3, 5, 2);
        assert_eq!(r.qbin, "0");
        assert!(r.estimate_checks.is_empty());
    }

    #[test]
    fn all_estimates_hold_on_small_grid() {
        for q in [2, 3, 4, 5] {
            for k in 1..=8 {
                for s in 1..=k {
                    let r = check_estimates(k, s, q);
                    assert!(r.all_hold(), "({k},{s},{q}): {:?}", r.estimate_checks);
                }
            }
        }
    }
}
