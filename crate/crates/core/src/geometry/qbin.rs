use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `q^e` as a big integer.
pub fn big_pow(q: u32, e: u64) -> BigUint {
    num_traits::pow(BigUint::from(q), e as usize)
}

/// Gaussian binomial coefficient: the number of s-dimensional subspaces of
/// F_q^k. Zero outside `0 <= s <= k`.
pub fn qbin(k: i64, s: i64, q: u32) -> BigUint {
    if s < 0 || k < 0 || s > k {
        return BigUint::zero();
    }
    let s = s.min(k - s) as u64;
    let k = k as u64;
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..s {
        num *= big_pow(q, k - i) - 1u32;
        den *= big_pow(q, i + 1) - 1u32;
    }
    num / den
}

/// Number of affine subspaces of dimension `s` in F_q^k.
pub fn count_affine(k: i64, s: i64, q: u32) -> BigUint {
    if s < 0 || s > k {
        return BigUint::zero();
    }
    big_pow(q, (k - s) as u64) * qbin(k, s, q)
}

/// Closed form for the number of s-dimensional subspaces through the origin
/// that miss a fixed (k−s)-dimensional affine subspace avoiding the origin.
pub fn n_q_formula(k: i64, s: i64, q: u32) -> BigUint {
    let mut total = BigUint::zero();
    for i in 1..=s {
        // The second factor vanishes for i > k − s, where the exponent of q
        // could also turn negative.
        if i > k - s {
            break;
        }
        let e = (s - i) * (k - i - s + 1);
        total += big_pow(q, e as u64) * qbin(s - 1, i - 1, q) * qbin(k - s, i, q);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn qbin_examples() {
        for k in 0..6 {
            assert_eq!(qbin(k, 0, 3), n(1));
        }
        assert_eq!(qbin(3, 1, 2), n(7));
        assert_eq!(qbin(4, 2, 3), n(130));
        assert_eq!(qbin(5, 2, 3), n(1210));
        assert_eq!(qbin(3, 4, 2), n(0));
        assert_eq!(qbin(3, -1, 2), n(0));
    }

    #[test]
    fn qbin_symmetry() {
        for q in [2, 3, 4, 5] {
            for k in 0..10 {
                for s in 0..=k {
                    assert_eq!(qbin(k, s, q), qbin(k, k - s, q));
                }
            }
        }
    }

    #[test]
    fn count_affine_examples() {
        assert_eq!(count_affine(4, 4, 3), n(1));
        assert_eq!(count_affine(2, 1, 3), n(12));
        assert_eq!(count_affine(5, 3, 3), n(10890));
    }

    #[test]
    fn n_q_formula_examples() {
        for s in 1..6 {
            assert_eq!(n_q_formula(s, s, 3), n(0));
            assert_eq!(n_q_formula(s + 1, s, 3), n(3u64.pow(s as u32 - 1)));
        }
        assert_eq!(n_q_formula(4, 2, 3), n(37));
    }
}
