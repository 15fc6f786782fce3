//! Arithmetic over F_q and dense linear algebra on top of it.

mod field;
mod matrix;

pub use field::{prime_power, Field, MAX_Q};
pub use matrix::{rank_of, solve_affine, AffineSolution, EchelonBasis, Mat};

/// Iterates over F_q^n in lexicographic order (first coordinate most
/// significant).
#[derive(Debug, Clone)]
pub struct VectorIter {
    q: u8,
    current: Option<Vec<u8>>,
}

impl VectorIter {
    pub fn new(q: u32, n: usize) -> Self {
        VectorIter { q: q as u8, current: Some(vec![0; n]) }
    }

    /// Starts at the vector with the given lexicographic index.
    pub fn starting_at(q: u32, n: usize, index: u128) -> Self {
        let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let current = (index < total).then(|| index_to_vector(q, n, index));
        VectorIter { q: q as u8, current }
    }
}

impl Iterator for VectorIter {
    type Item = Vec<u8>;

    fn next(&mut self) -> Option<Vec<u8>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let mut i = next.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.q {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

/// Lexicographic index of `v` in F_q^n.
pub fn vector_index(q: u32, v: &[u8]) -> u128 {
    v.iter().fold(0u128, |acc, &c| acc * q as u128 + c as u128)
}

pub fn index_to_vector(q: u32, n: usize, mut index: u128) -> Vec<u8> {
    let mut v = vec![0u8; n];
    for slot in v.iter_mut().rev() {
        *slot = (index % q as u128) as u8;
        index /= q as u128;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_iter_is_lexicographic() {
        let all: Vec<Vec<u8>> = VectorIter::new(3, 2).collect();
        assert_eq!(all.len(), 9);
        assert_eq!(all[0], vec![0, 0]);
        assert_eq!(all[1], vec![0, 1]);
        assert_eq!(all[3], vec![1, 0]);
        for (i, v) in all.iter().enumerate() {
            assert_eq!(vector_index(3, v), i as u128);
            assert_eq!(&index_to_vector(3, 2, i as u128), v);
        }
        assert_eq!(VectorIter::new(2, 0).count(), 1);
        assert_eq!(VectorIter::starting_at(2, 3, 5).count(), 3);
    }
}
