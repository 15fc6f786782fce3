use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Field, Mat};
use crate::blocking::{is_affine_blocking, projectivize, PointSet};
use crate::error::{Error, Result};
use crate::geometry::{big_pow, AffineSubspace};

/// Default cap on draws in `random_subspace_blocking`.
pub const MAX_ATTEMPTS: usize = 50;

/// The generator for draw `attempt` of a run seeded with `seed`: ChaCha8
/// keyed by `seed_from_u64(seed)`, on stream number `attempt`.
pub fn stream_rng(seed: u64, attempt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(attempt);
    rng
}

pub fn random_vector<R: Rng>(field: &Field, k: usize, rng: &mut R) -> Vec<u8> {
    (0..k).map(|_| rng.random_range(0..field.q()) as u8).collect()
}

/// A uniformly random `dim × k` matrix of full row rank, by rejection.
/// Returns the matrix and the number of rejected draws.
pub fn random_full_rank<R: Rng>(field: &Field, dim: usize, k: usize, rng: &mut R) -> (Mat, usize) {
    assert!(dim <= k, "rank {dim} impossible in dimension {k}");
    let mut rejected = 0;
    loop {
        let data = (0..dim * k).map(|_| rng.random_range(0..field.q()) as u8).collect();
        let m = Mat::new(field, dim, k, data).expect("entries in range");
        if m.rank() == dim {
            return (m, rejected);
        }
        rejected += 1;
    }
}

/// A uniformly random `dim`-dimensional subspace through the origin. Every
/// subspace has the same number of ordered bases, so a uniform full-rank
/// basis gives a uniform subspace.
pub fn uniform_subspace<R: Rng>(field: &Field, k: usize, dim: usize, rng: &mut R) -> AffineSubspace {
    let (basis, _) = random_full_rank(field, dim, k, rng);
    AffineSubspace::span(field, k, &basis.row_vecs()).expect("dimensions agree")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Strategy {
    /// Union of m random subspaces of dimension `dim` through the origin.
    Subspaces { dim: usize },
    /// m uniformly random points of F_q^k.
    Points,
}

fn check_params(q: u32, k: usize, s: usize) -> Result<()> {
    if s < 2 || s > k {
        return Err(Error::InvalidArgument(format!("need 2 <= s <= k, got s = {s}, k = {k}")));
    }
    let _ = q;
    Ok(())
}

/// Smallest integer m >= 1 with m + 1 >= (s(k−s)+s+2) / log_q(q^4/(q^3−q+1)),
/// decided in exact integer arithmetic: (q^4)^(m+1) >= (q^3−q+1)^(m+1) q^A.
pub fn subspace_count(q: u32, k: usize, s: usize) -> usize {
    let a = (s * (k - s) + s + 2) as u64;
    let num = big_pow(q, 4);
    let den = BigUint::from(q * q * q - q + 1);
    let ok = |m: usize| {
        let e = m + 1;
        num.pow(e as u32) >= den.pow(e as u32) * big_pow(q, a)
    };
    smallest(1, ok, || {
        let l = (q as f64).powi(4).ln() - ((q * q * q - q + 1) as f64).ln();
        (a as f64 * (q as f64).ln() / l - 1.0).ceil()
    })
}

/// Smallest integer m >= 1 with m >= (s(k−s)+s+2) / log_q(q^s/(q^s−1)),
/// decided exactly: (q^s)^m >= (q^s−1)^m q^A.
pub fn point_count(q: u32, k: usize, s: usize) -> usize {
    let a = (s * (k - s) + s + 2) as u64;
    let qs = big_pow(q, s as u64);
    let qs1 = &qs - 1u32;
    let ok = |m: usize| qs.pow(m as u32) >= qs1.pow(m as u32) * big_pow(q, a);
    smallest(1, ok, || {
        let qs = (q as f64).powi(s as i32);
        (a as f64 * (q as f64).ln() / (qs.ln() - (qs - 1.0).ln())).ceil()
    })
}

/// Smallest m >= lo satisfying the monotone predicate `ok`, starting from a
/// floating-point estimate and correcting it exactly.
fn smallest(lo: usize, ok: impl Fn(usize) -> bool, estimate: impl Fn() -> f64) -> usize {
    let mut m = (estimate().max(lo as f64) as usize).max(lo);
    while !ok(m) {
        m += 1;
    }
    while m > lo && ok(m - 1) {
        m -= 1;
    }
    m
}

/// The size bound of the randomized construction for `2 <= s <= k`.
pub fn theorem_bound(q: u32, k: usize, s: usize) -> f64 {
    crate::bounds::ub_thm_main(q, k, s)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionResult {
    pub set: PointSet,
    pub strategy: Strategy,
    pub q: u32,
    pub k: usize,
    pub s: usize,
    pub seed: u64,
    pub m: usize,
    pub attempts: usize,
    pub verified: bool,
}

impl ConstructionResult {
    /// The projective points of the lines through the origin making up the
    /// set, a strong (s−1)-blocking set when the set is an affine s-blocking
    /// set made of subspaces through the origin.
    pub fn strong_set(&self) -> PointSet {
        projectivize(&self.set)
    }
}

/// Draws random sets until one is an affine s-blocking set of F_q^k.
///
/// Draw `a` (from 0) uses `stream_rng(seed, a)`. With `m = None` the number
/// of subspaces or points is the smallest count the union-bound argument
/// supports; strategies without such a count need an explicit `m`.
pub fn random_subspace_blocking(
    q: u32,
    k: usize,
    s: usize,
    seed: u64,
    strategy: Strategy,
    m: Option<usize>,
    max_attempts: usize,
) -> Result<ConstructionResult> {
    check_params(q, k, s)?;
    let field = Field::new(q)?;
    let m = match (strategy, m) {
        (_, Some(m)) => m,
        (Strategy::Subspaces { dim }, None) if dim == s => subspace_count(q, k, s),
        (Strategy::Points, None) => point_count(q, k, s),
        (Strategy::Subspaces { dim }, None) => {
            return Err(Error::UnsupportedStrategy(format!(
                "no count known for {dim}-dimensional subspaces with s = {s}; pass m explicitly"
            )))
        }
    };
    if let Strategy::Subspaces { dim } = strategy {
        if dim == 0 || dim > k {
            return Err(Error::UnsupportedStrategy(format!("subspace dimension {dim} outside 1..={k}")));
        }
    }
    for attempt in 0..max_attempts {
        let mut rng = stream_rng(seed, attempt as u64);
        let points = draw(&field, k, strategy, m, &mut rng);
        let set = PointSet::affine(&field, k, points)?;
        if is_affine_blocking(&set, s)?.holds {
            return Ok(ConstructionResult {
                set,
                strategy,
                q,
                k,
                s,
                seed,
                m,
                attempts: attempt + 1,
                verified: true,
            });
        }
    }
    Err(Error::RetriesExhausted(max_attempts))
}

fn draw<R: Rng>(field: &Field, k: usize, strategy: Strategy, m: usize, rng: &mut R) -> Vec<Vec<u8>> {
    match strategy {
        Strategy::Points => (0..m).map(|_| random_vector(field, k, rng)).collect(),
        Strategy::Subspaces { dim } => {
            let mut pts = vec![vec![0; k]];
            for _ in 0..m {
                let (basis, _) = random_full_rank(field, dim, k, rng);
                pts.extend(basis.row_space());
            }
            pts
        }
    }
}
