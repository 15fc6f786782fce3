//! Affine s-blocking sets in F_q^k and strong t-blocking sets in PG(k−1, q).

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{index_to_vector, vector_index, EchelonBasis, Field, Mat};
use crate::error::{Error, Result};
use crate::geometry::{AffineSubspace, AffineUniverse, ProjectivePoint, SubspaceFilter, UNIVERSE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Affine,
    Projective,
}

impl std::str::FromStr for PointKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "affine" => Ok(PointKind::Affine),
            "projective" => Ok(PointKind::Projective),
            _ => Err(Error::InvalidArgument(format!("unknown point kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for PointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PointKind::Affine => "affine",
            PointKind::Projective => "projective",
        })
    }
}

/// A set of points of F_q^k or of PG(k−1, q), deduplicated and sorted
/// lexicographically. Projective points are stored normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    field: Field,
    k: usize,
    kind: PointKind,
    points: Vec<Vec<u8>>,
}

impl PointSet {
    pub fn new(field: &Field, k: usize, kind: PointKind, points: Vec<Vec<u8>>) -> Result<Self> {
        let q = field.q() as u8;
        let mut set = BTreeSet::new();
        for p in points {
            if p.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "point of length {} in dimension {k}",
                    p.len()
                )));
            }
            if p.iter().any(|&c| c >= q) {
                return Err(Error::InvalidArgument(format!("coordinate out of range in {p:?}")));
            }
            match kind {
                PointKind::Affine => {
                    set.insert(p);
                }
                PointKind::Projective => {
                    let pt = ProjectivePoint::new(field, &p).ok_or_else(|| {
                        Error::InvalidArgument("the zero vector is not a projective point".into())
                    })?;
                    set.insert(pt.into_coords());
                }
            }
        }
        Ok(PointSet { field: field.clone(), k, kind, points: set.into_iter().collect() })
    }

    pub fn affine(field: &Field, k: usize, points: Vec<Vec<u8>>) -> Result<Self> {
        PointSet::new(field, k, PointKind::Affine, points)
    }

    pub fn projective(field: &Field, k: usize, points: Vec<Vec<u8>>) -> Result<Self> {
        PointSet::new(field, k, PointKind::Projective, points)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> PointKind {
        self.kind
    }

    pub fn points(&self) -> &[Vec<u8>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &[u8]) -> bool {
        match self.kind {
            PointKind::Affine => self.points.binary_search_by(|x| x.as_slice().cmp(p)).is_ok(),
            PointKind::Projective => match ProjectivePoint::new(&self.field, p) {
                Some(pt) => self.points.binary_search_by(|x| x.as_slice().cmp(pt.coords())).is_ok(),
                None => false,
            },
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.kind == PointKind::Affine && self.points.first().is_some_and(|p| p.iter().all(|&c| c == 0))
    }

    /// Rank of the points as vectors of F_q^k.
    pub fn rank(&self) -> usize {
        crate::algebra::rank_of(&self.field, &self.points)
    }
}

#[derive(Serialize)]
struct PointSetRepr<'a> {
    q: u32,
    k: usize,
    kind: PointKind,
    points: &'a [Vec<u8>],
}

impl Serialize for PointSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PointSetRepr { q: self.field.q(), k: self.k, kind: self.kind, points: &self.points }.serialize(s)
    }
}

/// Result of a blocking check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    Fails,
    /// Sampled check without a violation; says nothing about the rest of the
    /// universe.
    NoViolationFound,
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockingVerdict {
    pub holds: bool,
    pub outcome: Outcome,
    /// The first violating subspace in enumeration order (exhaustive mode) or
    /// in sample order (sampled mode).
    pub witness: Option<AffineSubspace>,
    pub witness_index: Option<u128>,
    /// Number of subspaces examined.
    pub checked: u128,
}

impl BlockingVerdict {
    fn exhaustive(universe_len: u128, failure: Option<(u128, AffineSubspace)>) -> Self {
        match failure {
            None => BlockingVerdict {
                holds: true,
                outcome: Outcome::Holds,
                witness: None,
                witness_index: None,
                checked: universe_len,
            },
            Some((index, w)) => BlockingVerdict {
                holds: false,
                outcome: Outcome::Fails,
                witness: Some(w),
                witness_index: Some(index),
                checked: index + 1,
            },
        }
    }
}

/// Dot products of every point with a row vector, cached per row vector when
/// the table is small.
struct Dots<'a> {
    field: &'a Field,
    points: &'a [Vec<u8>],
    table: Option<Vec<u8>>,
}

const DOT_TABLE_LIMIT: u128 = 1 << 25;

impl<'a> Dots<'a> {
    fn new(field: &'a Field, k: usize, points: &'a [Vec<u8>]) -> Self {
        let q = field.q();
        let rows = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        let table = (rows.saturating_mul(points.len() as u128) <= DOT_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(rows as usize * points.len());
            for r in 0..rows {
                let row = index_to_vector(q, k, r);
                t.extend(points.iter().map(|p| field.dot(&row, p)));
            }
            t
        });
        Dots { field, points, table }
    }

    fn row<'b>(&'b self, row: &[u8], scratch: &'b mut Vec<u8>) -> &'b [u8] {
        match &self.table {
            Some(t) => {
                let n = self.points.len();
                let i = vector_index(self.field.q(), row) as usize;
                &t[i * n..(i + 1) * n]
            }
            None => {
                scratch.clear();
                scratch.extend(self.points.iter().map(|p| self.field.dot(row, p)));
                scratch
            }
        }
    }

    /// Dot products with every row of `a`.
    fn rows<'b>(&'b self, a: &Mat, scratch: &'b mut [Vec<u8>]) -> Vec<&'b [u8]> {
        scratch.iter_mut().enumerate().map(|(i, s)| self.row(a.row(i), s)).collect()
    }
}

/// Smallest right-hand side `b` such that `{x : A x = b}` misses every point,
/// as an index into F_q^r.
fn first_unblocked_rhs(dots: &Dots, a: &Mat, seen: &mut Vec<bool>) -> Option<u128> {
    let q = dots.field.q() as usize;
    let r = a.rows();
    let total = q.pow(r as u32);
    seen.clear();
    seen.resize(total, false);
    let mut scratch = vec![Vec::new(); r];
    let rows = dots.rows(a, &mut scratch);
    let mut hit = 0;
    for j in 0..dots.points.len() {
        let mut v = 0usize;
        for row in &rows {
            v = v * q + row[j] as usize;
        }
        if !seen[v] {
            seen[v] = true;
            hit += 1;
            if hit == total {
                return None;
            }
        }
    }
    seen.iter().position(|&b| !b).map(|i| i as u128)
}

/// Whether the points of `dots` lying in the kernel of `a` span it.
fn spans_kernel(dots: &Dots, a: &Mat) -> bool {
    let need = a.cols() - a.rows();
    if need == 0 {
        return true;
    }
    let mut scratch = vec![Vec::new(); a.rows()];
    let rows = dots.rows(a, &mut scratch);
    let mut basis = EchelonBasis::new(dots.field);
    for (j, p) in dots.points.iter().enumerate() {
        if rows.iter().all(|r| r[j] == 0) && basis.insert(p) && basis.rank() == need {
            return true;
        }
    }
    false
}

const CHUNK: u128 = 2048;

/// Runs `check` over every dual matrix of `universe` in parallel, returning
/// the failure with the smallest universe index.
fn first_failure<F>(universe: &AffineUniverse, check: F) -> Option<(u128, AffineSubspace)>
where
    F: Fn(&Mat) -> Option<u128> + Sync,
{
    let duals = universe.duals();
    let n = duals.len();
    let chunks = n.div_ceil(CHUNK) as u64;
    let per_dual = if n == 0 { 0 } else { universe.len() / n };
    (0..chunks).into_par_iter().find_map_first(|c| {
        let start = c as u128 * CHUNK;
        for (offset, dual) in duals.iter_range(start, start + CHUNK).enumerate() {
            if let Some(slot) = check(&dual) {
                let index = (start + offset as u128) * per_dual + slot;
                return Some((index, universe.get(index)));
            }
        }
        None
    })
}

fn check_dims(set: &PointSet, kind: PointKind, codim: usize, lo: usize, hi: usize) -> Result<()> {
    if set.kind() != kind {
        return Err(Error::InvalidArgument(format!("expected {kind} points, got {} points", set.kind())));
    }
    if codim < lo || codim > hi {
        return Err(Error::InvalidArgument(format!(
            "codimension {codim} outside {lo}..={hi} for k = {}",
            set.k()
        )));
    }
    Ok(())
}

/// Whether `b` meets every affine subspace of codimension `s`.
pub fn is_affine_blocking(b: &PointSet, s: usize) -> Result<BlockingVerdict> {
    check_dims(b, PointKind::Affine, s, 1, b.k())?;
    let universe = AffineUniverse::new(b.field(), b.k(), s, SubspaceFilter::All)?;
    let dots = Dots::new(b.field(), b.k(), b.points());
    let failure = first_failure(&universe, |a| first_unblocked_rhs(&dots, a, &mut Vec::new()));
    Ok(BlockingVerdict::exhaustive(universe.len(), failure))
}

/// Whether `l` meets every codimension-t subspace of PG(k−1, q) in a set
/// spanning that subspace.
pub fn is_strong_blocking(l: &PointSet, t: usize) -> Result<BlockingVerdict> {
    check_dims(l, PointKind::Projective, t, 1, l.k().saturating_sub(1))?;
    let universe = AffineUniverse::new(l.field(), l.k(), t, SubspaceFilter::ThroughOrigin)?;
    let dots = Dots::new(l.field(), l.k(), l.points());
    let failure = first_failure(&universe, |a| (!spans_kernel(&dots, a)).then_some(0));
    Ok(BlockingVerdict::exhaustive(universe.len(), failure))
}

fn sampled<F>(universe: &AffineUniverse, samples: u64, seed: u64, violates: F) -> BlockingVerdict
where
    F: Fn(&AffineSubspace) -> bool,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..samples {
        let index = rng.random_range(0..universe.len());
        let w = universe.get(index);
        if violates(&w) {
            return BlockingVerdict {
                holds: false,
                outcome: Outcome::Fails,
                witness: Some(w),
                witness_index: Some(index),
                checked: i as u128 + 1,
            };
        }
    }
    BlockingVerdict {
        holds: false,
        outcome: Outcome::NoViolationFound,
        witness: None,
        witness_index: None,
        checked: samples as u128,
    }
}

/// Affine blocking check against `samples` uniformly random subspaces. Never
/// reports `Holds`.
pub fn is_affine_blocking_sampled(b: &PointSet, s: usize, samples: u64, seed: u64) -> Result<BlockingVerdict> {
    check_dims(b, PointKind::Affine, s, 1, b.k())?;
    let universe = AffineUniverse::with_limit(b.field(), b.k(), s, SubspaceFilter::All, None)?;
    Ok(sampled(&universe, samples, seed, |w| !b.points().iter().any(|p| w.contains(p))))
}

/// Strong blocking check against `samples` uniformly random subspaces. Never
/// reports `Holds`.
pub fn is_strong_blocking_sampled(l: &PointSet, t: usize, samples: u64, seed: u64) -> Result<BlockingVerdict> {
    check_dims(l, PointKind::Projective, t, 1, l.k().saturating_sub(1))?;
    let universe = AffineUniverse::with_limit(l.field(), l.k(), t, SubspaceFilter::ThroughOrigin, None)?;
    let need = l.k() - t;
    Ok(sampled(&universe, samples, seed, |w| {
        let inside: Vec<Vec<u8>> = l.points().iter().filter(|p| w.contains(p)).cloned().collect();
        crate::algebra::rank_of(l.field(), &inside) < need
    }))
}

/// Independent re-check of a witness: the subspace misses `b` (affine) or
/// meets `l` in a non-spanning set (strong).
pub fn witness_violates(set: &PointSet, w: &AffineSubspace) -> bool {
    match set.kind() {
        PointKind::Affine => !set.points().iter().any(|p| w.contains(p)),
        PointKind::Projective => {
            let inside: Vec<Vec<u8>> = set.points().iter().filter(|p| w.contains(p)).cloned().collect();
            crate::algebra::rank_of(set.field(), &inside) < w.dim()
        }
    }
}

/// The union of the lines through the origin given by `l`.
pub fn lift_to_affine(l: &PointSet) -> PointSet {
    let field = l.field();
    let mut pts = vec![vec![0u8; l.k()]];
    for p in l.points() {
        for c in field.nonzero() {
            pts.push(field.scale(c, p));
        }
    }
    PointSet::affine(field, l.k(), pts).expect("multiples of valid points are valid")
}

/// The projective points of the nonzero elements of `s`.
pub fn projectivize(s: &PointSet) -> PointSet {
    let pts = s.points().iter().filter(|p| p.iter().any(|&c| c != 0)).cloned().collect();
    PointSet::projective(s.field(), s.k(), pts).expect("nonzero points are valid")
}

/// `Some(B)` when `s = {0} ∪ B ∪ −B`, with `B` holding the lexicographically
/// smaller element of each ± pair.
pub fn symmetric_decomposition(s: &PointSet) -> Option<Vec<Vec<u8>>> {
    if s.kind() != PointKind::Affine || !s.contains_origin() {
        return None;
    }
    let f = s.field();
    let mut half = Vec::new();
    for p in s.points().iter().skip(1) {
        let neg = f.negate(p);
        if !s.contains(&neg) {
            return None;
        }
        if *p <= neg {
            half.push(p.clone());
        }
    }
    Some(half)
}

pub fn is_symmetric(s: &PointSet) -> bool {
    symmetric_decomposition(s).is_some()
}

/// Size of the universe an exhaustive check would walk, for callers deciding
/// between exhaustive and sampled mode.
pub fn universe_size(field: &Field, k: usize, codim: usize, kind: PointKind) -> Result<u128> {
    let filter = match kind {
        PointKind::Affine => SubspaceFilter::All,
        PointKind::Projective => SubspaceFilter::ThroughOrigin,
    };
    Ok(AffineUniverse::with_limit(field, k, codim, filter, None)?.len())
}

pub fn exhaustive_feasible(field: &Field, k: usize, codim: usize, kind: PointKind) -> bool {
    universe_size(field, k, codim, kind).is_ok_and(|n| n <= UNIVERSE_LIMIT)
}
