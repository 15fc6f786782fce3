//! Linear codes: distance, minimality, trifference and perfect hashing, and
//! the correspondences with projective point sets and symmetric blocking sets.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Field, Mat, VectorIter};
use crate::blocking::{is_affine_blocking, symmetric_decomposition, PointSet};
use crate::error::{Error, Result};
use crate::geometry::{RrefSpace, UNIVERSE_LIMIT};

/// Largest number of pairs, triples or tuples a direct check will examine.
pub const TUPLE_LIMIT: u128 = 200_000_000;

/// A k-dimensional code in F_q^n given by a full-rank k×n generator matrix.
#[derive(Debug, Clone)]
pub struct LinearCode {
    g: Mat,
    min_distance: OnceLock<usize>,
}

impl PartialEq for LinearCode {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g
    }
}

impl LinearCode {
    pub fn new(g: Mat) -> Result<Self> {
        let rank = g.rank();
        if g.rows() == 0 || rank < g.rows() {
            return Err(Error::RankDeficient { rank, expected: g.rows().max(1) });
        }
        Ok(LinearCode { g, min_distance: OnceLock::new() })
    }

    pub fn field(&self) -> &Field {
        self.g.field()
    }

    pub fn generator(&self) -> &Mat {
        &self.g
    }

    pub fn n(&self) -> usize {
        self.g.cols()
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    /// Number of codewords, q^k.
    pub fn size(&self) -> u128 {
        (self.field().q() as u128).saturating_pow(self.k() as u32)
    }

    fn ensure_enumerable(&self) -> Result<()> {
        if self.size() > UNIVERSE_LIMIT {
            return Err(Error::CodeTooLarge(format!("{} codewords", self.size())));
        }
        Ok(())
    }

    /// Every codeword `u G`, with `u` in lexicographic order.
    pub fn codewords(&self) -> Result<Vec<Vec<u8>>> {
        self.ensure_enumerable()?;
        Ok(self.g.combinations().collect())
    }

    /// One codeword per nonzero projective class: `u G` for `u` with leading
    /// coordinate 1, in lexicographic order of `u`. Each is the first member
    /// of its class in `codewords()` order.
    pub fn projective_codewords(&self) -> Result<Vec<Vec<u8>>> {
        self.ensure_enumerable()?;
        Ok(VectorIter::new(self.field().q(), self.k())
            .filter(|u| u.iter().find(|&&c| c != 0) == Some(&1))
            .map(|u| self.g.vec_mul(&u))
            .collect())
    }

    pub fn min_distance(&self) -> Result<usize> {
        if let Some(&d) = self.min_distance.get() {
            return Ok(d);
        }
        let d = self
            .projective_codewords()?
            .iter()
            .map(|c| weight(c))
            .min()
            .expect("k >= 1");
        Ok(*self.min_distance.get_or_init(|| d))
    }

    /// First coordinate that is zero in every codeword, if any.
    pub fn zero_coordinate(&self) -> Option<usize> {
        (0..self.n()).find(|&c| (0..self.k()).all(|r| self.g.get(r, c) == 0))
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.zero_coordinate().is_none()
    }
}

pub fn weight(v: &[u8]) -> usize {
    v.iter().filter(|&&c| c != 0).count()
}

fn support(v: &[u8]) -> u128 {
    v.iter().enumerate().filter(|(_, &c)| c != 0).fold(0, |m, (i, _)| m | (1u128 << i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "name")]
pub enum CodeProperty {
    Minimal,
    Trifferent,
    PerfectHash { t: usize },
    Nondegenerate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CodeWitness {
    /// Offending codewords: a pair (u, v) with supp(u) ⊊ supp(v), or a
    /// triple / t-tuple that is not separated in any coordinate.
    Codewords(Vec<Vec<u8>>),
    /// A coordinate that vanishes on the whole code.
    Coordinate(usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct CodeVerdict {
    pub property: CodeProperty,
    pub holds: bool,
    pub witness: Option<CodeWitness>,
}

impl CodeVerdict {
    fn from_witness(property: CodeProperty, witness: Option<CodeWitness>) -> Self {
        CodeVerdict { property, holds: witness.is_none(), witness }
    }
}

pub fn check_nondegenerate(c: &LinearCode) -> CodeVerdict {
    CodeVerdict::from_witness(CodeProperty::Nondegenerate, c.zero_coordinate().map(CodeWitness::Coordinate))
}

/// Whether no nonzero codeword's support strictly contains another's. The
/// witness is the first violating ordered pair in codeword enumeration order.
pub fn is_minimal(c: &LinearCode) -> Result<CodeVerdict> {
    if c.n() > 128 {
        return Err(Error::CodeTooLarge(format!("length {} exceeds 128", c.n())));
    }
    let words = c.projective_codewords()?;
    let m = words.len() as u128;
    if m * m > TUPLE_LIMIT {
        return Err(Error::CodeTooLarge(format!("{m} projective codewords for a pairwise check")));
    }
    let supports: Vec<u128> = words.iter().map(|w| support(w)).collect();
    let first = (0..words.len()).into_par_iter().find_map_first(|i| {
        let si = supports[i];
        let wi = si.count_ones();
        supports
            .iter()
            .position(|&sj| sj.count_ones() > wi && sj & si == si)
            .map(|j| (i, j))
    });
    let witness = first.map(|(i, j)| CodeWitness::Codewords(vec![words[i].clone(), words[j].clone()]));
    Ok(CodeVerdict::from_witness(CodeProperty::Minimal, witness))
}

/// Whether some coordinate takes `t` pairwise distinct values on `tuple`.
pub fn separated(tuple: &[&[u8]]) -> bool {
    let n = tuple[0].len();
    (0..n).any(|i| {
        let mut seen = 0u64;
        tuple.iter().all(|w| {
            let bit = 1u64 << w[i];
            let fresh = seen & bit == 0;
            seen |= bit;
            fresh
        })
    })
}

fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// First t-subset of `words` (indices increasing, lexicographic) that is not
/// separated.
fn first_unseparated(words: &[Vec<u8>], t: usize) -> Option<Vec<Vec<u8>>> {
    let n = words.len();
    if n < t || t == 0 {
        return None;
    }
    fn rec<'a>(words: &'a [Vec<u8>], t: usize, start: usize, cur: &mut Vec<&'a [u8]>) -> Option<Vec<Vec<u8>>> {
        if cur.len() == t {
            return (!separated(cur)).then(|| cur.iter().map(|w| w.to_vec()).collect());
        }
        for i in start..=words.len() - (t - cur.len()) {
            cur.push(&words[i]);
            let found = rec(words, t, i + 1, cur);
            cur.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    // Parallel over the leading element; the minimum leading index with a
    // failure holds the lexicographically first failing tuple.
    (0..=n - t).into_par_iter().find_map_first(|i| {
        let mut cur = vec![words[i].as_slice()];
        rec(words, t, i + 1, &mut cur)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrifferenceMode {
    /// Check every triple of distinct codewords.
    #[default]
    Direct,
    /// Use that a linear ternary code is trifferent exactly when it is minimal.
    Equivalence,
}

/// Whether every three distinct codewords take all of {0, 1, 2} in some
/// coordinate. Codes with fewer than three codewords are vacuously trifferent.
pub fn is_trifferent(c: &LinearCode, mode: TrifferenceMode) -> Result<CodeVerdict> {
    if c.field().q() != 3 {
        return Err(Error::WrongField { expected: 3, got: c.field().q() });
    }
    match mode {
        TrifferenceMode::Equivalence => {
            let v = is_minimal(c)?;
            Ok(CodeVerdict { property: CodeProperty::Trifferent, ..v })
        }
        TrifferenceMode::Direct => {
            let witness = tuple_check(c, 3)?;
            Ok(CodeVerdict::from_witness(CodeProperty::Trifferent, witness))
        }
    }
}

fn tuple_check(c: &LinearCode, t: usize) -> Result<Option<CodeWitness>> {
    let tuples = binomial(c.size(), t as u128);
    if tuples > TUPLE_LIMIT {
        return Err(Error::CodeTooLarge(format!("{tuples} codeword {t}-subsets")));
    }
    let words = c.codewords()?;
    Ok(first_unseparated(&words, t).map(CodeWitness::Codewords))
}

/// Whether every `t` distinct codewords are pairwise distinct in some
/// coordinate.
pub fn is_perfect_hash(c: &LinearCode, t: usize) -> Result<CodeVerdict> {
    if t as u32 > c.field().q() {
        return Err(Error::TooManySymbols { t, q: c.field().q() });
    }
    let witness = tuple_check(c, t)?;
    Ok(CodeVerdict::from_witness(CodeProperty::PerfectHash { t }, witness))
}

/// The columns of a generator matrix as projective points.
#[derive(Debug, Clone)]
pub struct CodePoints {
    /// The distinct points.
    pub set: PointSet,
    /// The normalized column at each coordinate.
    pub columns: Vec<Vec<u8>>,
    pub multiplicity: BTreeMap<Vec<u8>, usize>,
}

pub fn points_from_code(c: &LinearCode) -> Result<CodePoints> {
    if let Some(i) = c.zero_coordinate() {
        return Err(Error::DegenerateCode(i));
    }
    let f = c.field();
    let columns: Vec<Vec<u8>> = (0..c.n()).map(|i| f.normalize(&c.g.column(i))).collect();
    let mut multiplicity = BTreeMap::new();
    for col in &columns {
        *multiplicity.entry(col.clone()).or_insert(0) += 1;
    }
    let set = PointSet::projective(f, c.k(), columns.clone())?;
    Ok(CodePoints { set, columns, multiplicity })
}

/// The code whose generator has the points of `p` as columns, in order.
pub fn code_from_points(p: &PointSet) -> Result<LinearCode> {
    let rank = p.rank();
    if rank < p.k() {
        return Err(Error::NonSpanningPoints { rank, k: p.k() });
    }
    LinearCode::new(Mat::from_columns(p.field(), p.k(), p.points())?)
}

/// Largest number of `columns` (counted with multiplicity) on a hyperplane
/// through the origin of F_q^k.
pub fn max_hyperplane_intersection(field: &Field, k: usize, columns: &[Vec<u8>]) -> Result<usize> {
    let normals = RrefSpace::new(field, k, 1);
    if normals.len() > UNIVERSE_LIMIT {
        return Err(Error::UniverseTooLarge { size: normals.len(), limit: UNIVERSE_LIMIT });
    }
    Ok(normals
        .iter()
        .map(|a| columns.iter().filter(|c| field.dot(a.row(0), c) == 0).count())
        .max()
        .unwrap_or(0))
}

/// n minus the largest hyperplane intersection of the column points.
pub fn distance_via_hyperplanes(c: &LinearCode) -> Result<usize> {
    let pts = points_from_code(c)?;
    Ok(c.n() - max_hyperplane_intersection(c.field(), c.k(), &pts.columns)?)
}

/// The ternary code with the elements of `B` as columns, where
/// `S = {0} ∪ B ∪ −B`, cycling through `B` to reach length `n`.
pub fn code_from_blocking(s: &PointSet, n: usize) -> Result<LinearCode> {
    if s.field().q() != 3 {
        return Err(Error::WrongField { expected: 3, got: s.field().q() });
    }
    let half = symmetric_decomposition(s).ok_or_else(|| {
        Error::NotSymmetric("expected {0} ∪ B ∪ −B".into())
    })?;
    if !is_affine_blocking(s, 2)?.holds {
        return Err(Error::NotBlocking);
    }
    let rank = crate::algebra::rank_of(s.field(), &half);
    if rank < s.k() {
        return Err(Error::RankDeficient { rank, expected: s.k() });
    }
    if n < half.len() {
        return Err(Error::InvalidArgument(format!(
            "length {n} is shorter than |B| = {}",
            half.len()
        )));
    }
    let columns: Vec<Vec<u8>> = half.iter().cycle().take(n).cloned().collect();
    LinearCode::new(Mat::from_columns(s.field(), s.k(), &columns)?)
}

/// `{0} ∪ columns ∪ −columns` for a ternary code.
pub fn blocking_from_code(c: &LinearCode) -> Result<PointSet> {
    let f = c.field();
    if f.q() != 3 {
        return Err(Error::WrongField { expected: 3, got: f.q() });
    }
    let mut pts = vec![vec![0u8; c.k()]];
    for i in 0..c.n() {
        let col = c.g.column(i);
        pts.push(f.negate(&col));
        pts.push(col);
    }
    PointSet::affine(f, c.k(), pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(q: u32, rows: &[Vec<u8>]) -> LinearCode {
        let f = Field::new(q).unwrap();
        LinearCode::new(Mat::from_rows(&f, rows[0].len(), rows).unwrap()).unwrap()
    }

    #[test]
    fn distance_examples() {
        for q in [2, 3, 5] {
            for n in 1..6 {
                assert_eq!(code(q, &[vec![1; n]]).min_distance().unwrap(), n);
            }
        }
        assert_eq!(code(2, &[vec![1, 0, 1], vec![0, 1, 1]]).min_distance().unwrap(), 2);
    }

    #[test]
    fn rejects_rank_deficient() {
        let f = Field::new(3).unwrap();
        assert!(LinearCode::new(Mat::zeros(&f, 1, 3)).is_err());
        assert!(LinearCode::new(Mat::from_rows(&f, 2, &[vec![1, 1], vec![2, 2]]).unwrap()).is_err());
    }

    #[test]
    fn minimality_examples() {
        assert!(is_minimal(&code(3, &[vec![1, 1, 1, 1]])).unwrap().holds);
        let v = is_minimal(&code(3, &[vec![1, 0], vec![0, 1]])).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(CodeWitness::Codewords(vec![vec![0, 1], vec![1, 1]])));
        let g = code(3, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]);
        assert!(is_minimal(&g).unwrap().holds);
        assert!(g.min_distance().unwrap() >= 2 * (2 - 1) + 1);
    }

    #[test]
    fn trifference_examples() {
        assert!(is_trifferent(&code(3, &[vec![1, 1, 1]]), TrifferenceMode::Direct).unwrap().holds);
        let id = code(3, &[vec![1, 0], vec![0, 1]]);
        let v = is_trifferent(&id, TrifferenceMode::Direct).unwrap();
        assert!(!v.holds);
        let Some(CodeWitness::Codewords(t)) = v.witness else { panic!() };
        let refs: Vec<&[u8]> = t.iter().map(|w| w.as_slice()).collect();
        assert!(!separated(&refs));
        let g = code(3, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]);
        assert!(is_trifferent(&g, TrifferenceMode::Direct).unwrap().holds);
        assert!(is_trifferent(&g, TrifferenceMode::Equivalence).unwrap().holds);
        assert!(matches!(
            is_trifferent(&code(2, &[vec![1, 1]]), TrifferenceMode::Direct),
            Err(Error::WrongField { .. })
        ));
    }

    #[test]
    fn perfect_hash_examples() {
        let g = code(5, &[vec![1, 0, 1, 1], vec![0, 1, 1, 2]]);
        assert!(is_perfect_hash(&g, 2).unwrap().holds);
        assert!(!is_perfect_hash(&g, 5).unwrap().holds);
        assert!(matches!(is_perfect_hash(&g, 6), Err(Error::TooManySymbols { .. })));
    }

    #[test]
    fn point_correspondence() {
        let f = Field::new(3).unwrap();
        let id = LinearCode::new(Mat::identity(&f, 3)).unwrap();
        let pts = points_from_code(&id).unwrap();
        assert_eq!(pts.set.points(), &[vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        let g = code(3, &[vec![2, 0, 1, 1, 1], vec![0, 1, 1, 2, 1]]);
        let pts = points_from_code(&g).unwrap();
        assert_eq!(pts.multiplicity[&vec![1, 1]], 2);
        assert_eq!(distance_via_hyperplanes(&g).unwrap(), g.min_distance().unwrap());
        let degenerate = code(3, &[vec![1, 0, 1], vec![0, 0, 1]]);
        assert!(matches!(points_from_code(&degenerate), Err(Error::DegenerateCode(1))));
    }

    #[test]
    fn blocking_correspondence() {
        let f = Field::new(3).unwrap();
        let s = PointSet::affine(&f, 2, VectorIter::new(3, 2).collect()).unwrap();
        let c = code_from_blocking(&s, 4).unwrap();
        assert_eq!((c.n(), c.k(), c.size()), (4, 2, 9));
        assert!(is_trifferent(&c, TrifferenceMode::Direct).unwrap().holds);
        assert_eq!(blocking_from_code(&c).unwrap(), s);
        let longer = code_from_blocking(&s, 7).unwrap();
        assert_eq!(blocking_from_code(&longer).unwrap(), s);
        let asym = PointSet::affine(&f, 2, vec![vec![0, 0], vec![1, 0]]).unwrap();
        assert!(matches!(code_from_blocking(&asym, 2), Err(Error::NotSymmetric(_))));
    }
}
