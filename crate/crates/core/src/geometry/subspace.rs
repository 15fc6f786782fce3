use std::fmt;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::algebra::{solve_affine, vector_index, AffineSolution, Field, Mat, VectorIter};
use crate::error::{Error, Result};
use crate::geometry::qbin;

/// Largest subspace universe the exhaustive verifiers will walk.
pub const UNIVERSE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone)]
struct PivotPattern {
    pivots: Vec<usize>,
    /// (row, column) positions of the free entries, row-major.
    free: Vec<(usize, usize)>,
    offset: u128,
}

/// The full-rank `r x k` matrices in reduced row echelon form over F_q,
/// indexed `0..len()`.
///
/// Order: pivot column sets lexicographically, then free entries as a
/// base-q odometer (row-major, last free entry fastest). Each matrix is the
/// canonical basis of exactly one r-dimensional subspace of F_q^k.
#[derive(Debug, Clone)]
pub struct RrefSpace {
    field: Field,
    k: usize,
    r: usize,
    patterns: Vec<PivotPattern>,
    len: u128,
}

fn combinations(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..k {
            if k - c < r - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, k, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, r, &mut Vec::new(), &mut out);
    out
}

impl RrefSpace {
    pub fn new(field: &Field, k: usize, r: usize) -> Self {
        let q = field.q() as u128;
        let mut patterns = Vec::new();
        let mut offset = 0u128;
        if r <= k {
            for pivots in combinations(k, r) {
                let mut free = Vec::new();
                for (row, &p) in pivots.iter().enumerate() {
                    for c in p + 1..k {
                        if !pivots.contains(&c) {
                            free.push((row, c));
                        }
                    }
                }
                let size = q.saturating_pow(free.len() as u32);
                patterns.push(PivotPattern { pivots, free, offset });
                offset = offset.saturating_add(size);
            }
        }
        RrefSpace { field: field.clone(), k, r, patterns, len: offset }
    }

    pub fn len(&self) -> u128 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn get(&self, index: u128) -> Mat {
        assert!(index < self.len, "index {index} out of range");
        let pi = self.patterns.partition_point(|p| p.offset <= index) - 1;
        let pat = &self.patterns[pi];
        let digits = crate::algebra::index_to_vector(self.field.q(), pat.free.len(), index - pat.offset);
        let mut m = Mat::zeros(&self.field, self.r, self.k);
        for (row, &p) in pat.pivots.iter().enumerate() {
            m.set(row, p, 1);
        }
        for (&(row, c), &d) in pat.free.iter().zip(&digits) {
            m.set(row, c, d);
        }
        m
    }

    pub fn iter(&self) -> impl Iterator<Item = Mat> + '_ {
        self.iter_range(0, self.len)
    }

    /// Matrices with index in `start..end`, in order.
    pub fn iter_range(&self, start: u128, end: u128) -> impl Iterator<Item = Mat> + '_ {
        let end = end.min(self.len);
        let q = self.field.q();
        let first = if start < end {
            self.patterns.partition_point(|p| p.offset <= start) - 1
        } else {
            self.patterns.len()
        };
        self.patterns[first..]
            .iter()
            .take_while(move |p| p.offset < end)
            .flat_map(move |pat| {
                let lo = start.saturating_sub(pat.offset);
                let size = (q as u128).pow(pat.free.len() as u32);
                let hi = (end - pat.offset).min(size);
                let base = {
                    let mut m = Mat::zeros(&self.field, self.r, self.k);
                    for (row, &p) in pat.pivots.iter().enumerate() {
                        m.set(row, p, 1);
                    }
                    m
                };
                VectorIter::starting_at(q, pat.free.len(), lo)
                    .take((hi - lo) as usize)
                    .map(move |digits| {
                        let mut m = base.clone();
                        for (&(row, c), &d) in pat.free.iter().zip(&digits) {
                            m.set(row, c, d);
                        }
                        m
                    })
            })
    }
}

/// A point of PG(k−1, q): a nonzero vector whose first nonzero coordinate is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ProjectivePoint(Vec<u8>);

impl ProjectivePoint {
    /// Normalizes a nonzero vector; `None` for the zero vector.
    pub fn new(field: &Field, v: &[u8]) -> Option<Self> {
        v.iter().any(|&c| c != 0).then(|| ProjectivePoint(field.normalize(v)))
    }

    pub fn coords(&self) -> &[u8] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<u8> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// The nonzero vectors of the corresponding line through the origin.
    pub fn multiples(&self, field: &Field) -> impl Iterator<Item = Vec<u8>> + '_ {
        let f = field.clone();
        field.nonzero().map(move |c| f.scale(c, &self.0))
    }
}

impl fmt::Display for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// All points of PG(k−1, q) in canonical order (the order of `RrefSpace(k, 1)`).
pub fn projective_points(field: &Field, k: usize) -> Vec<ProjectivePoint> {
    RrefSpace::new(field, k, 1)
        .iter()
        .map(|m| ProjectivePoint(m.row(0).to_vec()))
        .collect()
}

/// An affine subspace `{x : A x = b}` of F_q^k with `A` in reduced row
/// echelon form of full row rank.
#[derive(Clone, PartialEq, Eq)]
pub struct AffineSubspace {
    dual: Mat,
    rhs: Vec<u8>,
}

impl fmt::Debug for AffineSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineSubspace{{ A: {:?}, b: {:?} }}", self.dual.row_vecs(), self.rhs)
    }
}

#[derive(Serialize)]
struct AffineSubspaceRepr {
    k: usize,
    dim: usize,
    equations: Vec<Vec<u8>>,
    rhs: Vec<u8>,
}

impl Serialize for AffineSubspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AffineSubspaceRepr {
            k: self.ambient_dim(),
            dim: self.dim(),
            equations: self.dual.row_vecs(),
            rhs: self.rhs.clone(),
        }
        .serialize(s)
    }
}

impl AffineSubspace {
    /// Wraps a dual pair already in canonical form (full-rank RREF `A`).
    pub(crate) fn from_canonical(dual: Mat, rhs: Vec<u8>) -> Self {
        debug_assert_eq!(dual.rows(), rhs.len());
        AffineSubspace { dual, rhs }
    }

    /// `{x : A x = b}`, normalized. `None` when the system is inconsistent.
    pub fn from_equations(a: &Mat, b: &[u8]) -> Result<Option<Self>> {
        if a.rows() != b.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} equations with {} right-hand sides",
                a.rows(),
                b.len()
            )));
        }
        let f = a.field();
        let k = a.cols();
        let mut aug = Mat::zeros(f, a.rows(), k + 1);
        for r in 0..a.rows() {
            for c in 0..k {
                aug.set(r, c, a.get(r, c));
            }
            aug.set(r, k, b[r]);
        }
        let piv = aug.rref_in_place();
        if piv.last() == Some(&k) {
            return Ok(None);
        }
        let rows: Vec<Vec<u8>> = (0..piv.len()).map(|r| aug.row(r)[..k].to_vec()).collect();
        let rhs = (0..piv.len()).map(|r| aug.get(r, k)).collect();
        Ok(Some(AffineSubspace { dual: Mat::from_rows(f, k, &rows)?, rhs }))
    }

    /// `offset + span(directions)`.
    pub fn from_parametric(field: &Field, offset: &[u8], directions: &[Vec<u8>]) -> Result<Self> {
        let k = offset.len();
        let dirs = Mat::from_rows(field, k, directions)?;
        let kernel = dirs.kernel();
        let dual = Mat::from_rows(field, k, &kernel)?.row_basis();
        let rhs = dual.mul_vec(offset);
        Ok(AffineSubspace { dual, rhs })
    }

    /// The linear span of `basis`.
    pub fn span(field: &Field, k: usize, basis: &[Vec<u8>]) -> Result<Self> {
        AffineSubspace::from_parametric(field, &vec![0; k], basis)
    }

    pub fn field(&self) -> &Field {
        self.dual.field()
    }

    pub fn equations(&self) -> &Mat {
        &self.dual
    }

    pub fn rhs(&self) -> &[u8] {
        &self.rhs
    }

    pub fn ambient_dim(&self) -> usize {
        self.dual.cols()
    }

    pub fn codim(&self) -> usize {
        self.dual.rows()
    }

    pub fn dim(&self) -> usize {
        self.ambient_dim() - self.codim()
    }

    pub fn through_origin(&self) -> bool {
        self.rhs.iter().all(|&c| c == 0)
    }

    pub fn contains(&self, x: &[u8]) -> bool {
        let f = self.field();
        (0..self.dual.rows()).all(|r| f.dot(self.dual.row(r), x) == self.rhs[r])
    }

    /// Parametric form: one point plus a basis of the direction space.
    pub fn parametric(&self) -> (Vec<u8>, Vec<Vec<u8>>) {
        match solve_affine(&self.dual, &self.rhs).expect("dimensions agree") {
            AffineSolution::Solutions { particular, kernel } => (particular, kernel),
            AffineSolution::Empty => unreachable!("a full-rank system is consistent"),
        }
    }

    /// Every point of the subspace.
    pub fn points(&self) -> Vec<Vec<u8>> {
        solve_affine(&self.dual, &self.rhs)
            .expect("dimensions agree")
            .points(self.field())
    }

    /// The parallel subspace through the origin.
    pub fn direction(&self) -> AffineSubspace {
        AffineSubspace { dual: self.dual.clone(), rhs: vec![0; self.rhs.len()] }
    }
}

/// Which affine subspaces an enumeration yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceFilter {
    All,
    ThroughOrigin,
    AvoidingOrigin,
}

/// The affine subspaces of F_q^k of a fixed codimension, indexed.
///
/// Index order: dual matrix (in `RrefSpace` order), then the right-hand side
/// `b` in lexicographic order.
#[derive(Debug, Clone)]
pub struct AffineUniverse {
    duals: RrefSpace,
    filter: SubspaceFilter,
    per_dual: u128,
}

impl AffineUniverse {
    pub fn new(field: &Field, k: usize, codim: usize, filter: SubspaceFilter) -> Result<Self> {
        AffineUniverse::with_limit(field, k, codim, filter, Some(UNIVERSE_LIMIT))
    }

    /// As `new`, with a caller-chosen size limit (`None` for no limit, which
    /// suits random sampling from universes too large to walk).
    pub fn with_limit(
        field: &Field,
        k: usize,
        codim: usize,
        filter: SubspaceFilter,
        limit: Option<u128>,
    ) -> Result<Self> {
        if codim > k {
            return Err(Error::InvalidArgument(format!("codimension {codim} exceeds k = {k}")));
        }
        let qs = (field.q() as u128).pow(codim as u32);
        let per_dual = match filter {
            SubspaceFilter::All => qs,
            SubspaceFilter::ThroughOrigin => 1,
            SubspaceFilter::AvoidingOrigin => qs - 1,
        };
        let count = qbin(k as i64, codim as i64, field.q()).to_u128().unwrap_or(u128::MAX);
        let size = count.saturating_mul(per_dual);
        if let Some(limit) = limit {
            if size > limit {
                return Err(Error::UniverseTooLarge { size, limit });
            }
        }
        Ok(AffineUniverse { duals: RrefSpace::new(field, k, codim), filter, per_dual })
    }

    pub fn len(&self) -> u128 {
        self.duals.len().saturating_mul(self.per_dual)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn duals(&self) -> &RrefSpace {
        &self.duals
    }

    pub fn filter(&self) -> SubspaceFilter {
        self.filter
    }

    pub fn codim(&self) -> usize {
        self.duals.r
    }

    /// Position of a right-hand side within the block of its dual matrix,
    /// or `None` when the filter excludes it.
    pub fn rhs_slot(&self, rhs: &[u8]) -> Option<u128> {
        let idx = vector_index(self.duals.field.q(), rhs);
        match self.filter {
            SubspaceFilter::All => Some(idx),
            SubspaceFilter::ThroughOrigin => (idx == 0).then_some(0),
            SubspaceFilter::AvoidingOrigin => (idx != 0).then(|| idx - 1),
        }
    }

    fn slot_to_rhs(&self, slot: u128) -> Vec<u8> {
        let idx = match self.filter {
            SubspaceFilter::All => slot,
            SubspaceFilter::ThroughOrigin => 0,
            SubspaceFilter::AvoidingOrigin => slot + 1,
        };
        crate::algebra::index_to_vector(self.duals.field.q(), self.duals.r, idx)
    }

    pub fn get(&self, index: u128) -> AffineSubspace {
        let dual = self.duals.get(index / self.per_dual);
        AffineSubspace::from_canonical(dual, self.slot_to_rhs(index % self.per_dual))
    }

    pub fn iter(&self) -> impl Iterator<Item = AffineSubspace> + '_ {
        let per = self.per_dual;
        self.duals.iter().flat_map(move |dual| {
            (0..per).map(move |slot| AffineSubspace::from_canonical(dual.clone(), self.slot_to_rhs(slot)))
        })
    }
}

/// Every affine subspace of codimension `codim` passing the filter, each
/// exactly once, in the documented order.
pub fn enumerate_affine_subspaces(
    field: &Field,
    k: usize,
    codim: usize,
    filter: SubspaceFilter,
) -> Result<impl Iterator<Item = AffineSubspace>> {
    let universe = AffineUniverse::new(field, k, codim, filter)?;
    Ok((0..universe.len()).map(move |i| universe.get(i)))
}

/// Whether the linear span of `basis` (rows) meets `h`.
pub fn span_meets(h: &AffineSubspace, basis: &Mat) -> bool {
    // x = u B lies in h iff (A B^T) u = b.
    let system = h.equations().mul(&basis.transpose()).expect("dimensions agree");
    !solve_affine(&system, h.rhs()).expect("dimensions agree").is_empty()
}

/// Number of `dim`-dimensional subspaces through the origin disjoint from `h`,
/// by enumeration.
pub fn count_disjoint_linear(h: &AffineSubspace, dim: usize) -> Result<u128> {
    let field = h.field().clone();
    let space = RrefSpace::new(&field, h.ambient_dim(), dim);
    if space.len() > UNIVERSE_LIMIT {
        return Err(Error::UniverseTooLarge { size: space.len(), limit: UNIVERSE_LIMIT });
    }
    Ok(space.iter().filter(|b| !span_meets(h, b)).count() as u128)
}

/// n_q(k, s) by brute force against the first codimension-s subspace that
/// avoids the origin, or against `h` when given.
pub fn n_q_oracle(field: &Field, k: usize, s: usize, h: Option<&AffineSubspace>) -> Result<u128> {
    if s == 0 || s > k {
        return Err(Error::InvalidArgument(format!("need 1 <= s <= k, got s = {s}, k = {k}")));
    }
    let owned;
    let h = match h {
        Some(h) => {
            if h.codim() != s || h.through_origin() || h.ambient_dim() != k {
                return Err(Error::InvalidArgument(
                    "reference subspace must have codimension s and avoid the origin".into(),
                ));
            }
            h
        }
        None => {
            owned = AffineUniverse::new(field, k, s, SubspaceFilter::AvoidingOrigin)?.get(0);
            &owned
        }
    };
    count_disjoint_linear(h, s)
}
