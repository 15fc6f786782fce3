use std::fmt;

use crate::algebra::{Field, VectorIter};
use crate::error::{Error, Result};

/// Dense row-major matrix over F_q.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{:?}; {}x{}]", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Solution set of `A x = b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AffineSolution {
    Empty,
    /// `particular + span(kernel)`; the kernel basis is in reduced form.
    Solutions {
        particular: Vec<u8>,
        kernel: Vec<Vec<u8>>,
    },
}

impl AffineSolution {
    pub fn is_empty(&self) -> bool {
        matches!(self, AffineSolution::Empty)
    }

    /// Number of solutions, q^dim(kernel), or 0.
    pub fn count(&self, q: u32) -> u128 {
        match self {
            AffineSolution::Empty => 0,
            AffineSolution::Solutions { kernel, .. } => (q as u128).pow(kernel.len() as u32),
        }
    }

    /// Every solution, kernel coefficients in lexicographic order.
    pub fn points(&self, field: &Field) -> Vec<Vec<u8>> {
        match self {
            AffineSolution::Empty => Vec::new(),
            AffineSolution::Solutions { particular, kernel } => {
                VectorIter::new(field.q(), kernel.len())
                    .map(|coeffs| {
                        let mut x = particular.clone();
                        for (c, v) in coeffs.iter().zip(kernel) {
                            field.axpy(&mut x, *c, v);
                        }
                        x
                    })
                    .collect()
            }
        }
    }
}

impl Mat {
    pub fn new(field: &Field, rows: usize, cols: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&x| x as u32 >= field.q()) {
            return Err(Error::InvalidArgument(format!(
                "entry {bad} is not an element of F_{}",
                field.q()
            )));
        }
        Ok(Mat { field: field.clone(), rows, cols, data })
    }

    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Mat { field: field.clone(), rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from equal-length rows. `cols` is needed for the
    /// zero-row case.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<u8>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Mat::new(field, rows.len(), cols, data)
    }

    /// Matrix whose columns are the given vectors (each of length `rows`).
    pub fn from_columns(field: &Field, rows: usize, columns: &[Vec<u8>]) -> Result<Self> {
        Mat::from_rows(field, rows, columns).map(|m| m.transpose())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// `A x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[u8]) -> Vec<u8> {
        (0..self.rows).map(|r| self.field.dot(self.row(r), x)).collect()
    }

    /// `u A` for a row vector `u`.
    pub fn vec_mul(&self, u: &[u8]) -> Vec<u8> {
        let mut out = vec![0u8; self.cols];
        for (r, &c) in u.iter().enumerate() {
            self.field.axpy(&mut out, c, self.row(r));
        }
        out
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rows: Vec<Vec<u8>> = (0..self.rows).map(|r| other.vec_mul(self.row(r))).collect();
        Mat::from_rows(&self.field, other.cols, &rows)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    ///
    /// Pivots are chosen as the first nonzero entry scanning columns left to
    /// right and, within a column, rows top to bottom.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = f.inv(self.get(r, c));
            for j in 0..self.cols {
                let v = f.mul(inv, self.get(r, j));
                self.set(r, j, v);
            }
            let pivot_row = self.row(r).to_vec();
            for i in 0..self.rows {
                if i != r {
                    let factor = self.get(i, c);
                    if factor != 0 {
                        let start = i * self.cols;
                        f.axpy(&mut self.data[start..start + self.cols], f.neg(factor), &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        (m, piv)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// The nonzero rows of the reduced echelon form: a canonical basis of the
    /// row space.
    pub fn row_basis(&self) -> Mat {
        let (m, piv) = self.rref();
        let rows: Vec<Vec<u8>> = (0..piv.len()).map(|r| m.row(r).to_vec()).collect();
        Mat::from_rows(&self.field, self.cols, &rows).expect("rows have matching length")
    }

    /// All `u A` for `u` in F_q^rows, `u` in lexicographic order. When the rows
    /// are independent this lists each row-space vector exactly once.
    pub fn combinations(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        VectorIter::new(self.field.q(), self.rows).map(move |u| self.vec_mul(&u))
    }

    /// The q^rank distinct vectors of the row space.
    pub fn row_space(&self) -> impl Iterator<Item = Vec<u8>> {
        let basis = self.row_basis();
        VectorIter::new(self.field.q(), basis.rows).map(move |u| basis.vec_mul(&u))
    }

    /// Basis of `{x : A x = 0}`, one vector per free column, in reduced form.
    pub fn kernel(&self) -> Vec<Vec<u8>> {
        let (m, piv) = self.rref();
        kernel_from_rref(&m, &piv)
    }
}

fn kernel_from_rref(m: &Mat, piv: &[usize]) -> Vec<Vec<u8>> {
    let f = m.field();
    let mut is_pivot = vec![false; m.cols()];
    for &p in piv {
        is_pivot[p] = true;
    }
    (0..m.cols())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![0u8; m.cols()];
            v[free] = 1;
            for (r, &p) in piv.iter().enumerate() {
                v[p] = f.neg(m.get(r, free));
            }
            v
        })
        .collect()
}

/// Full solution set of `A x = b`.
pub fn solve_affine(a: &Mat, b: &[u8]) -> Result<AffineSolution> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} equations",
            b.len(),
            a.rows()
        )));
    }
    let f = a.field().clone();
    let k = a.cols();
    // Augmented matrix [A | b].
    let mut aug = Mat::zeros(&f, a.rows(), k + 1);
    for r in 0..a.rows() {
        for c in 0..k {
            aug.set(r, c, a.get(r, c));
        }
        aug.set(r, k, b[r]);
    }
    let piv = aug.rref_in_place();
    if piv.last() == Some(&k) {
        return Ok(AffineSolution::Empty);
    }
    let mut particular = vec![0u8; k];
    for (r, &p) in piv.iter().enumerate() {
        particular[p] = aug.get(r, k);
    }
    let mut coeff = Mat::zeros(&f, piv.len(), k);
    for r in 0..piv.len() {
        for c in 0..k {
            coeff.set(r, c, aug.get(r, c));
        }
    }
    let kernel = kernel_from_rref(&coeff, &piv);
    Ok(AffineSolution::Solutions { particular, kernel })
}

/// Incremental echelon basis for rank tests over a stream of vectors.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: Field,
    rows: Vec<(usize, Vec<u8>)>,
}

impl EchelonBasis {
    pub fn new(field: &Field) -> Self {
        EchelonBasis { field: field.clone(), rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the residue.
    pub fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let f = &self.field;
        let mut x = v.to_vec();
        for (p, row) in &self.rows {
            let c = x[*p];
            if c != 0 {
                f.axpy(&mut x, f.neg(c), row);
            }
        }
        x
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    /// Adds `v`; returns whether the rank grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let x = self.reduce(v);
        match x.iter().position(|&c| c != 0) {
            None => false,
            Some(p) => {
                let f = &self.field;
                let x = f.scale(f.inv(x[p]), &x);
                for (_, row) in self.rows.iter_mut() {
                    let c = row[p];
                    if c != 0 {
                        f.axpy(row, f.neg(c), &x);
                    }
                }
                self.rows.push((p, x));
                true
            }
        }
    }
}

/// Rank of a list of vectors.
pub fn rank_of(field: &Field, vectors: &[Vec<u8>]) -> usize {
    let mut basis = EchelonBasis::new(field);
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn f(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    #[test]
    fn rank_examples() {
        let f3 = f(3);
        assert_eq!(Mat::identity(&f3, 3).rank(), 3);
        assert_eq!(Mat::zeros(&f(2), 2, 4).rank(), 0);
        let m = Mat::new(&f3, 2, 4, vec![1, 0, 1, 1, 0, 1, 1, 2]).unwrap();
        assert_eq!(m.rank(), 2);
        // Oracle: the 9 combinations are pairwise distinct.
        let combos: HashSet<Vec<u8>> = m.combinations().collect();
        assert_eq!(combos.len(), 9);
    }

    #[test]
    fn row_space_examples() {
        let f3 = f(3);
        let ones = Mat::new(&f3, 1, 4, vec![1; 4]).unwrap();
        let words: Vec<Vec<u8>> = ones.row_space().collect();
        assert_eq!(words, vec![vec![0; 4], vec![1; 4], vec![2; 4]]);
        let zero = Mat::zeros(&f3, 2, 3);
        assert_eq!(zero.row_space().collect::<Vec<_>>(), vec![vec![0; 3]]);
        let f2 = f(2);
        let id = Mat::identity(&f2, 2);
        let all: HashSet<Vec<u8>> = id.row_space().collect();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn rref_pivot_rule() {
        let f3 = f(3);
        let m = Mat::new(&f3, 2, 3, vec![0, 2, 1, 2, 1, 0]).unwrap();
        let (r, piv) = m.rref();
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r.row(0)[0], 1);
        assert_eq!(r.row(1)[..2], [0, 1]);
    }

    #[test]
    fn solve_affine_examples() {
        let f3 = f(3);
        let zero = Mat::zeros(&f3, 1, 3);
        let all = solve_affine(&zero, &[0]).unwrap();
        assert_eq!(all.count(3), 27);
        assert!(solve_affine(&zero, &[1]).unwrap().is_empty());

        let id = Mat::identity(&f3, 3);
        let single = solve_affine(&id, &[2, 0, 1]).unwrap();
        assert_eq!(single.points(&f3), vec![vec![2, 0, 1]]);

        let a = Mat::new(&f3, 1, 2, vec![1, 1]).unwrap();
        let mut pts = solve_affine(&a, &[1]).unwrap().points(&f3);
        pts.sort();
        assert_eq!(pts, vec![vec![0, 1], vec![1, 0], vec![2, 2]]);
    }

    #[test]
    fn solve_affine_dimension_mismatch() {
        let f3 = f(3);
        let a = Mat::zeros(&f3, 2, 3);
        assert!(matches!(solve_affine(&a, &[1]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn echelon_basis_tracks_rank() {
        let f5 = f(5);
        let mut b = EchelonBasis::new(&f5);
        assert!(b.insert(&[1, 2, 3]));
        assert!(!b.insert(&[2, 4, 1]));
        assert!(b.insert(&[0, 1, 0]));
        assert!(b.contains(&[1, 0, 3]));
        assert!(!b.contains(&[0, 0, 1]));
        assert_eq!(b.rank(), 2);
    }

    #[test]
    fn rejects_out_of_range_entries() {
        assert!(Mat::new(&f(3), 1, 2, vec![0, 3]).is_err());
    }
}
