//! Dense matrices over an exact field, polynomial-in-`N` matrices and skew
//! block shapes.
//!
//! Zero-dimensional matrices are ordinary values: a `0 x k` matrix times a
//! `k x j` matrix is the `0 x j` matrix.

mod block;
mod npoly;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{Elem, FieldSpec, FieldValue};

pub use block::{block_get, block_set, block_unitriangular_inverse, BlockShape};
pub use npoly::{npoly_matmul, NPoly, NPolyMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("matrix is singular")]
    Singular,
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("target vector is not in the span")]
    NotInSpan,
    #[error("block index ({0}, {1}) out of range")]
    BadBlockIndex(usize, usize),
    #[error("block size mismatch: expected {expected:?}, got {got:?}")]
    SizeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("matrix is not block upper unitriangular")]
    NotUnitriangular,
}

/// Row-major matrix over `spec`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    spec: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|j| self.spec.format(self.get(i, j))).collect();
            f.write_str(&row.join(", "))?;
        }
        f.write_str("]")
    }
}

impl Mat {
    pub fn zero(spec: Arc<FieldSpec>, rows: usize, cols: usize) -> Self {
        let data = vec![spec.zero(); rows * cols];
        Mat {
            spec,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(spec: Arc<FieldSpec>, n: usize) -> Self {
        let mut m = Self::zero(spec, n, n);
        for i in 0..n {
            m.data[i * n + i] = m.spec.one();
        }
        m
    }

    pub fn from_fn(
        spec: Arc<FieldSpec>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Elem,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat {
            spec,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from rows of equal length; `cols` is needed when
    /// there are no rows.
    pub fn from_rows(spec: Arc<FieldSpec>, cols: usize, rows: Vec<Vec<Elem>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row of length {} in a matrix with {cols} columns",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Mat {
            spec,
            rows: nrows,
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors of length `len`.
    pub fn from_columns(spec: Arc<FieldSpec>, len: usize, columns: &[Vec<Elem>]) -> Result<Self, LinalgError> {
        if let Some(c) = columns.iter().find(|c| c.len() != len) {
            return Err(LinalgError::DimensionMismatch(format!(
                "column of length {} where {len} expected",
                c.len()
            )));
        }
        Ok(Self::from_fn(spec, len, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        &self.data[i * self.cols + j]
    }

    pub fn value(&self, i: usize, j: usize) -> FieldValue {
        FieldValue::new(self.spec.clone(), self.get(i, j).clone())
    }

    pub fn set(&mut self, i: usize, j: usize, e: Elem) {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of range");
        self.data[i * self.cols + j] = e;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Elem::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        self.spec.is_one(e)
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    fn check_field(&self, other: &Mat) -> Result<(), LinalgError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(LinalgError::MixedFields)
        }
    }

    fn check_same_dims(&self, other: &Mat, what: &str) -> Result<(), LinalgError> {
        self.check_field(other)?;
        if self.dims() != other.dims() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{what} of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_same_dims(other, "sum")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.spec.add(a, b))
            .collect();
        Ok(Mat { data, ..self.clone_shape() })
    }

    pub fn sub(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_same_dims(other, "difference")?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| self.spec.sub(a, b))
            .collect();
        Ok(Mat { data, ..self.clone_shape() })
    }

    pub fn neg(&self) -> Mat {
        let data = self.data.iter().map(|a| self.spec.neg(a)).collect();
        Mat { data, ..self.clone_shape() }
    }

    pub fn scale(&self, c: &Elem) -> Mat {
        let data = self.data.iter().map(|a| self.spec.mul(a, c)).collect();
        Mat { data, ..self.clone_shape() }
    }

    fn clone_shape(&self) -> Mat {
        Mat {
            spec: self.spec.clone(),
            rows: self.rows,
            cols: self.cols,
            data: Vec::new(),
        }
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.spec;
        let mut out = Mat::zero(f.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                let one = f.is_one(a);
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut out.data[i * other.cols + j];
                    *slot = if one { f.add(slot, b) } else { f.add(slot, &f.mul(a, b)) };
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.spec.clone(), self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Copy of rows `r0..r0+nr`, columns `c0..c0+nc`.
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Mat {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "submatrix out of range");
        Mat::from_fn(self.spec.clone(), nr, nc, |i, j| self.get(r0 + i, c0 + j).clone())
    }

    /// Overwrites the block starting at `(r0, c0)` with `block`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &Mat) {
        assert!(
            r0 + block.rows <= self.rows && c0 + block.cols <= self.cols,
            "submatrix out of range"
        );
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_field(other)?;
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch("hstack row counts differ".into()));
        }
        Ok(Mat::from_fn(self.spec.clone(), self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        }))
    }

    /// `self` above `other`.
    pub fn vstack(&self, other: &Mat) -> Result<Mat, LinalgError> {
        self.check_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Mat {
            spec: self.spec.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        assert_eq!(v.len(), self.cols, "vector length");
        let f = &self.spec;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = f.add(&acc, &f.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    /// Pivots are the first nonzero entry of each column.
    fn rref_in_place(&mut self, ncols: usize) -> Vec<usize> {
        let f = self.spec.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..ncols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            if !f.is_one(&inv) {
                for j in c..self.cols {
                    let e = f.mul(self.get(r, j), &inv);
                    self.set(r, j, e);
                }
            }
            let pivot_row: Vec<Elem> = self.row(r).to_vec();
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let factor = self.get(i, c).clone();
                if factor.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    if pivot_row[j].is_zero() {
                        continue;
                    }
                    let e = f.sub(self.get(i, j), &f.mul(&factor, &pivot_row[j]));
                    self.set(i, j, e);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form with the zero rows dropped, and its pivot
    /// columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let cols = m.cols;
        let pivots = m.rref_in_place(cols);
        let kept = m.submatrix(0, 0, pivots.len(), cols);
        (kept, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let cols = m.cols;
        m.rref_in_place(cols).len()
    }

    /// Basis of the right kernel `{x : self * x = 0}`, as columns.
    pub fn kernel(&self) -> Mat {
        let mut m = self.clone();
        let cols = m.cols;
        let pivots = m.rref_in_place(cols);
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let f = &self.spec;
        let mut out = Mat::zero(f.clone(), cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, f.one());
            for (r, &pc) in pivots.iter().enumerate() {
                out.set(pc, k, f.neg(m.get(r, fc)));
            }
        }
        out
    }

    /// Some `X` with `self * X = b`, free variables set to zero.
    pub fn solve_particular(&self, b: &Mat) -> Result<Mat, LinalgError> {
        self.solve_impl(b, false)
    }

    fn solve_impl(&self, b: &Mat, unique: bool) -> Result<Mat, LinalgError> {
        self.check_field(b)?;
        if self.rows != b.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "system with {} equations and right side of {} rows",
                self.rows, b.rows
            )));
        }
        let n = self.cols;
        let mut aug = self.hstack(b)?;
        let pivots = aug.rref_in_place(n);
        if unique && pivots.len() < n {
            return Err(LinalgError::Singular);
        }
        for i in pivots.len()..aug.rows {
            if (n..aug.cols).any(|j| !aug.get(i, j).is_zero()) {
                return Err(LinalgError::Inconsistent);
            }
        }
        let mut x = Mat::zero(self.spec.clone(), n, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, aug.get(r, n + j).clone());
            }
        }
        Ok(x)
    }

    /// The unique `X` with `self * X = b`.
    pub fn solve_exact(&self, b: &Mat) -> Result<Mat, LinalgError> {
        self.solve_impl(b, true)
    }

    pub fn inverse(&self) -> Result<Mat, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        self.solve_exact(&Mat::identity(self.spec.clone(), self.rows))
    }
}

/// Coefficients `c` with `sum_i c_i vectors[i] = target`. When the vectors
/// are dependent, the coefficients of non-pivot vectors are zero.
pub fn express_in_span(
    spec: &Arc<FieldSpec>,
    vectors: &[Vec<Elem>],
    target: &[Elem],
) -> Result<Vec<Elem>, LinalgError> {
    let a = Mat::from_columns(spec.clone(), target.len(), vectors)?;
    let b = Mat::from_columns(spec.clone(), target.len(), &[target.to_vec()])?;
    match a.solve_particular(&b) {
        Ok(x) => Ok(x.column(0)),
        Err(LinalgError::Inconsistent) => Err(LinalgError::NotInSpan),
        Err(e) => Err(e),
    }
}

/// Rank of a list of vectors of length `len`.
pub fn rank_of(spec: &Arc<FieldSpec>, len: usize, vectors: &[Vec<Elem>]) -> usize {
    Mat::from_columns(spec.clone(), len, vectors)
        .expect("vectors of equal length")
        .rank()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::arith::random::EntryBound;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_mat(spec: &Arc<FieldSpec>, rng: &mut ChaCha8Rng, r: usize, c: usize) -> Mat {
        Mat::from_fn(spec.clone(), r, c, |_, _| spec.random_elem(rng, EntryBound::default()))
    }

    fn q() -> Arc<FieldSpec> {
        Arc::new(FieldSpec::Rationals)
    }

    fn ints(spec: &Arc<FieldSpec>, rows: &[&[i64]]) -> Mat {
        let cols = rows.first().map_or(0, |r| r.len());
        Mat::from_rows(
            spec.clone(),
            cols,
            rows.iter().map(|r| r.iter().map(|&x| spec.from_int(x)).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_empty_products() {
        let f = q();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_mat(&f, &mut rng, 3, 4);
        assert_eq!(Mat::identity(f.clone(), 3).mul(&a).unwrap(), a);
        let e = Mat::zero(f.clone(), 0, 2).mul(&random_mat(&f, &mut rng, 2, 5)).unwrap();
        assert_eq!(e.dims(), (0, 5));
        let z = Mat::zero(f.clone(), 3, 0).mul(&Mat::zero(f.clone(), 0, 2)).unwrap();
        assert_eq!(z, Mat::zero(f.clone(), 3, 2));
        assert_eq!(a.transpose().transpose(), a);
        assert!(matches!(a.mul(&a), Err(LinalgError::DimensionMismatch(_))));
    }

    #[test]
    fn span_expression() {
        let f = q();
        let e1 = vec![f.one(), f.zero()];
        let e2 = vec![f.zero(), f.one()];
        let t = vec![f.from_int(3), f.from_int(-1)];
        assert_eq!(express_in_span(&f, &[e1.clone(), e2], &t).unwrap(), t);
        assert_eq!(express_in_span(&f, &[e1], &t), Err(LinalgError::NotInSpan));
    }

    #[test]
    fn random_solve_over_qt() {
        let f = Arc::new(FieldSpec::rational_functions());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_mat(&f, &mut rng, 6, 6);
        let b = random_mat(&f, &mut rng, 6, 2);
        let x = a.solve_exact(&b).unwrap();
        assert_eq!(a.mul(&x).unwrap(), b);
    }

    #[test]
    fn singular_and_inconsistent() {
        let f = q();
        let a = ints(&f, &[&[1, 2], &[2, 4]]);
        assert_eq!(a.rank(), 1);
        let b = ints(&f, &[&[1], &[3]]);
        assert_eq!(a.solve_exact(&b), Err(LinalgError::Singular));
        assert_eq!(a.solve_particular(&b), Err(LinalgError::Inconsistent));
        let k = a.kernel();
        assert_eq!(k.cols(), 1);
        assert!(a.mul(&k).unwrap().is_zero());
    }

    #[test]
    fn kernel_dimension_matches_rank() {
        let f = Arc::new(FieldSpec::finite(7, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = random_mat(&f, &mut rng, 3, 5);
            let k = a.kernel();
            assert_eq!(k.cols() + a.rank(), 5);
            assert!(a.mul(&k).unwrap().is_zero());
            assert_eq!(k.rank(), k.cols());
        }
    }
}
