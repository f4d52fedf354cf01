use serde::{Deserialize, Serialize};

use super::{LinalgError, Mat};

/// Row and column block sizes of a block matrix. Blocks are indexed from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockShape {
    row_sizes: Vec<usize>,
    col_sizes: Vec<usize>,
}

impl BlockShape {
    pub fn new(row_sizes: Vec<usize>, col_sizes: Vec<usize>) -> Self {
        BlockShape { row_sizes, col_sizes }
    }

    /// Skew `k`-block shape: block-row `a` has `k_a` rows and block-column
    /// `b` has `k_{m+2-b}` columns.
    pub fn skew(k: &[usize]) -> Self {
        BlockShape {
            row_sizes: k.to_vec(),
            col_sizes: k.iter().rev().copied().collect(),
        }
    }

    /// Block `(i, j)` has `k_i x k_j` entries.
    pub fn square(k: &[usize]) -> Self {
        BlockShape {
            row_sizes: k.to_vec(),
            col_sizes: k.to_vec(),
        }
    }

    pub fn row_sizes(&self) -> &[usize] {
        &self.row_sizes
    }

    pub fn col_sizes(&self) -> &[usize] {
        &self.col_sizes
    }

    pub fn total_rows(&self) -> usize {
        self.row_sizes.iter().sum()
    }

    pub fn total_cols(&self) -> usize {
        self.col_sizes.iter().sum()
    }

    /// `(row offset, column offset, rows, cols)` of block `(a, b)`.
    pub fn locate(&self, a: usize, b: usize) -> Result<(usize, usize, usize, usize), LinalgError> {
        if a == 0 || b == 0 || a > self.row_sizes.len() || b > self.col_sizes.len() {
            return Err(LinalgError::BadBlockIndex(a, b));
        }
        let r0 = self.row_sizes[..a - 1].iter().sum();
        let c0 = self.col_sizes[..b - 1].iter().sum();
        Ok((r0, c0, self.row_sizes[a - 1], self.col_sizes[b - 1]))
    }

    fn check(&self, m: &Mat) -> Result<(), LinalgError> {
        if m.dims() != (self.total_rows(), self.total_cols()) {
            return Err(LinalgError::SizeMismatch {
                expected: (self.total_rows(), self.total_cols()),
                got: m.dims(),
            });
        }
        Ok(())
    }
}

pub fn block_get(m: &Mat, shape: &BlockShape, a: usize, b: usize) -> Result<Mat, LinalgError> {
    shape.check(m)?;
    let (r0, c0, nr, nc) = shape.locate(a, b)?;
    Ok(m.submatrix(r0, c0, nr, nc))
}

pub fn block_set(m: &mut Mat, shape: &BlockShape, a: usize, b: usize, block: &Mat) -> Result<(), LinalgError> {
    shape.check(m)?;
    let (r0, c0, nr, nc) = shape.locate(a, b)?;
    if block.dims() != (nr, nc) {
        return Err(LinalgError::SizeMismatch {
            expected: (nr, nc),
            got: block.dims(),
        });
    }
    m.set_submatrix(r0, c0, block);
    Ok(())
}

/// Inverse of a block upper unitriangular matrix (identity diagonal blocks
/// of the given sizes, zero below), by back-substitution.
pub fn block_unitriangular_inverse(m: &Mat, block_sizes: &[usize]) -> Result<Mat, LinalgError> {
    let shape = BlockShape::square(block_sizes);
    shape.check(m)?;
    let nb = block_sizes.len();
    let blk = |i: usize, j: usize| block_get(m, &shape, i, j).expect("valid block");
    for i in 1..=nb {
        if !blk(i, i).is_identity() {
            return Err(LinalgError::NotUnitriangular);
        }
        for j in 1..i {
            if !blk(i, j).is_zero() {
                return Err(LinalgError::NotUnitriangular);
            }
        }
    }
    let spec = m.spec().clone();
    let mut inv = Mat::identity(spec.clone(), m.rows());
    for j in 1..=nb {
        for i in (1..j).rev() {
            let mut acc = Mat::zero(spec.clone(), block_sizes[i - 1], block_sizes[j - 1]);
            for l in i + 1..=j {
                let x = block_get(&inv, &shape, l, j)?;
                acc = acc.sub(&blk(i, l).mul(&x)?)?;
            }
            block_set(&mut inv, &shape, i, j, &acc)?;
        }
    }
    Ok(inv)
}
