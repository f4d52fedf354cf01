use std::sync::Arc;

use crate::arith::{Elem, FieldSpec, FieldValue, Poly};

use super::{LinalgError, Mat};

/// Polynomial in the nilpotent symbol `N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NPoly {
    spec: Arc<FieldSpec>,
    poly: Poly,
}

impl NPoly {
    pub fn new(spec: Arc<FieldSpec>, coeffs: Vec<Elem>) -> Self {
        NPoly {
            spec,
            poly: Poly::from_coeffs(coeffs),
        }
    }

    pub fn zero(spec: Arc<FieldSpec>) -> Self {
        NPoly {
            spec,
            poly: Poly::zero(),
        }
    }

    /// `c N^k`.
    pub fn monomial(spec: Arc<FieldSpec>, c: Elem, k: usize) -> Self {
        let mut coeffs = vec![spec.zero(); k];
        coeffs.push(c);
        Self::new(spec, coeffs)
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    /// Coefficient of `N^k`.
    pub fn coeff(&self, k: usize) -> FieldValue {
        let e = self.poly.coeffs().get(k).cloned().unwrap_or_else(|| self.spec.zero());
        FieldValue::new(self.spec.clone(), e)
    }

    pub fn coeffs(&self) -> &[Elem] {
        self.poly.coeffs()
    }

    pub fn add(&self, other: &NPoly) -> NPoly {
        NPoly {
            spec: self.spec.clone(),
            poly: self.spec.poly_add(&self.poly, &other.poly),
        }
    }

    pub fn mul(&self, other: &NPoly) -> NPoly {
        NPoly {
            spec: self.spec.clone(),
            poly: self.spec.poly_mul(&self.poly, &other.poly),
        }
    }

    /// Lowest power of `N` with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.poly.valuation()
    }
}

/// `sum_k C_k N^k`, stored as its coefficient matrices (no trailing zero
/// matrices).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NPolyMatrix {
    spec: Arc<FieldSpec>,
    rows: usize,
    cols: usize,
    coeffs: Vec<Mat>,
}

impl NPolyMatrix {
    pub fn zero(spec: Arc<FieldSpec>, rows: usize, cols: usize) -> Self {
        NPolyMatrix {
            spec,
            rows,
            cols,
            coeffs: Vec::new(),
        }
    }

    /// From coefficient matrices `C_0, C_1, ...`, all of size `rows x cols`.
    pub fn from_coeffs(
        spec: Arc<FieldSpec>,
        rows: usize,
        cols: usize,
        mut coeffs: Vec<Mat>,
    ) -> Result<Self, LinalgError> {
        if let Some(c) = coeffs.iter().find(|c| c.dims() != (rows, cols)) {
            return Err(LinalgError::DimensionMismatch(format!(
                "coefficient of size {:?} in a {rows}x{cols} polynomial matrix",
                c.dims()
            )));
        }
        while coeffs.last().is_some_and(Mat::is_zero) {
            coeffs.pop();
        }
        Ok(NPolyMatrix {
            spec,
            rows,
            cols,
            coeffs,
        })
    }

    pub fn from_entries(spec: Arc<FieldSpec>, rows: usize, cols: usize, entries: &[NPoly]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count");
        let deg = entries.iter().filter_map(NPoly::degree).max();
        let coeffs = match deg {
            None => Vec::new(),
            Some(d) => (0..=d)
                .map(|k| {
                    Mat::from_fn(spec.clone(), rows, cols, |i, j| {
                        entries[i * cols + j].coeff(k).into_elem()
                    })
                })
                .collect(),
        };
        NPolyMatrix {
            spec,
            rows,
            cols,
            coeffs,
        }
    }

    /// `I N^k`.
    pub fn identity_times_power(spec: Arc<FieldSpec>, n: usize, k: usize) -> Self {
        let mut coeffs = vec![Mat::zero(spec.clone(), n, n); k];
        coeffs.push(Mat::identity(spec.clone(), n));
        Self::from_coeffs(spec, n, n, coeffs).expect("square coefficients")
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

    /// `None` for the zero matrix.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// `C_k`, the zero matrix past the degree.
    pub fn coeff(&self, k: usize) -> Mat {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Mat::zero(self.spec.clone(), self.rows, self.cols))
    }

    pub fn coeffs(&self) -> &[Mat] {
        &self.coeffs
    }

    pub fn entry(&self, i: usize, j: usize) -> NPoly {
        NPoly::new(self.spec.clone(), self.coeffs.iter().map(|c| c.get(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> NPolyMatrix {
        NPolyMatrix {
            spec: self.spec.clone(),
            rows: self.cols,
            cols: self.rows,
            coeffs: self.coeffs.iter().map(Mat::transpose).collect(),
        }
    }

    pub fn add(&self, other: &NPolyMatrix) -> Result<NPolyMatrix, LinalgError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(LinalgError::DimensionMismatch("sum of polynomial matrices".into()));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeff(k).add(&other.coeff(k)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(self.spec.clone(), self.rows, self.cols, coeffs)
    }

    /// Drops every power `N^k` with `k >= m`.
    pub fn truncate(&self, m: usize) -> NPolyMatrix {
        let coeffs = self.coeffs.iter().take(m).cloned().collect();
        Self::from_coeffs(self.spec.clone(), self.rows, self.cols, coeffs).expect("same sizes")
    }
}

/// `A B` with coefficients `sum_{g + d = mu} A_g B_d`.
pub fn npoly_matmul(a: &NPolyMatrix, b: &NPolyMatrix) -> Result<NPolyMatrix, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch(format!(
            "product of {}x{} and {}x{} polynomial matrices",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return Ok(NPolyMatrix::zero(a.spec.clone(), a.rows, b.cols));
    };
    let mut out = vec![Mat::zero(a.spec.clone(), a.rows, b.cols); da + db + 1];
    for (g, ag) in a.coeffs.iter().enumerate() {
        if ag.is_zero() {
            continue;
        }
        for (d, bd) in b.coeffs.iter().enumerate() {
            if bd.is_zero() {
                continue;
            }
            out[g + d] = out[g + d].add(&ag.mul(bd)?)?;
        }
    }
    NPolyMatrix::from_coeffs(a.spec.clone(), a.rows, b.cols, out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_mat;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_npm(spec: &Arc<FieldSpec>, rng: &mut ChaCha8Rng, r: usize, c: usize, deg: usize) -> NPolyMatrix {
        let coeffs = (0..=deg).map(|_| random_mat(spec, rng, r, c)).collect();
        NPolyMatrix::from_coeffs(spec.clone(), r, c, coeffs).unwrap()
    }

    #[test]
    fn powers_of_identity() {
        let f = Arc::new(FieldSpec::Rationals);
        let a = NPolyMatrix::identity_times_power(f.clone(), 3, 2);
        let b = NPolyMatrix::identity_times_power(f.clone(), 3, 1);
        assert_eq!(
            npoly_matmul(&a, &b).unwrap(),
            NPolyMatrix::identity_times_power(f, 3, 3)
        );
    }

    #[test]
    fn matches_entrywise_convolution() {
        let f = Arc::new(FieldSpec::finite(5, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_npm(&f, &mut rng, 4, 4, 3);
        let b = random_npm(&f, &mut rng, 4, 4, 3);
        let c = npoly_matmul(&a, &b).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = NPoly::zero(f.clone());
                for l in 0..4 {
                    acc = acc.add(&a.entry(i, l).mul(&b.entry(l, j)));
                }
                assert_eq!(c.entry(i, j), acc);
            }
        }
    }

    #[test]
    fn algebraic_laws() {
        let f = Arc::new(FieldSpec::Rationals);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_npm(&f, &mut rng, 2, 3, 2);
            let b = random_npm(&f, &mut rng, 3, 2, 1);
            let b2 = random_npm(&f, &mut rng, 3, 2, 2);
            let c = random_npm(&f, &mut rng, 2, 4, 2);
            let ab = npoly_matmul(&a, &b).unwrap();
            assert_eq!(
                npoly_matmul(&ab, &c).unwrap(),
                npoly_matmul(&a, &npoly_matmul(&b, &c).unwrap()).unwrap()
            );
            assert_eq!(
                npoly_matmul(&a, &b.add(&b2).unwrap()).unwrap(),
                ab.add(&npoly_matmul(&a, &b2).unwrap()).unwrap()
            );
            assert_eq!(
                ab.transpose(),
                npoly_matmul(&b.transpose(), &a.transpose()).unwrap()
            );
        }
    }
}
