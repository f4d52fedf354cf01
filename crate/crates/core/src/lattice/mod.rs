//! Concrete lattices `(V, N, L)` over a field containing `theta`: checking
//! that the `N`-images of the lattice basis span `V`, arranging the basis
//! into segments, extracting the Siegel object, the kernel bases `omega`
//! and `chi` with their pairing, and the dual lattice round trip.

mod dual;
mod qbasis;

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::random::EntryBound;
use crate::arith::{Elem, FieldSpec};
use crate::linalg::{LinalgError, Mat};
use crate::partition::{jordan_data, JordanData, PartitionError, PartitionWithZeroes};
use crate::siegel::{SiegelError, SiegelObject};

pub use dual::{build_dual_lattice, roundtrip_dual, RoundtripReport, RoundtripStatus};
pub use qbasis::{
    chi_basis, evaluate, omega_basis, omega_spans_kernel, pairing_matrix, verify_pairing, PairingReport,
    QBasisElement,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("the N-images of the lattice basis do not span V")]
    SpanFailure,
    #[error("segment sizes {got:?} disagree with the Jordan invariants {expected:?}")]
    InternalRankMismatch { expected: Vec<usize>, got: Vec<usize> },
    #[error("vector is not in the span of the arranged basis")]
    NotInSpan,
    #[error("invalid lattice instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
}

/// `V = F^n` with a nilpotent operator `N` of known Jordan type, and `r`
/// lattice vectors `l_1, ..., l_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeInstance {
    spec: Arc<FieldSpec>,
    jordan: JordanData,
    operator: Mat,
    basis: Vec<Vec<Elem>>,
}

impl LatticeInstance {
    /// `N` is the Jordan matrix of `jordan`.
    pub fn new(spec: Arc<FieldSpec>, jordan: JordanData, basis: Vec<Vec<Elem>>) -> Result<Self, LatticeError> {
        let operator = make_jordan_matrix(&spec, &jordan);
        Self::check_basis(&spec, &jordan, &basis)?;
        Ok(LatticeInstance { spec, jordan, operator, basis })
    }

    /// An arbitrary operator, checked to have the Jordan type of `jordan`.
    pub fn with_operator(
        spec: Arc<FieldSpec>,
        jordan: JordanData,
        operator: Mat,
        basis: Vec<Vec<Elem>>,
    ) -> Result<Self, LatticeError> {
        let n = jordan.n();
        if operator.dims() != (n, n) {
            return Err(LatticeError::Invalid(format!(
                "operator is {:?}, expected {n}x{n}",
                operator.dims()
            )));
        }
        if operator.spec() != &spec {
            return Err(LinalgError::MixedFields.into());
        }
        let mut power = Mat::identity(spec.clone(), n);
        for i in 1..=jordan.m() {
            power = power.mul(&operator)?;
            if power.rank() != image_dim(&jordan, i) {
                return Err(LatticeError::Invalid(format!(
                    "rank of N^{i} does not match the Jordan partition {:?}",
                    jordan.d().parts()
                )));
            }
        }
        Self::check_basis(&spec, &jordan, &basis)?;
        Ok(LatticeInstance { spec, jordan, operator, basis })
    }

    fn check_basis(spec: &Arc<FieldSpec>, jordan: &JordanData, basis: &[Vec<Elem>]) -> Result<(), LatticeError> {
        if basis.len() != jordan.r() {
            return Err(LatticeError::Invalid(format!(
                "{} basis vectors for a partition of length {}",
                basis.len(),
                jordan.r()
            )));
        }
        for v in basis {
            if v.len() != jordan.n() {
                return Err(LatticeError::Invalid(format!("vector of length {} in V of dimension {}", v.len(), jordan.n())));
            }
            if !v.iter().all(|e| spec.contains(e)) {
                return Err(LinalgError::MixedFields.into());
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn jordan(&self) -> &JordanData {
        &self.jordan
    }

    pub fn operator(&self) -> &Mat {
        &self.operator
    }

    pub fn basis(&self) -> &[Vec<Elem>] {
        &self.basis
    }

    pub fn m(&self) -> usize {
        self.jordan.m()
    }

    pub fn n(&self) -> usize {
        self.jordan.n()
    }

    pub fn r(&self) -> usize {
        self.jordan.r()
    }

    /// `[N^0 v, N^1 v, ..., N^{upto} v]`.
    pub fn orbit(&self, v: &[Elem], upto: usize) -> Vec<Vec<Elem>> {
        let mut out = vec![v.to_vec()];
        for _ in 0..upto {
            let next = self.operator.apply(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// `N^t l_j` for `t < m`, indexed `[j][t]`.
    fn powers(&self) -> Vec<Vec<Vec<Elem>>> {
        self.basis.iter().map(|l| self.orbit(l, self.m() - 1)).collect()
    }
}

/// `dim N^i V = sum_j max(d_j - i, 0)`.
pub fn image_dim(jordan: &JordanData, i: usize) -> usize {
    jordan.d().parts().iter().map(|&d| d.saturating_sub(i)).sum()
}

/// Block diagonal nilpotent Jordan matrix with blocks of sizes `d_1, d_2, ...`
/// and ones on the superdiagonal of each block.
pub fn make_jordan_matrix(spec: &Arc<FieldSpec>, jordan: &JordanData) -> Mat {
    let n = jordan.n();
    let mut out = Mat::zero(spec.clone(), n, n);
    let mut start = 0;
    for &d in jordan.d().parts() {
        for i in start..start + d.saturating_sub(1) {
            out.set(i, i + 1, spec.one());
        }
        start += d;
    }
    out
}

/// Incrementally built row echelon basis.
struct Echelon {
    spec: Arc<FieldSpec>,
    rows: Vec<(usize, Vec<Elem>)>,
}

impl Echelon {
    fn new(spec: Arc<FieldSpec>) -> Self {
        Echelon { spec, rows: Vec::new() }
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the vectors so far.
    fn insert(&mut self, v: &[Elem]) -> bool {
        let f = &self.spec;
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let c = v[*p].clone();
            for (x, b) in v.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x = f.sub(x, &f.mul(&c, b));
                }
            }
        }
        let Some(p) = v.iter().position(|e| !e.is_zero()) else {
            return false;
        };
        let inv = f.inv(&v[p]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = f.mul(x, &inv);
        }
        self.rows.push((p, v));
        true
    }
}

/// True iff `{N^i l_j : 0 <= i < m}` spans `V`.
pub fn check_spanning(lattice: &LatticeInstance) -> bool {
    let mut ech = Echelon::new(lattice.spec.clone());
    for orbit in lattice.powers() {
        for v in orbit {
            ech.insert(&v);
            if ech.len() == lattice.n() {
                return true;
            }
        }
    }
    ech.len() == lattice.n()
}

/// The lattice basis split into segments `u = 1, ..., m+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangedBasis {
    /// Original indices in selection order: segment `m+1` first, then
    /// segment `m`, down to segment `1`.
    pub permutation: Vec<usize>,
    /// `segments[u-1]` lists the original indices of `l_{u,1}, ..., l_{u,k_u}`.
    pub segments: Vec<Vec<usize>>,
    /// `(k_1, ..., k_{m+1})`.
    pub shape: Vec<usize>,
}

impl ArrangedBasis {
    /// Original indices listed segment by segment from `u = 1` upwards.
    pub fn ascending(&self) -> Vec<usize> {
        self.segments.iter().flatten().copied().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Greedy top-down arrangement: at level `a = m-1, ..., 0` the vectors
/// `N^a l_j` of unused indices are scanned in ascending order and accepted
/// while they extend the span of the images already chosen, until it
/// reaches `N^a V`. Accepted indices form segment `a + 2`; the rest form
/// segment 1.
pub fn arrange_segments(lattice: &LatticeInstance) -> Result<ArrangedBasis, LatticeError> {
    let m = lattice.m();
    let r = lattice.r();
    let powers = lattice.powers();
    let mut segments: Vec<Vec<usize>> = vec![Vec::new(); m + 1];
    let mut used = vec![false; r];
    let mut permutation = Vec::with_capacity(r);
    let mut ech = Echelon::new(lattice.spec.clone());
    for a in (0..m).rev() {
        for seg in &segments[a + 2..] {
            for &j in seg {
                if !ech.insert(&powers[j][a]) {
                    return Err(LatticeError::SpanFailure);
                }
            }
        }
        let target = image_dim(&lattice.jordan, a);
        for j in 0..r {
            if ech.len() >= target {
                break;
            }
            if !used[j] && ech.insert(&powers[j][a]) {
                used[j] = true;
                segments[a + 1].push(j);
                permutation.push(j);
            }
        }
        if ech.len() != target {
            return Err(LatticeError::SpanFailure);
        }
    }
    for j in (0..r).filter(|&j| !used[j]) {
        segments[0].push(j);
        permutation.push(j);
    }
    let shape: Vec<usize> = segments.iter().map(Vec::len).collect();
    if shape != lattice.jordan.shape() {
        return Err(LatticeError::InternalRankMismatch {
            expected: lattice.jordan.shape().to_vec(),
            got: shape,
        });
    }
    Ok(ArrangedBasis { permutation, segments, shape })
}

/// `(z, y, j)` labels of `N^z l_{y,j}` with `z >= level`, `y >= z + 2`.
fn level_labels(shape: &[usize], level: usize) -> Vec<(usize, usize, usize)> {
    let m = shape.len() - 1;
    let mut out = Vec::new();
    for z in level..m {
        for y in z + 2..=m + 1 {
            for j in 0..shape[y - 1] {
                out.push((z, y, j));
            }
        }
    }
    out
}

/// Checks by rank that for every `a < m` the vectors `N^z l_{y,j}`,
/// `z >= a`, `y >= z + 2`, form a basis of `N^a V`.
pub fn check_arrangement(lattice: &LatticeInstance, arranged: &ArrangedBasis) -> bool {
    let powers = lattice.powers();
    (0..lattice.m()).all(|a| {
        let labels = level_labels(&arranged.shape, a);
        let mut ech = Echelon::new(lattice.spec.clone());
        labels.len() == image_dim(&lattice.jordan, a)
            && labels
                .iter()
                .all(|&(z, y, j)| ech.insert(&powers[arranged.segments[y - 1][j]][z]))
    })
}

/// Solves `N^{u-1} l_{u,i} = -sum S_{u,u-1,y,z}[i][j] N^z l_{y,j}` for every
/// segment `u <= m`.
pub fn extract_siegel(lattice: &LatticeInstance, arranged: &ArrangedBasis) -> Result<SiegelObject, LatticeError> {
    let m = lattice.m();
    let n = lattice.n();
    let spec = lattice.spec.clone();
    let powers = lattice.powers();
    let shape = arranged.shape.clone();
    let mut solutions = Vec::with_capacity(m);
    for u in 1..=m {
        let labels = level_labels(&shape, u - 1);
        let cols: Vec<Vec<Elem>> = labels
            .iter()
            .map(|&(z, y, j)| powers[arranged.segments[y - 1][j]][z].clone())
            .collect();
        let rhs: Vec<Vec<Elem>> = arranged.segments[u - 1].iter().map(|&l| powers[l][u - 1].clone()).collect();
        let a = Mat::from_columns(spec.clone(), n, &cols)?;
        let b = Mat::from_columns(spec.clone(), n, &rhs)?;
        let x = match a.solve_exact(&b) {
            Ok(x) => x,
            Err(LinalgError::Inconsistent) => return Err(LatticeError::NotInSpan),
            Err(LinalgError::Singular) => return Err(LatticeError::SpanFailure),
            Err(e) => return Err(e.into()),
        };
        solutions.push((labels, x));
    }
    let f = spec.clone();
    Ok(SiegelObject::from_fn(spec, shape, |idx, rows, cols| {
        let (labels, x) = &solutions[idx.u - 1];
        let base = labels
            .iter()
            .position(|&(z, y, _)| (z, y) == (idx.z, idx.y))
            .unwrap_or(0);
        Mat::from_fn(f.clone(), rows, cols, |i, j| f.neg(x.get(base + j, i)))
    })?)
}

/// A random partition of length `r` with parts at most `m`, largest part
/// exactly `m`, and sum at most `max_n`.
pub fn random_jordan<R: Rng + ?Sized>(
    rng: &mut R,
    m: usize,
    r: usize,
    max_n: usize,
) -> Result<JordanData, LatticeError> {
    if r == 0 || max_n < m {
        return Err(LatticeError::Invalid(format!("no partition of length {r} with largest part {m} and sum at most {max_n}")));
    }
    let mut parts = vec![m];
    let mut left = max_n - m;
    for _ in 1..r {
        let top = left.min(*parts.last().unwrap());
        let d = rng.random_range(0..=top);
        parts.push(d);
        left -= d;
    }
    Ok(jordan_data(&PartitionWithZeroes::new(parts)?, m)?)
}

/// Random lattice vectors for `jordan`, redrawn up to `attempts` times until
/// their `N`-images span `V`.
pub fn random_lattice<R: Rng + ?Sized>(
    spec: Arc<FieldSpec>,
    jordan: JordanData,
    rng: &mut R,
    bound: EntryBound,
    attempts: usize,
) -> Result<LatticeInstance, LatticeError> {
    for _ in 0..attempts.max(1) {
        let basis = (0..jordan.r())
            .map(|_| (0..jordan.n()).map(|_| spec.random_elem(rng, bound)).collect())
            .collect();
        let lattice = LatticeInstance::new(spec.clone(), jordan.clone(), basis)?;
        if check_spanning(&lattice) {
            return Ok(lattice);
        }
    }
    Err(LatticeError::SpanFailure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::dual_partition;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jd(d: &[usize], m: usize) -> JordanData {
        jordan_data(&PartitionWithZeroes::new(d.to_vec()).unwrap(), m).unwrap()
    }

    fn ints(f: &Arc<FieldSpec>, rows: &[&[i64]]) -> Vec<Vec<Elem>> {
        rows.iter().map(|r| r.iter().map(|&x| f.from_int(x)).collect()).collect()
    }

    #[test]
    fn jordan_matrix_examples() {
        let f = Arc::new(FieldSpec::Rationals);
        let n1 = make_jordan_matrix(&f, &jd(&[1], 1));
        assert_eq!(n1.dims(), (1, 1));
        assert!(n1.is_zero());
        let n = make_jordan_matrix(&f, &jd(&[2, 1], 2));
        let expected = Mat::from_rows(f.clone(), 3, ints(&f, &[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]])).unwrap();
        assert_eq!(n, expected);
    }

    #[test]
    fn jordan_matrix_kernel_ranks_match_dual_partition() {
        let f = Arc::new(FieldSpec::finite(5, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = rng.random_range(1..=5);
            let r = rng.random_range(1..=5);
            let j = random_jordan(&mut rng, m, r, 12).unwrap();
            let n = make_jordan_matrix(&f, &j);
            let c = dual_partition(j.d(), m).unwrap();
            let mut power = Mat::identity(f.clone(), j.n());
            let mut prev_rank = j.n();
            for i in 1..=m {
                power = power.mul(&n).unwrap();
                let rank = power.rank();
                assert_eq!(prev_rank - rank, c.part(i), "d = {:?}", j.d().parts());
                assert_eq!(rank, image_dim(&j, i));
                prev_rank = rank;
            }
            assert!(power.is_zero());
        }
    }

    #[test]
    fn condition_examples() {
        let f = Arc::new(FieldSpec::Rationals);
        let std = LatticeInstance::new(f.clone(), jd(&[1, 1], 1), ints(&f, &[&[1, 0], &[0, 1]])).unwrap();
        assert!(check_spanning(&std));
        let zero = LatticeInstance::new(f.clone(), jd(&[1, 1], 1), ints(&f, &[&[0, 0], &[0, 0]])).unwrap();
        assert!(!check_spanning(&zero));
        assert_eq!(arrange_segments(&zero), Err(LatticeError::SpanFailure));
    }

    #[test]
    fn m1_arrangement_and_extraction() {
        // V = F^2, N = 0, l_1, l_2 = standard basis, l_3, l_4 arbitrary
        let f = Arc::new(FieldSpec::Rationals);
        let basis = ints(&f, &[&[1, 0], &[0, 1], &[2, -1], &[3, 5]]);
        let lat = LatticeInstance::new(f.clone(), jd(&[1, 1, 0, 0], 1), basis).unwrap();
        let a = arrange_segments(&lat).unwrap();
        assert_eq!(a.shape, vec![2, 2]);
        assert_eq!(a.segments, vec![vec![2, 3], vec![0, 1]]);
        assert!(a.is_identity());
        let s = extract_siegel(&lat, &a).unwrap();
        let expected = Mat::from_rows(f.clone(), 2, ints(&f, &[&[-2, 1], &[-3, -5]])).unwrap();
        assert_eq!(s.get(1, 2, 0).unwrap(), &expected);
    }

    #[test]
    fn generic_m2_shape() {
        let f = Arc::new(FieldSpec::finite_rational_functions(13).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lat = random_lattice(f, jd(&[2, 1, 0], 2), &mut rng, EntryBound::default(), 10).unwrap();
        let a = arrange_segments(&lat).unwrap();
        assert_eq!(a.shape, vec![1, 1, 1]);
        assert!(check_arrangement(&lat, &a));
    }

    #[test]
    fn arrangement_respects_scan_order() {
        // l_1 = 0 forces the greedy scan to skip it at every level
        let f = Arc::new(FieldSpec::Rationals);
        let basis = ints(&f, &[&[0, 0, 0], &[1, 1, 1], &[0, 1, 2]]);
        let lat = LatticeInstance::new(f.clone(), jd(&[2, 1, 0], 2), basis).unwrap();
        let a = arrange_segments(&lat).unwrap();
        assert_eq!(a.permutation, vec![1, 2, 0]);
        assert_eq!(a.segments, vec![vec![0], vec![2], vec![1]]);
        assert!(check_arrangement(&lat, &a));
    }

    #[test]
    fn extraction_reconstructs_leading_vectors() {
        let fields = [
            Arc::new(FieldSpec::rational_functions()),
            Arc::new(FieldSpec::finite_rational_functions(5).unwrap()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in &fields {
            for _ in 0..6 {
                let m = rng.random_range(1..=3);
                let r = rng.random_range(2..=4);
                let j = random_jordan(&mut rng, m, r, 7).unwrap();
                let lat = random_lattice(f.clone(), j.clone(), &mut rng, EntryBound::default(), 10).unwrap();
                let a = arrange_segments(&lat).unwrap();
                assert_eq!(a.shape, j.shape());
                assert!(check_arrangement(&lat, &a));
                let s = extract_siegel(&lat, &a).unwrap();
                for u in 1..=m {
                    for (i, &li) in a.segments[u - 1].iter().enumerate() {
                        let mut acc = lat.orbit(&lat.basis()[li], u - 1).pop().unwrap();
                        for (idx, mat) in s.entries().filter(|(idx, _)| idx.u == u) {
                            for (j, &lj) in a.segments[idx.y - 1].iter().enumerate() {
                                let w = lat.orbit(&lat.basis()[lj], idx.z).pop().unwrap();
                                for (x, wv) in acc.iter_mut().zip(&w) {
                                    *x = f.add(x, &f.mul(mat.get(i, j), wv));
                                }
                            }
                        }
                        assert!(acc.iter().all(Elem::is_zero));
                    }
                }
            }
        }
    }

    #[test]
    fn adapted_basis_has_zero_siegel_object() {
        // Jordan chain tops of d = (3, 1) with m = 3, plus a zero vector
        let f = Arc::new(FieldSpec::Rationals);
        let basis = ints(&f, &[&[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let lat = LatticeInstance::new(f.clone(), jd(&[3, 1, 0], 3), basis).unwrap();
        let a = arrange_segments(&lat).unwrap();
        assert_eq!(a.shape, vec![1, 1, 0, 1]);
        let s = extract_siegel(&lat, &a).unwrap();
        assert!(s.entries().all(|(_, m)| m.is_zero()));
    }

    #[test]
    fn operator_validation() {
        let f = Arc::new(FieldSpec::Rationals);
        let j = jd(&[2, 0], 2);
        let zero = Mat::zero(f.clone(), 2, 2);
        let basis = ints(&f, &[&[1, 0], &[0, 1]]);
        assert!(matches!(
            LatticeInstance::with_operator(f.clone(), j.clone(), zero, basis.clone()),
            Err(LatticeError::Invalid(_))
        ));
        let lower = Mat::from_rows(f.clone(), 2, ints(&f, &[&[0, 0], &[1, 0]])).unwrap();
        assert!(LatticeInstance::with_operator(f, j, lower, basis).is_ok());
    }
}
