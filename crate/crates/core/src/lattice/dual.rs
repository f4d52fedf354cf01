use serde::{Deserialize, Serialize};

use crate::linalg::Mat;
use crate::partition::dual_jordan_data;
use crate::siegel::{dual_siegel, SiegelObject, TetraIndex};

use super::{arrange_segments, extract_siegel, ArrangedBasis, LatticeError, LatticeInstance};

/// The dual lattice `L'` realized in `V' = (L' (x) F[[N]]) / q'`, where `q'`
/// is the set of `x` whose pairing with every element of the kernel `q` of
/// `L (x) F[[N]] -> V` is divisible by `N^m`. The basis `lambda` is dual to
/// the arranged basis of `L` and ordered with the segments reversed.
///
/// Both kernels contain `N^m L`, so everything is computed in
/// `(F[N]/N^m)^r` with coordinate `(p, t)` at `p m + t`.
pub fn build_dual_lattice(lattice: &LatticeInstance, arranged: &ArrangedBasis) -> Result<LatticeInstance, LatticeError> {
    let m = lattice.m();
    let r = lattice.r();
    let n = lattice.n();
    let f = lattice.spec().clone();
    let dim = m * r;

    let mut columns = Vec::with_capacity(dim);
    for &l in &arranged.ascending() {
        columns.extend(lattice.orbit(&lattice.basis()[l], m - 1));
    }
    let q = Mat::from_columns(f.clone(), n, &columns)?.kernel();

    // one row per kernel vector y and power c: x -> coefficient of N^c in <x, y>
    let mut conditions = Vec::with_capacity(q.cols() * m);
    for k in 0..q.cols() {
        let y = q.column(k);
        for c in 0..m {
            let mut row = vec![f.zero(); dim];
            for p in 0..r {
                for s in 0..=c {
                    row[p * m + s] = y[p * m + c - s].clone();
                }
            }
            conditions.push(row);
        }
    }
    let (w, pivots) = Mat::from_rows(f.clone(), dim, conditions)?.rref();
    let dual_jordan = dual_jordan_data(lattice.jordan());
    if w.rows() != dual_jordan.n() {
        return Err(LatticeError::Invalid(format!(
            "dual space has dimension {}, expected {}",
            w.rows(),
            dual_jordan.n()
        )));
    }

    // x -> W x identifies V' with F^{n'}; pivot columns of W form a right inverse
    let shifted = |col: usize| -> Vec<_> {
        if col % m + 1 < m {
            w.column(col + 1)
        } else {
            vec![f.zero(); w.rows()]
        }
    };
    let op_cols: Vec<_> = pivots.iter().map(|&pc| shifted(pc)).collect();
    let operator = Mat::from_columns(f.clone(), w.rows(), &op_cols)?;
    let basis = (0..r).map(|p| w.column(p * m)).collect();
    LatticeInstance::with_operator(f, dual_jordan, operator, basis)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RoundtripStatus {
    /// The Siegel object of the dual lattice equals the dual Siegel object.
    Equal,
    /// Entries that differ.
    Mismatch { indices: Vec<String> },
    /// The dual basis in its prescribed order is not arranged by the greedy
    /// scan without reordering.
    Inadmissible { permutation: Vec<usize> },
    /// The dual basis does not span the dual space.
    DualSpanFailure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundtripReport {
    pub status: RoundtripStatus,
    pub dual: LatticeInstance,
    /// Dual Siegel object of `L`.
    pub expected: SiegelObject,
    /// Siegel object of `L'` when it could be extracted.
    pub found: Option<SiegelObject>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.status == RoundtripStatus::Equal
    }
}

/// Extracts the Siegel object of the dual lattice and compares it with the
/// dual Siegel object of `L`.
pub fn roundtrip_dual(lattice: &LatticeInstance) -> Result<RoundtripReport, LatticeError> {
    let arranged = arrange_segments(lattice)?;
    let s = extract_siegel(lattice, &arranged)?;
    let expected = dual_siegel(&s);
    let dual = build_dual_lattice(lattice, &arranged)?;
    let report = |status, found| RoundtripReport {
        status,
        dual: dual.clone(),
        expected: expected.clone(),
        found,
    };
    let dual_arranged = match arrange_segments(&dual) {
        Ok(a) => a,
        Err(LatticeError::SpanFailure) => return Ok(report(RoundtripStatus::DualSpanFailure, None)),
        Err(e) => return Err(e),
    };
    if !dual_arranged.is_identity() {
        return Ok(report(
            RoundtripStatus::Inadmissible {
                permutation: dual_arranged.permutation,
            },
            None,
        ));
    }
    let found = extract_siegel(&dual, &dual_arranged)?;
    let differing: Vec<String> = expected
        .entries()
        .filter(|(idx, mat)| found.get(idx.u, idx.y, idx.z) != Some(*mat))
        .map(|(idx, _): (&TetraIndex, _)| idx.to_string())
        .collect();
    let status = if differing.is_empty() && found.shape() == expected.shape() {
        RoundtripStatus::Equal
    } else {
        RoundtripStatus::Mismatch { indices: differing }
    };
    Ok(report(status, Some(found)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::random::EntryBound;
    use crate::arith::FieldSpec;
    use crate::lattice::{check_spanning, image_dim, random_jordan, random_lattice};
    use crate::partition::{jordan_data, PartitionWithZeroes};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    #[test]
    fn m1_dual_is_negated_transpose() {
        let f = Arc::new(FieldSpec::finite_rational_functions(13).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let j = jordan_data(&PartitionWithZeroes::new(vec![1, 1, 0]).unwrap(), 1).unwrap();
        let lat = random_lattice(f, j, &mut rng, EntryBound::default(), 10).unwrap();
        let rep = roundtrip_dual(&lat).unwrap();
        assert!(rep.passed(), "{:?}", rep.status);
        let s = rep.expected.get(1, 2, 0).unwrap();
        assert_eq!(rep.dual.n(), 1);
        assert_eq!(s.dims(), (2, 1));
    }

    #[test]
    fn dual_space_has_dual_jordan_type() {
        let f = Arc::new(FieldSpec::finite_rational_functions(5).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..6 {
            let m = rng.random_range(1..=3);
            let r = rng.random_range(2..=4);
            let j = random_jordan(&mut rng, m, r, 7).unwrap();
            let lat = random_lattice(f.clone(), j.clone(), &mut rng, EntryBound::default(), 10).unwrap();
            let a = arrange_segments(&lat).unwrap();
            let dual = build_dual_lattice(&lat, &a).unwrap();
            assert_eq!(dual.n() + lat.n(), m * r);
            assert!(check_spanning(&dual));
            let mut power = Mat::identity(f.clone(), dual.n());
            for i in 1..=m {
                power = power.mul(dual.operator()).unwrap();
                assert_eq!(power.rank(), image_dim(dual.jordan(), i));
            }
        }
    }

    #[test]
    fn roundtrip_random() {
        let fields = [
            Arc::new(FieldSpec::finite_rational_functions(13).unwrap()),
            Arc::new(FieldSpec::rational_functions()),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for f in &fields {
            for _ in 0..4 {
                let m = rng.random_range(1..=3);
                let r = rng.random_range(2..=4);
                let j = random_jordan(&mut rng, m, r, 6).unwrap();
                let lat = random_lattice(f.clone(), j, &mut rng, EntryBound::default(), 10).unwrap();
                let rep = roundtrip_dual(&lat).unwrap();
                assert!(rep.passed(), "{:?}", rep.status);
            }
        }
    }

    #[test]
    fn adapted_basis_dualizes_to_zero() {
        let f = Arc::new(FieldSpec::Rationals);
        let e = |v: &[i64]| v.iter().map(|&x| f.from_int(x)).collect::<Vec<_>>();
        let j = jordan_data(&PartitionWithZeroes::new(vec![2, 1, 0]).unwrap(), 2).unwrap();
        let lat = LatticeInstance::new(f.clone(), j, vec![e(&[0, 1, 0]), e(&[0, 0, 1]), e(&[0, 0, 0])]).unwrap();
        let rep = roundtrip_dual(&lat).unwrap();
        assert!(rep.passed(), "{:?}", rep.status);
        assert!(rep.expected.entries().all(|(_, m)| m.is_zero()));
    }
}
