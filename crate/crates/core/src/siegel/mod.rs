//! Siegel objects and everything computed from them alone: the
//! `P`-polynomials, the symmetry `s`, dual Siegel objects, the polynomial
//! matrices `B` and `Bbar`, and the unitriangular pair `GS`, `GP`.
//!
//! Indices follow the lattice conventions: segments `u = 1..=m+1` of sizes
//! `k_u`; a Siegel entry `S_{u,u-1,y,z}` is a `k_u x k_y` matrix for every
//! tetrahedral index `(u, y, z)`.

mod bmatrix;
mod ptable;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::arith::random::EntryBound;
use crate::arith::FieldSpec;
use crate::linalg::{LinalgError, Mat};

pub use bmatrix::{
    build_b, build_bbar, build_c, build_cbar, build_gothic_p, build_gothic_s, recover_bbar, verify_b_bbar,
    verify_gothic_inverse, BBbarReport,
};
pub use ptable::{compute_p, dual_siegel, verify_recurrence, PTable, RecurrenceFailure, RecurrenceReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SiegelError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("system is inconsistent: {0}")]
    SystemInconsistent(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `(u, y, z)` with `1 <= u <= m`, `u-1 <= z <= m-1`, `z+2 <= y <= m+1`;
/// `v = u - 1` is implied. Ordered lexicographically by `(u, z, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TetraIndex {
    pub u: usize,
    pub z: usize,
    pub y: usize,
}

impl TetraIndex {
    pub fn new(u: usize, y: usize, z: usize) -> Self {
        TetraIndex { u, z, y }
    }

    pub fn v(&self) -> usize {
        self.u - 1
    }

    pub fn is_valid(&self, m: usize) -> bool {
        (1..=m).contains(&self.u) && self.z + 1 >= self.u && self.z < m && self.y >= self.z + 2 && self.y <= m + 1
    }
}

impl fmt::Display for TetraIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.u, self.v(), self.y, self.z)
    }
}

/// All tetrahedral indices for `m`, in `(u, z, y)` order. There are
/// `binom(m+2, 3)` of them.
pub fn tetra_indices(m: usize) -> Vec<TetraIndex> {
    let mut out = Vec::new();
    for u in 1..=m {
        for z in u - 1..m {
            for y in z + 2..=m + 1 {
                out.push(TetraIndex { u, z, y });
            }
        }
    }
    out
}

/// `s(a, b, c, d) = (m+2-c, m-1-d, m+2-a, m-1-b)`.
pub fn symmetry_s(idx: (i64, i64, i64, i64), m: i64) -> (i64, i64, i64, i64) {
    let (a, b, c, d) = idx;
    (m + 2 - c, m - 1 - d, m + 2 - a, m - 1 - b)
}

/// The matrices `S_{u,u-1,y,z}` of one lattice, for a fixed shape
/// `(k_1, ..., k_{m+1})`. Entries for empty segments are zero-sized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiegelObject {
    spec: Arc<FieldSpec>,
    shape: Vec<usize>,
    entries: BTreeMap<TetraIndex, Mat>,
}

/// A dual Siegel object has the same layout with the reversed shape.
pub type DualSiegelObject = SiegelObject;

impl SiegelObject {
    pub fn new(
        spec: Arc<FieldSpec>,
        shape: Vec<usize>,
        entries: BTreeMap<TetraIndex, Mat>,
    ) -> Result<Self, SiegelError> {
        if shape.len() < 2 {
            return Err(SiegelError::ShapeMismatch("shape needs at least two segments".into()));
        }
        let m = shape.len() - 1;
        let expected = tetra_indices(m);
        if entries.len() != expected.len() {
            return Err(SiegelError::ShapeMismatch(format!(
                "{} entries for {} tetrahedral indices",
                entries.len(),
                expected.len()
            )));
        }
        for idx in expected {
            let Some(mat) = entries.get(&idx) else {
                return Err(SiegelError::ShapeMismatch(format!("missing entry {idx}")));
            };
            let want = (shape[idx.u - 1], shape[idx.y - 1]);
            if mat.dims() != want {
                return Err(SiegelError::ShapeMismatch(format!(
                    "entry {idx} is {:?}, expected {want:?}",
                    mat.dims()
                )));
            }
            if mat.spec() != &spec {
                return Err(SiegelError::Linalg(LinalgError::MixedFields));
            }
        }
        Ok(SiegelObject { spec, shape, entries })
    }

    /// All entries zero.
    pub fn zero(spec: Arc<FieldSpec>, shape: Vec<usize>) -> Result<Self, SiegelError> {
        Self::from_fn(spec.clone(), shape, |_, r, c| Mat::zero(spec.clone(), r, c))
    }

    /// Builds each entry from its index and `(rows, cols)`.
    pub fn from_fn(
        spec: Arc<FieldSpec>,
        shape: Vec<usize>,
        mut f: impl FnMut(TetraIndex, usize, usize) -> Mat,
    ) -> Result<Self, SiegelError> {
        if shape.len() < 2 {
            return Err(SiegelError::ShapeMismatch("shape needs at least two segments".into()));
        }
        let entries = tetra_indices(shape.len() - 1)
            .into_iter()
            .map(|idx| (idx, f(idx, shape[idx.u - 1], shape[idx.y - 1])))
            .collect();
        Self::new(spec, shape, entries)
    }

    /// Random entries bounded by `bound`.
    pub fn random<R: Rng + ?Sized>(
        spec: Arc<FieldSpec>,
        shape: Vec<usize>,
        rng: &mut R,
        bound: EntryBound,
    ) -> Result<Self, SiegelError> {
        let s = spec.clone();
        Self::from_fn(spec, shape, |_, r, c| {
            Mat::from_fn(s.clone(), r, c, |_, _| s.random_elem(rng, bound))
        })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.shape.len() - 1
    }

    /// `(k_1, ..., k_{m+1})`.
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    /// `k_i` for `1 <= i <= m+1`.
    pub fn k(&self, i: usize) -> usize {
        self.shape[i - 1]
    }

    pub fn rank(&self) -> usize {
        self.shape.iter().sum()
    }

    /// `S_{u,u-1,y,z}`, or `None` outside the tetrahedron.
    pub fn get(&self, u: usize, y: usize, z: usize) -> Option<&Mat> {
        self.entries.get(&TetraIndex::new(u, y, z))
    }

    /// `S_{u,v,y,z}` when `v = u - 1` and the index is tetrahedral.
    pub fn s(&self, u: usize, v: usize, y: usize, z: usize) -> Option<&Mat> {
        if v + 1 != u {
            return None;
        }
        self.get(u, y, z)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&TetraIndex, &Mat)> {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn binom3(n: usize) -> usize {
        n * (n - 1) * (n - 2) / 6
    }

    #[test]
    fn tetra_counts() {
        assert_eq!(tetra_indices(1), vec![TetraIndex::new(1, 2, 0)]);
        for m in 1..=10 {
            let idx = tetra_indices(m);
            assert_eq!(idx.len(), binom3(m + 2));
            let mut brute = 0;
            for u in 0..=m + 2 {
                for y in 0..=m + 2 {
                    for z in 0..=m + 2 {
                        brute += TetraIndex::new(u, y, z).is_valid(m) as usize;
                    }
                }
            }
            assert_eq!(brute, idx.len());
            assert!(idx.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(tetra_indices(10).len(), 220);
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(symmetry_s((1, 0, 2, 0), 1), (1, 0, 2, 0));
        assert_eq!(symmetry_s((2, 1, 4, 2), 3), (1, 0, 3, 1));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let m = rng.random_range(1..8);
            let q = (
                rng.random_range(-20..20),
                rng.random_range(-20..20),
                rng.random_range(-20..20),
                rng.random_range(-20..20),
            );
            assert_eq!(symmetry_s(symmetry_s(q, m), m), q);
        }
    }

    #[test]
    fn symmetry_maps_siegel_domain_onto_essential_p() {
        for m in 1..=6usize {
            let mi = m as i64;
            let mut image: Vec<(i64, i64, i64, i64)> = tetra_indices(m)
                .iter()
                .map(|t| symmetry_s((t.u as i64, t.v() as i64, t.y as i64, t.z as i64), mi))
                .collect();
            image.sort();
            // essential P: non-trivial domain with y = z + 2
            let mut essential = Vec::new();
            for u in 1..=mi + 1 {
                for v in u - 1..mi {
                    for z in v..mi {
                        essential.push((u, v, z + 2, z));
                    }
                }
            }
            essential.sort();
            assert_eq!(image, essential);
        }
    }

    #[test]
    fn validates_entries() {
        let f = Arc::new(FieldSpec::Rationals);
        let s = SiegelObject::zero(f.clone(), vec![1, 0, 2]).unwrap();
        assert_eq!(s.get(1, 3, 1).unwrap().dims(), (1, 2));
        assert_eq!(s.get(2, 3, 1).unwrap().dims(), (0, 2));
        let mut entries: BTreeMap<_, _> = s.entries().map(|(k, v)| (*k, v.clone())).collect();
        entries.insert(TetraIndex::new(1, 2, 0), Mat::zero(f.clone(), 1, 1));
        assert!(matches!(
            SiegelObject::new(f, vec![1, 0, 2], entries),
            Err(SiegelError::ShapeMismatch(_))
        ));
    }
}
