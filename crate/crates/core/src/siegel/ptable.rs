use std::collections::BTreeMap;
use std::sync::Arc;

use crate::arith::FieldSpec;
use crate::linalg::Mat;

use super::{symmetry_s, SiegelError, SiegelObject};

/// The matrices `P_{u,v,y,z}` expressing `N^v l_u` in the basis
/// `N^z l_y` (`y >= z + 2`), on the non-trivial domain `v >= u - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PTable {
    spec: Arc<FieldSpec>,
    shape: Vec<usize>,
    entries: BTreeMap<(usize, usize, usize, usize), Mat>,
}

impl PTable {
    /// A table from its non-trivial entries, checked for completeness and
    /// block sizes.
    pub fn from_entries(
        spec: Arc<FieldSpec>,
        shape: Vec<usize>,
        entries: BTreeMap<(usize, usize, usize, usize), Mat>,
    ) -> Result<Self, SiegelError> {
        if shape.len() < 2 {
            return Err(SiegelError::ShapeMismatch("shape needs at least two segments".into()));
        }
        let table = PTable { spec, shape, entries };
        let m = table.m();
        let mut expected = 0;
        for u in 1..=m + 1 {
            for v in u - 1..m {
                for z in v..m {
                    for y in z + 2..=m + 1 {
                        expected += 1;
                        let want = (table.shape[u - 1], table.shape[y - 1]);
                        match table.entries.get(&(u, v, y, z)) {
                            Some(mat) if mat.dims() == want && mat.spec() == &table.spec => {}
                            _ => {
                                return Err(SiegelError::ShapeMismatch(format!(
                                    "entry {u},{v},{y},{z} missing or not {}x{}",
                                    want.0, want.1
                                )))
                            }
                        }
                    }
                }
            }
        }
        if table.entries.len() != expected {
            return Err(SiegelError::ShapeMismatch(format!(
                "{} entries for a domain of {expected}",
                table.entries.len()
            )));
        }
        Ok(table)
    }

    pub fn m(&self) -> usize {
        self.shape.len() - 1
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    /// `(y, z)` is admissible for exponent `v`: `v <= z <= m-1`, `z+2 <= y <= m+1`.
    fn admissible(&self, u: usize, v: usize, y: usize, z: usize) -> bool {
        let m = self.m();
        (1..=m + 1).contains(&u) && z >= v && z < m && y >= z + 2 && y <= m + 1
    }

    /// Entry of the non-trivial domain.
    pub fn nontrivial(&self, u: usize, v: usize, y: usize, z: usize) -> Option<&Mat> {
        self.entries.get(&(u, v, y, z))
    }

    /// `P_{u,v,y,z}` on both domains: for `v < u - 1` it is `-I` when
    /// `(y, z) = (u, v)` and zero otherwise. `None` when `(y, z)` is not
    /// admissible for `v`.
    pub fn get(&self, u: usize, v: usize, y: usize, z: usize) -> Option<Mat> {
        if !self.admissible(u, v, y, z) {
            return None;
        }
        if v + 1 >= u {
            return self.entries.get(&(u, v, y, z)).cloned();
        }
        let (ku, ky) = (self.shape[u - 1], self.shape[y - 1]);
        Some(if (y, z) == (u, v) {
            Mat::identity(self.spec.clone(), ku).neg()
        } else {
            Mat::zero(self.spec.clone(), ku, ky)
        })
    }

    /// Stored entries keyed by `(u, v, y, z)`.
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize, usize), &Mat)> {
        self.entries.iter()
    }
}

/// All `P_{u,v,y,z}` on the non-trivial domain. Layers are filled from
/// `v = m-1` downwards; within a layer the base entries `v = u-1` are the
/// Siegel entries and the others follow from
/// `P_{u,v,y,z} = -sum_{b=0}^{z-v} sum_{a=u+1+b}^{v+1+b} S_{u,u-1,a,u-1+b} P_{a,v+b,y,z}
///     + S_{u,u-1,y,u-1+z-v}`.
pub fn compute_p(s: &SiegelObject) -> PTable {
    let m = s.m();
    let spec = s.spec().clone();
    let mut table = PTable {
        spec: spec.clone(),
        shape: s.shape().to_vec(),
        entries: BTreeMap::new(),
    };
    for v in (0..m).rev() {
        for u in (1..=(v + 1).min(m)).rev() {
            for z in v..m {
                for y in z + 2..=m + 1 {
                    let p = if v + 1 == u {
                        s.get(u, y, z).expect("tetrahedral index").clone()
                    } else {
                        let mut acc = Mat::zero(spec.clone(), s.k(u), s.k(y));
                        let top = u - 1 + z - v;
                        if top < m && y >= top + 2 {
                            acc = s.get(u, y, top).expect("tetrahedral index").clone();
                        }
                        for b in 0..=z - v {
                            for a in u + 1 + b..=v + 1 + b {
                                let sa = s.get(u, a, u - 1 + b).expect("tetrahedral index");
                                let pa = table.nontrivial(a, v + b, y, z).expect("computed layer");
                                acc = acc.sub(&sa.mul(pa).expect("block sizes")).expect("block sizes");
                            }
                        }
                        acc
                    };
                    table.entries.insert((u, v, y, z), p);
                }
            }
        }
    }
    table
}

/// `Sbar_{u,v,y,z} = -P_{s(u,v,y,z)}^t`, a Siegel object of the reversed
/// shape.
pub fn dual_siegel(s: &SiegelObject) -> SiegelObject {
    let m = s.m() as i64;
    let p = compute_p(s);
    let shape: Vec<usize> = s.shape().iter().rev().copied().collect();
    SiegelObject::from_fn(s.spec().clone(), shape, |idx, _, _| {
        let (a, b, c, d) = symmetry_s((idx.u as i64, idx.v() as i64, idx.y as i64, idx.z as i64), m);
        p.nontrivial(a as usize, b as usize, c as usize, d as usize)
            .expect("the symmetry maps Siegel indices to essential P")
            .transpose()
            .neg()
    })
    .expect("sizes follow the reversed shape")
}

/// One admissible `(i, j, psi, xi)` where a form of the recurrence left a
/// nonzero residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceFailure {
    pub i: usize,
    pub j: usize,
    pub psi: usize,
    pub xi: usize,
    /// `"truncated"` for the form with the explicit `S` term, `"full"` for
    /// the form summing over all `alpha` with the trivial-domain values.
    pub form: &'static str,
    pub residual: Mat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceReport {
    pub checked: usize,
    pub failures: Vec<RecurrenceFailure>,
}

impl RecurrenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates both forms of the recurrence at every admissible
/// `i in [2, m+1]`, `j in [1, m-i+2]`, `xi in [m-j, m-1]`, `psi in [xi+2, m+1]`:
///
/// * truncated: `sum_b sum_{a=i+b}^{m+1-j+b} S_{i-1,i-2,a,i-2+b} P_{a,m-j+b,psi,xi}
///   - S_{i-1,i-2,psi,i-2+xi+j-m} + P_{i-1,m-j,psi,xi}`,
/// * full: `P_{i-1,m-j,psi,xi} + sum_b sum_{a=i+b}^{m+1} S_{i-1,i-2,a,i-2+b} P_{a,m-j+b,psi,xi}`,
///
/// with `b` in `[0, j+xi-m]`. Both must vanish.
pub fn verify_recurrence(s: &SiegelObject) -> RecurrenceReport {
    let m = s.m();
    let p = compute_p(s);
    let mut report = RecurrenceReport {
        checked: 0,
        failures: Vec::new(),
    };
    for i in 2..=m + 1 {
        for j in 1..=m + 2 - i {
            for xi in m - j..m {
                for psi in xi + 2..=m + 1 {
                    let lhs = p.get(i - 1, m - j, psi, xi).expect("non-trivial domain");
                    let mut truncated = lhs.clone();
                    let mut full = lhs;
                    for b in 0..=j + xi - m {
                        let sa_row = |a: usize| s.get(i - 1, a, i - 2 + b).expect("tetrahedral index");
                        for a in i + b..=m + 1 {
                            let prod = sa_row(a)
                                .mul(&p.get(a, m - j + b, psi, xi).expect("admissible"))
                                .expect("block sizes");
                            full = full.add(&prod).expect("block sizes");
                            if a <= m + 1 - j + b {
                                truncated = truncated.add(&prod).expect("block sizes");
                            }
                        }
                    }
                    let top = i - 2 + xi + j - m;
                    if top < m && psi >= top + 2 {
                        truncated = truncated.sub(s.get(i - 1, psi, top).unwrap()).expect("block sizes");
                    }
                    report.checked += 1;
                    for (form, residual) in [("truncated", truncated), ("full", full)] {
                        if !residual.is_zero() {
                            report.failures.push(RecurrenceFailure {
                                i,
                                j,
                                psi,
                                xi,
                                form,
                                residual,
                            });
                        }
                    }
                }
            }
        }
    }
    report
}

/// Number of entries of the non-trivial domain for a given `m`.
#[cfg(test)]
fn nontrivial_count(m: usize) -> usize {
    (0..m).map(|v| (v + 1) * (v..m).map(|z| m - z).sum::<usize>()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::random::EntryBound;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap as Map;
    use crate::siegel::tetra_indices;

    /// Reduces `N^v l_u` by repeatedly rewriting `N^z l_y` with `z >= y - 1`
    /// through the defining relation of the Siegel object, until only
    /// basis terms (`y >= z + 2`, `z <= m - 1`) remain; returns their
    /// coefficients keyed by `(y, z)`.
    fn substitute(s: &SiegelObject, u: usize, v: usize) -> Map<(usize, usize), Mat> {
        let m = s.m();
        let f = s.spec().clone();
        let mut pending: Map<(usize, usize), Mat> = Map::new();
        pending.insert((v, u), Mat::identity(f.clone(), s.k(u)));
        let mut done: Map<(usize, usize), Mat> = Map::new();
        while let Some(((z, y), c)) = pending.pop_first() {
            if z >= m {
                continue;
            }
            if y >= z + 2 {
                let e = done.entry((y, z)).or_insert_with(|| Mat::zero(f.clone(), s.k(u), s.k(y)));
                *e = e.add(&c).unwrap();
                continue;
            }
            // N^z l_y = N^{z-y+1} N^{y-1} l_y = -sum S_{y,y-1,y',z'} N^{z'+z-y+1} l_{y'}
            let shift = z + 1 - y;
            for (idx, mat) in s.entries().filter(|(idx, _)| idx.u == y) {
                let key = (idx.z + shift, idx.y);
                let term = c.mul(mat).unwrap().neg();
                let e = pending
                    .entry(key)
                    .or_insert_with(|| Mat::zero(f.clone(), s.k(u), s.k(idx.y)));
                *e = e.add(&term).unwrap();
            }
        }
        done
    }

    fn symbolic_m3() -> SiegelObject {
        // one generator per entry, all 1x1
        let mut spec = FieldSpec::Rationals;
        let idx = tetra_indices(3);
        for t in &idx {
            spec = FieldSpec::ratfunc(spec, &format!("s{}{}{}{}", t.u, t.v(), t.y, t.z)).unwrap();
        }
        let spec = Arc::new(spec);
        SiegelObject::from_fn(spec.clone(), vec![1, 1, 1, 1], |t, _, _| {
            let g = spec.generator(&format!("s{}{}{}{}", t.u, t.v(), t.y, t.z)).unwrap();
            Mat::from_fn(spec.clone(), 1, 1, |_, _| g.clone())
        })
        .unwrap()
    }

    #[test]
    fn worked_examples_m3() {
        let s = symbolic_m3();
        let p = compute_p(&s);
        let f = s.spec().clone();
        let show = |u, v, y, z| f.format(p.get(u, v, y, z).unwrap().get(0, 0));
        let parse = |e: &str| f.format(&crate::arith::parse::parse_elem(&f, e).unwrap());
        assert_eq!(show(2, 2, 4, 2), parse("-s2131*s3242 + s2141"));
        assert_eq!(
            show(1, 2, 4, 2),
            parse("s1020*s2131*s3242 - s1020*s2141 - s1030*s3242 + s1040")
        );
        assert_eq!(show(1, 1, 3, 1), parse("-s1020*s2131 + s1030"));
        assert_eq!(show(1, 1, 4, 1), parse("-s1020*s2141 + s1040"));
        assert_eq!(show(1, 1, 4, 2), parse("-s1020*s2142 - s1031*s3242 + s1041"));
        // dual entry Sbar_{1040} = -P_{1242}^t
        let d = dual_siegel(&s);
        assert_eq!(
            d.get(1, 4, 0).unwrap(),
            &p.get(1, 2, 4, 2).unwrap().transpose().neg()
        );
    }

    #[test]
    fn base_layer_and_trivial_domain() {
        let f = Arc::new(FieldSpec::finite(5, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = SiegelObject::random(f.clone(), vec![1, 2, 0, 1], &mut rng, EntryBound::default()).unwrap();
        let p = compute_p(&s);
        assert_eq!(p.entries().count(), nontrivial_count(3));
        for (idx, mat) in s.entries() {
            assert_eq!(p.get(idx.u, idx.v(), idx.y, idx.z).as_ref(), Some(mat));
        }
        // N^1 l_3 is itself a basis element: P_{3,1,3,1} = -I
        assert_eq!(p.get(3, 1, 3, 1).unwrap(), Mat::identity(f.clone(), 0).neg());
        assert!(p.get(4, 0, 2, 0).unwrap().is_zero());
        assert_eq!(p.get(2, 0, 2, 0).unwrap(), Mat::identity(f.clone(), 2).neg());
        assert!(p.get(1, 1, 2, 0).is_none());
    }

    #[test]
    fn matches_substitution_oracle() {
        let f = Arc::new(FieldSpec::finite(5, 1).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for shape in [vec![1, 1, 1, 1, 1], vec![2, 1, 0, 1, 2], vec![1, 2, 1, 1, 1]] {
            let s = SiegelObject::random(f.clone(), shape, &mut rng, EntryBound::default()).unwrap();
            let m = s.m();
            let p = compute_p(&s);
            for v in 0..m {
                for u in 1..=(v + 1).min(m) {
                    let coeffs = substitute(&s, u, v);
                    for z in v..m {
                        for y in z + 2..=m + 1 {
                            let expected = coeffs
                                .get(&(y, z))
                                .map(Mat::neg)
                                .unwrap_or_else(|| Mat::zero(f.clone(), s.k(u), s.k(y)));
                            assert_eq!(p.get(u, v, y, z).unwrap(), expected, "P_{u}{v}{y}{z}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn recurrence_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f7 = Arc::new(FieldSpec::finite(7, 1).unwrap());
        let s = SiegelObject::random(f7, vec![1, 2, 1, 1], &mut rng, EntryBound::default()).unwrap();
        let r = verify_recurrence(&s);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.checked > 0);
        let q = Arc::new(FieldSpec::Rationals);
        let s = SiegelObject::random(q, vec![1; 6], &mut rng, EntryBound::default()).unwrap();
        assert!(verify_recurrence(&s).passed());
    }

    #[test]
    fn recurrence_detects_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = Arc::new(FieldSpec::finite(7, 1).unwrap());
        let s = SiegelObject::random(f.clone(), vec![1, 1, 1, 1], &mut rng, EntryBound::default()).unwrap();
        let mut p = compute_p(&s);
        let key = (1, 2, 4, 2);
        let bumped = p.entries[&key].add(&Mat::identity(f.clone(), 1)).unwrap();
        p.entries.insert(key, bumped);
        // the full form evaluated on the corrupted table no longer vanishes
        let m = 3;
        let (i, j, psi, xi) = (2, 1, 4, 2);
        let mut full = p.get(i - 1, m - j, psi, xi).unwrap();
        for a in i..=m + 1 {
            full = full
                .add(&s.get(i - 1, a, i - 2).unwrap().mul(&p.get(a, m - j, psi, xi).unwrap()).unwrap())
                .unwrap();
        }
        assert!(!full.is_zero());
    }

    #[test]
    fn m1_dual_is_negated_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = Arc::new(FieldSpec::Rationals);
        let s = SiegelObject::random(f, vec![2, 3], &mut rng, EntryBound::default()).unwrap();
        let d = dual_siegel(&s);
        assert_eq!(d.shape(), &[3, 2]);
        assert_eq!(d.get(1, 2, 0).unwrap(), &s.get(1, 2, 0).unwrap().transpose().neg());
    }

    #[test]
    fn dual_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = Arc::new(FieldSpec::finite(5, 1).unwrap());
        let s = SiegelObject::random(f, vec![0, 2, 0, 1], &mut rng, EntryBound::default()).unwrap();
        let d = dual_siegel(&s);
        for (idx, mat) in d.entries() {
            assert_eq!(mat.dims(), (s.k(4 + 1 - idx.u), s.k(4 + 1 - idx.y)));
        }
    }
}
