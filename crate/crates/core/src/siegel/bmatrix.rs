use crate::linalg::{block_get, block_set, block_unitriangular_inverse, npoly_matmul, BlockShape, Mat, NPolyMatrix};

use super::{compute_p, PTable, SiegelError, SiegelObject, TetraIndex};

/// Skew block matrices `C_0, ..., C_m`: block `(a, b)` of `C_i` is
/// `S^t_{m+2-b, m+1-b, a, i}` where that Siegel entry exists, block
/// `(i+1, m+1-i)` is the identity, and all other blocks vanish.
pub fn build_c(s: &SiegelObject) -> Vec<Mat> {
    let m = s.m();
    let shape = BlockShape::skew(s.shape());
    (0..=m)
        .map(|i| {
            let mut c = Mat::zero(s.spec().clone(), s.rank(), s.rank());
            for a in 1..=m + 1 {
                for b in 1..=m + 1 {
                    let idx = TetraIndex::new(m + 2 - b, a, i);
                    if idx.is_valid(m) {
                        let block = s.get(idx.u, idx.y, idx.z).unwrap().transpose();
                        block_set(&mut c, &shape, a, b, &block).expect("skew block sizes");
                    }
                }
            }
            let id = Mat::identity(s.spec().clone(), s.k(i + 1));
            block_set(&mut c, &shape, i + 1, m + 1 - i, &id).expect("skew block sizes");
            c
        })
        .collect()
}

fn cbar_from(s: &SiegelObject, p: &PTable) -> Vec<Mat> {
    let m = s.m();
    let shape = BlockShape::skew(s.shape());
    (0..=m)
        .map(|i| {
            let mut c = Mat::zero(s.spec().clone(), s.rank(), s.rank());
            if i < m {
                let v = m - 1 - i;
                for a in 1..=m + 1 {
                    for b in 1..=m + 1 {
                        // P_{a, m-1-i, m+2-b, m-b} on the non-trivial domain
                        if b > m || a > v + 1 || m - b < v {
                            continue;
                        }
                        let block = p.nontrivial(a, v, m + 2 - b, m - b).expect("non-trivial domain").neg();
                        block_set(&mut c, &shape, a, b, &block).expect("skew block sizes");
                    }
                }
            }
            let id = Mat::identity(s.spec().clone(), s.k(m + 1 - i));
            block_set(&mut c, &shape, m + 1 - i, i + 1, &id).expect("skew block sizes");
            c
        })
        .collect()
}

/// Skew block matrices `Cbar_0, ..., Cbar_m`: block `(a, b)` of `Cbar_i`
/// is `-P_{a, m-1-i, m+2-b, m-b}` on the non-trivial domain of `P`, block
/// `(m+1-i, i+1)` is the identity, and all other blocks vanish.
pub fn build_cbar(s: &SiegelObject) -> Vec<Mat> {
    cbar_from(s, &compute_p(s))
}

fn assemble(s: &SiegelObject, coeffs: Vec<Mat>) -> NPolyMatrix {
    NPolyMatrix::from_coeffs(s.spec().clone(), s.rank(), s.rank(), coeffs).expect("r x r coefficients")
}

/// `B = sum_i C_i N^i`.
pub fn build_b(s: &SiegelObject) -> NPolyMatrix {
    assemble(s, build_c(s))
}

/// `Bbar = sum_i Cbar_i N^i`.
pub fn build_bbar(s: &SiegelObject) -> NPolyMatrix {
    assemble(s, build_cbar(s))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BBbarReport {
    /// Coefficients of `B^t Bbar`, from `N^0`.
    pub coefficients: Vec<Mat>,
    /// Exponents whose coefficient differs from the expected one.
    pub failures: Vec<usize>,
}

impl BBbarReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `B^t Bbar = I_r N^m`.
pub fn verify_b_bbar(s: &SiegelObject) -> BBbarReport {
    let m = s.m();
    let prod = npoly_matmul(&build_b(s).transpose(), &build_bbar(s)).expect("r x r factors");
    let top = prod.degree().map_or(0, |d| d.max(m));
    let coefficients: Vec<Mat> = (0..=top).map(|mu| prod.coeff(mu)).collect();
    let failures = coefficients
        .iter()
        .enumerate()
        .filter(|(mu, c)| if *mu == m { !c.is_identity() } else { !c.is_zero() })
        .map(|(mu, _)| mu)
        .collect();
    BBbarReport { coefficients, failures }
}

/// Solves for the unique `X = sum_i X_i N^i` with the zero/identity block
/// pattern of `Bbar` and `B^t X = 0 mod N^m`, given `B` and the shape.
///
/// The unknown blocks `(X_i)_{a,b}` (`0 <= i <= m-1`, `1 <= b <= i+1`,
/// `1 <= a <= m-i`) are found in decreasing order of `i + a`: the equation
/// from block `(m+2-a, b)` of the coefficient of `N^{i+a-1}` contains
/// `(X_i)_{a,b}` through the identity block `(C_{a-1})_{a, m+2-a}` and
/// otherwise only blocks found earlier. The returned matrix includes the
/// `N^m` term of `Bbar`.
pub fn recover_bbar(b: &NPolyMatrix, shape: &[usize]) -> Result<NPolyMatrix, SiegelError> {
    if shape.len() < 2 {
        return Err(SiegelError::ShapeMismatch("shape needs at least two segments".into()));
    }
    let m = shape.len() - 1;
    let r: usize = shape.iter().sum();
    if (b.rows(), b.cols()) != (r, r) {
        return Err(SiegelError::ShapeMismatch(format!(
            "B is {}x{}, shape has rank {r}",
            b.rows(),
            b.cols()
        )));
    }
    if b.degree().is_some_and(|d| d > m) {
        return Err(SiegelError::SystemInconsistent(format!("B has degree above {m}")));
    }
    let spec = b.spec().clone();
    let sk = BlockShape::skew(shape);
    let c: Vec<Mat> = (0..=m).map(|g| b.coeff(g)).collect();
    let cblk = |g: usize, d: usize, n: usize| block_get(&c[g], &sk, d, n).expect("skew block");

    let mut x: Vec<Mat> = (0..=m).map(|_| Mat::zero(spec.clone(), r, r)).collect();
    for (i, xi) in x.iter_mut().enumerate() {
        let id = Mat::identity(spec.clone(), shape[m - i]);
        block_set(xi, &sk, m + 1 - i, i + 1, &id).expect("skew block");
    }

    let mut unknowns = Vec::new();
    for i in 0..m {
        for beta in 1..=i + 1 {
            for alpha in 1..=m - i {
                unknowns.push((i, alpha, beta));
            }
        }
    }
    unknowns.sort_by(|p, q| (q.0 + q.1).cmp(&(p.0 + p.1)).then(q.0.cmp(&p.0)).then(p.2.cmp(&q.2)));

    for (i, alpha, beta) in unknowns {
        let mu = i + alpha - 1;
        let nu = m + 2 - alpha;
        if !cblk(alpha - 1, alpha, nu).is_identity() {
            return Err(SiegelError::SystemInconsistent(format!(
                "block ({alpha}, {nu}) of C_{} is not the identity",
                alpha - 1
            )));
        }
        let mut acc = Mat::zero(spec.clone(), shape[alpha - 1], shape[m + 1 - beta]);
        for g in 0..=mu {
            for d in 1..=m + 1 {
                if (g, d) == (alpha - 1, alpha) {
                    continue;
                }
                let cb = cblk(g, d, nu);
                if cb.is_zero() {
                    continue;
                }
                let xb = block_get(&x[mu - g], &sk, d, beta).expect("skew block");
                acc = acc.sub(&cb.transpose().mul(&xb)?)?;
            }
        }
        block_set(&mut x[i], &sk, alpha, beta, &acc)?;
    }

    let xm = NPolyMatrix::from_coeffs(spec.clone(), r, r, x)?;
    let check = npoly_matmul(&b.transpose(), &xm)?;
    if let Some(mu) = (0..m).find(|&mu| !check.coeff(mu).is_zero()) {
        return Err(SiegelError::SystemInconsistent(format!(
            "coefficient of N^{mu} in B^t X does not vanish"
        )));
    }
    Ok(xm)
}

/// Block unitriangular matrix with block `(i, j)` equal to
/// `S_{i,i-1,j,i-1}` for `j > i`.
pub fn build_gothic_s(s: &SiegelObject) -> Mat {
    let m = s.m();
    let shape = BlockShape::square(s.shape());
    let mut g = Mat::identity(s.spec().clone(), s.rank());
    for i in 1..=m {
        for j in i + 1..=m + 1 {
            block_set(&mut g, &shape, i, j, s.get(i, j, i - 1).unwrap()).expect("square block sizes");
        }
    }
    g
}

/// Block unitriangular matrix with block `(i, j)` equal to
/// `-P_{i,j-2,j,j-2}` for `j > i`.
pub fn build_gothic_p(s: &SiegelObject) -> Mat {
    let m = s.m();
    let p = compute_p(s);
    let shape = BlockShape::square(s.shape());
    let mut g = Mat::identity(s.spec().clone(), s.rank());
    for i in 1..=m {
        for j in i + 1..=m + 1 {
            let block = p.nontrivial(i, j - 2, j, j - 2).expect("non-trivial domain").neg();
            block_set(&mut g, &shape, i, j, &block).expect("square block sizes");
        }
    }
    g
}

/// `GP GS = GS GP = I` and `GP` equals the back-substitution inverse of `GS`.
pub fn verify_gothic_inverse(s: &SiegelObject) -> bool {
    let gs = build_gothic_s(s);
    let gp = build_gothic_p(s);
    gp.mul(&gs).expect("square").is_identity()
        && gs.mul(&gp).expect("square").is_identity()
        && block_unitriangular_inverse(&gs, s.shape()).as_ref() == Ok(&gp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::random::EntryBound;
    use crate::arith::FieldSpec;
    use crate::siegel::dual_siegel;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn random(spec: &Arc<FieldSpec>, shape: &[usize], seed: u64) -> SiegelObject {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SiegelObject::random(spec.clone(), shape.to_vec(), &mut rng, EntryBound::default()).unwrap()
    }

    /// `[[a, b], [c, d]]` from 1-indexed skew blocks of an `m = 1` matrix.
    fn two_block(spec: &Arc<FieldSpec>, k: &[usize], blocks: [[Option<Mat>; 2]; 2]) -> Mat {
        let shape = BlockShape::skew(k);
        let r = k.iter().sum();
        let mut out = Mat::zero(spec.clone(), r, r);
        for (a, row) in blocks.iter().enumerate() {
            for (b, blk) in row.iter().enumerate() {
                if let Some(blk) = blk {
                    block_set(&mut out, &shape, a + 1, b + 1, blk).unwrap();
                }
            }
        }
        out
    }

    #[test]
    fn m1_closed_forms() {
        let f = Arc::new(FieldSpec::Rationals);
        let k = [2, 3];
        let s = random(&f, &k, 1);
        let st = s.get(1, 2, 0).unwrap().clone();
        let i1 = Mat::identity(f.clone(), 2);
        let i2 = Mat::identity(f.clone(), 3);
        let c = build_c(&s);
        assert_eq!(c[0], two_block(&f, &k, [[None, Some(i1.clone())], [None, Some(st.transpose())]]));
        assert_eq!(c[1], two_block(&f, &k, [[None, None], [Some(i2.clone()), None]]));
        let cb = build_cbar(&s);
        assert_eq!(cb[0], two_block(&f, &k, [[Some(st.neg()), None], [Some(i2), None]]));
        assert_eq!(cb[1], two_block(&f, &k, [[None, Some(i1)], [None, None]]));
        assert!(verify_b_bbar(&s).passed());
        assert_eq!(recover_bbar(&build_b(&s), &k).unwrap(), build_bbar(&s));
    }

    #[test]
    fn m3_layout() {
        let f = Arc::new(FieldSpec::Rationals);
        let k = [1, 1, 1, 1];
        let s = random(&f, &k, 2);
        let sk = BlockShape::skew(&k);
        let c = build_c(&s);
        let last_col: Vec<Mat> = (1..=4).map(|a| block_get(&c[0], &sk, a, 4).unwrap()).collect();
        assert!(last_col[0].is_identity());
        assert_eq!(last_col[1], s.get(1, 2, 0).unwrap().transpose());
        assert_eq!(last_col[3], s.get(1, 4, 0).unwrap().transpose());
        // every block of every C_i is zero, an identity or a transposed entry
        for (i, ci) in c.iter().enumerate() {
            for a in 1..=4 {
                for b in 1..=4 {
                    let blk = block_get(ci, &sk, a, b).unwrap();
                    let idx = TetraIndex::new(5 - b, a, i);
                    if idx.is_valid(3) {
                        assert_eq!(blk, s.get(idx.u, idx.y, idx.z).unwrap().transpose());
                    } else if (a, b) == (i + 1, 3 - i + 1) {
                        assert!(blk.is_identity());
                    } else {
                        assert!(blk.is_zero());
                    }
                }
            }
        }
        let p = compute_p(&s);
        let cb = build_cbar(&s);
        let first_col: Vec<Mat> = (1..=4).map(|a| block_get(&cb[0], &sk, a, 1).unwrap()).collect();
        assert_eq!(first_col[0], p.get(1, 2, 4, 2).unwrap().neg());
        assert_eq!(first_col[1], p.get(2, 2, 4, 2).unwrap().neg());
        assert_eq!(first_col[2], p.get(3, 2, 4, 2).unwrap().neg());
        assert!(first_col[3].is_identity());
        // Cbar agrees with the transposed dual entries
        let d = dual_siegel(&s);
        assert_eq!(block_get(&cb[1], &sk, 1, 2).unwrap(), d.get(2, 4, 1).unwrap().transpose());
        assert_eq!(block_get(&cb[2], &sk, 1, 3).unwrap(), d.get(3, 4, 2).unwrap().transpose());
    }

    #[test]
    fn identity_and_recovery_across_shapes() {
        let fields = [
            Arc::new(FieldSpec::Rationals),
            Arc::new(FieldSpec::finite(5, 1).unwrap()),
            Arc::new(FieldSpec::rational_functions()),
        ];
        let shapes: [&[usize]; 5] = [&[1, 1], &[0, 2, 0, 1], &[1, 1, 1, 1], &[2, 0, 1, 1, 0], &[1, 0, 1, 2, 1]];
        for (n, f) in fields.iter().enumerate() {
            for (t, shape) in shapes.iter().enumerate() {
                let s = random(f, shape, (10 * n + t) as u64);
                let report = verify_b_bbar(&s);
                assert!(report.passed(), "{shape:?}: failures at {:?}", report.failures);
                assert_eq!(recover_bbar(&build_b(&s), shape).unwrap(), build_bbar(&s));
                assert!(verify_gothic_inverse(&s));
            }
        }
    }

    #[test]
    fn unknown_count() {
        for m in 1..=6usize {
            let count = (0..m).map(|i| (i + 1) * (m - i)).sum::<usize>();
            let mut brute = 0;
            for i in 0..m {
                for b in 1..=m + 1 {
                    for a in 1..=m + 1 {
                        brute += (b <= i + 1 && a <= m - i) as usize;
                    }
                }
            }
            assert_eq!(count, brute);
        }
    }

    #[test]
    fn recovery_rejects_invalid_b() {
        let f = Arc::new(FieldSpec::finite(7, 1).unwrap());
        let k = [1, 1, 1];
        let s = random(&f, &k, 9);
        let b = build_b(&s);
        // break an identity block of C_0
        let mut c0 = b.coeff(0);
        c0.set(0, 2, f.zero());
        let mut coeffs = b.coeffs().to_vec();
        coeffs[0] = c0;
        let bad = NPolyMatrix::from_coeffs(f.clone(), 3, 3, coeffs).unwrap();
        assert!(matches!(recover_bbar(&bad, &k), Err(SiegelError::SystemInconsistent(_))));
        // a stray entry outside the Siegel pattern
        let mut c1 = b.coeff(1);
        c1.set(0, 0, f.one());
        let mut coeffs = b.coeffs().to_vec();
        coeffs[1] = c1;
        let bad = NPolyMatrix::from_coeffs(f.clone(), 3, 3, coeffs).unwrap();
        assert!(matches!(recover_bbar(&bad, &k), Err(SiegelError::SystemInconsistent(_))));
    }

    #[test]
    fn gothic_m1() {
        let f = Arc::new(FieldSpec::Rationals);
        let s = random(&f, &[1, 2], 3);
        let gs = build_gothic_s(&s);
        let gp = build_gothic_p(&s);
        let sh = BlockShape::square(&[1, 2]);
        assert_eq!(block_get(&gs, &sh, 1, 2).unwrap(), *s.get(1, 2, 0).unwrap());
        assert_eq!(block_get(&gp, &sh, 1, 2).unwrap(), s.get(1, 2, 0).unwrap().neg());
    }

    #[test]
    fn double_dual_small_shapes() {
        let f = Arc::new(FieldSpec::finite(5, 1).unwrap());
        for (t, shape) in [[1usize, 1, 1].as_slice(), &[1, 2, 1, 1], &[2, 0, 1, 1, 1]].iter().enumerate() {
            let s = random(&f, shape, 40 + t as u64);
            assert_eq!(dual_siegel(&dual_siegel(&s)), s, "{shape:?}");
        }
    }
}
