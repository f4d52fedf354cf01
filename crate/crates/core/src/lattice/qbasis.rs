use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{Elem, FieldSpec};
use crate::linalg::{rank_of, NPoly};
use crate::siegel::{dual_siegel, SiegelObject};

use super::{ArrangedBasis, LatticeInstance};

/// An element `sum_p a_p(N) e_p` of `L (x) F[[N]]`, where `e_p` runs over
/// the lattice basis in segment order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBasisElement {
    /// Segment `u` and position `i` (1-based) of the leading term.
    pub segment: usize,
    pub index: usize,
    pub coeffs: Vec<NPoly>,
}

fn offsets(sizes: impl Iterator<Item = usize>) -> Vec<usize> {
    let mut acc = 0;
    sizes
        .map(|k| {
            let o = acc;
            acc += k;
            o
        })
        .collect()
}

fn add_term(spec: &Arc<FieldSpec>, coeffs: &mut [NPoly], pos: usize, c: &Elem, power: usize) {
    if !c.is_zero() {
        coeffs[pos] = coeffs[pos].add(&NPoly::monomial(spec.clone(), c.clone(), power));
    }
}

/// `N^{u-1} e_{u,i} + sum S_{u,u-1,y,z}[i][j] N^z e_{y,j}` for a Siegel object
/// `s` whose basis positions are laid out by `pos(segment, index)`.
fn kernel_elements(s: &SiegelObject, pos: impl Fn(usize, usize) -> usize, order: &[usize]) -> Vec<QBasisElement> {
    let spec = s.spec();
    let m = s.m();
    let mut out = Vec::with_capacity(s.rank());
    for &u in order {
        for i in 0..s.k(u) {
            let mut coeffs = vec![NPoly::zero(spec.clone()); s.rank()];
            add_term(spec, &mut coeffs, pos(u, i), &spec.one(), u - 1);
            for y in u + 1..=m + 1 {
                for z in u - 1..=y - 2 {
                    let block = s.get(u, y, z).expect("tetrahedral index");
                    for j in 0..s.k(y) {
                        add_term(spec, &mut coeffs, pos(y, j), block.get(i, j), z);
                    }
                }
            }
            out.push(QBasisElement {
                segment: u,
                index: i + 1,
                coeffs,
            });
        }
    }
    out
}

/// The elements `omega_{u,i}`, ordered by segment `u = 1, ..., m+1`, with
/// coordinates on `l_{1,*}, l_{2,*}, ..., l_{m+1,*}`.
pub fn omega_basis(s: &SiegelObject) -> Vec<QBasisElement> {
    let off = offsets(s.shape().iter().copied());
    let order: Vec<usize> = (1..=s.m() + 1).collect();
    kernel_elements(s, |u, i| off[u - 1] + i, &order)
}

/// The elements `chi_{u,i}` built from the dual Siegel object, ordered by
/// segment `u = m+1, ..., 1`, with coordinates on the dual basis
/// `lambda_1, ..., lambda_r` whose segments run `m+1, m, ..., 1`.
pub fn chi_basis(s: &SiegelObject) -> Vec<QBasisElement> {
    let d = dual_siegel(s);
    let m = d.m();
    let off = offsets((1..=m + 1).rev().map(|u| d.k(u)));
    let order: Vec<usize> = (1..=m + 1).rev().collect();
    kernel_elements(&d, |u, i| off[m + 1 - u] + i, &order)
}

/// `<x, y> = sum_p x_p(N) y_p(N)` for `l`-coordinates `x` and dual
/// coordinates `y`.
pub fn pair(x: &QBasisElement, y: &QBasisElement) -> NPoly {
    let spec = x.coeffs.first().map(|c| c.spec().clone());
    let zero = NPoly::zero(spec.unwrap_or_else(|| Arc::new(FieldSpec::Rationals)));
    x.coeffs.iter().zip(&y.coeffs).fold(zero, |acc, (a, b)| acc.add(&a.mul(b)))
}

/// `<omega_a, chi_b>` for all pairs.
pub fn pairing_matrix(s: &SiegelObject) -> Vec<Vec<NPoly>> {
    let omega = omega_basis(s);
    let chi = chi_basis(s);
    omega.iter().map(|w| chi.iter().map(|c| pair(w, c)).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingReport {
    pub size: usize,
    /// `(row, column, pairing)` of entries other than `delta N^m`.
    pub failures: Vec<(usize, usize, String)>,
}

impl PairingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn format_npoly(p: &NPoly) -> String {
    let spec = p.spec();
    let terms: Vec<String> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| format!("({})*N^{k}", spec.format(c)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Checks that the pairing matrix of `omega` (rows) against `chi`
/// (columns) is exactly `I_r N^m`.
pub fn verify_pairing(s: &SiegelObject) -> PairingReport {
    let m = s.m();
    let spec = s.spec().clone();
    let matrix = pairing_matrix(s);
    let mut failures = Vec::new();
    for (a, row) in matrix.iter().enumerate() {
        for (b, p) in row.iter().enumerate() {
            let expected = if a == b {
                NPoly::monomial(spec.clone(), spec.one(), m)
            } else {
                NPoly::zero(spec.clone())
            };
            if *p != expected {
                failures.push((a, b, format_npoly(p)));
            }
        }
    }
    PairingReport {
        size: s.rank(),
        failures,
    }
}

/// The image in `V` of an element with coordinates on the arranged basis
/// (segment order from `u = 1`).
pub fn evaluate(lattice: &LatticeInstance, arranged: &ArrangedBasis, x: &QBasisElement) -> Vec<Elem> {
    let f = lattice.spec();
    let mut acc = vec![f.zero(); lattice.n()];
    for (p, &l) in arranged.ascending().iter().enumerate() {
        let c = &x.coeffs[p];
        let Some(deg) = c.degree() else { continue };
        let orbit = lattice.orbit(&lattice.basis()[l], deg.min(lattice.m()));
        for (t, e) in c.coeffs().iter().enumerate().take(orbit.len()) {
            if e.is_zero() {
                continue;
            }
            for (a, v) in acc.iter_mut().zip(&orbit[t]) {
                *a = f.add(a, &f.mul(e, v));
            }
        }
    }
    acc
}

/// Checks that the `omega` lie in the kernel of `L (x) F[[N]] -> V` and
/// generate it: the vectors `N^t omega` reduced mod `N^{m+1}` must span a
/// space of dimension `(m+1) r - n`, which is the dimension of the kernel
/// mod `N^{m+1}`.
pub fn omega_spans_kernel(lattice: &LatticeInstance, arranged: &ArrangedBasis, s: &SiegelObject) -> bool {
    let omega = omega_basis(s);
    if !omega.iter().all(|w| evaluate(lattice, arranged, w).iter().all(Elem::is_zero)) {
        return false;
    }
    let m = lattice.m();
    let r = lattice.r();
    let f = lattice.spec();
    let len = (m + 1) * r;
    let mut vectors = Vec::new();
    for w in &omega {
        for t in 0..=m {
            let mut v = vec![f.zero(); len];
            for (p, c) in w.coeffs.iter().enumerate() {
                for (k, e) in c.coeffs().iter().enumerate() {
                    if k + t <= m {
                        v[p * (m + 1) + k + t] = e.clone();
                    }
                }
            }
            vectors.push(v);
        }
    }
    rank_of(f, len, &vectors) == len - lattice.n()
}
