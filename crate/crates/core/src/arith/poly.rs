use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{fp, Elem, FieldSpec, ModFloorU64};

/// The 64 largest primes below 2^62, for the multi-modular gcd.
fn modular_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(64);
        let mut c = (1u64 << 62) - 1;
        while out.len() < 64 {
            if fp::is_prime(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

/// Primitive integer polynomial with the same roots as a rational one.
fn primitive_part(a: &Poly) -> Vec<BigInt> {
    content_free(integer_form(a).0)
}

fn content_free(ints: Vec<BigInt>) -> Vec<BigInt> {
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() || content.is_one() {
        return ints;
    }
    ints.into_iter().map(|c| c / &content).collect()
}

/// Integer numerators over a common denominator.
fn integer_form(a: &Poly) -> (Vec<BigInt>, BigInt) {
    let rats: Vec<&BigRational> = a
        .coeffs
        .iter()
        .map(|c| match c {
            Elem::Rat(q) => q,
            _ => unreachable!("rational coefficients"),
        })
        .collect();
    let den = rats
        .iter()
        .filter(|q| !q.denom().is_one())
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints = if den.is_one() {
        rats.iter().map(|q| q.numer().clone()).collect()
    } else {
        rats.iter().map(|q| q.numer() * (&den / q.denom())).collect()
    };
    (ints, den)
}

/// `num / den` in lowest terms for `den > 0`. The first Euclidean step is a
/// division, which is much cheaper than a binary gcd when `num` is far
/// larger than `den`.
pub(crate) fn reduced_ratio(num: BigInt, den: BigInt) -> BigRational {
    if den.is_one() {
        return BigRational::from_integer(num);
    }
    let g = den.gcd(&(&num % &den));
    if g.is_one() {
        BigRational::new_raw(num, den)
    } else {
        BigRational::new_raw(num / &g, den / g)
    }
}

fn rational_form(ints: Vec<BigInt>, den: &BigInt) -> Poly {
    Poly::from_coeffs(
        ints.into_iter()
            .map(|c| Elem::Rat(reduced_ratio(c, den.clone())))
            .collect(),
    )
}

fn integer_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Division of rational polynomials through integer pseudo-division by the
/// primitive part of `b`, scaling the running remainder only by the part of
/// the leading coefficient that does not divide the current top term.
fn rational_divrem(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let (ai, da) = integer_form(a);
    let (bi, db) = integer_form(b);
    let content = bi.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let bp: Vec<BigInt> = bi.iter().map(|c| c / &content).collect();
    let dbp = bp.len() - 1;
    let beta = &bp[dbp];
    let mut rem = ai;
    let mut quot = vec![BigInt::zero(); rem.len() - dbp];
    let mut mu = BigInt::one();
    for i in (0..quot.len()).rev() {
        let t = rem[i + dbp].clone();
        if t.is_zero() {
            continue;
        }
        let g = t.gcd(beta);
        let s = beta / &g;
        if !s.is_one() {
            for c in rem.iter_mut().chain(quot.iter_mut()) {
                *c *= &s;
            }
            mu *= &s;
        }
        let qc = &t / &g;
        for (j, c) in bp.iter().enumerate() {
            rem[i + j] -= &qc * c;
        }
        quot[i] = qc;
    }
    rem.truncate(dbp);
    let qd = &mu * &da * &content;
    let quot = quot.into_iter().map(|c| c * &db).collect();
    (rational_form(quot, &qd), rational_form(rem, &(mu * da)))
}

fn mod_p(a: &[BigInt], p: u64) -> Vec<u64> {
    let mut out: Vec<u64> = a.iter().map(|c| c.mod_floor_u64(p)).collect();
    fp::trim(&mut out);
    out
}

/// Whether the integer polynomial `h` divides `a` over the integers.
fn divides(h: &[BigInt], a: &[BigInt]) -> bool {
    let dh = h.len() - 1;
    let lead = &h[dh];
    let mut rem = a.to_vec();
    while rem.len() > dh {
        let top = rem.len() - 1;
        let (q, r) = rem[top].div_rem(lead);
        if !r.is_zero() {
            return false;
        }
        if !q.is_zero() {
            for (i, c) in h.iter().enumerate() {
                rem[top - dh + i] -= &q * c;
            }
        }
        rem.pop();
    }
    rem.iter().all(Zero::is_zero)
}

/// Monic gcd of rational polynomials of positive degree from images modulo
/// word-sized primes. Images are scaled to carry the leading coefficient
/// `gcd(lc a, lc b)` of the primitive parts, combined by Chinese
/// remaindering in the symmetric range, and the primitive part of the
/// combination is tested by exact division once a new prime leaves it
/// unchanged. Returns `None` when the prime budget runs out.
fn modular_gcd(f: &FieldSpec, a: &Poly, b: &Poly) -> Option<Poly> {
    let pa = primitive_part(a);
    let pb = primitive_part(b);
    let gamma = pa.last().unwrap().gcd(pb.last().unwrap());
    let mut degree = usize::MAX;
    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = Vec::new();
    for &p in modular_primes() {
        let gp = gamma.mod_floor_u64(p);
        if gp == 0 || pa.last().unwrap().mod_floor_u64(p) == 0 || pb.last().unwrap().mod_floor_u64(p) == 0 {
            continue;
        }
        let g = fp::gcd(&mod_p(&pa, p), &mod_p(&pb, p), p);
        let d = g.len() - 1;
        if d == 0 {
            return Some(Poly::constant(f.one()));
        }
        if d > degree {
            continue;
        }
        let g = fp::scale(&g, gp, p);
        let big_p = BigInt::from(p);
        if d < degree {
            degree = d;
            modulus = big_p;
            residues = g.iter().map(|&c| BigInt::from(c)).collect();
            continue;
        }
        let m_inv = fp::inv_mod(modulus.mod_floor_u64(p), p);
        let mut changed = false;
        for (r, &c) in residues.iter_mut().zip(&g) {
            let diff = (c as u128 + p as u128 - r.mod_floor_u64(p) as u128) % p as u128;
            if diff != 0 {
                changed = true;
                let k = (diff * m_inv as u128) % p as u128;
                *r += &modulus * BigInt::from(k as u64);
            }
        }
        modulus *= big_p;
        let half = &modulus / 2u32;
        for r in residues.iter_mut() {
            if *r > half {
                *r -= &modulus;
            } else if *r < -&half {
                *r += &modulus;
            }
        }
        if changed {
            continue;
        }
        let h = content_free(residues.clone());
        if divides(&h, &pa) && divides(&h, &pb) {
            let coeffs = h.iter().map(|c| Elem::Rat(BigRational::from_integer(c.clone()))).collect();
            return Some(f.poly_monic(&Poly::from_coeffs(coeffs)));
        }
    }
    None
}

/// Dense univariate polynomial, low degree first, with no trailing zeros.
/// The coefficient field is supplied by the caller.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Elem>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Elem) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_coeffs(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last().is_some_and(Elem::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Elem> {
        self.coeffs.last()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }
}

impl FieldSpec {
    pub fn poly_add(&self, a: &Poly, b: &Poly) -> Poly {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut out = long.coeffs.clone();
        for (o, s) in out.iter_mut().zip(&short.coeffs) {
            *o = self.add(o, s);
        }
        Poly::from_coeffs(out)
    }

    pub fn poly_neg(&self, a: &Poly) -> Poly {
        Poly {
            coeffs: a.coeffs.iter().map(|c| self.neg(c)).collect(),
        }
    }

    pub fn poly_sub(&self, a: &Poly, b: &Poly) -> Poly {
        self.poly_add(a, &self.poly_neg(b))
    }

    pub fn poly_scale(&self, a: &Poly, c: &Elem) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            coeffs: a.coeffs.iter().map(|x| self.mul(x, c)).collect(),
        }
    }

    pub fn poly_mul(&self, a: &Poly, b: &Poly) -> Poly {
        if matches!(self, FieldSpec::Rationals) && !a.is_zero() && !b.is_zero() {
            let (x, dx) = integer_form(a);
            let (y, dy) = integer_form(b);
            return rational_form(integer_mul(&x, &y), &(dx * dy));
        }
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        if a.coeffs.len() == 1 && self.is_one(&a.coeffs[0]) {
            return b.clone();
        }
        if b.coeffs.len() == 1 && self.is_one(&b.coeffs[0]) {
            return a.clone();
        }
        let mut out = vec![self.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out[i + j] = self.add(&out[i + j], &self.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    /// Quotient and remainder; panics on division by the zero polynomial.
    pub fn poly_divrem(&self, a: &Poly, b: &Poly) -> (Poly, Poly) {
        let db = b.degree().expect("polynomial division by zero");
        if a.coeffs.len() <= db {
            return (Poly::zero(), a.clone());
        }
        if matches!(self, FieldSpec::Rationals) {
            return rational_divrem(a, b);
        }
        let lead_inv = self.inv(b.lead().unwrap()).unwrap();
        let mut rem = a.coeffs.clone();
        let mut quot = vec![self.zero(); rem.len() - db];
        for shift in (0..quot.len()).rev() {
            let top = &rem[shift + db];
            if top.is_zero() {
                continue;
            }
            let c = self.mul(top, &lead_inv);
            for (j, bj) in b.coeffs.iter().enumerate() {
                rem[shift + j] = self.sub(&rem[shift + j], &self.mul(&c, bj));
            }
            quot[shift] = c;
        }
        rem.truncate(db);
        (Poly::from_coeffs(quot), Poly::from_coeffs(rem))
    }

    /// Quotient of a division known to be exact.
    pub fn poly_div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        if b.degree() == Some(0) && self.is_one(&b.coeffs[0]) {
            return a.clone();
        }
        let (q, r) = self.poly_divrem(a, b);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn poly_monic(&self, a: &Poly) -> Poly {
        match a.lead() {
            None => Poly::zero(),
            Some(l) if self.is_one(l) => a.clone(),
            Some(l) => self.poly_scale(a, &self.inv(l).unwrap()),
        }
    }

    /// Monic gcd by the Euclidean algorithm; `gcd(0, 0) = 0`.
    pub fn poly_gcd(&self, a: &Poly, b: &Poly) -> Poly {
        // constants are units unless zero
        if a.degree() == Some(0) || b.degree() == Some(0) {
            return Poly::constant(self.one());
        }
        if a.is_zero() || b.is_zero() {
            return self.poly_monic(if a.is_zero() { b } else { a });
        }
        if matches!(self, FieldSpec::Rationals) {
            if let Some(g) = modular_gcd(self, a, b) {
                return g;
            }
        }
        let mut x = self.poly_monic(a);
        let mut y = self.poly_monic(b);
        while !y.is_zero() {
            let r = self.poly_divrem(&x, &y).1;
            x = y;
            y = self.poly_monic(&r);
        }
        self.poly_monic(&x)
    }

    /// Divides `a` and `b` by their common factor `g` (monic).
    pub(super) fn cancel(&self, a: &Poly, b: &Poly, g: &Poly) -> (Poly, Poly) {
        if g.degree() == Some(0) {
            (a.clone(), b.clone())
        } else {
            (self.poly_div_exact(a, g), self.poly_div_exact(b, g))
        }
    }

    /// The canonical element `num/den` of `self(var)`; `den` must be nonzero.
    pub(super) fn normalize_fraction(&self, num: Poly, den: Poly) -> Elem {
        if num.is_zero() {
            return Elem::Frac {
                num,
                den: Poly::constant(self.one()),
            };
        }
        let g = self.poly_gcd(&num, &den);
        let (num, den) = self.cancel(&num, &den, &g);
        let lc = den.lead().expect("nonzero denominator");
        if self.is_one(lc) {
            return Elem::Frac { num, den };
        }
        let s = self.inv(lc).unwrap();
        Elem::Frac {
            num: self.poly_scale(&num, &s),
            den: self.poly_scale(&den, &s),
        }
    }

    pub fn poly_eval(&self, a: &Poly, x: &Elem) -> Elem {
        let mut acc = self.zero();
        for c in a.coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }

    /// `a(x + c)` as a polynomial in `x` (Taylor shift by Horner's scheme).
    pub fn poly_shift(&self, a: &Poly, c: &Elem) -> Poly {
        let lin = Poly::from_coeffs(vec![c.clone(), self.one()]);
        let mut acc = Poly::zero();
        for coef in a.coeffs.iter().rev() {
            acc = self.poly_add(&self.poly_mul(&acc, &lin), &Poly::constant(coef.clone()));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q_poly(spec: &FieldSpec, c: &[i64]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| spec.from_int(x)).collect())
    }

    #[test]
    fn gcd_and_division() {
        let q = FieldSpec::Rationals;
        let a = q_poly(&q, &[-1, 0, 1]); // x^2 - 1
        let b = q_poly(&q, &[-2, 2]); // 2x - 2
        assert_eq!(q.poly_gcd(&a, &b), q_poly(&q, &[-1, 1]));
        let (quo, rem) = q.poly_divrem(&a, &b);
        assert_eq!(q.poly_add(&q.poly_mul(&quo, &b), &rem), a);
        assert!(rem.is_zero());
    }

    #[test]
    fn taylor_shift() {
        let q = FieldSpec::Rationals;
        // (x+1)^2 = x^2 + 2x + 1
        let a = q_poly(&q, &[0, 0, 1]);
        assert_eq!(q.poly_shift(&a, &q.one()), q_poly(&q, &[1, 2, 1]));
    }
}
