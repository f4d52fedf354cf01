//! Seeded generation of random field elements.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::{Elem, FieldSpec, Poly};

/// Size limits for random elements: rational numerators lie in
/// `[-coeff, coeff]` and denominators in `[1, coeff]`; rational functions have
/// numerator and denominator degree at most `degree`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EntryBound {
    pub coeff: i64,
    pub degree: usize,
}

impl Default for EntryBound {
    fn default() -> Self {
        EntryBound {
            coeff: 3,
            degree: 1,
        }
    }
}

impl FieldSpec {
    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R, bound: EntryBound) -> Elem {
        match self {
            FieldSpec::Rationals => {
                let c = bound.coeff.max(1);
                let n = rng.random_range(-c..=c);
                let d = rng.random_range(1..=c);
                Elem::Rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
            }
            FieldSpec::Finite { p, e, .. } => {
                let mut v: Vec<u64> = (0..*e).map(|_| rng.random_range(0..*p)).collect();
                super::fp::trim(&mut v);
                Elem::Ff(v)
            }
            FieldSpec::Ratfunc { base, .. } => {
                let num = base.random_poly(rng, bound, bound.degree);
                // polynomials half of the time, genuine fractions otherwise
                let den = if rng.random_bool(0.5) || bound.degree == 0 {
                    Poly::constant(base.one())
                } else {
                    loop {
                        let deg = rng.random_range(1..=bound.degree);
                        let d = base.random_poly(rng, bound, deg);
                        if !d.is_zero() {
                            break d;
                        }
                    }
                };
                self.fraction(num, den).expect("nonzero denominator")
            }
        }
    }

    /// A nonzero random element.
    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R, bound: EntryBound) -> Elem {
        loop {
            let e = self.random_elem(rng, bound);
            if !e.is_zero() {
                return e;
            }
        }
    }

    fn random_poly<R: Rng + ?Sized>(&self, rng: &mut R, bound: EntryBound, degree: usize) -> Poly {
        let inner = EntryBound {
            coeff: bound.coeff,
            degree: bound.degree.saturating_sub(1),
        };
        Poly::from_coeffs((0..=degree).map(|_| self.random_elem(rng, inner)).collect())
    }
}
