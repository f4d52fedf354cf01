//! Exact coefficient fields.
//!
//! A [`FieldSpec`] describes one field of the tower: the rationals, a finite
//! field `F_p[x]/(modulus)`, or rational functions in one variable over
//! another field. Elements ([`Elem`]) are kept in canonical form (reduced
//! fractions, trimmed residues, coprime numerator/denominator with monic
//! denominator), so equality is structural.
//!
//! Arithmetic is driven by the spec: `spec.add(&a, &b)`. The checked
//! [`FieldValue`] wrapper pairs an element with its spec for callers that mix
//! values from different places.

pub mod fp;
pub mod laurent;
pub mod parse;
mod poly;
pub mod random;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use laurent::{theta_shift, LaurentSeries};
pub use poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field specification: {0}")]
    InvalidSpec(String),
    #[error("theta-shift needs a rational function of T over a field containing theta, got {0}")]
    NotShiftable(String),
    #[error("truncation order {order} lies below the pole order {kappa}")]
    TruncationBelowPole { order: i64, kappa: i64 },
    #[error("denominator is identically zero")]
    ZeroDenominatorIdentically,
}

/// One level of the coefficient-field tower.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawFieldSpec")]
pub enum FieldSpec {
    Rationals,
    /// `F_p[x]/(modulus)`; `modulus` is monic of degree `e`, low degree first.
    Finite { p: u64, e: u32, modulus: Vec<u64> },
    /// Rational functions in `var` over `base`.
    Ratfunc { base: Box<FieldSpec>, var: String },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawFieldSpec {
    Rationals,
    Finite {
        p: u64,
        e: u32,
        modulus: Option<Vec<u64>>,
    },
    Ratfunc {
        base: Box<FieldSpec>,
        var: String,
    },
}

impl TryFrom<RawFieldSpec> for FieldSpec {
    type Error = ArithError;

    fn try_from(raw: RawFieldSpec) -> Result<Self, Self::Error> {
        match raw {
            RawFieldSpec::Rationals => Ok(FieldSpec::Rationals),
            RawFieldSpec::Finite { p, e, modulus: None } => FieldSpec::finite(p, e),
            RawFieldSpec::Finite {
                p,
                e,
                modulus: Some(m),
            } => FieldSpec::finite_with_modulus(p, e, m),
            RawFieldSpec::Ratfunc { base, var } => FieldSpec::ratfunc(*base, &var),
        }
    }
}

impl FieldSpec {
    /// `F_{p^e}` with the default modulus from [`fp::default_modulus`].
    pub fn finite(p: u64, e: u32) -> Result<Self, ArithError> {
        Self::check_prime_power(p, e)?;
        Ok(FieldSpec::Finite {
            p,
            e,
            modulus: fp::default_modulus(p, e),
        })
    }

    pub fn finite_with_modulus(p: u64, e: u32, modulus: Vec<u64>) -> Result<Self, ArithError> {
        Self::check_prime_power(p, e)?;
        if modulus.len() != e as usize + 1 || modulus.iter().any(|&c| c >= p) {
            return Err(ArithError::InvalidSpec(format!(
                "modulus {modulus:?} is not a reduced polynomial of degree {e}"
            )));
        }
        if !fp::is_irreducible(&modulus, p) {
            return Err(ArithError::InvalidSpec(format!(
                "modulus {modulus:?} is not monic irreducible over F_{p}"
            )));
        }
        Ok(FieldSpec::Finite { p, e, modulus })
    }

    fn check_prime_power(p: u64, e: u32) -> Result<(), ArithError> {
        if p >= 1 << 32 || !fp::is_prime(p) {
            return Err(ArithError::InvalidSpec(format!("{p} is not a prime below 2^32")));
        }
        if e == 0 {
            return Err(ArithError::InvalidSpec("extension degree must be positive".into()));
        }
        Ok(())
    }

    pub fn ratfunc(base: FieldSpec, var: &str) -> Result<Self, ArithError> {
        let valid_ident = var
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && var.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid_ident {
            return Err(ArithError::InvalidSpec(format!("bad variable name {var:?}")));
        }
        if base.variables().contains(&var) || (var == "x" && base.has_finite_generator()) {
            return Err(ArithError::InvalidSpec(format!(
                "variable {var:?} already used in the base field"
            )));
        }
        Ok(FieldSpec::Ratfunc {
            base: Box::new(base),
            var: var.to_string(),
        })
    }

    /// `Q(theta)`.
    pub fn rational_functions() -> Self {
        FieldSpec::ratfunc(FieldSpec::Rationals, "theta").unwrap()
    }

    /// `F_q(theta)` for a prime power `q` with the default modulus.
    pub fn finite_rational_functions(q: u64) -> Result<Self, ArithError> {
        let (p, e) = split_prime_power(q)
            .ok_or_else(|| ArithError::InvalidSpec(format!("{q} is not a prime power")))?;
        FieldSpec::ratfunc(FieldSpec::finite(p, e)?, "theta")
    }

    /// Variable names of all rational-function levels, outermost first.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            FieldSpec::Ratfunc { base, var } => {
                let mut v = vec![var.as_str()];
                v.extend(base.variables());
                v
            }
            _ => Vec::new(),
        }
    }

    fn has_finite_generator(&self) -> bool {
        match self {
            FieldSpec::Finite { .. } => true,
            FieldSpec::Ratfunc { base, .. } => base.has_finite_generator(),
            FieldSpec::Rationals => false,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Finite { p, .. } => *p,
            FieldSpec::Ratfunc { base, .. } => base.characteristic(),
        }
    }

    /// Number of elements, for finite fields.
    pub fn order(&self) -> Option<u64> {
        match self {
            FieldSpec::Finite { p, e, .. } => p.checked_pow(*e),
            _ => None,
        }
    }

    // ----- element constructors -----

    pub fn zero(&self) -> Elem {
        match self {
            FieldSpec::Rationals => Elem::Rat(BigRational::zero()),
            FieldSpec::Finite { .. } => Elem::Ff(Vec::new()),
            FieldSpec::Ratfunc { base, .. } => Elem::Frac {
                num: Poly::zero(),
                den: Poly::constant(base.one()),
            },
        }
    }

    pub fn one(&self) -> Elem {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self {
            FieldSpec::Rationals => Elem::Rat(BigRational::from_integer(n.clone())),
            FieldSpec::Finite { p, .. } => {
                let r = n.mod_floor_u64(*p);
                Elem::Ff(if r == 0 { Vec::new() } else { vec![r] })
            }
            FieldSpec::Ratfunc { base, .. } => Elem::Frac {
                num: Poly::constant(base.from_bigint(n)),
                den: Poly::constant(base.one()),
            },
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Elem, ArithError> {
        let n = self.from_bigint(q.numer());
        let d = self.from_bigint(q.denom());
        self.div(&n, &d)
    }

    /// Embed an element of `base` as a constant of this rational-function field.
    pub fn lift(&self, c: Elem) -> Elem {
        match self {
            FieldSpec::Ratfunc { base, .. } => Elem::Frac {
                num: Poly::constant(c),
                den: Poly::constant(base.one()),
            },
            _ => c,
        }
    }

    /// The element named `name`: the variable of some rational-function level
    /// or the residue class of `x` in a finite field.
    pub fn generator(&self, name: &str) -> Option<Elem> {
        match self {
            FieldSpec::Rationals => None,
            FieldSpec::Finite { p, modulus, .. } => {
                (name == "x").then(|| Elem::Ff(fp::rem(&[0, 1], modulus, *p)))
            }
            FieldSpec::Ratfunc { base, var } => {
                if name == var {
                    Some(Elem::Frac {
                        num: Poly::from_coeffs(vec![base.zero(), base.one()]),
                        den: Poly::constant(base.one()),
                    })
                } else {
                    base.generator(name).map(|g| self.lift(g))
                }
            }
        }
    }

    /// The element `num/den` of this rational-function field, reduced.
    pub fn fraction(&self, num: Poly, den: Poly) -> Result<Elem, ArithError> {
        match self {
            FieldSpec::Ratfunc { base, .. } => {
                if den.is_zero() {
                    return Err(ArithError::ZeroDenominatorIdentically);
                }
                Ok(base.normalize_fraction(num, den))
            }
            _ => Err(ArithError::InvalidSpec("not a rational-function field".into())),
        }
    }

    // ----- arithmetic -----

    pub fn is_one(&self, a: &Elem) -> bool {
        match (self, a) {
            (FieldSpec::Rationals, Elem::Rat(q)) => q.is_one(),
            (FieldSpec::Finite { .. }, Elem::Ff(v)) => v.as_slice() == [1],
            (FieldSpec::Ratfunc { base, .. }, Elem::Frac { num, den }) => {
                num == den && den.degree() == Some(0) && base.is_one(&den.coeffs()[0])
            }
            _ => false,
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (FieldSpec::Rationals, Elem::Rat(x), Elem::Rat(y)) => Elem::Rat(if x.denom() == y.denom() {
                poly::reduced_ratio(x.numer() + y.numer(), x.denom().clone())
            } else {
                poly::reduced_ratio(x.numer() * y.denom() + y.numer() * x.denom(), x.denom() * y.denom())
            }),
            (FieldSpec::Finite { p, .. }, Elem::Ff(x), Elem::Ff(y)) => Elem::Ff(fp::add(x, y, *p)),
            (
                FieldSpec::Ratfunc { base, .. },
                Elem::Frac { num: n1, den: d1 },
                Elem::Frac { num: n2, den: d2 },
            ) => {
                if n1.is_zero() {
                    return b.clone();
                }
                if n2.is_zero() {
                    return a.clone();
                }
                if d1 == d2 {
                    let num = base.poly_add(n1, n2);
                    if d1.degree() == Some(0) {
                        return Elem::Frac {
                            num,
                            den: d1.clone(),
                        };
                    }
                    return base.normalize_fraction(num, d1.clone());
                }
                let g = base.poly_gcd(d1, d2);
                if g.degree() == Some(0) {
                    // coprime monic denominators: the sum is already reduced
                    let num = base.poly_add(&base.poly_mul(n1, d2), &base.poly_mul(n2, d1));
                    let den = base.poly_mul(d1, d2);
                    if num.is_zero() {
                        return self.zero();
                    }
                    return Elem::Frac { num, den };
                }
                let d1g = base.poly_div_exact(d1, &g);
                let d2g = base.poly_div_exact(d2, &g);
                let num = base.poly_add(&base.poly_mul(n1, &d2g), &base.poly_mul(n2, &d1g));
                let den = base.poly_mul(&d1g, d2);
                base.normalize_fraction(num, den)
            }
            _ => panic!("element kind does not match field {self}"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match (self, a) {
            (FieldSpec::Rationals, Elem::Rat(x)) => Elem::Rat(-x),
            (FieldSpec::Finite { p, .. }, Elem::Ff(x)) => Elem::Ff(fp::neg(x, *p)),
            (FieldSpec::Ratfunc { base, .. }, Elem::Frac { num, den }) => Elem::Frac {
                num: base.poly_neg(num),
                den: den.clone(),
            },
            _ => panic!("element kind does not match field {self}"),
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (FieldSpec::Rationals, Elem::Rat(x), Elem::Rat(y)) => {
                Elem::Rat(poly::reduced_ratio(x.numer() * y.numer(), x.denom() * y.denom()))
            }
            (FieldSpec::Finite { p, modulus, .. }, Elem::Ff(x), Elem::Ff(y)) => {
                Elem::Ff(fp::rem(&fp::mul(x, y, *p), modulus, *p))
            }
            (
                FieldSpec::Ratfunc { base, .. },
                Elem::Frac { num: n1, den: d1 },
                Elem::Frac { num: n2, den: d2 },
            ) => {
                if n1.is_zero() || n2.is_zero() {
                    return self.zero();
                }
                let g1 = base.poly_gcd(n1, d2);
                let g2 = base.poly_gcd(n2, d1);
                let (n1, d2) = base.cancel(n1, d2, &g1);
                let (n2, d1) = base.cancel(n2, d1, &g2);
                Elem::Frac {
                    num: base.poly_mul(&n1, &n2),
                    den: base.poly_mul(&d1, &d2),
                }
            }
            _ => panic!("element kind does not match field {self}"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem, ArithError> {
        if a.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(match (self, a) {
            (FieldSpec::Rationals, Elem::Rat(x)) => Elem::Rat(x.recip()),
            (FieldSpec::Finite { p, modulus, .. }, Elem::Ff(x)) => Elem::Ff(
                fp::inv_mod_poly(x, modulus, *p).expect("nonzero residue is invertible"),
            ),
            (FieldSpec::Ratfunc { base, .. }, Elem::Frac { num, den }) => {
                let lc = base.inv(num.lead().unwrap())?;
                Elem::Frac {
                    num: base.poly_scale(den, &lc),
                    den: base.poly_scale(num, &lc),
                }
            }
            _ => panic!("element kind does not match field {self}"),
        })
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Result<Elem, ArithError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^k`; negative exponents invert.
    pub fn pow(&self, a: &Elem, k: i64) -> Result<Elem, ArithError> {
        let base = if k < 0 { self.inv(a)? } else { a.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        Ok(acc)
    }

    /// Checks that `a` has the shape of an element of this field.
    pub fn contains(&self, a: &Elem) -> bool {
        match (self, a) {
            (FieldSpec::Rationals, Elem::Rat(_)) => true,
            (FieldSpec::Finite { p, e, .. }, Elem::Ff(v)) => {
                v.len() <= *e as usize && v.iter().all(|&c| c < *p) && v.last() != Some(&0)
            }
            (FieldSpec::Ratfunc { base, .. }, Elem::Frac { num, den }) => {
                num.coeffs().iter().chain(den.coeffs()).all(|c| base.contains(c))
            }
            _ => false,
        }
    }

    // ----- formatting -----

    /// Canonical string form; [`parse::parse_elem`] reads it back.
    pub fn format(&self, a: &Elem) -> String {
        match (self, a) {
            (FieldSpec::Rationals, Elem::Rat(q)) => {
                if q.is_integer() {
                    q.numer().to_string()
                } else {
                    format!("{}/{}", q.numer(), q.denom())
                }
            }
            (FieldSpec::Finite { .. }, Elem::Ff(v)) => {
                let coeffs: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                format_poly(&coeffs, "x")
            }
            (FieldSpec::Ratfunc { base, var }, Elem::Frac { num, den }) => {
                let n = base.format_poly(num, var);
                if den.degree() == Some(0) {
                    return n;
                }
                let d = base.format_poly(den, var);
                format!("{}/{}", wrap(&n), wrap(&d))
            }
            _ => panic!("element kind does not match field {self}"),
        }
    }

    fn format_poly(&self, p: &Poly, var: &str) -> String {
        let coeffs: Vec<String> = p.coeffs().iter().map(|c| self.format(c)).collect();
        format_poly(&coeffs, var)
    }
}

fn is_atomic(s: &str) -> bool {
    !s.contains(' ')
}

fn wrap(s: &str) -> String {
    if is_atomic(s) {
        s.to_string()
    } else {
        format!("({s})")
    }
}

/// Joins preformatted coefficients (low degree first, `"0"` for zero) into a
/// polynomial expression in `var`.
fn format_poly(coeffs: &[String], var: &str) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c == "0" {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        let term = if k == 0 {
            wrap(c)
        } else if c == "1" {
            mono
        } else if c == "-1" {
            format!("-{mono}")
        } else {
            format!("{}*{mono}", wrap(c))
        };
        terms.push(term);
    }
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = terms[0].clone();
    for t in &terms[1..] {
        match t.strip_prefix('-') {
            Some(rest) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            None => {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
    }
    out
}

pub(crate) trait ModFloorU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = BigInt::from(p);
        let mut r = self % &m;
        if r.is_negative() {
            r += &m;
        }
        u64::try_from(r).expect("residue fits in u64")
    }
}

/// `q = p^e` with `p` prime.
pub fn split_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut e = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

/// Short names used on the command line: `rationals` (or `q`), `qt` for
/// `Q(theta)`, `q<N>` for `F_N`, `q<N>t` for `F_N(theta)`.
impl FromStr for FieldSpec {
    type Err = ArithError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ArithError::InvalidSpec(format!("unknown field name {s:?}"));
        match s {
            "rationals" | "q" => return Ok(FieldSpec::Rationals),
            "qt" => return Ok(FieldSpec::rational_functions()),
            _ => {}
        }
        let rest = s.strip_prefix('q').ok_or_else(bad)?;
        let (digits, with_theta) = match rest.strip_suffix('t') {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let q: u64 = digits.parse().map_err(|_| bad())?;
        let (p, e) = split_prime_power(q).ok_or_else(bad)?;
        let f = FieldSpec::finite(p, e)?;
        if with_theta {
            FieldSpec::ratfunc(f, "theta")
        } else {
            Ok(f)
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Finite { p, e: 1, .. } => write!(f, "F_{p}"),
            FieldSpec::Finite { p, e, modulus } => {
                let coeffs: Vec<String> = modulus.iter().map(|c| c.to_string()).collect();
                write!(f, "F_{}[x]/({})", p.pow(*e), format_poly(&coeffs, "x"))
            }
            FieldSpec::Ratfunc { base, var } => write!(f, "{base}({var})"),
        }
    }
}

/// A field element without its field; see [`FieldSpec`] for the operations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Rat(BigRational),
    /// Residue modulo the field modulus, low degree first, trimmed.
    Ff(Vec<u64>),
    /// Coprime numerator and monic denominator over the base field.
    Frac { num: Poly, den: Poly },
}

impl Elem {
    pub fn is_zero(&self) -> bool {
        match self {
            Elem::Rat(q) => q.is_zero(),
            Elem::Ff(v) => v.is_empty(),
            Elem::Frac { num, .. } => num.is_zero(),
        }
    }
}

/// An element together with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldValue {
    spec: Arc<FieldSpec>,
    elem: Elem,
}

impl FieldValue {
    /// Panics if `elem` is not shaped like an element of `spec`.
    pub fn new(spec: Arc<FieldSpec>, elem: Elem) -> Self {
        assert!(spec.contains(&elem), "element does not belong to {spec}");
        FieldValue { spec, elem }
    }

    pub fn zero(spec: Arc<FieldSpec>) -> Self {
        let elem = spec.zero();
        FieldValue { spec, elem }
    }

    pub fn one(spec: Arc<FieldSpec>) -> Self {
        let elem = spec.one();
        FieldValue { spec, elem }
    }

    pub fn from_int(spec: Arc<FieldSpec>, n: i64) -> Self {
        let elem = spec.from_int(n);
        FieldValue { spec, elem }
    }

    pub fn parse(spec: Arc<FieldSpec>, s: &str) -> Result<Self, parse::ParseError> {
        let elem = parse::parse_elem(&spec, s)?;
        Ok(FieldValue { spec, elem })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn elem(&self) -> &Elem {
        &self.elem
    }

    pub fn into_elem(self) -> Elem {
        self.elem
    }

    pub fn is_zero(&self) -> bool {
        self.elem.is_zero()
    }

    fn same_field(&self, other: &Self) -> Result<(), ArithError> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(ArithError::MixedFields)
        }
    }

    fn with(&self, elem: Elem) -> Self {
        FieldValue {
            spec: self.spec.clone(),
            elem,
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_field(other)?;
        Ok(self.with(self.spec.add(&self.elem, &other.elem)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_field(other)?;
        Ok(self.with(self.spec.sub(&self.elem, &other.elem)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_field(other)?;
        Ok(self.with(self.spec.mul(&self.elem, &other.elem)))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self, ArithError> {
        self.same_field(other)?;
        Ok(self.with(self.spec.div(&self.elem, &other.elem)?))
    }

    pub fn inv(&self) -> Result<Self, ArithError> {
        Ok(self.with(self.spec.inv(&self.elem)?))
    }

    pub fn neg(&self) -> Self {
        self.with(self.spec.neg(&self.elem))
    }

    pub fn pow(&self, k: i64) -> Result<Self, ArithError> {
        Ok(self.with(self.spec.pow(&self.elem, k)?))
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec.format(&self.elem))
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        /// Panics when the operands live in different fields.
        impl std::ops::$tr for &FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                self.$checked(rhs).expect("field operation failed")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

#[cfg(test)]
mod tests {
    use super::*;

    fn val(spec: &Arc<FieldSpec>, s: &str) -> FieldValue {
        FieldValue::parse(spec.clone(), s).unwrap()
    }

    #[test]
    fn rational_sum() {
        let q = Arc::new(FieldSpec::Rationals);
        assert_eq!(&val(&q, "2/3") + &val(&q, "1/6"), val(&q, "5/6"));
        assert_eq!((&val(&q, "2/3") + &val(&q, "1/6")).to_string(), "5/6");
    }

    #[test]
    fn f9_square_of_generator() {
        let f9 = Arc::new(FieldSpec::finite_with_modulus(3, 2, vec![1, 0, 1]).unwrap());
        let x = val(&f9, "x");
        let sq = &x * &x;
        assert_eq!(sq, val(&f9, "-1"));
        assert_eq!(sq.to_string(), "2");
    }

    #[test]
    fn ratfunc_reduces() {
        let qt = Arc::new(FieldSpec::rational_functions());
        let v = val(&qt, "(theta^2 - 1)/(theta - 1)");
        assert_eq!(v, val(&qt, "theta + 1"));
        assert_eq!(v.to_string(), "theta + 1");
        let w = val(&qt, "(2*theta)/(4*theta^2 + 2)");
        assert_eq!(w.to_string(), "1/2*theta/(theta^2 + 1/2)");
    }

    #[test]
    fn errors() {
        let q = Arc::new(FieldSpec::Rationals);
        let f5 = Arc::new(FieldSpec::finite(5, 1).unwrap());
        assert_eq!(
            val(&q, "1").try_add(&FieldValue::one(f5)),
            Err(ArithError::MixedFields)
        );
        assert_eq!(
            val(&q, "1").try_div(&val(&q, "0")),
            Err(ArithError::DivisionByZero)
        );
        assert!(FieldSpec::finite(6, 1).is_err());
        assert!(FieldSpec::finite_with_modulus(3, 2, vec![2, 0, 1]).is_err());
        assert!(FieldSpec::ratfunc(FieldSpec::rational_functions(), "theta").is_err());
    }

    #[test]
    fn short_names() {
        assert_eq!("rationals".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert_eq!(
            "q5t".parse::<FieldSpec>().unwrap(),
            FieldSpec::ratfunc(FieldSpec::finite(5, 1).unwrap(), "theta").unwrap()
        );
        assert_eq!(
            "q9".parse::<FieldSpec>().unwrap(),
            FieldSpec::finite_with_modulus(3, 2, vec![1, 0, 1]).unwrap()
        );
        assert!("q6".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn spec_json() {
        let spec: FieldSpec = "q9t".parse().unwrap();
        let s = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"ratfunc","base":{"kind":"finite","p":3,"e":2,"modulus":[1,0,1]},"var":"theta"}"#
        );
        let back: FieldSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
        let bad = r#"{"kind":"finite","p":3,"e":2,"modulus":[2,0,1]}"#;
        assert!(serde_json::from_str::<FieldSpec>(bad).is_err());
        let default: FieldSpec = serde_json::from_str(r#"{"kind":"finite","p":2,"e":3}"#).unwrap();
        assert_eq!(default, FieldSpec::finite(2, 3).unwrap());
    }
}
