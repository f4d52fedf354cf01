//! Truncated Laurent series in the nilpotent symbol `N`, and the theta-shift
//! that re-expands a rational function of `T` around `T = theta`.

use std::sync::Arc;

use super::{ArithError, Elem, FieldSpec, FieldValue, Poly};

/// `sum_{j = -kappa}^{truncation} c_j N^j`, exact through `truncation`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: Arc<FieldSpec>,
    kappa: i64,
    truncation: i64,
    /// Coefficients of `N^{-kappa}, ..., N^{truncation}`.
    coeffs: Vec<Elem>,
}

impl LaurentSeries {
    /// Builds a series from coefficients of `N^low, N^{low+1}, ...`. The
    /// lowest stored exponent is raised to the first nonzero term when that
    /// is negative, and to 0 otherwise.
    pub fn from_coeffs(field: Arc<FieldSpec>, low: i64, coeffs: Vec<Elem>) -> Self {
        let truncation = low + coeffs.len() as i64 - 1;
        let first = coeffs.iter().position(|c| !c.is_zero()).map(|i| low + i as i64);
        let kappa = match first {
            Some(v) if v < 0 => -v,
            _ => 0,
        };
        let mut out = Vec::with_capacity((truncation + kappa + 1).max(0) as usize);
        for j in -kappa..=truncation {
            let idx = j - low;
            out.push(if idx >= 0 && (idx as usize) < coeffs.len() {
                coeffs[idx as usize].clone()
            } else {
                field.zero()
            });
        }
        LaurentSeries {
            field,
            kappa,
            truncation,
            coeffs: out,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    /// Pole order at `N = 0` (0 when there is no pole).
    pub fn kappa(&self) -> i64 {
        self.kappa
    }

    pub fn truncation(&self) -> i64 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Elem::is_zero)
    }

    /// Coefficient of `N^j`; `None` above the truncation.
    pub fn coeff(&self, j: i64) -> Option<FieldValue> {
        if j > self.truncation {
            return None;
        }
        let e = if j < -self.kappa {
            self.field.zero()
        } else {
            self.coeffs[(j + self.kappa) as usize].clone()
        };
        Some(FieldValue::new(self.field.clone(), e))
    }

    /// `(exponent, coefficient)` pairs of all stored terms, including zeros.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FieldValue)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (i as i64 - self.kappa, FieldValue::new(self.field.clone(), c.clone())))
    }

    /// Exponent of the first nonzero stored coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .map(|i| i as i64 - self.kappa)
    }

    /// Product, exact through the highest exponent both factors determine.
    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries, ArithError> {
        if self.field != other.field {
            return Err(ArithError::MixedFields);
        }
        let f = &self.field;
        // a zero series is known to vanish only through its truncation
        let v1 = self.valuation().unwrap_or(self.truncation + 1);
        let v2 = other.valuation().unwrap_or(other.truncation + 1);
        let trunc = (self.truncation + v2).min(other.truncation + v1);
        let low = v1 + v2;
        if trunc < low {
            return Ok(LaurentSeries::from_coeffs(f.clone(), trunc + 1, Vec::new()));
        }
        let len = (trunc - low + 1) as usize;
        let lhs = &self.coeffs[(v1 + self.kappa) as usize..=(self.truncation + self.kappa) as usize];
        let rhs = &other.coeffs[(v2 + other.kappa) as usize..=(other.truncation + other.kappa) as usize];
        let out = if let FieldSpec::Ratfunc { base: kb, .. } = f.as_ref() {
            let mut left = PrefixNumerators::new(kb, lhs);
            let mut right = PrefixNumerators::new(kb, rhs);
            (0..len)
                .map(|t| {
                    left.extend_to(kb, t);
                    right.extend_to(kb, t);
                    let (ln, rn) = (&left.nums, &right.nums);
                    let mut acc = Poly::zero();
                    for i in 0..=t.min(ln.len() - 1) {
                        if t - i < rn.len() && !ln[i].is_zero() && !rn[t - i].is_zero() {
                            acc = kb.poly_add(&acc, &kb.poly_mul(&ln[i], &rn[t - i]));
                        }
                    }
                    if acc.is_zero() {
                        return f.zero();
                    }
                    f.fraction(acc, kb.poly_mul(&left.lcm, &right.lcm)).expect("nonzero denominator")
                })
                .collect()
        } else {
            let mut out = vec![f.zero(); len];
            for (i, a) in lhs.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
                for (j, b) in rhs.iter().enumerate().take(len.saturating_sub(i)) {
                    out[i + j] = f.add(&out[i + j], &f.mul(a, b));
                }
            }
            out
        };
        Ok(LaurentSeries::from_coeffs(f.clone(), low, out))
    }
}

/// Numerators of `v[0..=t]` over the lcm of their denominators, grown one
/// index at a time.
struct PrefixNumerators<'a> {
    parts: Vec<(&'a Poly, &'a Poly)>,
    nums: Vec<Poly>,
    lcm: Poly,
}

impl<'a> PrefixNumerators<'a> {
    fn new(kb: &FieldSpec, v: &'a [Elem]) -> Self {
        let parts = v
            .iter()
            .map(|e| match e {
                Elem::Frac { num, den } => (num, den),
                _ => unreachable!("rational-function field holds fractions"),
            })
            .collect();
        PrefixNumerators {
            parts,
            nums: Vec::new(),
            lcm: Poly::constant(kb.one()),
        }
    }

    fn extend_to(&mut self, kb: &FieldSpec, t: usize) {
        while self.nums.len() <= t && self.nums.len() < self.parts.len() {
            let (num, den) = self.parts[self.nums.len()];
            let g = kb.poly_gcd(&self.lcm, den);
            let grow = kb.poly_div_exact(den, &g);
            if grow.degree() != Some(0) {
                for n in self.nums.iter_mut() {
                    *n = kb.poly_mul(n, &grow);
                }
                self.lcm = kb.poly_mul(&self.lcm, &grow);
            }
            self.nums.push(kb.poly_mul(num, &kb.poly_div_exact(&self.lcm, den)));
        }
    }
}

/// Numerators over the least common denominator of fractions in `R(x)`.
fn clear_denominators(kb: &FieldSpec, v: &[Elem]) -> (Vec<Poly>, Poly) {
    let parts: Vec<(&Poly, &Poly)> = v
        .iter()
        .map(|e| match e {
            Elem::Frac { num, den } => (num, den),
            _ => unreachable!("rational-function field holds fractions"),
        })
        .collect();
    let mut lcm = Poly::constant(kb.one());
    for (_, d) in &parts {
        let g = kb.poly_gcd(&lcm, d);
        lcm = kb.poly_mul(&lcm, &kb.poly_div_exact(d, &g));
    }
    let polys = parts
        .iter()
        .map(|(num, d)| kb.poly_mul(num, &kb.poly_div_exact(&lcm, d)))
        .collect();
    (polys, lcm)
}

/// First `n` coefficients of the power series `a / b` over a field of
/// fractions `k = Frac(R[theta])`; `b[0]` must be nonzero. Denominators are
/// cleared first, so with `B = D_b b` and `A = D_a a` the recurrence
/// `1/B = sum_j P_j / B_0^{j+1} N^j`,
/// `P_j = -sum_{i >= 1} B_i P_{j-i} B_0^{i-1}` runs on polynomials and each
/// output coefficient is reduced once.
fn series_quotient(k: &FieldSpec, a: &[Elem], b: &[Elem], n: usize) -> Vec<Elem> {
    let FieldSpec::Ratfunc { base: kb, .. } = k else {
        unreachable!("coefficient field is a rational function field")
    };
    let (ap, da) = clear_denominators(kb, a);
    let (bp, db) = clear_denominators(kb, b);
    let mut b0_pow = vec![Poly::constant(kb.one())];
    for _ in 0..n {
        let next = kb.poly_mul(b0_pow.last().unwrap(), &bp[0]);
        b0_pow.push(next);
    }
    let mut p: Vec<Poly> = Vec::with_capacity(n);
    for j in 0..n {
        if j == 0 {
            p.push(Poly::constant(kb.one()));
            continue;
        }
        let mut acc = Poly::zero();
        for i in 1..=j.min(bp.len() - 1) {
            if bp[i].is_zero() || p[j - i].is_zero() {
                continue;
            }
            acc = kb.poly_add(&acc, &kb.poly_mul(&kb.poly_mul(&bp[i], &p[j - i]), &b0_pow[i - 1]));
        }
        p.push(kb.poly_neg(&acc));
    }
    (0..n)
        .map(|t| {
            let mut q = Poly::zero();
            for i in 0..=t.min(ap.len().saturating_sub(1)) {
                if ap[i].is_zero() || p[t - i].is_zero() {
                    continue;
                }
                q = kb.poly_add(&q, &kb.poly_mul(&kb.poly_mul(&ap[i], &p[t - i]), &b0_pow[i]));
            }
            if q.is_zero() {
                return k.zero();
            }
            let num = kb.poly_mul(&q, &db);
            let den = kb.poly_mul(&b0_pow[t + 1], &da);
            k.fraction(num, den).expect("nonzero denominator")
        })
        .collect()
}

/// Expands `f(theta + N)` in powers of `N` through `N^order`.
///
/// `f` must be a rational function of some variable over a field whose
/// outermost variable is `theta` (any name works; the generator of the
/// coefficient field is substituted). The pole order of the result equals
/// the order of the pole of `f` at `T = theta`.
pub fn theta_shift(f: &FieldValue, order: i64) -> Result<LaurentSeries, ArithError> {
    let (coef_field, theta) = match f.spec().as_ref() {
        FieldSpec::Ratfunc { base, .. } => match base.as_ref() {
            FieldSpec::Ratfunc { var, .. } => (base.clone(), base.generator(var).unwrap()),
            _ => return Err(ArithError::NotShiftable(f.spec().to_string())),
        },
        _ => return Err(ArithError::NotShiftable(f.spec().to_string())),
    };
    let coef_field: Arc<FieldSpec> = Arc::new(*coef_field);
    let k = coef_field.as_ref();
    let (num, den) = match f.elem() {
        Elem::Frac { num, den } => (num, den),
        _ => unreachable!("rational-function field holds fractions"),
    };
    if den.is_zero() {
        return Err(ArithError::ZeroDenominatorIdentically);
    }
    if num.is_zero() {
        if order < 0 {
            return Err(ArithError::TruncationBelowPole { order, kappa: 0 });
        }
        let zeros = vec![k.zero(); (order + 1) as usize];
        return Ok(LaurentSeries::from_coeffs(coef_field.clone(), 0, zeros));
    }
    let a = k.poly_shift(num, &theta);
    let b = k.poly_shift(den, &theta);
    let va = a.valuation().unwrap() as i64;
    let vb = b.valuation().unwrap() as i64;
    let low = va - vb;
    let kappa = (-low).max(0);
    if order < -kappa {
        return Err(ArithError::TruncationBelowPole { order, kappa });
    }
    let terms = order - low + 1;
    if terms <= 0 {
        let zeros = vec![k.zero(); (order + 1) as usize];
        return Ok(LaurentSeries::from_coeffs(coef_field.clone(), 0, zeros));
    }
    let a_hat: Vec<Elem> = a.coeffs()[va as usize..].to_vec();
    let b_hat: Vec<Elem> = b.coeffs()[vb as usize..].to_vec();
    let q = series_quotient(k, &a_hat, &b_hat, terms as usize);
    Ok(LaurentSeries::from_coeffs(coef_field, low, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qtt() -> Arc<FieldSpec> {
        Arc::new(FieldSpec::ratfunc(FieldSpec::rational_functions(), "T").unwrap())
    }

    fn coeff_strings(s: &LaurentSeries) -> Vec<(i64, String)> {
        s.terms().map(|(j, c)| (j, c.to_string())).collect()
    }

    #[test]
    fn identity_case() {
        let f = FieldValue::parse(qtt(), "T - theta").unwrap();
        let s = theta_shift(&f, 3).unwrap();
        assert_eq!(s.kappa(), 0);
        assert_eq!(
            coeff_strings(&s),
            vec![(0, "0".into()), (1, "1".into()), (2, "0".into()), (3, "0".into())]
        );
    }

    #[test]
    fn inverse_powers_of_t() {
        let f = FieldValue::parse(qtt(), "1/T").unwrap();
        let s = theta_shift(&f, 3).unwrap();
        assert_eq!(
            coeff_strings(&s),
            vec![
                (0, "1/theta".into()),
                (1, "-1/theta^2".into()),
                (2, "1/theta^3".into()),
                (3, "-1/theta^4".into())
            ]
        );
        let g = FieldValue::parse(qtt(), "T^-2").unwrap();
        let s = theta_shift(&g, 2).unwrap();
        assert_eq!(
            coeff_strings(&s),
            vec![(0, "1/theta^2".into()), (1, "-2/theta^3".into()), (2, "3/theta^4".into())]
        );
    }

    #[test]
    fn pole_order() {
        let f = FieldValue::parse(qtt(), "T/(T - theta)^2").unwrap();
        let s = theta_shift(&f, 1).unwrap();
        assert_eq!(s.kappa(), 2);
        assert_eq!(
            coeff_strings(&s),
            vec![(-2, "theta".into()), (-1, "1".into()), (0, "0".into()), (1, "0".into())]
        );
        assert!(matches!(
            theta_shift(&f, -3),
            Err(ArithError::TruncationBelowPole { order: -3, kappa: 2 })
        ));
    }

    #[test]
    fn rejects_fields_without_theta() {
        let qt = Arc::new(FieldSpec::rational_functions());
        let f = FieldValue::parse(qt, "theta").unwrap();
        assert!(matches!(theta_shift(&f, 2), Err(ArithError::NotShiftable(_))));
    }

    #[test]
    fn binomial_formula_for_inverse_powers() {
        let f = qtt();
        let base = Arc::new(FieldSpec::rational_functions());
        let theta = base.generator("theta").unwrap();
        for j in 1..=8i64 {
            let s = theta_shift(&FieldValue::parse(f.clone(), &format!("T^-{j}")).unwrap(), 8).unwrap();
            for i in 0..=8i64 {
                let binom = (1..=i).fold(1i64, |acc, t| acc * (j + t - 1) / t);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let expected = base.mul(&base.from_int(sign * binom), &base.pow(&theta, -(j + i)).unwrap());
                assert_eq!(s.coeff(i).unwrap().elem(), &expected, "j = {j}, i = {i}");
            }
        }
    }

    /// A random element of `Q(T)` with numerator and denominator of degree
    /// at most 3 and small integer coefficients.
    fn random_in_t(f: &Arc<FieldSpec>, rng: &mut impl rand::Rng) -> FieldValue {
        let t = FieldValue::new(f.clone(), f.generator("T").unwrap());
        let mut poly = |nonzero: bool| loop {
            let mut acc = FieldValue::zero(f.clone());
            for k in 0..=3 {
                let c = FieldValue::from_int(f.clone(), rng.random_range(-3..=3));
                acc = &acc + &(&c * &t.pow(k).unwrap());
            }
            if !(nonzero && acc.is_zero()) {
                return acc;
            }
        };
        let num = poly(false);
        &num / &poly(true)
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]

        #[test]
        fn shift_is_multiplicative(seed in proptest::prelude::any::<u64>()) {
            use rand::SeedableRng;
            let f = qtt();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = random_in_t(&f, &mut rng);
            let b = random_in_t(&f, &mut rng);
            let sa = theta_shift(&a, 10).unwrap();
            let sb = theta_shift(&b, 10).unwrap();
            let prod = sa.mul(&sb).unwrap();
            let direct = theta_shift(&(&a * &b), 10).unwrap();
            let top = prod.truncation().min(10);
            for j in -direct.kappa()..=top {
                proptest::prop_assert_eq!(prod.coeff(j), direct.coeff(j), "exponent {}", j);
            }
            proptest::prop_assert_eq!(prod.valuation(), direct.valuation());
        }
    }
}
