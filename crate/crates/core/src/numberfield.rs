//! Exact arithmetic in `Q` and in number fields `Q[x]/(p(x))`.
//!
//! The base scalar is an arbitrary-precision rational ([`Rational`]).
//! A [`NumberField`] is presented by a monic modulus; cyclotomic fields
//! `Q(zeta_N)` are built by exact division of `x^N - 1` by the
//! cyclotomic polynomials of the proper divisors of `N`. Irreducibility
//! of a user-supplied modulus is not verified, but a non-invertible
//! element encountered during division is surfaced as a configuration
//! error.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

/// Arbitrary-precision rational. Always stored reduced with a positive
/// denominator (the representation invariant of `BigRational`).
pub type Rational = BigRational;

/// Shorthand for a small rational `p/q`.
pub fn rat(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Shorthand for an integer rational.
pub fn rint(p: i64) -> Rational {
    BigRational::from_integer(BigInt::from(p))
}

/// Render a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let s = s.trim();
    let bad = || FieldError::ParseRational(s.to_string());
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: BigInt = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("cyclotomic degree cap: N = {n} exceeds cap {cap}")]
    CyclotomicCap { n: u32, cap: u32 },
    #[error("modulus must be monic of degree >= 1")]
    BadModulus,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-invertible element: modulus is not irreducible")]
    NonInvertible,
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

// ---------------------------------------------------------------------
// Dense polynomials over Q (internal helper for moduli and inverses).
// ---------------------------------------------------------------------

/// Coefficients low-to-high, no trailing zeros.
pub(crate) type Poly = Vec<Rational>;

pub(crate) fn poly_trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub(crate) fn poly_deg(p: &Poly) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

pub(crate) fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    poly_trim(&mut out);
    out
}

pub(crate) fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    if out.len() < b.len() {
        out.resize(b.len(), Rational::zero());
    }
    for (i, bi) in b.iter().enumerate() {
        out[i] -= bi;
    }
    poly_trim(&mut out);
    out
}

/// Euclidean division: returns (quotient, remainder).
pub(crate) fn poly_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut rem = a.clone();
    let mut quo: Poly = Vec::new();
    while rem.len() > db || (db == 0 && !rem.is_empty()) {
        if rem.len() < b.len() {
            break;
        }
        let shift = rem.len() - b.len();
        let coef = &rem[rem.len() - 1] / &lead;
        if quo.len() < shift + 1 {
            quo.resize(shift + 1, Rational::zero());
        }
        quo[shift] = coef.clone();
        for (i, bi) in b.iter().enumerate() {
            let t = bi * &coef;
            rem[shift + i] -= t;
        }
        poly_trim(&mut rem);
    }
    poly_trim(&mut quo);
    (quo, rem)
}

/// N-th cyclotomic polynomial by iterated exact division of `x^N - 1`
/// by the cyclotomic polynomials of the proper divisors of `N`.
pub fn cyclotomic_polynomial(n: u32) -> Vec<Rational> {
    assert!(n >= 1);
    let mut table: Vec<Poly> = Vec::with_capacity(n as usize + 1);
    table.push(Vec::new()); // index 0 unused
    for m in 1..=n {
        // x^m - 1
        let mut num = vec![Rational::zero(); m as usize + 1];
        num[0] = -Rational::one();
        num[m as usize] = Rational::one();
        let mut phi = num;
        for d in 1..m {
            if m % d == 0 {
                let (q, r) = poly_divmod(&phi, &table[d as usize]);
                debug_assert!(r.is_empty(), "cyclotomic division must be exact");
                phi = q;
            }
        }
        table.push(phi);
    }
    table.pop().unwrap()
}

// ---------------------------------------------------------------------
// Number fields and their elements.
// ---------------------------------------------------------------------

#[derive(Debug)]
struct FieldInner {
    /// Monic modulus, coefficients low-to-high, length = degree + 1.
    modulus: Vec<Rational>,
    degree: usize,
    label: Option<String>,
}

/// A number field `Q[x]/(p(x))`, cheap to clone and share.
#[derive(Debug, Clone)]
pub struct NumberField(Arc<FieldInner>);

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.modulus == other.0.modulus
    }
}
impl Eq for NumberField {}

impl NumberField {
    /// The rationals, presented as `Q[x]/(x)`.
    pub fn rationals() -> NumberField {
        NumberField(Arc::new(FieldInner {
            modulus: vec![Rational::zero(), Rational::one()],
            degree: 1,
            label: Some("Q".to_string()),
        }))
    }

    /// Field with a caller-supplied monic modulus (not checked for
    /// irreducibility).
    pub fn new(modulus: Vec<Rational>, label: Option<String>) -> Result<NumberField, FieldError> {
        let mut m = modulus;
        poly_trim(&mut m);
        if m.len() < 2 || !m.last().unwrap().is_one() {
            return Err(FieldError::BadModulus);
        }
        let degree = m.len() - 1;
        Ok(NumberField(Arc::new(FieldInner {
            modulus: m,
            degree,
            label,
        })))
    }

    /// `Q(zeta_N) = Q[x]/(Phi_N)`.
    pub fn cyclotomic(n: u32, cap: u32) -> Result<NumberField, FieldError> {
        if n == 0 || n > cap {
            return Err(FieldError::CyclotomicCap { n, cap });
        }
        let phi = cyclotomic_polynomial(n);
        NumberField::new(phi, Some(format!("cyclotomic N={n}")))
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn label(&self) -> Option<&str> {
        self.0.label.as_deref()
    }

    pub fn modulus(&self) -> &[Rational] {
        &self.0.modulus
    }

    pub fn is_rational(&self) -> bool {
        self.0.degree == 1
    }

    pub fn zero(&self) -> NumberFieldElement {
        NumberFieldElement {
            field: self.clone(),
            coeffs: vec![Rational::zero(); self.0.degree],
        }
    }

    pub fn one(&self) -> NumberFieldElement {
        self.from_rational(Rational::one())
    }

    pub fn from_rational(&self, r: Rational) -> NumberFieldElement {
        let mut coeffs = vec![Rational::zero(); self.0.degree];
        if self.0.degree == 1 {
            // degree-1 modulus x - c: constants still live in coeff 0,
            // shifted by nothing since we reduce constants directly
            coeffs[0] = r;
        } else {
            coeffs[0] = r;
        }
        NumberFieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    pub fn from_int(&self, n: i64) -> NumberFieldElement {
        self.from_rational(rint(n))
    }

    /// The residue class of `x` — for `Q(zeta_N)` this is the root of
    /// unity itself. For a degree-1 field this is the (rational) root
    /// of the modulus.
    pub fn generator(&self) -> NumberFieldElement {
        if self.0.degree == 1 {
            // x ≡ -c0 mod (x + c0)
            self.from_rational(-self.0.modulus[0].clone())
        } else {
            let mut coeffs = vec![Rational::zero(); self.0.degree];
            coeffs[1] = Rational::one();
            NumberFieldElement {
                field: self.clone(),
                coeffs,
            }
        }
    }

    /// Build an element from a coefficient vector (length <= degree).
    pub fn element(&self, coeffs: Vec<Rational>) -> NumberFieldElement {
        let mut c = coeffs;
        assert!(c.len() <= self.0.degree, "coefficient vector too long");
        c.resize(self.0.degree, Rational::zero());
        NumberFieldElement {
            field: self.clone(),
            coeffs: c,
        }
    }
}

/// Element of a number field: a polynomial residue of length = degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberFieldElement {
    field: NumberField,
    coeffs: Vec<Rational>,
}

impl NumberFieldElement {
    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, if this element is a rational constant.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check_field(&self, other: &NumberFieldElement) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    pub fn add(&self, other: &NumberFieldElement) -> Result<NumberFieldElement, FieldError> {
        self.check_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(NumberFieldElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &NumberFieldElement) -> Result<NumberFieldElement, FieldError> {
        self.check_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(NumberFieldElement {
            field: self.field.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> NumberFieldElement {
        NumberFieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &NumberFieldElement) -> Result<NumberFieldElement, FieldError> {
        self.check_field(other)?;
        let mut a = self.coeffs.clone();
        poly_trim(&mut a);
        let mut b = other.coeffs.clone();
        poly_trim(&mut b);
        let prod = poly_mul(&a, &b);
        let (_, rem) = poly_divmod(&prod, &self.field.0.modulus);
        Ok(self.field.element(rem))
    }

    pub fn scale(&self, r: &Rational) -> NumberFieldElement {
        NumberFieldElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on
    /// the residue and the modulus.
    pub fn inverse(&self) -> Result<NumberFieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let modulus = &self.field.0.modulus;
        let mut a = self.coeffs.clone();
        poly_trim(&mut a);
        // Invariant: r0 = s0*a mod modulus, r1 = s1*a mod modulus.
        let mut r0 = modulus.clone();
        let mut r1 = a;
        let mut s0: Poly = Vec::new();
        let mut s1: Poly = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 = gcd; invertible iff gcd is a nonzero constant.
        match poly_deg(&r0) {
            Some(0) => {
                let inv_lead = Rational::one() / r0[0].clone();
                let scaled: Poly = s0.iter().map(|c| c * &inv_lead).collect();
                let (_, rem) = poly_divmod(&scaled, modulus);
                Ok(self.field.element(rem))
            }
            _ => Err(FieldError::NonInvertible),
        }
    }

    pub fn div(&self, other: &NumberFieldElement) -> Result<NumberFieldElement, FieldError> {
        self.check_field(other)?;
        let inv = other.inverse()?;
        self.mul(&inv)
    }

    pub fn pow(&self, mut e: u64) -> Result<NumberFieldElement, FieldError> {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Smallest `m <= max_order` with `self^m = 1`, if any.
    pub fn root_of_unity_order(&self, max_order: u32) -> Option<u32> {
        assert!(!self.is_zero());
        let mut acc = self.clone();
        for m in 1..=max_order {
            if acc.is_one() {
                return Some(m);
            }
            acc = acc.mul(self).expect("same field");
        }
        None
    }
}

impl fmt::Display for NumberFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", format_rational(r));
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{}*a", format_rational(c))?,
                _ => write!(f, "{}*a^{}", format_rational(c), i)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
