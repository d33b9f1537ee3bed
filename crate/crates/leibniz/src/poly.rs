//! Multivariate polynomials over the rationals.
//!
//! The stored form is canonical: a rational `content` factor times a
//! primitive integer term map (coefficient gcd 1, leading coefficient
//! positive under the graded lexicographic order). Equality of polynomials is
//! therefore plain structural equality, and the expensive arithmetic
//! (convolution, gcd) runs on integer coefficients only.
//!
//! The monomial order is graded lexicographic: higher total degree wins, ties
//! are broken by the exponent of the earliest generator.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::gcd;
use crate::rational::{render_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by the zero element")]
    DivisionByZero,
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operands belong to different generator sets")]
    GeneratorMismatch,
}

/// Ordered list of generator names, shared by every value of the field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Generators(Arc<[String]>);

impl Generators {
    pub fn new<S: Into<String>>(names: Vec<S>) -> Result<Self, FieldError> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(FieldError::DuplicateGenerator(name.clone()));
            }
        }
        Ok(Generators(names.into()))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }
}

impl fmt::Debug for Generators {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Generators({:?})", self.0)
    }
}

/// Exponent vector; length always equals the number of generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Box<[u32]>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents.into())
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars].into())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e.into())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Componentwise division; `None` when some exponent of `other` exceeds ours.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<u32>>>()
            .map(|v| Monomial(v.into()))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) type ZTerms = BTreeMap<Monomial, BigInt>;

/// Multivariate polynomial with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    gens: Generators,
    /// Rational factor carrying sign and all denominators; zero iff the
    /// polynomial is zero.
    content: Rational,
    /// Primitive integer part: no zero coefficients, coefficient gcd 1,
    /// leading coefficient positive.
    terms: ZTerms,
}

impl Polynomial {
    pub fn zero(gens: &Generators) -> Self {
        Polynomial {
            gens: gens.clone(),
            content: Rational::zero(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(gens: &Generators) -> Self {
        Self::constant(gens, Rational::one())
    }

    pub fn constant(gens: &Generators, value: Rational) -> Self {
        if value.is_zero() {
            return Self::zero(gens);
        }
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::one(gens.len()), BigInt::one());
        Polynomial {
            gens: gens.clone(),
            content: value,
            terms,
        }
    }

    pub fn generator(gens: &Generators, index: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(gens.len(), index), BigInt::one());
        Polynomial {
            gens: gens.clone(),
            content: Rational::one(),
            terms,
        }
    }

    pub fn monomial(gens: &Generators, mono: Monomial, coeff: Rational) -> Self {
        assert_eq!(mono.exponents().len(), gens.len());
        if coeff.is_zero() {
            return Self::zero(gens);
        }
        let mut terms = BTreeMap::new();
        terms.insert(mono, BigInt::one());
        Polynomial {
            gens: gens.clone(),
            content: coeff,
            terms,
        }
    }

    /// Builds the canonical form from arbitrary rational term data.
    pub fn from_rational_terms(gens: &Generators, raw: BTreeMap<Monomial, Rational>) -> Self {
        let mut den_lcm = BigInt::one();
        for c in raw.values() {
            if !c.is_zero() {
                den_lcm = den_lcm.lcm(c.denom());
            }
        }
        let mut int_terms: ZTerms = BTreeMap::new();
        for (m, c) in raw {
            if c.is_zero() {
                continue;
            }
            let scaled = c.numer() * (&den_lcm / c.denom());
            int_terms.insert(m, scaled);
        }
        Self::from_int_terms(
            gens,
            Rational::new(BigInt::one(), den_lcm),
            int_terms,
        )
    }

    /// Builds the canonical form from `scale` times an integer term map.
    pub(crate) fn from_int_terms(gens: &Generators, scale: Rational, mut terms: ZTerms) -> Self {
        terms.retain(|_, c| !c.is_zero());
        if terms.is_empty() || scale.is_zero() {
            return Self::zero(gens);
        }
        let mut g = BigInt::zero();
        for c in terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        let leading_negative = terms
            .iter()
            .next_back()
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        if leading_negative {
            g = -g;
        }
        if !g.is_one() {
            for c in terms.values_mut() {
                *c = &*c / &g;
            }
        }
        Polynomial {
            gens: gens.clone(),
            content: scale * Rational::from_integer(g),
            terms,
        }
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.content.is_one()
    }

    pub fn is_constant(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => self.terms.keys().next().unwrap().is_one(),
            _ => false,
        }
    }

    /// The value as a rational when the polynomial is constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.content.clone())
        } else {
            None
        }
    }

    /// Total degree; zero for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .next_back()
            .map(|m| m.total_degree())
            .unwrap_or(0)
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.keys().next_back()
    }

    /// Leading coefficient under the graded lexicographic order.
    pub fn leading_coefficient(&self) -> Rational {
        match self.terms.values().next_back() {
            None => Rational::zero(),
            Some(c) => &self.content * Rational::from_integer(c.clone()),
        }
    }

    pub fn coefficient(&self, mono: &Monomial) -> Rational {
        match self.terms.get(mono) {
            None => Rational::zero(),
            Some(c) => &self.content * Rational::from_integer(c.clone()),
        }
    }

    /// Terms in descending monomial order with their rational coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Rational)> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| (m, &self.content * Rational::from_integer(c.clone())))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn content(&self) -> &Rational {
        &self.content
    }

    fn assert_same_gens(&self, other: &Polynomial) {
        assert!(
            self.gens == other.gens,
            "operands belong to different generator sets"
        );
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_gens(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let qa = self.content.denom();
        let qb = other.content.denom();
        let q = qa.lcm(qb);
        let ma = self.content.numer() * (&q / qa);
        let mb = other.content.numer() * (&q / qb);
        let mut raw = BTreeMap::new();
        for (m, c) in &self.terms {
            raw.insert(m.clone(), c * &ma);
        }
        for (m, c) in &other.terms {
            raw.entry(m.clone())
                .and_modify(|acc| *acc += c * &mb)
                .or_insert_with(|| c * &mb);
        }
        Self::from_int_terms(&self.gens, Rational::new(BigInt::one(), q), raw)
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            gens: self.gens.clone(),
            content: -self.content.clone(),
            terms: self.terms.clone(),
        }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.assert_same_gens(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.gens);
        }
        // Gauss: the convolution of primitive integer parts is primitive, and
        // the leading coefficient stays positive, so no renormalization runs.
        let terms = gcd::zterms_mul(&self.terms, &other.terms);
        Polynomial {
            gens: self.gens.clone(),
            content: &self.content * &other.content,
            terms,
        }
    }

    pub fn scale(&self, factor: &Rational) -> Polynomial {
        if factor.is_zero() || self.is_zero() {
            return Self::zero(&self.gens);
        }
        Polynomial {
            gens: self.gens.clone(),
            content: &self.content * factor,
            terms: self.terms.clone(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Self::one(&self.gens);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Formal partial derivative with respect to generator `index`.
    pub fn partial(&self, index: usize) -> Polynomial {
        let mut raw: ZTerms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponents()[index];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[index] -= 1;
            raw.insert(Monomial::new(exps), c * BigInt::from(e));
        }
        Self::from_int_terms(&self.gens, self.content.clone(), raw)
    }

    /// Exact quotient in Q[t1,...,tm]; `None` when `divisor` does not divide.
    pub fn exact_div(&self, divisor: &Polynomial) -> Option<Polynomial> {
        self.assert_same_gens(divisor);
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero(&self.gens));
        }
        let q_terms = gcd::zterms_exact_div(&self.terms, &divisor.terms)?;
        Some(Polynomial {
            gens: self.gens.clone(),
            content: &self.content / &divisor.content,
            terms: q_terms,
        })
    }

    /// The primitive integer part with content 1 and positive leading
    /// coefficient; used as the normal form for gcd results.
    pub fn primitive_part(&self) -> Polynomial {
        if self.is_zero() {
            return self.clone();
        }
        Polynomial {
            gens: self.gens.clone(),
            content: Rational::one(),
            terms: self.terms.clone(),
        }
    }

    /// Floating evaluation together with the accumulated magnitude of the
    /// individual term values (used for relative pole tolerance).
    pub fn eval_f64_with_scale(&self, values: &[f64]) -> (f64, f64) {
        let c = self.content.to_f64().unwrap_or(f64::NAN);
        let mut acc = 0.0f64;
        let mut scale = 0.0f64;
        for (m, coeff) in &self.terms {
            let mut term = coeff.to_f64().unwrap_or(f64::NAN);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    term *= values[i].powi(e as i32);
                }
            }
            acc += term;
            scale += term.abs();
        }
        (c * acc, c.abs() * scale)
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.eval_f64_with_scale(values).0
    }
}

/// Gcd of the primitive parts; the result is primitive with positive leading
/// coefficient (rational contents are units and are ignored).
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    assert!(
        a.generators() == b.generators(),
        "operands belong to different generator sets"
    );
    if a.is_zero() {
        return b.primitive_part();
    }
    if b.is_zero() {
        return a.primitive_part();
    }
    let terms = gcd::gcd_zterms(&a.terms, &b.terms, a.gens.len());
    Polynomial {
        gens: a.gens.clone(),
        content: Rational::one(),
        terms,
    }
}

/// Least common multiple normalized like `poly_gcd`.
pub fn poly_lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero(a.generators());
    }
    let g = poly_gcd(a, b);
    a.primitive_part()
        .mul(&b.primitive_part())
        .exact_div(&g)
        .expect("gcd divides the product")
        .primitive_part()
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (mono, coeff) in self.terms() {
            let negative = coeff.is_negative();
            let abs = if negative { -coeff } else { coeff };
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            for (i, &e) in mono.exponents().iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.gens.names()[i].clone()),
                    _ => factors.push(format!("{}^{}", self.gens.names()[i], e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", render_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", render_rational(&abs), factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({})", self)
    }
}
