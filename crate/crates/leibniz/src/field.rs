//! Elements of the rational function field Q(t1,...,tm).
//!
//! An element is stored as `num/den` with the denominator primitive (integer
//! content 1, positive leading coefficient) and coprime to the numerator's
//! primitive part; all rational scaling lives in the numerator's content.
//! Equality is structural.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::poly::{poly_gcd, FieldError, Generators, Polynomial};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    num: Polynomial,
    den: Polynomial,
}

impl FieldElement {
    pub fn zero(gens: &Generators) -> Self {
        FieldElement {
            num: Polynomial::zero(gens),
            den: Polynomial::one(gens),
        }
    }

    pub fn one(gens: &Generators) -> Self {
        FieldElement {
            num: Polynomial::one(gens),
            den: Polynomial::one(gens),
        }
    }

    pub fn constant(gens: &Generators, value: Rational) -> Self {
        FieldElement {
            num: Polynomial::constant(gens, value),
            den: Polynomial::one(gens),
        }
    }

    pub fn generator(gens: &Generators, index: usize) -> Self {
        FieldElement {
            num: Polynomial::generator(gens, index),
            den: Polynomial::one(gens),
        }
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        let den = Polynomial::one(p.generators());
        FieldElement { num: p, den }
    }

    /// Canonicalizes an arbitrary fraction.
    pub fn from_num_den(num: Polynomial, den: Polynomial) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.generators()));
        }
        let g = poly_gcd(&num, &den);
        let num = num.exact_div(&g).expect("gcd divides numerator");
        let den = den.exact_div(&g).expect("gcd divides denominator");
        // push the denominator's content (sign included) into the numerator
        let c = den.content().clone();
        Ok(FieldElement {
            num: num.scale(&c.recip()),
            den: den.primitive_part(),
        })
    }

    pub fn generators(&self) -> &Generators {
        self.num.generators()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_rational()
        } else {
            None
        }
    }

    fn assert_same_gens(&self, other: &FieldElement) {
        assert!(
            self.generators() == other.generators(),
            "operands belong to different generator sets"
        );
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_gens(other);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            let num = self.num.add(&other.num);
            if num.is_zero() {
                return Self::zero(self.generators());
            }
            let g = poly_gcd(&num, &self.den);
            if g.is_one() {
                return FieldElement {
                    num,
                    den: self.den.clone(),
                };
            }
            return FieldElement {
                num: num.exact_div(&g).expect("gcd divides"),
                den: self.den.exact_div(&g).expect("gcd divides").primitive_part(),
            };
        }
        let g = poly_gcd(&self.den, &other.den);
        if g.is_one() {
            // cross sum is automatically reduced when denominators are coprime
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            let den = self.den.mul(&other.den);
            if num.is_zero() {
                return Self::zero(self.generators());
            }
            return FieldElement { num, den };
        }
        let b1 = self.den.exact_div(&g).expect("gcd divides");
        let d1 = other.den.exact_div(&g).expect("gcd divides");
        let t = self.num.mul(&d1).add(&other.num.mul(&b1));
        if t.is_zero() {
            return Self::zero(self.generators());
        }
        let h = poly_gcd(&t, &g);
        let num = t.exact_div(&h).expect("gcd divides");
        let den = g
            .exact_div(&h)
            .expect("gcd divides")
            .mul(&b1)
            .mul(&d1)
            .primitive_part();
        FieldElement { num, den }
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        self.assert_same_gens(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.generators());
        }
        let g1 = poly_gcd(&self.num, &other.den);
        let g2 = poly_gcd(&other.num, &self.den);
        let n1 = self.num.exact_div(&g1).expect("gcd divides");
        let n2 = other.num.exact_div(&g2).expect("gcd divides");
        let d1 = self.den.exact_div(&g2).expect("gcd divides");
        let d2 = other.den.exact_div(&g1).expect("gcd divides");
        FieldElement {
            num: n1.mul(&n2),
            den: d1.mul(&d2),
        }
    }

    pub fn scale(&self, factor: &Rational) -> FieldElement {
        if factor.is_zero() {
            return Self::zero(self.generators());
        }
        FieldElement {
            num: self.num.scale(factor),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let c = self.num.content().clone();
        Ok(FieldElement {
            num: self.den.scale(&c.recip()),
            den: self.num.primitive_part(),
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, exp: i64) -> Result<FieldElement, FieldError> {
        if exp < 0 {
            return self.recip()?.pow(-exp);
        }
        let mut acc = Self::one(self.generators());
        let mut base = self.clone();
        let mut e = exp as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Formal partial derivative by the quotient rule.
    pub fn partial(&self, index: usize) -> FieldElement {
        if self.is_polynomial() {
            return Self::from_polynomial(self.num.partial(index));
        }
        let dn = self.num.partial(index);
        let dd = self.den.partial(index);
        let num = dn.mul(&self.den).sub(&self.num.mul(&dd));
        let den = self.den.mul(&self.den);
        Self::from_num_den(num, den).expect("denominator nonzero")
    }

    /// Floating evaluation; also returns the magnitudes accumulated in the
    /// numerator and denominator so callers can recognize near-pole points.
    pub fn eval_f64_parts(&self, values: &[f64]) -> EvalParts {
        let (num, num_scale) = self.num.eval_f64_with_scale(values);
        let (den, den_scale) = self.den.eval_f64_with_scale(values);
        EvalParts {
            num,
            den,
            num_scale,
            den_scale,
        }
    }
}

/// Raw floating evaluation data for pole-aware sampling.
#[derive(Debug, Clone, Copy)]
pub struct EvalParts {
    pub num: f64,
    pub den: f64,
    pub num_scale: f64,
    pub den_scale: f64,
}

impl EvalParts {
    /// The quotient when the denominator is safely away from zero relative
    /// to the size of its terms; `None` near poles or on overflow.
    pub fn checked_value(&self, rel_tol: f64) -> Option<f64> {
        if !self.den.is_finite() || !self.num.is_finite() {
            return None;
        }
        let floor = self.den_scale.max(1.0) * rel_tol;
        if self.den.abs() <= floor {
            return None;
        }
        let v = self.num / self.den;
        v.is_finite().then_some(v)
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::add(self, rhs)
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::sub(self, rhs)
    }
}

impl Mul for &FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: &FieldElement) -> FieldElement {
        FieldElement::mul(self, rhs)
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        if self.num.term_count() > 1 {
            write!(f, "({})", self.num)?;
        } else {
            write!(f, "{}", self.num)?;
        }
        // a denominator that is a pure generator power needs no parentheses
        let single_var_power = self.den.term_count() == 1
            && self
                .den
                .leading_monomial()
                .map(|m| m.exponents().iter().filter(|&&e| e > 0).count() <= 1)
                .unwrap_or(false)
            && self.den.content().is_one();
        if single_var_power {
            write!(f, "/{}", self.den)
        } else {
            write!(f, "/({})", self.den)
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn gens() -> Generators {
        Generators::new(vec!["t"]).unwrap()
    }

    fn t() -> FieldElement {
        FieldElement::generator(&gens(), 0)
    }

    fn int(n: i64) -> FieldElement {
        FieldElement::constant(&gens(), rat_int(n))
    }

    #[test]
    fn reduction_on_construction() {
        // (t^2 - 1) / (t - 1) = t + 1
        let g = gens();
        let num = t().mul(&t()).sub(&int(1));
        let den = t().sub(&int(1));
        let x = FieldElement::from_num_den(
            num.numerator().clone(),
            den.numerator().clone(),
        )
        .unwrap();
        assert!(x.is_polynomial());
        assert_eq!(x, t().add(&int(1)));
        drop(g);
    }

    #[test]
    fn denominator_sign_and_content_move_to_numerator() {
        // 1 / (-2t) = (-1/2) / t
        let num = Polynomial::one(&gens());
        let den = Polynomial::generator(&gens(), 0).scale(&rat_int(-2));
        let x = FieldElement::from_num_den(num, den).unwrap();
        assert_eq!(x.denominator().to_string(), "t");
        assert_eq!(x.numerator().as_rational(), Some(rat(-1, 2)));
    }

    #[test]
    fn field_axioms_spot_checks() {
        let x = t().add(&int(1)).recip().unwrap(); // 1/(t+1)
        let y = t().recip().unwrap(); // 1/t
        let s = x.add(&y);
        assert_eq!(s.to_string(), "(2*t + 1)/(t^2 + t)");
        assert_eq!(s.sub(&y), x);
        let p = x.mul(&y);
        assert_eq!(p.to_string(), "1/(t^2 + t)");
        assert_eq!(p.div(&y).unwrap(), x);
    }

    #[test]
    fn inverse_round_trip() {
        let x = t().scale(&rat(-3, 4)).add(&int(2)); // -3/4 t + 2
        let inv = x.recip().unwrap();
        assert!(x.mul(&inv).is_one());
    }

    #[test]
    fn pow_negative() {
        let x = t().pow(-2).unwrap();
        assert_eq!(x.to_string(), "1/t^2");
        assert_eq!(x.mul(&t().pow(2).unwrap()), int(1));
    }

    #[test]
    fn zero_division_rejected() {
        assert_eq!(int(1).div(&int(0)), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn partial_quotient_rule() {
        // d/dt (1/t) = -1/t^2
        let x = t().recip().unwrap();
        assert_eq!(x.partial(0), t().pow(-2).unwrap().neg());
    }

    #[test]
    fn display_round_worthy_forms() {
        assert_eq!(int(0).to_string(), "0");
        assert_eq!(t().recip().unwrap().to_string(), "1/t");
        let e = t().add(&int(1)).div(&t().sub(&int(1))).unwrap();
        assert_eq!(e.to_string(), "(t + 1)/(t - 1)");
        let f = t().scale(&rat(1, 2)).div(&t().add(&int(3))).unwrap();
        assert_eq!(f.to_string(), "1/2*t/(t + 3)");
    }

    #[test]
    fn eval_with_pole_guard() {
        let x = t().recip().unwrap();
        let at2 = x.eval_f64_parts(&[2.0]);
        assert_eq!(at2.checked_value(1e-12), Some(0.5));
        let at0 = x.eval_f64_parts(&[0.0]);
        assert_eq!(at0.checked_value(1e-12), None);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn poly_from(coeffs: &[i64]) -> Polynomial {
            let g = gens();
            coeffs.iter().enumerate().fold(
                Polynomial::zero(&g),
                |acc, (e, &c)| {
                    acc.add(&Polynomial::generator(&g, 0).pow(e as u32).scale(&rat_int(c)))
                },
            )
        }

        fn elem() -> impl Strategy<Value = FieldElement> {
            (
                prop::collection::vec(-9i64..=9, 1..5),
                prop::collection::vec(-9i64..=9, 1..5),
            )
                .prop_map(|(num, den)| {
                    let n = poly_from(&num);
                    let mut d = poly_from(&den);
                    if d.is_zero() {
                        d = Polynomial::one(&gens());
                    }
                    FieldElement::from_num_den(n, d).unwrap()
                })
        }

        proptest! {
            #[test]
            fn add_commutes(a in elem(), b in elem()) {
                prop_assert_eq!(a.add(&b), b.add(&a));
            }

            #[test]
            fn mul_associates(a in elem(), b in elem(), c in elem()) {
                prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            }

            #[test]
            fn mul_distributes(a in elem(), b in elem(), c in elem()) {
                prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            }

            #[test]
            fn sub_then_add_round_trips(a in elem(), b in elem()) {
                prop_assert_eq!(a.sub(&b).add(&b), a);
            }

            #[test]
            fn division_inverts_multiplication(a in elem(), b in elem()) {
                prop_assume!(!b.is_zero());
                prop_assert_eq!(a.mul(&b).div(&b).unwrap(), a);
            }

            #[test]
            fn denominator_stays_canonical(a in elem(), b in elem()) {
                let s = a.add(&b);
                let d = s.denominator();
                prop_assert!(!d.is_zero());
                prop_assert!(d.content().is_one());
                prop_assert!(poly_gcd(s.numerator(), d).is_one() || s.is_zero());
            }
        }
    }
}
