//! First-order derivations defined by generator assignments.
//!
//! A derivation is determined by its values on the generators: it extends
//! uniquely to polynomials by additivity and the product rule, and to
//! quotients by the quotient rule. On a rational function field that
//! extension is the chain rule through the formal partials, which is what
//! `apply` computes; the result is independent of how the input was built
//! because elements are canonical.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::field::FieldElement;
use crate::poly::{Generators, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error("no value assigned to generator `{0}`")]
    MissingValue(String),
    #[error("value assigned to unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("assigned value uses a different generator set")]
    GeneratorMismatch,
}

/// A derivation d on Q(t1,...,tm), given by d(ti) for every generator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationSpec {
    gens: Generators,
    values: Vec<FieldElement>,
}

impl DerivationSpec {
    pub fn new(
        gens: &Generators,
        assignments: &BTreeMap<String, FieldElement>,
    ) -> Result<Self, DerivationError> {
        for name in assignments.keys() {
            if gens.index_of(name).is_none() {
                return Err(DerivationError::UnknownGenerator(name.clone()));
            }
        }
        let mut values = Vec::with_capacity(gens.len());
        for name in gens.names() {
            let v = assignments
                .get(name)
                .ok_or_else(|| DerivationError::MissingValue(name.clone()))?;
            if v.generators() != gens {
                return Err(DerivationError::GeneratorMismatch);
            }
            values.push(v.clone());
        }
        Ok(DerivationSpec {
            gens: gens.clone(),
            values,
        })
    }

    /// The zero derivation.
    pub fn zero(gens: &Generators) -> Self {
        DerivationSpec {
            gens: gens.clone(),
            values: vec![FieldElement::zero(gens); gens.len()],
        }
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    /// d(ti) for generator index i.
    pub fn value(&self, index: usize) -> &FieldElement {
        &self.values[index]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    fn apply_poly(&self, p: &Polynomial) -> FieldElement {
        let mut acc = FieldElement::zero(&self.gens);
        for (i, value) in self.values.iter().enumerate() {
            if value.is_zero() {
                continue;
            }
            let dp = p.partial(i);
            if dp.is_zero() {
                continue;
            }
            acc = acc.add(&FieldElement::from_polynomial(dp).mul(value));
        }
        acc
    }

    /// The unique extension of the generator assignment to the whole field.
    pub fn apply(&self, x: &FieldElement) -> FieldElement {
        assert!(
            x.generators() == &self.gens,
            "argument belongs to a different generator set"
        );
        let dp = self.apply_poly(x.numerator());
        if x.is_polynomial() {
            return dp;
        }
        let dq = self.apply_poly(x.denominator());
        let p = FieldElement::from_polynomial(x.numerator().clone());
        let q = FieldElement::from_polynomial(x.denominator().clone());
        dp.mul(&q)
            .sub(&p.mul(&dq))
            .div(&q.mul(&q))
            .expect("denominator nonzero")
    }

    /// d^k(x), with d^0 the identity.
    pub fn iterate(&self, k: usize, x: &FieldElement) -> FieldElement {
        let mut out = x.clone();
        for _ in 0..k {
            out = self.apply(&out);
        }
        out
    }
}

impl fmt::Display for DerivationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d: ")?;
        for (i, name) in self.gens.names().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} -> {}", name, self.values[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_element;
    use crate::rational::rat;

    fn gens() -> Generators {
        Generators::new(vec!["t"]).unwrap()
    }

    fn deriv(value: &str) -> DerivationSpec {
        let g = gens();
        let mut m = BTreeMap::new();
        m.insert("t".to_string(), parse_element(value, &g).unwrap());
        DerivationSpec::new(&g, &m).unwrap()
    }

    fn el(s: &str) -> FieldElement {
        parse_element(s, &gens()).unwrap()
    }

    #[test]
    fn construction_errors() {
        let g = gens();
        let empty = BTreeMap::new();
        assert_eq!(
            DerivationSpec::new(&g, &empty),
            Err(DerivationError::MissingValue("t".into()))
        );
        let mut wrong = BTreeMap::new();
        wrong.insert("u".to_string(), FieldElement::one(&g));
        assert_eq!(
            DerivationSpec::new(&g, &wrong),
            Err(DerivationError::UnknownGenerator("u".into()))
        );
    }

    #[test]
    fn square_and_reciprocal() {
        let d = deriv("1");
        assert_eq!(d.apply(&el("t^2")), el("2*t"));
        assert_eq!(d.apply(&el("1/t")), el("-1/t^2"));
    }

    #[test]
    fn scaled_generator_value() {
        let d = deriv("t");
        assert_eq!(d.apply(&el("t^2")), el("2*t^2"));
    }

    #[test]
    fn rationals_vanish() {
        for d in [deriv("1"), deriv("t^2"), deriv("(t+1)/(t-1)")] {
            assert!(d.apply(&el("5/7")).is_zero());
            assert!(d.apply(&el("1")).is_zero());
        }
    }

    #[test]
    fn iterates() {
        let d = deriv("1");
        assert_eq!(d.iterate(2, &el("t^3")), el("6*t"));
        assert_eq!(d.iterate(0, &el("t^3 - 1/t")), el("t^3 - 1/t"));
        let dsq = deriv("t^2");
        assert_eq!(dsq.iterate(2, &el("t")), el("2*t^3"));
    }

    #[test]
    fn quotient_rule_against_partial() {
        // for d(t) = 1 the extension is the formal derivative
        let d = deriv("1");
        let x = el("(t^3 - 2*t + 1)/(t^2 + 3)");
        assert_eq!(d.apply(&x), x.partial(0));
    }

    #[test]
    fn multivariate_chain() {
        let g = Generators::new(vec!["s", "t"]).unwrap();
        let mut m = BTreeMap::new();
        m.insert("s".to_string(), parse_element("1", &g).unwrap());
        m.insert("t".to_string(), parse_element("s", &g).unwrap());
        let d = DerivationSpec::new(&g, &m).unwrap();
        // d(s*t) = t*d(s) + s*d(t) = t + s^2
        let st = parse_element("s*t", &g).unwrap();
        assert_eq!(d.apply(&st), parse_element("s^2 + t", &g).unwrap());
    }

    #[test]
    fn zero_derivation() {
        let d = DerivationSpec::zero(&gens());
        assert!(d.is_zero());
        assert!(d.apply(&el("(t^2+1)/(t-1)")).is_zero());
    }

    #[test]
    fn homogeneity_spot_check() {
        let d = deriv("t^2");
        let x = el("(t+1)/(t-1)");
        let q = rat(-7, 3);
        assert_eq!(d.apply(&x.scale(&q)), d.apply(&x).scale(&q));
    }

    mod properties {
        use super::*;
        use crate::poly::Polynomial;
        use crate::rational::rat_int;
        use proptest::prelude::*;

        fn poly_from(coeffs: &[i64]) -> Polynomial {
            let g = gens();
            coeffs.iter().enumerate().fold(Polynomial::zero(&g), |acc, (e, &c)| {
                acc.add(&Polynomial::generator(&g, 0).pow(e as u32).scale(&rat_int(c)))
            })
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

        fn small_deriv() -> impl Strategy<Value = DerivationSpec> {
            prop::collection::vec(-4i64..=4, 1..4).prop_map(|coeffs| {
                let g = gens();
                let mut m = BTreeMap::new();
                m.insert(
                    "t".to_string(),
                    FieldElement::from_polynomial(poly_from(&coeffs)),
                );
                DerivationSpec::new(&g, &m).unwrap()
            })
        }

        proptest! {
            #[test]
            fn additive(d in small_deriv(), x in elem(), y in elem()) {
                prop_assert_eq!(d.apply(&x.add(&y)), d.apply(&x).add(&d.apply(&y)));
            }

            #[test]
            fn leibniz(d in small_deriv(), x in elem(), y in elem()) {
                let lhs = d.apply(&x.mul(&y));
                let rhs = x.mul(&d.apply(&y)).add(&y.mul(&d.apply(&x)));
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn iterate_semigroup(d in small_deriv(), x in elem(), a in 0usize..3, b in 0usize..3) {
                prop_assert_eq!(
                    d.iterate(a + b, &x),
                    d.iterate(a, &d.iterate(b, &x))
                );
            }
        }
    }
}
