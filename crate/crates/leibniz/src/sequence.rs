//! Derivation sequences d_0, ..., d_n and their evaluation.
//!
//! A term is the identity, a scaled iterate of the base derivation, or an
//! extension term constructed by the order-n solver. Extension terms are
//! defined by their generator choices and the recursion
//!
//!   d_n(xy) = x d_n(y) + y d_n(x) + D_n(x, y)
//!
//! on monomials, extended additively and Q-homogeneously to polynomials and
//! through the denominator by solving d_n(p) = d_n(q (p/q)) for d_n(p/q).
//! D_n is the Leibniz defect built from the lower-order terms, so evaluation
//! of a term only ever recurses into strictly earlier terms.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::derivation::DerivationSpec;
use crate::field::FieldElement;
use crate::gamma::{GammaTable, GammaVector};
use crate::poly::Monomial;
use crate::rational::{factorial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("a sequence needs at least the order-0 term")]
    Empty,
    #[error("table covers orders up to {table}, sequence has order {sequence}")]
    TableTooSmall { table: usize, sequence: usize },
    #[error("extension choices must assign a value to every generator")]
    BadChoices,
    #[error("term value uses a different generator set")]
    GeneratorMismatch,
}

/// One term of a derivation sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceTerm {
    Identity,
    /// scale * d^order for the base derivation d.
    Iterate { order: usize, scale: Rational },
    Extension(ExtensionTerm),
}

/// A solver-produced term, determined by its values on the generators.
#[derive(Clone)]
pub struct ExtensionTerm {
    choices: Vec<FieldElement>,
    memo: RefCell<HashMap<Monomial, FieldElement>>,
}

impl ExtensionTerm {
    pub fn new(choices: Vec<FieldElement>) -> Self {
        ExtensionTerm {
            choices,
            memo: RefCell::new(HashMap::new()),
        }
    }

    /// The chosen value on generator index i.
    pub fn choice(&self, index: usize) -> &FieldElement {
        &self.choices[index]
    }

    pub fn choices(&self) -> &[FieldElement] {
        &self.choices
    }
}

impl PartialEq for ExtensionTerm {
    fn eq(&self, other: &Self) -> bool {
        self.choices == other.choices
    }
}

impl fmt::Debug for ExtensionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtensionTerm({:?})", self.choices)
    }
}

/// Sequence of terms d_0, ..., d_n over a base derivation, together with the
/// weight table its identities refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivationSequence {
    base: DerivationSpec,
    gamma: GammaTable,
    terms: Vec<SequenceTerm>,
}

impl DerivationSequence {
    /// Builds a sequence from explicit terms. The first term is normally the
    /// identity; arbitrary additive families (for example (d, 2d)) are
    /// accepted here so that the independence tooling can study them, and the
    /// system-level checks reject them where the identity is required.
    pub fn from_parts(
        base: DerivationSpec,
        gamma: GammaTable,
        terms: Vec<SequenceTerm>,
    ) -> Result<Self, SequenceError> {
        if terms.is_empty() {
            return Err(SequenceError::Empty);
        }
        if gamma.n() < terms.len() - 1 {
            return Err(SequenceError::TableTooSmall {
                table: gamma.n(),
                sequence: terms.len() - 1,
            });
        }
        for term in &terms {
            if let SequenceTerm::Extension(ext) = term {
                if ext.choices.len() != base.generators().len() {
                    return Err(SequenceError::BadChoices);
                }
                if ext
                    .choices
                    .iter()
                    .any(|c| c.generators() != base.generators())
                {
                    return Err(SequenceError::GeneratorMismatch);
                }
            }
        }
        Ok(DerivationSequence { base, gamma, terms })
    }

    /// The canonical sequence e_k = (gamma(k)/k!) d^k.
    pub fn canonical(base: DerivationSpec, gamma: &GammaVector) -> Self {
        let mut terms = vec![SequenceTerm::Identity];
        for k in 1..=gamma.n() {
            terms.push(SequenceTerm::Iterate {
                order: k,
                scale: gamma.get(k) / factorial(k),
            });
        }
        DerivationSequence {
            base,
            gamma: gamma.synthesize(),
            terms,
        }
    }

    /// The iterate sequence (id, d, d^2, ..., d^n) with binomial weights.
    pub fn iterates(base: DerivationSpec, n: usize) -> Self {
        Self::canonical(base, &GammaVector::factorials(n.max(1)))
            .truncate(n)
    }

    fn truncate(mut self, n: usize) -> Self {
        self.terms.truncate(n + 1);
        self
    }

    pub fn n(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn base(&self) -> &DerivationSpec {
        &self.base
    }

    pub fn gamma(&self) -> &GammaTable {
        &self.gamma
    }

    pub fn terms(&self) -> &[SequenceTerm] {
        &self.terms
    }

    pub fn term(&self, k: usize) -> &SequenceTerm {
        &self.terms[k]
    }

    pub fn starts_with_identity(&self) -> bool {
        matches!(self.terms[0], SequenceTerm::Identity)
    }

    /// A copy of the prefix d_0, ..., d_m.
    pub fn prefix(&self, m: usize) -> Self {
        assert!(m < self.terms.len());
        DerivationSequence {
            base: self.base.clone(),
            gamma: self.gamma.clone(),
            terms: self.terms[..=m].to_vec(),
        }
    }

    /// The sequence with one extension term appended, governed by `gamma`.
    /// The table must cover the new order; it becomes the sequence's table,
    /// so callers stacking extensions keep passing the same one.
    pub fn with_extension(
        &self,
        gamma: GammaTable,
        ext: ExtensionTerm,
    ) -> Result<Self, SequenceError> {
        let mut terms = self.terms.clone();
        terms.push(SequenceTerm::Extension(ext));
        Self::from_parts(self.base.clone(), gamma, terms)
    }

    /// d_k(x).
    pub fn apply(&self, k: usize, x: &FieldElement) -> FieldElement {
        assert!(k < self.terms.len(), "term index {} out of range", k);
        match &self.terms[k] {
            SequenceTerm::Identity => x.clone(),
            SequenceTerm::Iterate { order, scale } => {
                self.base.iterate(*order, x).scale(scale)
            }
            SequenceTerm::Extension(ext) => self.apply_extension(k, ext, x),
        }
    }

    /// The graph vector (d_0(x), ..., d_n(x)).
    pub fn graph_vector(&self, x: &FieldElement) -> Vec<FieldElement> {
        (0..self.terms.len()).map(|k| self.apply(k, x)).collect()
    }

    /// The Leibniz defect D_k(x, y) = sum over 0 < i < k of
    /// Gamma(i, k-i) d_i(x) d_{k-i}(y); the interior of the order-k rule.
    /// Weights come from the sequence's own table, which must cover order k.
    pub fn defect(&self, k: usize, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.defect_with(&self.gamma, k, x, y)
    }

    /// `defect` with the weight table supplied by the caller; the sequence
    /// only provides the lower-order terms d_1, ..., d_{k-1}.
    pub fn defect_with(
        &self,
        gamma: &GammaTable,
        k: usize,
        x: &FieldElement,
        y: &FieldElement,
    ) -> FieldElement {
        assert!(k <= gamma.n(), "table does not cover order {}", k);
        assert!(k <= self.terms.len(), "missing terms below order {}", k);
        let mut acc = FieldElement::zero(x.generators());
        for i in 1..k {
            let w = gamma.get(i, k - i);
            if w.is_zero() {
                continue;
            }
            let term = self.apply(i, x).mul(&self.apply(k - i, y));
            acc = acc.add(&term.scale(&w));
        }
        acc
    }

    fn apply_extension(&self, k: usize, ext: &ExtensionTerm, x: &FieldElement) -> FieldElement {
        let dp = self.apply_extension_poly(k, ext, x.numerator().terms());
        if x.is_polynomial() {
            return dp;
        }
        // d_k(p) = q d_k(p/q) + (p/q) d_k(q) + D_k(q, p/q), solved for d_k(p/q)
        let dq = self.apply_extension_poly(k, ext, x.denominator().terms());
        let q = FieldElement::from_polynomial(x.denominator().clone());
        let defect = self.defect(k, &q, x);
        dp.sub(&x.mul(&dq))
            .sub(&defect)
            .div(&q)
            .expect("denominator nonzero")
    }

    fn apply_extension_poly<'a, I>(&self, k: usize, ext: &ExtensionTerm, terms: I) -> FieldElement
    where
        I: Iterator<Item = (&'a Monomial, Rational)>,
    {
        let gens = self.base.generators();
        let mut acc = FieldElement::zero(gens);
        for (mono, coeff) in terms {
            let v = self.extension_on_monomial(k, ext, mono);
            acc = acc.add(&v.scale(&coeff));
        }
        acc
    }

    /// d_k on a single monomial, by the product recursion on the first
    /// generator; memoized per extension term.
    fn extension_on_monomial(&self, k: usize, ext: &ExtensionTerm, m: &Monomial) -> FieldElement {
        let gens = self.base.generators();
        if m.is_one() {
            return FieldElement::zero(gens);
        }
        if let Some(v) = ext.memo.borrow().get(m) {
            return v.clone();
        }
        let g = m
            .exponents()
            .iter()
            .position(|&e| e > 0)
            .expect("nonconstant monomial");
        let value = if m.total_degree() == 1 {
            ext.choices[g].clone()
        } else {
            let mut rest_exps = m.exponents().to_vec();
            rest_exps[g] -= 1;
            let rest = Monomial::new(rest_exps);
            let tg = FieldElement::generator(gens, g);
            let rest_el = FieldElement::from_polynomial(crate::poly::Polynomial::monomial(
                gens,
                rest.clone(),
                Rational::one(),
            ));
            let d_rest = self.extension_on_monomial(k, ext, &rest);
            tg.mul(&d_rest)
                .add(&rest_el.mul(&ext.choices[g]))
                .add(&self.defect(k, &tg, &rest_el))
        };
        ext.memo
            .borrow_mut()
            .insert(m.clone(), value.clone());
        value
    }
}
