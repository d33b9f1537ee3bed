//! Seeded random generation of field elements and weight tables.
//!
//! The randomized checks are exact but sampled: identities universally
//! quantified over the field are verified on seeded pseudo-random elements,
//! so the same seed always visits the same samples and every report can name
//! the seed it was produced with. Coefficients stay small (|p| <= 9,
//! 1 <= q <= 9) to keep the exact arithmetic fast without losing generality
//! of shape.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::FieldElement;
use crate::gamma::{GammaTable, GammaVector};
use crate::poly::{Generators, Monomial, Polynomial};
use crate::rational::{rat, Rational};

/// Default degree bound for sampled rational functions.
pub const DEFAULT_DEGREE: u32 = 4;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A rational p/q with p in -9..=9 and q in 1..=9.
    pub fn rational(&mut self) -> Rational {
        let p = self.rng.gen_range(-9i64..=9);
        let q = self.rng.gen_range(1i64..=9);
        rat(p, q)
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !num_traits::Zero::is_zero(&r) {
                return r;
            }
        }
    }

    fn monomial(&mut self, gens: &Generators, max_degree: u32) -> Monomial {
        let mut budget = self.rng.gen_range(0..=max_degree);
        let mut exps = vec![0u32; gens.len()];
        for e in exps.iter_mut() {
            let take = self.rng.gen_range(0..=budget);
            *e = take;
            budget -= take;
        }
        Monomial::new(exps)
    }

    /// A polynomial with one to four terms of total degree at most
    /// `max_degree`; may be zero.
    pub fn polynomial(&mut self, gens: &Generators, max_degree: u32) -> Polynomial {
        let count = self.rng.gen_range(1..=4usize);
        let mut raw = BTreeMap::new();
        for _ in 0..count {
            let m = self.monomial(gens, max_degree);
            let c = self.rational();
            raw.insert(m, c);
        }
        Polynomial::from_rational_terms(gens, raw)
    }

    pub fn nonzero_polynomial(&mut self, gens: &Generators, max_degree: u32) -> Polynomial {
        loop {
            let p = self.polynomial(gens, max_degree);
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A rational function with numerator and denominator of total degree
    /// at most `max_degree`.
    pub fn element(&mut self, gens: &Generators, max_degree: u32) -> FieldElement {
        let num = self.polynomial(gens, max_degree);
        let den = self.nonzero_polynomial(gens, max_degree);
        FieldElement::from_num_den(num, den).expect("denominator nonzero")
    }

    pub fn nonzero_element(&mut self, gens: &Generators, max_degree: u32) -> FieldElement {
        loop {
            let x = self.element(gens, max_degree);
            if !x.is_zero() {
                return x;
            }
        }
    }

    /// A gamma vector of order n with gamma(0) = 1 and nonzero entries.
    pub fn gamma_vector(&mut self, n: usize) -> GammaVector {
        let mut values = vec![Rational::from_integer(1.into())];
        for _ in 1..=n {
            values.push(self.nonzero_rational());
        }
        GammaVector::new(values).expect("entries nonzero by construction")
    }

    /// A nowhere-zero valid table: either synthesized from a random gamma
    /// vector (hence cocycle-satisfying) or that table with one interior
    /// entry rescaled (generically cocycle-breaking).
    pub fn nowhere_zero_table(&mut self, n: usize) -> GammaTable {
        let table = self.gamma_vector(n).synthesize();
        if self.rng.gen_bool(0.5) {
            return table;
        }
        let interior: Vec<(usize, usize)> = table
            .interior_entries()
            .map(|(i, j, _)| (i, j))
            .collect();
        if interior.is_empty() {
            return table;
        }
        let (pi, pj) = interior[self.rng.gen_range(0..interior.len())];
        let factor = loop {
            let f = self.nonzero_rational();
            if !num_traits::One::is_one(&f) {
                break f;
            }
        };
        GammaTable::from_interior_fn(n, |i, j| {
            let v = table.get(i, j);
            if (i, j) == (pi, pj) || (j, i) == (pi, pj) {
                v * &factor
            } else {
                v
            }
        })
        .expect("n >= 1")
    }
}
