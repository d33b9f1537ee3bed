//! Order-n Leibniz system checks and the constructive next-order solver.
//!
//! `check_system` verifies d_k(xy) = sum Gamma(i, k-i) d_i(x) d_{k-i}(y)
//! exactly on seeded random pairs; `check_corld_conditions` verifies the
//! three defect identities that make the next order solvable; `solve_next`
//! extends a valid prefix by one order after gating on the cocycle condition
//! and a prefix self-check; `decompose_solution` splits a solver term into
//! the canonical gamma-scaled iterate plus a first-order derivation.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::field::FieldElement;
use crate::gamma::{CocycleReport, FactorizeError, GammaTable};
use crate::sample::{Sampler, DEFAULT_DEGREE};
use crate::sequence::{DerivationSequence, ExtensionTerm, SequenceError, SequenceTerm};

/// Sample count used by the prefix gate inside `solve_next`.
pub const GATE_SAMPLES: usize = 100;
/// Seed used by the prefix gate inside `solve_next`.
pub const GATE_SEED: u64 = 0;

/// One exact failure of the order-k product rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemViolation {
    pub k: usize,
    pub x: FieldElement,
    pub y: FieldElement,
    pub lhs: FieldElement,
    pub rhs: FieldElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemReport {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub violations: Vec<SystemViolation>,
}

impl SystemReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the full system for k = 1..=n on `samples` seeded random pairs.
/// The table must cover the sequence's order; it is taken explicitly so that
/// a sequence can be examined against tables other than its own.
pub fn check_system(
    seq: &DerivationSequence,
    gamma: &GammaTable,
    samples: usize,
    seed: u64,
) -> SystemReport {
    let n = seq.n();
    assert!(gamma.n() >= n, "table does not cover order {}", n);
    let gens = seq.base().generators().clone();
    let mut sampler = Sampler::new(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let x = sampler.element(&gens, DEFAULT_DEGREE);
        let y = sampler.element(&gens, DEFAULT_DEGREE);
        let xy = x.mul(&y);
        let dx: Vec<FieldElement> = (0..=n).map(|i| seq.apply(i, &x)).collect();
        let dy: Vec<FieldElement> = (0..=n).map(|i| seq.apply(i, &y)).collect();
        for k in 1..=n {
            let lhs = seq.apply(k, &xy);
            let mut rhs = FieldElement::zero(&gens);
            for i in 0..=k {
                let w = gamma.get(i, k - i);
                if num_traits::Zero::is_zero(&w) {
                    continue;
                }
                rhs = rhs.add(&dx[i].mul(&dy[k - i]).scale(&w));
            }
            if lhs != rhs {
                violations.push(SystemViolation {
                    k,
                    x: x.clone(),
                    y: y.clone(),
                    lhs,
                    rhs,
                });
            }
        }
    }
    SystemReport {
        n,
        seed,
        samples,
        violations,
    }
}

/// One failure of a defect-form identity.
#[derive(Debug, Clone, PartialEq)]
pub struct CorldViolation {
    /// Which identity failed: "symmetry", "multiplicative", or "additivity".
    pub condition: &'static str,
    pub inputs: Vec<FieldElement>,
    pub lhs: FieldElement,
    pub rhs: FieldElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorldReport {
    /// The order n of the defect D_n under test.
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
    pub violations: Vec<CorldViolation>,
}

impl CorldReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three solvability identities of the defect D_n built from the
/// prefix (orders 0..n-1, so n = prefix order + 1) and the given weights:
/// symmetry, the multiplicative compatibility
/// D(xy,z) + z D(x,y) = D(x,yz) + x D(y,z), and additivity in the first
/// argument, each on `samples` seeded random triples.
pub fn check_corld_conditions(
    prefix: &DerivationSequence,
    gamma: &GammaTable,
    samples: usize,
    seed: u64,
) -> CorldReport {
    let order = prefix.n() + 1;
    assert!(gamma.n() >= order, "table does not cover order {}", order);
    let gens = prefix.base().generators().clone();
    let defect = |x: &FieldElement, y: &FieldElement| prefix.defect_with(gamma, order, x, y);
    let mut sampler = Sampler::new(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let x = sampler.element(&gens, DEFAULT_DEGREE);
        let y = sampler.element(&gens, DEFAULT_DEGREE);
        let z = sampler.element(&gens, DEFAULT_DEGREE);

        let sym_l = defect(&x, &y);
        let sym_r = defect(&y, &x);
        if sym_l != sym_r {
            violations.push(CorldViolation {
                condition: "symmetry",
                inputs: vec![x.clone(), y.clone()],
                lhs: sym_l.clone(),
                rhs: sym_r,
            });
        }

        let mul_l = defect(&x.mul(&y), &z).add(&z.mul(&sym_l));
        let mul_r = defect(&x, &y.mul(&z)).add(&x.mul(&defect(&y, &z)));
        if mul_l != mul_r {
            violations.push(CorldViolation {
                condition: "multiplicative",
                inputs: vec![x.clone(), y.clone(), z.clone()],
                lhs: mul_l,
                rhs: mul_r,
            });
        }

        let add_l = defect(&x.add(&y), &z);
        let add_r = defect(&x, &z).add(&defect(&y, &z));
        if add_l != add_r {
            violations.push(CorldViolation {
                condition: "additivity",
                inputs: vec![x.clone(), y.clone(), z.clone()],
                lhs: add_l,
                rhs: add_r,
            });
        }
    }
    CorldReport {
        order,
        seed,
        samples,
        violations,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("the prefix must start with the identity term")]
    PrefixNotIdentity,
    #[error("table covers orders up to {table}, extension needs {needed}")]
    TableTooSmall { table: usize, needed: usize },
    #[error("table fails the cocycle condition at ({i}, {j}, {k}): {lhs} vs {rhs}",
        i = .0.violations[0].i, j = .0.violations[0].j, k = .0.violations[0].k,
        lhs = .0.violations[0].lhs, rhs = .0.violations[0].rhs)]
    CocycleFailure(CocycleReport),
    #[error("table disagrees with the one the prefix terms were built from")]
    TableConflict,
    #[error("prefix fails its own system check ({count} violations)", count = .0.violations.len())]
    PrefixCheckFailure(SystemReport),
    #[error("choice given for unknown generator `{0}`")]
    UnknownChoiceGenerator(String),
    #[error("choice value uses a different generator set")]
    ChoiceGeneratorMismatch,
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

/// Extends the prefix by one order: the new term takes the chosen values on
/// generators (zero where unspecified) and is otherwise forced by the
/// recursion through the defect D_n. Refuses tables that fail the cocycle
/// condition, and prefixes that fail their own system check.
pub fn solve_next(
    prefix: &DerivationSequence,
    gamma: &GammaTable,
    choices: &BTreeMap<String, FieldElement>,
) -> Result<DerivationSequence, SolveError> {
    let needed = prefix.n() + 1;
    if !prefix.starts_with_identity() {
        return Err(SolveError::PrefixNotIdentity);
    }
    if gamma.n() < needed {
        return Err(SolveError::TableTooSmall {
            table: gamma.n(),
            needed,
        });
    }
    let cocycle = gamma.check_cocycle();
    if !cocycle.passed() {
        return Err(SolveError::CocycleFailure(cocycle));
    }
    let has_extension = prefix
        .terms()
        .iter()
        .any(|t| matches!(t, SequenceTerm::Extension(_)));
    if has_extension && prefix.n() >= 1 {
        let m = prefix.n();
        let old = prefix.gamma().restrict(m).expect("prefix order covered");
        let new = gamma.restrict(m).expect("checked above");
        if old != new {
            return Err(SolveError::TableConflict);
        }
    }
    let gate = check_system(prefix, gamma, GATE_SAMPLES, GATE_SEED);
    if !gate.passed() {
        return Err(SolveError::PrefixCheckFailure(gate));
    }
    let gens = prefix.base().generators();
    for name in choices.keys() {
        if gens.index_of(name).is_none() {
            return Err(SolveError::UnknownChoiceGenerator(name.clone()));
        }
    }
    let mut values = Vec::with_capacity(gens.len());
    for name in gens.names() {
        match choices.get(name) {
            Some(v) => {
                if v.generators() != gens {
                    return Err(SolveError::ChoiceGeneratorMismatch);
                }
                values.push(v.clone());
            }
            None => values.push(FieldElement::zero(gens)),
        }
    }
    Ok(prefix.with_extension(gamma.clone(), ExtensionTerm::new(values))?)
}

/// One failure of the first-order Leibniz rule by the residual map.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualViolation {
    pub x: FieldElement,
    pub y: FieldElement,
    pub lhs: FieldElement,
    pub rhs: FieldElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeReport {
    pub order: usize,
    pub seed: u64,
    pub samples: usize,
    /// The residual's values on the generators, in generator order.
    pub residual_on_generators: Vec<FieldElement>,
    pub violations: Vec<ResidualViolation>,
}

impl DecomposeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn residual_is_zero(&self) -> bool {
        self.residual_on_generators.iter().all(|v| v.is_zero())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecomposeError {
    #[error("the last term of the sequence is not a solver extension")]
    NotExtension,
    #[error("table does not factor, no canonical reference term: {0}")]
    NotFactorizable(FactorizeError),
}

/// Splits the top extension term d_n of the sequence as d_n = e_n + residual,
/// where e_n is the zero-choice solution over the same prefix (for the
/// canonical iterate prefix of a derivation vanishing at order n on the
/// generators, that is the gamma-scaled iterate), and verifies on seeded
/// samples that the residual is a first-order derivation (Leibniz rule,
/// exact). The two terms extend the same prefix, so their defect
/// contributions cancel and only the derivation part remains.
pub fn decompose_solution(
    seq: &DerivationSequence,
    samples: usize,
    seed: u64,
) -> Result<DecomposeReport, DecomposeError> {
    let n = seq.n();
    if !matches!(seq.term(n), SequenceTerm::Extension(_)) {
        return Err(DecomposeError::NotExtension);
    }
    seq.gamma()
        .factorize()
        .map_err(DecomposeError::NotFactorizable)?;
    let gens = seq.base().generators().clone();
    let reference = seq
        .prefix(n - 1)
        .with_extension(
            seq.gamma().clone(),
            ExtensionTerm::new(vec![FieldElement::zero(&gens); gens.len()]),
        )
        .expect("prefix and table come from a valid sequence");
    let residual = |x: &FieldElement| seq.apply(n, x).sub(&reference.apply(n, x));
    let residual_on_generators = (0..gens.len())
        .map(|i| residual(&FieldElement::generator(&gens, i)))
        .collect();
    let mut sampler = Sampler::new(seed);
    let mut violations = Vec::new();
    for _ in 0..samples {
        let x = sampler.element(&gens, DEFAULT_DEGREE);
        let y = sampler.element(&gens, DEFAULT_DEGREE);
        let lhs = residual(&x.mul(&y));
        let rhs = x.mul(&residual(&y)).add(&y.mul(&residual(&x)));
        if lhs != rhs {
            violations.push(ResidualViolation { x, y, lhs, rhs });
        }
    }
    Ok(DecomposeReport {
        order: n,
        seed,
        samples,
        residual_on_generators,
        violations,
    })
}
