//! Floating evaluation at a numeric embedding, and the density search:
//! approximating a target vector by the graph vector (d_0(x),...,d_n(x))
//! of an element x assembled from rational multiples of basis monomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::FromPrimitive;
use thiserror::Error;

use crate::field::FieldElement;
use crate::indep::enumerate_basis;
use crate::poly::Generators;
use crate::rational::Rational;
use crate::sequence::DerivationSequence;

/// A denominator whose value falls below this times its magnitude scale
/// counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;
/// Reject a selection pivot below this fraction of the largest pivot seen.
pub const PIVOT_FLOOR: f64 = 1e-8;
/// Default starting cap for rational rounding denominators.
pub const INITIAL_DENOMINATOR: u64 = 1_000_000;
/// Denominator doublings to try before giving up.
const MAX_RETRIES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmbeddingError {
    #[error("no value for generator `{0}`")]
    MissingValue(String),
    #[error("value given for unknown generator `{0}`")]
    UnknownGenerator(String),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("denominator vanishes at the embedding")]
pub struct PoleError;

/// Real values for the generators. The intended values are algebraically
/// independent transcendentals; that cannot be verified here, so callers
/// should carry the embedding alongside any result that depends on it.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericEmbedding {
    gens: Generators,
    values: Vec<f64>,
}

impl NumericEmbedding {
    pub fn new(gens: &Generators, values: &BTreeMap<String, f64>) -> Result<Self, EmbeddingError> {
        for name in values.keys() {
            if gens.index_of(name).is_none() {
                return Err(EmbeddingError::UnknownGenerator(name.clone()));
            }
        }
        let mut ordered = Vec::with_capacity(gens.len());
        for name in gens.names() {
            match values.get(name) {
                Some(v) => ordered.push(*v),
                None => return Err(EmbeddingError::MissingValue(name.clone())),
            }
        }
        Ok(NumericEmbedding {
            gens: gens.clone(),
            values: ordered,
        })
    }

    pub fn generators(&self) -> &Generators {
        &self.gens
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, x: &FieldElement) -> Result<f64, PoleError> {
        assert_eq!(x.generators(), &self.gens, "generator sets differ");
        x.eval_f64_parts(&self.values)
            .checked_value(POLE_TOLERANCE)
            .ok_or(PoleError)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    pub witness: FieldElement,
    /// Graph vector of the witness at the embedding.
    pub image: Vec<f64>,
    pub target: Vec<f64>,
    /// max-norm distance between image and target, re-evaluated from the
    /// exact witness; always < the eps the search was asked for.
    pub error: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("only {got} of {needed} numerically independent basis vectors; enlarge the degree bound")]
    SingularSelection { needed: usize, got: usize },
    #[error("best error {best:e} after {retries} rounding attempts")]
    RetriesExhausted { best: f64, retries: usize },
}

/// Looks for x with max-norm distance below `eps` between the graph vector
/// of x at the embedding and `target`. Basis elements up to `degree_bound`
/// supply numeric graph vectors; a greedily pivoted subset of n+1 of them
/// spans a real solution, whose coefficients are rounded to rationals with
/// denominators capped at `max_denominator`, doubling the cap while the
/// exactly re-evaluated error stays at or above eps.
pub fn density_search(
    seq: &DerivationSequence,
    embedding: &NumericEmbedding,
    target: &[f64],
    eps: f64,
    degree_bound: u32,
    max_denominator: u64,
) -> Result<DensityResult, DensityError> {
    let n = seq.n();
    assert_eq!(target.len(), n + 1, "target length must be {}", n + 1);
    assert!(eps > 0.0, "eps must be positive");
    let gens = seq.base().generators();
    assert_eq!(embedding.generators(), gens, "generator sets differ");

    let mut candidates: Vec<(FieldElement, Vec<f64>)> = Vec::new();
    for b in enumerate_basis(gens, degree_bound) {
        let mut v = Vec::with_capacity(n + 1);
        let mut usable = true;
        for j in 0..=n {
            match embedding.eval(&seq.apply(j, &b)) {
                Ok(x) if x.is_finite() => v.push(x),
                _ => {
                    usable = false;
                    break;
                }
            }
        }
        if usable {
            candidates.push((b, v));
        }
    }

    let selected = select_pivoted(&candidates, n + 1)?;
    let mut matrix: Vec<Vec<f64>> = (0..=n)
        .map(|r| selected.iter().map(|&i| candidates[i].1[r]).collect())
        .collect();
    let alphas = solve_dense(&mut matrix, target).ok_or(DensityError::SingularSelection {
        needed: n + 1,
        got: n,
    })?;

    let mut cap = max_denominator.max(1);
    let mut best = f64::INFINITY;
    for retry in 0..=MAX_RETRIES {
        let mut witness = FieldElement::zero(gens);
        for (&a, &i) in alphas.iter().zip(&selected) {
            witness = witness.add(&candidates[i].0.scale(&best_rational(a, cap)));
        }
        let mut image = Vec::with_capacity(n + 1);
        for j in 0..=n {
            match embedding.eval(&seq.apply(j, &witness)) {
                Ok(v) => image.push(v),
                Err(PoleError) => break,
            }
        }
        if image.len() == n + 1 {
            let error = image
                .iter()
                .zip(target)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if error < eps {
                return Ok(DensityResult {
                    witness,
                    image,
                    target: target.to_vec(),
                    error,
                });
            }
            best = best.min(error);
        }
        if retry < MAX_RETRIES {
            cap = cap.saturating_mul(2);
        }
    }
    Err(DensityError::RetriesExhausted {
        best,
        retries: MAX_RETRIES + 1,
    })
}

/// Greedy complete pivoting: repeatedly takes the (vector, coordinate) pair
/// with the largest magnitude among unused ones, then eliminates that
/// coordinate from the rest. Ensures the chosen vectors are far from
/// numerically dependent, so the later rounding step is not amplified.
fn select_pivoted(
    candidates: &[(FieldElement, Vec<f64>)],
    want: usize,
) -> Result<Vec<usize>, DensityError> {
    let mut work: Vec<Vec<f64>> = candidates.iter().map(|(_, v)| v.clone()).collect();
    let mut taken = vec![false; work.len()];
    let mut coord_done = vec![false; want];
    let mut selected = Vec::with_capacity(want);
    let mut running_max = 0.0_f64;
    for _ in 0..want {
        let mut bi = usize::MAX;
        let mut bc = 0;
        let mut bv = 0.0_f64;
        for (i, w) in work.iter().enumerate() {
            if taken[i] {
                continue;
            }
            for (c, &x) in w.iter().enumerate() {
                if !coord_done[c] && x.abs() > bv {
                    bi = i;
                    bc = c;
                    bv = x.abs();
                }
            }
        }
        if bi == usize::MAX || bv < PIVOT_FLOOR * running_max.max(bv) {
            return Err(DensityError::SingularSelection {
                needed: want,
                got: selected.len(),
            });
        }
        running_max = running_max.max(bv);
        taken[bi] = true;
        coord_done[bc] = true;
        selected.push(bi);
        let pivot_row = work[bi].clone();
        for (i, w) in work.iter_mut().enumerate() {
            if taken[i] {
                continue;
            }
            let f = w[bc] / pivot_row[bc];
            if f != 0.0 {
                for (x, p) in w.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
    }
    Ok(selected)
}

fn solve_dense(a: &mut [Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[pivot][col] == 0.0 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[row][c] -= f * a[col][c];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for c in row + 1..n {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Best rational approximation to `x` with denominator at most `max_den`,
/// via continued-fraction convergents plus the final semiconvergent.
fn best_rational(x: f64, max_den: u64) -> Rational {
    debug_assert!(x.is_finite());
    let target = x.abs();
    if target >= 9.0e15 {
        // degenerate solve output; the exact re-check will reject it
        return Rational::from_f64(x).unwrap_or_default();
    }
    let cap = i128::from(max_den.max(1));
    let a0 = target.floor();
    let (mut pp, mut qp): (i128, i128) = (1, 0);
    let (mut pc, mut qc): (i128, i128) = (a0 as i128, 1);
    let mut frac = target - a0;
    loop {
        if frac <= f64::EPSILON * target.max(1.0) {
            break;
        }
        let inv = frac.recip();
        if inv >= 9.0e15 {
            break;
        }
        let a = inv.floor();
        let next_p = a as i128 * pc + pp;
        let next_q = a as i128 * qc + qp;
        if next_q > cap {
            let t = (cap - qp) / qc;
            if t >= 1 {
                let ps = t * pc + pp;
                let qs = t * qc + qp;
                let conv = pc as f64 / qc as f64;
                let semi = ps as f64 / qs as f64;
                if (semi - target).abs() < (conv - target).abs() {
                    pc = ps;
                    qc = qs;
                }
            }
            break;
        }
        pp = pc;
        qp = qc;
        pc = next_p;
        qc = next_q;
        frac = inv - a;
    }
    let r = Rational::new(BigInt::from(pc), BigInt::from(qc));
    if x < 0.0 {
        -r
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::DerivationSpec;
    use crate::parser::parse_element;
    use crate::rational::{rat, rat_int};
    use crate::sequence::SequenceTerm;
    use crate::gamma::GammaTable;

    const PI: f64 = 3.141592653589793;

    fn gens() -> Generators {
        Generators::new(vec!["t"]).unwrap()
    }

    fn unit_deriv() -> DerivationSpec {
        let g = gens();
        let mut m = BTreeMap::new();
        m.insert("t".to_string(), FieldElement::one(&g));
        DerivationSpec::new(&g, &m).unwrap()
    }

    fn embed(v: f64) -> NumericEmbedding {
        let mut m = BTreeMap::new();
        m.insert("t".to_string(), v);
        NumericEmbedding::new(&gens(), &m).unwrap()
    }

    fn el(s: &str) -> FieldElement {
        parse_element(s, &gens()).unwrap()
    }

    #[test]
    fn embedding_evaluates_rational_functions() {
        let e = embed(3.0);
        assert_eq!(e.eval(&el("(t^2+1)/(t-1)")).unwrap(), 5.0);
        let two_thirds = e.eval(&el("2/3")).unwrap();
        assert!((two_thirds - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn embedding_reports_poles() {
        let e = embed(1.0);
        assert_eq!(e.eval(&el("(t^2+1)/(t-1)")), Err(PoleError));
    }

    #[test]
    fn embedding_validates_generator_names() {
        let mut m = BTreeMap::new();
        m.insert("u".to_string(), 1.0);
        assert_eq!(
            NumericEmbedding::new(&gens(), &m),
            Err(EmbeddingError::UnknownGenerator("u".into()))
        );
        assert_eq!(
            NumericEmbedding::new(&gens(), &BTreeMap::new()),
            Err(EmbeddingError::MissingValue("t".into()))
        );
    }

    #[test]
    fn best_rational_recovers_exact_fractions() {
        assert_eq!(best_rational(0.5, 1_000_000), rat(1, 2));
        assert_eq!(best_rational(-2.25, 1_000_000), rat(-9, 4));
        assert_eq!(best_rational(3.0, 10), rat_int(3));
    }

    #[test]
    fn best_rational_respects_denominator_cap() {
        // below 113 the best is the semiconvergent 311/99, not 22/7
        assert_eq!(best_rational(PI, 100), rat(311, 99));
        assert_eq!(best_rational(PI, 113), rat(355, 113));
    }

    #[test]
    fn best_rational_prefers_semiconvergents() {
        // convergents of 0.367 are 0, 1/2, 1/3, 7/19(...); with cap 5 the
        // semiconvergent 2/5 beats the convergent 1/3
        let r = best_rational(0.367, 5);
        assert_eq!(r, rat(2, 5));
    }

    #[test]
    fn density_hits_target_in_the_plane() {
        let seq = DerivationSequence::iterates(unit_deriv(), 1);
        let res = density_search(&seq, &embed(PI), &[0.5, 0.5], 1e-6, 3, INITIAL_DENOMINATOR)
            .unwrap();
        assert!(res.error < 1e-6);
        let exact_err = res
            .image
            .iter()
            .zip(&res.target)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert_eq!(res.error, exact_err);
    }

    #[test]
    fn rational_targets_come_out_near_exact() {
        let seq = DerivationSequence::iterates(unit_deriv(), 2);
        let res = density_search(
            &seq,
            &embed(PI),
            &[0.75, 0.0, 0.0],
            1e-9,
            3,
            INITIAL_DENOMINATOR,
        )
        .unwrap();
        assert!(res.error < 1e-9);
    }

    #[test]
    fn zero_term_makes_selection_singular() {
        let zero_term = DerivationSequence::from_parts(
            unit_deriv(),
            GammaTable::binomial(1),
            vec![
                SequenceTerm::Identity,
                SequenceTerm::Iterate {
                    order: 1,
                    scale: rat_int(0),
                },
            ],
        )
        .unwrap();
        match density_search(&zero_term, &embed(PI), &[0.0, 1.0], 1e-6, 4, INITIAL_DENOMINATOR) {
            Err(DensityError::SingularSelection { needed: 2, got: 1 }) => {}
            other => panic!("expected singular selection, got {:?}", other),
        }
    }

    #[test]
    fn search_is_deterministic() {
        let seq = DerivationSequence::iterates(unit_deriv(), 2);
        let run = || {
            density_search(
                &seq,
                &embed(PI),
                &[0.5, 0.25, -1.0],
                1e-6,
                6,
                INITIAL_DENOMINATOR,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.image, b.image);
    }
}
