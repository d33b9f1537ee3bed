//! Exact linear-independence certificates for the terms of a derivation
//! sequence: witness matrices with exact determinants, a seeded search for
//! witness points, and dependence relations from rational null spaces.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::FieldElement;
use crate::poly::{poly_lcm, Generators, Monomial, Polynomial};
use crate::rational::Rational;
use crate::sample::Sampler;
use crate::sequence::DerivationSequence;

/// All monomials of total degree at most `bound`, followed by the reciprocals
/// of those with positive degree. Degrees ascend; within a degree the first
/// generator's exponent descends, so `[s, t]` at bound 1 lists 1, s, t.
pub fn enumerate_basis(gens: &Generators, bound: u32) -> Vec<FieldElement> {
    let mut monomials = Vec::new();
    for degree in 0..=bound {
        push_exponents(gens.len(), degree, &mut Vec::new(), &mut monomials);
    }
    let mut out: Vec<FieldElement> = monomials.iter().map(|m| monomial_element(gens, m)).collect();
    for m in &monomials {
        if m.total_degree() >= 1 {
            out.push(monomial_element(gens, m).recip().expect("monomial is nonzero"));
        }
    }
    out
}

fn monomial_element(gens: &Generators, m: &Monomial) -> FieldElement {
    FieldElement::from_polynomial(Polynomial::monomial(gens, m.clone(), Rational::one()))
}

fn push_exponents(nvars: usize, budget: u32, stack: &mut Vec<u32>, out: &mut Vec<Monomial>) {
    if stack.len() + 1 == nvars {
        stack.push(budget);
        out.push(Monomial::new(stack.clone()));
        stack.pop();
        return;
    }
    for e in (0..=budget).rev() {
        stack.push(e);
        push_exponents(nvars, budget - e, stack, out);
        stack.pop();
    }
}

/// The matrix M[i][j] = d_j(x_i) over the chosen points, with its exact
/// determinant. A nonzero determinant certifies that no nontrivial relation
/// sum c_j d_j = 0 can hold.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessMatrix {
    points: Vec<FieldElement>,
    entries: Vec<Vec<FieldElement>>,
    det: FieldElement,
}

impl WitnessMatrix {
    /// Requires exactly n+1 points for a sequence of order n.
    pub fn build(seq: &DerivationSequence, points: &[FieldElement]) -> Self {
        assert_eq!(
            points.len(),
            seq.n() + 1,
            "need {} points for order {}",
            seq.n() + 1,
            seq.n()
        );
        let entries: Vec<Vec<FieldElement>> = points
            .iter()
            .map(|x| (0..=seq.n()).map(|j| seq.apply(j, x)).collect())
            .collect();
        let det = determinant(&entries, seq.base().generators());
        WitnessMatrix {
            points: points.to_vec(),
            entries,
            det,
        }
    }

    pub fn points(&self) -> &[FieldElement] {
        &self.points
    }

    pub fn entries(&self) -> &[Vec<FieldElement>] {
        &self.entries
    }

    pub fn det(&self) -> &FieldElement {
        &self.det
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Independent,
    /// det = 0 says nothing by itself: the points may simply be unlucky.
    Inconclusive,
}

pub fn witness_independence(
    seq: &DerivationSequence,
    points: &[FieldElement],
) -> (Verdict, WitnessMatrix) {
    let matrix = WitnessMatrix::build(seq, points);
    let verdict = if matrix.det().is_zero() {
        Verdict::Inconclusive
    } else {
        Verdict::Independent
    };
    (verdict, matrix)
}

fn determinant(entries: &[Vec<FieldElement>], gens: &Generators) -> FieldElement {
    let n = entries.len();
    let mut a: Vec<Vec<FieldElement>> = entries.to_vec();
    let mut det = FieldElement::one(gens);
    let mut negate = false;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return FieldElement::zero(gens);
        };
        if pivot != col {
            a.swap(pivot, col);
            negate = !negate;
        }
        det = det.mul(&a[col][col]);
        let prow = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].div(&prow[col]).expect("pivot is nonzero");
            for (c, entry) in row.iter_mut().enumerate().skip(col) {
                *entry = entry.sub(&f.mul(&prow[c]));
            }
        }
    }
    if negate {
        det.neg()
    } else {
        det
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSearch {
    pub matrix: WitnessMatrix,
    /// Determinants evaluated before this one came out nonzero.
    pub attempts: usize,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no nonzero determinant within {attempts} tuples (not a dependence proof)")]
pub struct Exhausted {
    pub attempts: usize,
}

/// Searches point tuples until some determinant is nonzero: first the
/// (n+1)-subsets of `enumerate_basis(degree_bound)` in lexicographic order,
/// then seeded random tuples, at most `budget` determinants in total.
pub fn find_witness(
    seq: &DerivationSequence,
    degree_bound: u32,
    budget: usize,
    seed: u64,
) -> Result<WitnessSearch, Exhausted> {
    assert!(budget >= 1, "budget must be at least 1");
    let gens = seq.base().generators().clone();
    let want = seq.n() + 1;
    let basis = enumerate_basis(&gens, degree_bound);
    let mut attempts = 0;

    let check = |points: Vec<FieldElement>, attempts: &mut usize| {
        *attempts += 1;
        let matrix = WitnessMatrix::build(seq, &points);
        if matrix.det().is_zero() {
            None
        } else {
            Some(WitnessSearch {
                matrix,
                attempts: *attempts,
            })
        }
    };

    if basis.len() >= want {
        let mut idx: Vec<usize> = (0..want).collect();
        loop {
            if attempts == budget {
                return Err(Exhausted { attempts });
            }
            let points: Vec<FieldElement> = idx.iter().map(|&i| basis[i].clone()).collect();
            if let Some(found) = check(points, &mut attempts) {
                return Ok(found);
            }
            if !next_combination(&mut idx, basis.len()) {
                break;
            }
        }
    }

    let mut sampler = Sampler::new(seed);
    while attempts < budget {
        let points: Vec<FieldElement> = (0..want)
            .map(|_| sampler.element(&gens, degree_bound.max(1)))
            .collect();
        if let Some(found) = check(points, &mut attempts) {
            return Ok(found);
        }
    }
    Err(Exhausted { attempts })
}

/// Advances `idx` to the next k-subset of 0..m in lexicographic order.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if idx[i] != i + m - k {
            break;
        }
    }
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

/// Looks for rationals c_0,...,c_n, not all zero, with
/// sum c_j d_j(b) = 0 for every b in `enumerate_basis(basis_bound)`. The
/// images of each b are put over a common denominator and read off as exact
/// coordinate rows, one per monomial; a relation is a null vector of the
/// stacked rows, returned as a primitive integer vector whose first nonzero
/// entry is positive. The relation is valid on the rational span of the
/// basis; `None` means independence on that span.
pub fn dependence_certificate(
    seq: &DerivationSequence,
    basis_bound: u32,
) -> Option<Vec<Rational>> {
    assert!(basis_bound >= 1, "basis bound must be at least 1");
    let gens = seq.base().generators();
    let cols = seq.n() + 1;
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for b in enumerate_basis(gens, basis_bound) {
        let images: Vec<FieldElement> = (0..cols).map(|j| seq.apply(j, &b)).collect();
        let mut den = Polynomial::one(gens);
        for im in &images {
            den = poly_lcm(&den, im.denominator());
        }
        let nums: Vec<Polynomial> = images
            .iter()
            .map(|im| {
                let cofactor = den
                    .exact_div(im.denominator())
                    .expect("den is a common multiple");
                im.numerator().mul(&cofactor)
            })
            .collect();
        let mut monomials: BTreeSet<Monomial> = BTreeSet::new();
        for p in &nums {
            monomials.extend(p.terms().map(|(m, _)| m.clone()));
        }
        for m in &monomials {
            rows.push(nums.iter().map(|p| p.coefficient(m)).collect());
        }
    }
    nullspace_vector(rows, cols).map(normalize_relation)
}

fn nullspace_vector(mut rows: Vec<Vec<Rational>>, cols: usize) -> Option<Vec<Rational>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        let Some(p) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, p);
        let inv = rows[next][col].recip();
        rows[next] = rows[next].iter().map(|x| x * &inv).collect();
        let prow = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next && !row[col].is_zero() {
                let f = row[col].clone();
                *row = row
                    .iter()
                    .zip(&prow)
                    .map(|(x, p)| x - &(p * &f))
                    .collect();
            }
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    if pivots.len() == cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).unwrap();
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (row, &p) in pivots.iter().enumerate() {
        v[p] = -rows[row][free].clone();
    }
    Some(v)
}

fn normalize_relation(v: Vec<Rational>) -> Vec<Rational> {
    let mut l = BigInt::one();
    for x in &v {
        l = l.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let mut g = BigInt::zero();
    for i in &ints {
        g = g.gcd(i);
    }
    if !g.is_zero() && !g.is_one() {
        for i in ints.iter_mut() {
            *i = &*i / &g;
        }
    }
    if ints.iter().find(|i| !i.is_zero()).is_some_and(Signed::is_negative) {
        for i in ints.iter_mut() {
            *i = -&*i;
        }
    }
    ints.into_iter().map(Rational::from_integer).collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::derivation::DerivationSpec;
    use crate::gamma::GammaTable;
    use crate::parser::parse_element;
    use crate::rational::rat_int;
    use crate::sequence::SequenceTerm;

    fn gens() -> Generators {
        Generators::new(vec!["t"]).unwrap()
    }

    fn unit_deriv() -> DerivationSpec {
        let g = gens();
        let mut m = BTreeMap::new();
        m.insert("t".to_string(), FieldElement::one(&g));
        DerivationSpec::new(&g, &m).unwrap()
    }

    fn el(s: &str) -> FieldElement {
        parse_element(s, &gens()).unwrap()
    }

    fn scaled_first_order(scales: &[i64]) -> DerivationSequence {
        let mut terms = Vec::new();
        for &s in scales {
            terms.push(SequenceTerm::Iterate {
                order: 1,
                scale: rat_int(s),
            });
        }
        let n = scales.len() - 1;
        DerivationSequence::from_parts(unit_deriv(), GammaTable::binomial(n.max(1)), terms)
            .unwrap()
    }

    #[test]
    fn basis_enumeration_order() {
        let got: Vec<String> = enumerate_basis(&gens(), 2)
            .iter()
            .map(|b| b.to_string())
            .collect();
        assert_eq!(got, ["1", "t", "t^2", "1/t", "1/t^2"]);
        assert_eq!(enumerate_basis(&gens(), 0), vec![FieldElement::one(&gens())]);
    }

    #[test]
    fn basis_enumeration_two_generators() {
        let g = Generators::new(vec!["s", "t"]).unwrap();
        let got: Vec<String> = enumerate_basis(&g, 1).iter().map(|b| b.to_string()).collect();
        assert_eq!(got, ["1", "s", "t", "1/s", "1/t"]);
    }

    #[test]
    fn witness_on_monomial_points() {
        let seq = DerivationSequence::iterates(unit_deriv(), 1);
        let (verdict, m) = witness_independence(&seq, &[el("t"), el("t^2")]);
        assert_eq!(verdict, Verdict::Independent);
        assert_eq!(m.entries()[0], vec![el("t"), el("1")]);
        assert_eq!(m.entries()[1], vec![el("t^2"), el("2*t")]);
        assert_eq!(*m.det(), el("t^2"));
    }

    #[test]
    fn zero_term_is_inconclusive() {
        let seq = scaled_first_order(&[1, 0]);
        let (verdict, m) = witness_independence(&seq, &[el("t"), el("t^2")]);
        assert_eq!(verdict, Verdict::Inconclusive);
        assert!(m.det().is_zero());
    }

    #[test]
    fn order_zero_identity_is_independent_at_one() {
        let seq = DerivationSequence::iterates(unit_deriv(), 0);
        let (verdict, m) = witness_independence(&seq, &[el("1")]);
        assert_eq!(verdict, Verdict::Independent);
        assert_eq!(*m.det(), el("1"));
    }

    #[test]
    fn det_changes_sign_under_point_swap() {
        let seq = DerivationSequence::iterates(unit_deriv(), 2);
        let pts = [el("t"), el("t^2"), el("1/t")];
        let swapped = [el("t^2"), el("t"), el("1/t")];
        let d1 = WitnessMatrix::build(&seq, &pts).det().clone();
        let d2 = WitnessMatrix::build(&seq, &swapped).det().clone();
        assert!(!d1.is_zero());
        assert_eq!(d1, d2.neg());
    }

    #[test]
    fn det_scales_linearly_in_each_point() {
        let seq = DerivationSequence::iterates(unit_deriv(), 1);
        let base = WitnessMatrix::build(&seq, &[el("t"), el("t^2")]).det().clone();
        let scaled = WitnessMatrix::build(&seq, &[el("7*t"), el("t^2")]).det().clone();
        assert_eq!(scaled, base.scale(&rat_int(7)));
    }

    #[test]
    fn find_witness_for_iterates() {
        let seq = DerivationSequence::iterates(unit_deriv(), 3);
        let found = find_witness(&seq, 4, 500, 0).unwrap();
        assert!(!found.matrix.det().is_zero());
        assert_eq!(found.matrix.points().len(), 4);
    }

    #[test]
    fn find_witness_exhausts_on_zero_term() {
        let seq = scaled_first_order(&[1, 0]);
        assert_eq!(
            find_witness(&seq, 2, 30, 0),
            Err(Exhausted { attempts: 30 })
        );
    }

    #[test]
    fn find_witness_order_zero() {
        let seq = DerivationSequence::iterates(unit_deriv(), 0);
        let found = find_witness(&seq, 2, 10, 0).unwrap();
        assert_eq!(found.attempts, 1);
        assert_eq!(found.matrix.points(), &[el("1")]);
    }

    #[test]
    fn certificate_for_proportional_terms() {
        let seq = scaled_first_order(&[1, 2]);
        let c = dependence_certificate(&seq, 2).unwrap();
        assert_eq!(c, vec![rat_int(2), rat_int(-1)]);
    }

    #[test]
    fn certificate_for_zero_term_is_unit_vector() {
        let seq = scaled_first_order(&[1, 0]);
        let c = dependence_certificate(&seq, 2).unwrap();
        assert_eq!(c, vec![rat_int(0), rat_int(1)]);
    }

    #[test]
    fn certificate_absent_for_iterates() {
        let seq = DerivationSequence::iterates(unit_deriv(), 2);
        assert_eq!(dependence_certificate(&seq, 3), None);
    }

    #[test]
    fn certificate_annihilates_basis() {
        let seq = scaled_first_order(&[3, 2, 6]);
        let c = dependence_certificate(&seq, 3).unwrap();
        for b in enumerate_basis(&gens(), 3) {
            let mut acc = FieldElement::zero(&gens());
            for (j, cj) in c.iter().enumerate() {
                acc = acc.add(&seq.apply(j, &b).scale(cj));
            }
            assert!(acc.is_zero(), "relation fails at {}", b);
        }
    }

    #[test]
    fn witness_and_certificate_agree() {
        let seq = DerivationSequence::iterates(unit_deriv(), 1);
        let (verdict, _) = witness_independence(&seq, &[el("t"), el("t^2")]);
        assert_eq!(verdict, Verdict::Independent);
        assert_eq!(dependence_certificate(&seq, 3), None);
    }
}
