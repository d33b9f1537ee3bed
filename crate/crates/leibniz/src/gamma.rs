//! Weight tables on the triangular index set and their factorizations.
//!
//! A `GammaTable` assigns a rational weight to every pair (i,j) with
//! 0 <= i,j and i+j <= n. Symmetry and the boundary rule (weight 1 whenever
//! i*j = 0) are structural: only interior entries with i <= j are stored.
//! `factorize` and `synthesize` convert between nowhere-zero cocycle tables
//! and their gamma vectors; the two directions compose to the identity up to
//! the gauge family gamma(k) -> gamma(k)/c^k.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{binomial, factorial, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("table order must be at least 1, got {0}")]
    OrderTooSmall(usize),
    #[error("gamma vector must start at gamma(0) = 1")]
    GammaZeroNotOne,
    #[error("gamma({0}) is zero")]
    ZeroGammaEntry(usize),
    #[error("gamma vector must contain gamma(0)..gamma(n) with n >= 1")]
    VectorTooShort,
}

/// One defect found while validating raw table entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GammaViolation {
    /// Index pair outside the triangle 0 <= i,j, i+j <= n.
    OutsideDomain { i: usize, j: usize },
    /// Interior pair with no assigned value.
    MissingEntry { i: usize, j: usize },
    /// Gamma(i,j) and Gamma(j,i) both given but unequal.
    Symmetry {
        i: usize,
        j: usize,
        value_ij: Rational,
        value_ji: Rational,
    },
    /// Boundary entry (i*j = 0) with a value other than 1.
    Boundary { i: usize, j: usize, value: Rational },
    /// The same pair supplied twice with different values.
    Conflict { i: usize, j: usize },
}

impl GammaViolation {
    pub fn kind(&self) -> &'static str {
        match self {
            GammaViolation::OutsideDomain { .. } => "outside-domain",
            GammaViolation::MissingEntry { .. } => "missing-entry",
            GammaViolation::Symmetry { .. } => "symmetry",
            GammaViolation::Boundary { .. } => "boundary",
            GammaViolation::Conflict { .. } => "conflict",
        }
    }

    pub fn indices(&self) -> (usize, usize) {
        match *self {
            GammaViolation::OutsideDomain { i, j }
            | GammaViolation::MissingEntry { i, j }
            | GammaViolation::Symmetry { i, j, .. }
            | GammaViolation::Boundary { i, j, .. }
            | GammaViolation::Conflict { i, j } => (i, j),
        }
    }
}

/// Symmetric weight table on the triangle of order n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaTable {
    n: usize,
    /// Interior entries, keyed by (i,j) with 1 <= i <= j and i+j <= n.
    interior: BTreeMap<(usize, usize), Rational>,
}

impl GammaTable {
    /// Builds a table from a function on the interior pairs.
    pub fn from_interior_fn<F>(n: usize, mut f: F) -> Result<Self, GammaError>
    where
        F: FnMut(usize, usize) -> Rational,
    {
        if n < 1 {
            return Err(GammaError::OrderTooSmall(n));
        }
        let mut interior = BTreeMap::new();
        for i in 1..=n {
            for j in i..=(n - i) {
                interior.insert((i, j), f(i, j));
            }
        }
        Ok(GammaTable { n, interior })
    }

    /// The table of binomial coefficients C(i+j, i).
    pub fn binomial(n: usize) -> Self {
        Self::from_interior_fn(n, |i, j| binomial(i + j, i)).expect("n >= 1")
    }

    /// Validates raw (i, j, value) entries, in either index order and with
    /// boundary entries optional. Returns every defect found.
    pub fn validate(
        n: usize,
        raw: &[(usize, usize, Rational)],
    ) -> Result<Self, Vec<GammaViolation>> {
        if n < 1 {
            return Err(vec![GammaViolation::OutsideDomain { i: 0, j: 0 }]);
        }
        let mut seen: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        let mut violations = Vec::new();
        for (i, j, value) in raw.iter().cloned() {
            if i + j > n {
                violations.push(GammaViolation::OutsideDomain { i, j });
                continue;
            }
            if i == 0 || j == 0 {
                if !value.is_one() {
                    violations.push(GammaViolation::Boundary { i, j, value });
                }
                continue;
            }
            match seen.get(&(i, j)) {
                Some(prev) if *prev != value => {
                    violations.push(GammaViolation::Conflict { i, j });
                }
                _ => {
                    seen.insert((i, j), value);
                }
            }
        }
        let mut interior = BTreeMap::new();
        for i in 1..=n {
            for j in i..=(n - i) {
                let lo = seen.get(&(i, j));
                let hi = seen.get(&(j, i)).filter(|_| i != j);
                match (lo, hi) {
                    (Some(a), Some(b)) if a != b => {
                        violations.push(GammaViolation::Symmetry {
                            i,
                            j,
                            value_ij: a.clone(),
                            value_ji: b.clone(),
                        });
                    }
                    (Some(v), _) | (None, Some(v)) => {
                        interior.insert((i, j), v.clone());
                    }
                    (None, None) => {
                        violations.push(GammaViolation::MissingEntry { i, j });
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(GammaTable { n, interior })
        } else {
            Err(violations)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Symmetric lookup on the full triangle.
    pub fn get(&self, i: usize, j: usize) -> Rational {
        assert!(i + j <= self.n, "({}, {}) outside the order-{} triangle", i, j, self.n);
        if i == 0 || j == 0 {
            return Rational::one();
        }
        let key = if i <= j { (i, j) } else { (j, i) };
        self.interior[&key].clone()
    }

    /// Interior entries with i <= j, in index order.
    pub fn interior_entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.interior.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn is_nowhere_zero(&self) -> bool {
        self.interior.values().all(|v| !v.is_zero())
    }

    /// The restriction to the triangle of order m <= n.
    pub fn restrict(&self, m: usize) -> Result<GammaTable, GammaError> {
        if m < 1 || m > self.n {
            return Err(GammaError::OrderTooSmall(m));
        }
        let interior = self
            .interior
            .iter()
            .filter(|(&(i, j), _)| i + j <= m)
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        Ok(GammaTable { n: m, interior })
    }

    /// Exhaustive cocycle check over all triples i,j,k >= 0 with i+j+k <= n,
    /// in lexicographic order.
    pub fn check_cocycle(&self) -> CocycleReport {
        let mut violations = Vec::new();
        for i in 0..=self.n {
            for j in 0..=(self.n - i) {
                for k in 0..=(self.n - i - j) {
                    let lhs = self.get(i + j, k) * self.get(i, j);
                    let rhs = self.get(i, j + k) * self.get(j, k);
                    if lhs != rhs {
                        violations.push(CocycleViolation { i, j, k, lhs, rhs });
                    }
                }
            }
        }
        CocycleReport {
            n: self.n,
            violations,
        }
    }

    /// True when every order k in {2,...,n} has some nonzero interior
    /// weight Gamma(i, k-i).
    pub fn check_order_condition(&self) -> bool {
        (2..=self.n).all(|k| (1..k).any(|i| !self.get(i, k - i).is_zero()))
    }

    /// Recovers the gamma vector of a nowhere-zero cocycle table, or reports
    /// why the table does not factor.
    pub fn factorize(&self) -> Result<GammaVector, FactorizeError> {
        if let Some((&(i, j), _)) = self.interior.iter().find(|(_, v)| v.is_zero()) {
            return Err(FactorizeError::ZeroEntry { i, j });
        }
        let mut values = Vec::with_capacity(self.n + 1);
        values.push(Rational::one());
        if self.n >= 1 {
            values.push(Rational::one());
        }
        for k in 2..=self.n {
            let prev = values[k - 1].clone();
            values.push(prev * self.get(k - 1, 1));
        }
        let gamma = GammaVector { values };
        for (i, j, value) in self.interior_entries() {
            let expected = gamma.ratio(i, j);
            if *value != expected {
                return Err(FactorizeError::Mismatch {
                    i,
                    j,
                    table_value: value.clone(),
                    synthesized_value: expected,
                });
            }
        }
        Ok(gamma)
    }
}

/// Result of the exhaustive cocycle check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleReport {
    pub n: usize,
    pub violations: Vec<CocycleViolation>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub lhs: Rational,
    pub rhs: Rational,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorizeError {
    #[error("table has a zero interior entry at ({i}, {j})")]
    ZeroEntry { i: usize, j: usize },
    #[error("no factorization: entry ({i}, {j}) is {table_value} but the gamma products give {synthesized_value}")]
    Mismatch {
        i: usize,
        j: usize,
        table_value: Rational,
        synthesized_value: Rational,
    },
}

/// Vector gamma(0), ..., gamma(n) with gamma(0) = 1 and no zero entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaVector {
    values: Vec<Rational>,
}

impl GammaVector {
    pub fn new(values: Vec<Rational>) -> Result<Self, GammaError> {
        if values.len() < 2 {
            return Err(GammaError::VectorTooShort);
        }
        if !values[0].is_one() {
            return Err(GammaError::GammaZeroNotOne);
        }
        if let Some(k) = values.iter().position(|v| v.is_zero()) {
            return Err(GammaError::ZeroGammaEntry(k));
        }
        Ok(GammaVector { values })
    }

    /// gamma(k) = k!.
    pub fn factorials(n: usize) -> Self {
        GammaVector {
            values: (0..=n).map(factorial).collect(),
        }
    }

    pub fn ones(n: usize) -> Self {
        GammaVector {
            values: vec![Rational::one(); n + 1],
        }
    }

    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> &Rational {
        &self.values[k]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    fn ratio(&self, i: usize, j: usize) -> Rational {
        &self.values[i + j] / (&self.values[i] * &self.values[j])
    }

    /// The gauge representative with gamma(1) = 1: gamma(k) / gamma(1)^k.
    pub fn gauge_normalized(&self) -> GammaVector {
        let g1 = self.values[1].clone();
        let mut scale = Rational::one();
        let values = self
            .values
            .iter()
            .map(|v| {
                let out = v / &scale;
                scale *= &g1;
                out
            })
            .collect();
        GammaVector { values }
    }

    /// The table with entries gamma(i+j) / (gamma(i) gamma(j)).
    pub fn synthesize(&self) -> GammaTable {
        GammaTable::from_interior_fn(self.n(), |i, j| self.ratio(i, j))
            .expect("vector order >= 1")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn binom_raw(n: usize) -> Vec<(usize, usize, Rational)> {
        let mut raw = Vec::new();
        for i in 0..=n {
            for j in 0..=(n - i) {
                raw.push((i, j, binomial(i + j, i)));
            }
        }
        raw
    }

    #[test]
    fn validate_binomial_full_raw() {
        let t = GammaTable::validate(4, &binom_raw(4)).unwrap();
        assert_eq!(t, GammaTable::binomial(4));
        assert_eq!(t.get(1, 2), rat_int(3));
        assert_eq!(t.get(2, 1), rat_int(3));
        assert_eq!(t.get(0, 4), rat_int(1));
    }

    #[test]
    fn validate_reports_boundary_violation() {
        let raw = vec![
            (0usize, 3usize, rat_int(2)),
            (1, 1, rat_int(2)),
            (1, 2, rat_int(3)),
            (1, 3, rat_int(4)),
            (2, 2, rat_int(6)),
        ];
        let err = GammaTable::validate(4, &raw).unwrap_err();
        assert_eq!(
            err,
            vec![GammaViolation::Boundary {
                i: 0,
                j: 3,
                value: rat_int(2)
            }]
        );
    }

    #[test]
    fn validate_reports_symmetry_violation() {
        let raw = vec![
            (1usize, 1usize, rat_int(2)),
            (1, 2, rat_int(3)),
            (2, 1, rat_int(4)),
        ];
        let err = GammaTable::validate(3, &raw).unwrap_err();
        assert_eq!(
            err,
            vec![GammaViolation::Symmetry {
                i: 1,
                j: 2,
                value_ij: rat_int(3),
                value_ji: rat_int(4),
            }]
        );
    }

    #[test]
    fn validate_reports_missing_and_outside() {
        let raw = vec![(1usize, 1usize, rat_int(2)), (3, 3, rat_int(1))];
        let err = GammaTable::validate(3, &raw).unwrap_err();
        assert!(err.contains(&GammaViolation::OutsideDomain { i: 3, j: 3 }));
        assert!(err.contains(&GammaViolation::MissingEntry { i: 1, j: 2 }));
    }

    #[test]
    fn cocycle_passes_for_binomial_and_ones() {
        assert!(GammaTable::binomial(8).check_cocycle().passed());
        let ones = GammaVector::ones(6).synthesize();
        assert!(ones.check_cocycle().passed());
    }

    #[test]
    fn cocycle_violation_reported_with_values() {
        let t = GammaTable::from_interior_fn(4, |i, j| match (i, j) {
            (2, 2) => rat_int(2),
            _ => rat_int(1),
        })
        .unwrap();
        let report = t.check_cocycle();
        assert!(!report.passed());
        let first = &report.violations[0];
        assert_eq!((first.i, first.j, first.k), (1, 1, 2));
        assert_eq!(first.lhs, rat_int(2));
        assert_eq!(first.rhs, rat_int(1));
    }

    #[test]
    fn order_condition() {
        assert!(GammaTable::binomial(5).check_order_condition());
        let zero11 = GammaTable::from_interior_fn(2, |_, _| rat_int(0)).unwrap();
        assert!(!zero11.check_order_condition());
        let ones = GammaVector::ones(4).synthesize();
        assert!(ones.check_order_condition());
    }

    #[test]
    fn factorize_binomial_gives_factorials() {
        let g = GammaTable::binomial(5).factorize().unwrap();
        let expected: Vec<Rational> = [1, 1, 2, 6, 24, 120].iter().map(|&k| rat_int(k)).collect();
        assert_eq!(g.values(), &expected[..]);
    }

    #[test]
    fn factorize_rejects_zero_entry() {
        let t = GammaTable::from_interior_fn(2, |_, _| rat_int(0)).unwrap();
        assert_eq!(
            t.factorize(),
            Err(FactorizeError::ZeroEntry { i: 1, j: 1 })
        );
    }

    #[test]
    fn factorize_mismatch_certificate() {
        // nowhere-zero variant of the cocycle-violating table
        let t = GammaTable::from_interior_fn(4, |i, j| match (i, j) {
            (2, 2) => rat_int(2),
            _ => rat_int(1),
        })
        .unwrap();
        match t.factorize() {
            Err(FactorizeError::Mismatch {
                i,
                j,
                table_value,
                synthesized_value,
            }) => {
                assert_eq!((i, j), (2, 2));
                assert_eq!(table_value, rat_int(2));
                assert_eq!(synthesized_value, rat_int(1));
            }
            other => panic!("expected mismatch, got {:?}", other),
        }
    }

    #[test]
    fn synthesize_factorials_and_gauge() {
        let t = GammaVector::factorials(3).synthesize();
        assert_eq!(t.get(1, 1), rat_int(2));
        assert_eq!(t.get(1, 2), rat_int(3));
        let c = rat(5, 7);
        let powers = GammaVector::new(
            (0..=4)
                .scan(Rational::one(), |acc, _| {
                    let out = acc.clone();
                    *acc *= &c;
                    Some(out)
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(powers.synthesize(), GammaVector::ones(4).synthesize());
    }

    #[test]
    fn round_trip_table_to_vector() {
        let t = GammaTable::binomial(6);
        assert_eq!(t.factorize().unwrap().synthesize(), t);
    }

    #[test]
    fn gauge_normalization() {
        // gamma(k) = 2^k * k! has gamma-normal form k!
        let g = GammaVector::new(
            (0..=4)
                .map(|k| factorial(k) * rat_int(2).pow(k as i32))
                .collect(),
        )
        .unwrap();
        assert_eq!(g.gauge_normalized(), GammaVector::factorials(4));
        assert_eq!(g.synthesize(), GammaVector::factorials(4).synthesize());
    }

    #[test]
    fn restriction() {
        let t = GammaTable::binomial(5);
        let r = t.restrict(3).unwrap();
        assert_eq!(r, GammaTable::binomial(3));
        assert!(t.restrict(0).is_err());
    }

    #[test]
    fn vector_invariants_enforced() {
        assert!(matches!(
            GammaVector::new(vec![rat_int(2), rat_int(1)]),
            Err(GammaError::GammaZeroNotOne)
        ));
        assert!(matches!(
            GammaVector::new(vec![rat_int(1), rat_int(0)]),
            Err(GammaError::ZeroGammaEntry(1))
        ));
    }
}
