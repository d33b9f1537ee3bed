//! Weight tables on the triangle i + j <= n: validation, the cocycle
//! identity, and the equivalence between cocycle tables and gamma
//! factorizations, gauge freedom included.

use leibniz::gamma::{GammaTable, GammaVector};
use leibniz::rational::{rat, rat_int};

fn main() {
    // binomial coefficients form the reference table
    let binomial = GammaTable::binomial(6);
    println!("binomial table passes cocycle: {}", binomial.check_cocycle().passed());

    // factorization recovers gamma(k) = k!
    let gamma = binomial.factorize().unwrap();
    println!("gamma of the binomial table: {:?}",
        gamma.values().iter().map(|v| v.to_string()).collect::<Vec<_>>());

    // synthesis goes the other way: gamma(i+j)/(gamma(i) gamma(j))
    let again = gamma.synthesize();
    println!("synthesize(factorize(binomial)) == binomial: {}", again == binomial);

    // gauge freedom: rescaling gamma(k) by c^k leaves the table unchanged
    let rescaled = GammaVector::new(
        gamma.values().iter().enumerate()
            .map(|(k, v)| v * rat(3, 2).pow(k as i32))
            .collect(),
    )
    .unwrap();
    println!("gauge-rescaled gamma gives the same table: {}",
        rescaled.synthesize() == binomial);
    println!("gauge normal form restores it: {}",
        rescaled.gauge_normalized() == gamma.gauge_normalized());

    // a table that fails the cocycle identity cannot factor
    let bad = GammaTable::from_interior_fn(4, |i, j| match (i, j) {
        (2, 2) => rat_int(2),
        _ => rat_int(1),
    })
    .unwrap();
    let report = bad.check_cocycle();
    let first = &report.violations[0];
    println!(
        "perturbed table violates the cocycle at ({}, {}, {}): {} vs {}",
        first.i, first.j, first.k, first.lhs, first.rhs
    );
    println!("and factorize refuses: {}", bad.factorize().unwrap_err());

    // the all-ones table is the other familiar cocycle solution; it weights
    // the Taylor sequence d^k/k! rather than the iterates themselves
    let ones = GammaVector::ones(6).synthesize();
    println!("all-ones table passes cocycle: {}", ones.check_cocycle().passed());
}
