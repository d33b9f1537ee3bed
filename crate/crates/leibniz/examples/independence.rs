//! Linear independence of the terms d_0, ..., d_n: witness matrices whose
//! exact determinant certifies independence, a search for good points, and
//! exact dependence relations when the terms really are dependent.

use std::collections::BTreeMap;

use leibniz::derivation::DerivationSpec;
use leibniz::field::FieldElement;
use leibniz::gamma::GammaTable;
use leibniz::indep::{
    dependence_certificate, enumerate_basis, find_witness, witness_independence,
};
use leibniz::parser::parse_element;
use leibniz::poly::Generators;
use leibniz::rational::rat_int;
use leibniz::sequence::{DerivationSequence, SequenceTerm};

fn main() {
    let gens = Generators::new(vec!["t"]).unwrap();
    let parse = |s: &str| parse_element(s, &gens).unwrap();
    let mut values = BTreeMap::new();
    values.insert("t".to_string(), FieldElement::one(&gens));
    let ddt = DerivationSpec::new(&gens, &values).unwrap();

    // the basis the certificates are computed over
    let basis: Vec<String> = enumerate_basis(&gens, 2).iter().map(|b| b.to_string()).collect();
    println!("basis up to degree 2: {:?}", basis);

    // (id, d): two points suffice, and the determinant is exact
    let seq = DerivationSequence::iterates(ddt.clone(), 1);
    let (verdict, matrix) = witness_independence(&seq, &[parse("t"), parse("t^2")]);
    println!("det at (t, t^2) = {}  ->  {:?}", matrix.det(), verdict);

    // a zero determinant only means the points were unlucky
    let (verdict, matrix) = witness_independence(&seq, &[parse("t"), parse("2*t")]);
    println!("det at (t, 2*t) = {}  ->  {:?}", matrix.det(), verdict);

    // the search walks basis tuples first, then random elements
    let seq4 = DerivationSequence::iterates(ddt, 3);
    let found = find_witness(&seq4, 4, 500, 0).unwrap();
    println!(
        "witness for (id, d, d^2, d^3): {:?} with det {} after {} attempts",
        found
            .matrix
            .points()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>(),
        found.matrix.det(),
        found.attempts
    );
    println!(
        "no dependence on the basis: {:?}",
        dependence_certificate(&seq4, 3)
    );

    // genuinely dependent terms produce an exact relation instead
    let mut dep_values = BTreeMap::new();
    dep_values.insert("t".to_string(), FieldElement::one(&gens));
    let base = DerivationSpec::new(&gens, &dep_values).unwrap();
    let proportional = DerivationSequence::from_parts(
        base,
        GammaTable::binomial(1),
        vec![
            SequenceTerm::Iterate { order: 1, scale: rat_int(1) },
            SequenceTerm::Iterate { order: 1, scale: rat_int(2) },
        ],
    )
    .unwrap();
    let relation = dependence_certificate(&proportional, 2).unwrap();
    println!(
        "relation for (d, 2d): {:?}",
        relation.iter().map(|c| c.to_string()).collect::<Vec<_>>()
    );
    assert_eq!(verdict_of(&relation), "2*d_0 - d_1 = 0");
    println!("meaning {}", verdict_of(&relation));
}

fn verdict_of(relation: &[leibniz::rational::Rational]) -> String {
    let mut parts = Vec::new();
    for (j, c) in relation.iter().enumerate() {
        if num_traits::Zero::is_zero(c) {
            continue;
        }
        let c = c.to_string();
        match (parts.is_empty(), c.as_str()) {
            (true, "1") => parts.push(format!("d_{}", j)),
            (true, "-1") => parts.push(format!("-d_{}", j)),
            (true, _) => parts.push(format!("{}*d_{}", c, j)),
            (false, "1") => parts.push(format!("+ d_{}", j)),
            (false, "-1") => parts.push(format!("- d_{}", j)),
            (false, _) if c.starts_with('-') => parts.push(format!("- {}*d_{}", &c[1..], j)),
            (false, _) => parts.push(format!("+ {}*d_{}", c, j)),
        }
    }
    format!("{} = 0", parts.join(" "))
}
