//! The constructive solver: check that a prefix satisfies its order-n
//! system, verify the defect identities, extend by one order, and split
//! the new term into a scaled iterate plus a first-order derivation.

use std::collections::BTreeMap;

use leibniz::derivation::DerivationSpec;
use leibniz::gamma::GammaTable;
use leibniz::parser::parse_element;
use leibniz::poly::Generators;
use leibniz::rational::rat_int;
use leibniz::sequence::DerivationSequence;
use leibniz::system::{
    check_corld_conditions, check_system, decompose_solution, solve_next,
};

fn main() {
    let gens = Generators::new(vec!["t"]).unwrap();
    let parse = |s: &str| parse_element(s, &gens).unwrap();
    let mut values = BTreeMap::new();
    values.insert("t".to_string(), parse("1"));
    let ddt = DerivationSpec::new(&gens, &values).unwrap();

    // start from (id, d) under the binomial weights up to order 3
    let table = GammaTable::binomial(3);
    let prefix = DerivationSequence::from_parts(
        ddt,
        table.clone(),
        vec![
            leibniz::sequence::SequenceTerm::Identity,
            leibniz::sequence::SequenceTerm::Iterate {
                order: 1,
                scale: rat_int(1),
            },
        ],
    )
    .unwrap();

    println!(
        "prefix passes its order-1 system: {}",
        check_system(&prefix, &table, 50, 1).passed()
    );

    // the defect D_2 is what the next term must deviate by on products
    let d2 = prefix.defect_with(&table, 2, &parse("t"), &parse("t"));
    println!("D_2(t, t) = {}", d2);

    // its symmetry, product compatibility, and additivity are exactly the
    // solvability conditions for order 2
    println!(
        "defect identities hold: {}",
        check_corld_conditions(&prefix, &table, 50, 1).passed()
    );

    // extend with the choice d_2(t) = t; everything else is forced
    let mut choices = BTreeMap::new();
    choices.insert("t".to_string(), parse("t"));
    let extended = solve_next(&prefix, &table, &choices).unwrap();
    println!("d_2(t^2)  = {}", extended.apply(2, &parse("t^2")));
    println!("d_2(1/t)  = {}", extended.apply(2, &parse("1/t")));
    println!(
        "extension passes the order-2 system: {}",
        check_system(&extended, &table, 50, 1).passed()
    );

    // one more order, defaulting the new choice to zero
    let order3 = solve_next(&extended, &table, &BTreeMap::new()).unwrap();
    println!("d_3(t^3)  = {}", order3.apply(3, &parse("t^3")));
    println!(
        "stacked extension passes the order-3 system: {}",
        check_system(&order3, &table, 50, 1).passed()
    );

    // every solution is the zero-choice solution plus a derivation; here the
    // zero-choice solution is the iterate d^2 itself
    let split = decompose_solution(&extended, 50, 1).unwrap();
    println!(
        "derivation part of d_2, on t: {}",
        split.residual_on_generators[0]
    );
    println!("residual obeys the first-order Leibniz rule: {}", split.passed());

    // tables that break the cocycle identity are refused up front
    let bad = GammaTable::from_interior_fn(4, |i, j| match (i, j) {
        (2, 2) => rat_int(2),
        _ => rat_int(1),
    })
    .unwrap();
    println!(
        "solver refuses a non-cocycle table: {}",
        solve_next(&prefix, &bad, &BTreeMap::new()).unwrap_err()
    );
}
