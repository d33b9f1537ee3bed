//! Hitting a target vector with a graph vector (x, d(x), ..., d^n(x)):
//! numeric evaluation at a transcendental embedding steers an exact
//! rational combination of basis elements toward the target.

use std::collections::BTreeMap;

use leibniz::density::{density_search, DensityError, NumericEmbedding, INITIAL_DENOMINATOR};
use leibniz::derivation::DerivationSpec;
use leibniz::field::FieldElement;
use leibniz::gamma::GammaTable;
use leibniz::poly::Generators;
use leibniz::rational::rat_int;
use leibniz::sequence::{DerivationSequence, SequenceTerm};

fn main() {
    let gens = Generators::new(vec!["t"]).unwrap();
    let mut values = BTreeMap::new();
    values.insert("t".to_string(), FieldElement::one(&gens));
    let ddt = DerivationSpec::new(&gens, &values).unwrap();
    let seq = DerivationSequence::iterates(ddt.clone(), 2);

    // t plays the role of a transcendental real
    let mut assignment = BTreeMap::new();
    assignment.insert("t".to_string(), 3.141592653589793);
    let embedding = NumericEmbedding::new(&gens, &assignment).unwrap();

    // ask for a point whose graph vector sits within 1e-6 of the target
    let target = [0.5, 0.25, -1.0];
    let hit = density_search(&seq, &embedding, &target, 1e-6, 6, INITIAL_DENOMINATOR).unwrap();
    println!("witness  x = {}", hit.witness);
    println!("graph image  {:?}", hit.image);
    println!("target       {:?}", hit.target);
    println!("max error    {:e}", hit.error);

    // the error is recomputed from the exact witness before returning,
    // so a returned result is itself the certificate
    assert!(hit.error < 1e-6);

    // with the zero map in the sequence no graph vector leaves the
    // hyperplane, and the basis vectors cannot span the plane
    let degenerate = DerivationSequence::from_parts(
        ddt,
        GammaTable::binomial(1),
        vec![
            SequenceTerm::Identity,
            SequenceTerm::Iterate { order: 1, scale: rat_int(0) },
        ],
    )
    .unwrap();
    match density_search(&degenerate, &embedding, &[0.0, 1.0], 1e-6, 6, INITIAL_DENOMINATOR) {
        Err(DensityError::SingularSelection { needed, got }) => {
            println!("zero map: only {} of {} usable directions, as it must be", got, needed)
        }
        other => println!("unexpected: {:?}", other),
    }
}
