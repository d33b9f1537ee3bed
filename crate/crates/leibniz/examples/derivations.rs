//! First-order derivations from generator assignments: the Leibniz rule
//! extends any assignment uniquely to the whole field, rationals always
//! map to zero, and iterates give the higher powers.

use std::collections::BTreeMap;

use leibniz::derivation::DerivationSpec;
use leibniz::parser::parse_element;
use leibniz::poly::Generators;

fn main() {
    let gens = Generators::new(vec!["t"]).unwrap();
    let parse = |s: &str| parse_element(s, &gens).unwrap();

    // d/dt: the derivation with d(t) = 1
    let mut values = BTreeMap::new();
    values.insert("t".to_string(), parse("1"));
    let ddt = DerivationSpec::new(&gens, &values).unwrap();

    println!("d(t^2)      = {}", ddt.apply(&parse("t^2")));
    println!("d(1/t)      = {}", ddt.apply(&parse("1/t")));
    println!("d(5/7)      = {}", ddt.apply(&parse("5/7")));
    println!("d^3(t^4)    = {}", ddt.iterate(3, &parse("t^4")));

    // the quotient rule is a consequence, not an extra definition
    let q = parse("(t^2 + 1)/(t - 1)");
    println!("d((t^2+1)/(t-1)) = {}", ddt.apply(&q));

    // a different assignment gives a different derivation of the same field
    let mut scaled = BTreeMap::new();
    scaled.insert("t".to_string(), parse("t^2"));
    let d2 = DerivationSpec::new(&gens, &scaled).unwrap();
    println!("with d(t) = t^2: d(1/t) = {}", d2.apply(&parse("1/t")));
    println!("with d(t) = t^2: d^2(t) = {}", d2.iterate(2, &parse("t")));

    // two generators: the chain rule through formal partials
    let gens2 = Generators::new(vec!["s", "t"]).unwrap();
    let mut mixed = BTreeMap::new();
    mixed.insert("s".to_string(), parse_element("1", &gens2).unwrap());
    mixed.insert("t".to_string(), parse_element("s", &gens2).unwrap());
    let dm = DerivationSpec::new(&gens2, &mixed).unwrap();
    let st = parse_element("s*t", &gens2).unwrap();
    println!("d(s) = 1, d(t) = s: d(s*t) = {}", dm.apply(&st));
}
