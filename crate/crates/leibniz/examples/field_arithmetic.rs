//! Exact arithmetic in a rational function field: parse expressions,
//! reduce them to canonical form, and watch cancellation happen exactly.

use leibniz::parser::parse_element;
use leibniz::poly::Generators;

fn main() {
    let gens = Generators::new(vec!["t"]).unwrap();
    let parse = |s: &str| parse_element(s, &gens).unwrap();

    // canonical form reduces by exact gcd, so this is a polynomial
    let a = parse("(t^2 - 1)/(t - 1)");
    println!("(t^2 - 1)/(t - 1)  =  {}", a);

    // denominators are kept primitive with positive leading coefficient;
    // the rational scale lives in the numerator
    let b = parse("(2/3*t + 2)/(4*t - 2)");
    println!("(2/3*t + 2)/(4*t - 2)  =  {}", b);

    // field axioms hold on the nose, not up to simplification
    let x = parse("(t^2 + 1)/(t - 1)");
    let y = parse("1/(t + 2)");
    let z = parse("t - 5/7");
    let lhs = x.mul(&y.add(&z));
    let rhs = x.mul(&y).add(&x.mul(&z));
    println!("distributivity holds: {}", lhs == rhs);

    let back = x.mul(&y).div(&y).unwrap();
    println!("(x*y)/y == x: {}", back == x);

    // several generators; graded lex order by generator-name order
    let gens2 = Generators::new(vec!["s", "t"]).unwrap();
    let p = parse_element("(s + t)^3", &gens2).unwrap();
    println!("(s + t)^3  =  {}", p);
    let q = parse_element("(s^2 - t^2)/(s - t)", &gens2).unwrap();
    println!("(s^2 - t^2)/(s - t)  =  {}", q);
}
