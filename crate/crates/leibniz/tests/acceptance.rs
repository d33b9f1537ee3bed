//! Exit gate for the crate. Each test pins one advertised guarantee at a
//! fixed scale and time budget, so the target prints one pass/fail line per
//! guarantee. Everything here is exact except the density search, whose
//! tolerance is part of its contract.

use std::collections::BTreeMap;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_traits::Zero;

use leibniz::density::{density_search, NumericEmbedding, INITIAL_DENOMINATOR};
use leibniz::derivation::DerivationSpec;
use leibniz::gamma::GammaTable;
use leibniz::indep::{dependence_certificate, find_witness};
use leibniz::json::{SequenceDoc, TableDoc};
use leibniz::parser::parse_element;
use leibniz::poly::Generators;
use leibniz::rational::{factorial, rat_int};
use leibniz::sample::Sampler;
use leibniz::sequence::{DerivationSequence, SequenceTerm};
use leibniz::system::{
    check_corld_conditions, check_system, decompose_solution, solve_next, SolveError,
};

fn gens() -> Generators {
    Generators::new(vec!["t"]).unwrap()
}

/// d with d(t) given by `value`, on the rational functions in t.
fn spec_with(value: &str) -> DerivationSpec {
    let g = gens();
    let mut values = BTreeMap::new();
    values.insert("t".to_string(), parse_element(value, &g).unwrap());
    DerivationSpec::new(&g, &values).unwrap()
}

/// The sequence (id, 0): identity followed by the zero map.
fn identity_then_zero() -> DerivationSequence {
    DerivationSequence::from_parts(
        spec_with("1"),
        GammaTable::binomial(1),
        vec![
            SequenceTerm::Identity,
            SequenceTerm::Iterate {
                order: 1,
                scale: rat_int(0),
            },
        ],
    )
    .unwrap()
}

#[test]
fn binomial_table_of_order_ten_checks_out_exactly() {
    let start = Instant::now();
    let table = GammaTable::binomial(10);

    let raw: Vec<_> = table
        .interior_entries()
        .map(|(i, j, v)| (i, j, v.clone()))
        .collect();
    assert_eq!(GammaTable::validate(10, &raw).unwrap(), table);

    let report = table.check_cocycle();
    assert!(report.passed(), "{:?}", report.violations.first());

    let gamma = table.factorize().unwrap();
    for k in 0..=10 {
        assert_eq!(*gamma.get(k), factorial(k));
    }
    assert_eq!(gamma.synthesize(), table);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {:?}", elapsed);
}

#[test]
fn synthesized_tables_factor_back_to_the_gauge_normal_form() {
    let start = Instant::now();
    let mut sampler = Sampler::new(6021);
    for round in 0..100usize {
        let n = 1 + round % 8;
        let g = sampler.gamma_vector(n);
        let table = g.synthesize();
        let recovered = table.factorize().unwrap();
        assert_eq!(recovered, g.gauge_normalized(), "round {} order {}", round, n);
        assert_eq!(recovered.synthesize(), table, "round {} order {}", round, n);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {:?}", elapsed);
}

#[test]
fn cocycle_and_factorizability_agree_on_sampled_tables() {
    let mut sampler = Sampler::new(414);
    let mut passes = 0usize;
    let mut failures = 0usize;
    for round in 0..200usize {
        let n = 1 + round % 6;
        let table = sampler.nowhere_zero_table(n);
        let satisfies_cocycle = table.check_cocycle().passed();
        let factors = table.factorize().is_ok();
        assert_eq!(
            satisfies_cocycle, factors,
            "round {} (order {}) splits the equivalence",
            round, n
        );
        if satisfies_cocycle {
            passes += 1;
        } else {
            failures += 1;
        }
    }
    // the sampler perturbs half its tables, so both sides must show up
    assert!(passes > 0 && failures > 0, "{} / {}", passes, failures);
}

#[test]
fn iterated_derivations_satisfy_the_binomial_product_rule() {
    let start = Instant::now();
    for value in ["1", "t^2"] {
        let seq = DerivationSequence::iterates(spec_with(value), 6);
        let report = check_system(&seq, &GammaTable::binomial(6), 500, 2718);
        assert!(
            report.passed(),
            "d(t) = {}: {:?}",
            value,
            report.violations.first()
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {:?}", elapsed);
}

#[test]
fn extension_towers_pass_every_order_check() {
    let start = Instant::now();
    let g = gens();
    let gamma = GammaTable::binomial(3);
    let prefix = DerivationSequence::iterates(spec_with("1"), 1);
    assert!(check_corld_conditions(&prefix, &gamma, 300, 31).passed());

    let defaulted = BTreeMap::new();
    let mut quadratic = BTreeMap::new();
    quadratic.insert("t".to_string(), parse_element("t^2", &g).unwrap());
    let mut linear = BTreeMap::new();
    linear.insert("t".to_string(), parse_element("t", &g).unwrap());

    for second in [&defaulted, &quadratic] {
        let order2 = solve_next(&prefix, &gamma, second).unwrap();
        assert!(check_system(&order2, &gamma, 1000, 37).passed());
        assert!(decompose_solution(&order2, 300, 41).unwrap().passed());
        assert!(check_corld_conditions(&order2, &gamma, 300, 43).passed());
        for third in [&defaulted, &linear] {
            let order3 = solve_next(&order2, &gamma, third).unwrap();
            assert!(check_system(&order3, &gamma, 1000, 47).passed());
            assert!(decompose_solution(&order3, 300, 53).unwrap().passed());
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {:?}", elapsed);
}

#[test]
fn the_perturbed_table_is_reported_and_refused() {
    let bad = GammaTable::from_interior_fn(4, |i, j| {
        if (i, j) == (2, 2) {
            rat_int(2)
        } else {
            rat_int(1)
        }
    })
    .unwrap();

    let report = bad.check_cocycle();
    let first = report.violations.first().expect("the table must fail");
    assert_eq!((first.i, first.j, first.k), (1, 1, 2));
    assert_eq!(first.lhs, rat_int(2));
    assert_eq!(first.rhs, rat_int(1));

    let prefix = DerivationSequence::iterates(spec_with("1"), 3);
    match solve_next(&prefix, &bad, &BTreeMap::new()) {
        Err(SolveError::CocycleFailure(inner)) => {
            assert_eq!(inner.violations.first(), report.violations.first());
        }
        Err(other) => panic!("wrong refusal: {}", other),
        Ok(_) => panic!("a non-cocycle table was accepted"),
    }
}

#[test]
fn witnesses_exist_up_to_order_six_and_the_zero_map_is_caught() {
    let start = Instant::now();
    for n in 1..=6usize {
        let seq = DerivationSequence::iterates(spec_with("1"), n);
        let found = find_witness(&seq, n as u32 + 2, 500, 0).unwrap();
        assert!(!found.matrix.det().is_zero(), "order {}", n);
    }

    let relation = dependence_certificate(&identity_then_zero(), 2)
        .expect("the zero map is dependent");
    assert_eq!(relation.len(), 2);
    assert!(relation.iter().any(|c| !c.is_zero()));

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {:?}", elapsed);
}

#[test]
fn density_search_hits_a_plane_target_and_reports_failure_honestly() {
    let start = Instant::now();
    let g = gens();
    let mut at_pi = BTreeMap::new();
    at_pi.insert("t".to_string(), 3.141592653589793f64);
    let embedding = NumericEmbedding::new(&g, &at_pi).unwrap();

    let seq = DerivationSequence::iterates(spec_with("1"), 2);
    let target = [0.5, 0.25, -1.0];
    let hit = density_search(&seq, &embedding, &target, 1e-6, 6, INITIAL_DENOMINATOR).unwrap();

    // recompute the error from the exact witness; the report must be honest
    let mut worst = 0.0f64;
    for (k, want) in target.iter().enumerate() {
        let got = embedding.eval(&seq.apply(k, &hit.witness)).unwrap();
        worst = worst.max((got - want).abs());
    }
    assert!(worst < 1e-6, "max-norm error {}", worst);
    assert_eq!(hit.error, worst);

    let miss = density_search(
        &identity_then_zero(),
        &embedding,
        &[0.0, 1.0],
        1e-6,
        6,
        INITIAL_DENOMINATOR,
    );
    assert!(miss.is_err(), "a rank-deficient family cannot reach the plane");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {:?}", elapsed);
}

fn run_cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_leibniz"))
        .args(args)
        .output()
        .expect("the binary runs")
}

#[test]
fn cli_runs_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str, contents: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, contents).unwrap();
        p.to_str().unwrap().to_string()
    };

    let binom10 = path(
        "binom10.json",
        &serde_json::to_string(&TableDoc::from_table(&GammaTable::binomial(10))).unwrap(),
    );
    let gamma_vec = path("gamma.json", r#"{"gamma":["1","1","2","6","24"]}"#);
    let spec = path("spec.json", r#"{"generators":["t"],"values":{"t":"1"}}"#);

    let seq_doc = SequenceDoc::from_sequence(
        &DerivationSequence::from_parts(
            spec_with("1"),
            GammaTable::binomial(3),
            vec![
                SequenceTerm::Identity,
                SequenceTerm::Iterate {
                    order: 1,
                    scale: rat_int(1),
                },
                SequenceTerm::Iterate {
                    order: 2,
                    scale: rat_int(1),
                },
            ],
        )
        .unwrap(),
    );
    let seq = path("seq.json", &serde_json::to_string(&seq_doc).unwrap());

    let prop_doc = SequenceDoc::from_sequence(
        &DerivationSequence::from_parts(
            spec_with("1"),
            GammaTable::binomial(2),
            vec![
                SequenceTerm::Identity,
                SequenceTerm::Iterate {
                    order: 1,
                    scale: rat_int(1),
                },
                SequenceTerm::Iterate {
                    order: 1,
                    scale: rat_int(2),
                },
            ],
        )
        .unwrap(),
    );
    let proportional = path("proportional.json", &serde_json::to_string(&prop_doc).unwrap());

    // the solver's own output feeds the decompose run
    let extended = run_cli(&[
        "system",
        "solve-next",
        "--seq",
        &seq,
        "--choices",
        r#"{"t":"t^2"}"#,
    ]);
    assert!(
        extended.status.success(),
        "{}",
        String::from_utf8_lossy(&extended.stderr)
    );
    let ext = path("extended.json", std::str::from_utf8(&extended.stdout).unwrap());

    let runs: Vec<Vec<&str>> = vec![
        vec!["gamma", "validate", "--table", binom10.as_str()],
        vec!["gamma", "cocycle", "--table", binom10.as_str()],
        vec!["gamma", "factorize", "--table", binom10.as_str()],
        vec!["gamma", "order-condition", "--table", binom10.as_str()],
        vec!["gamma", "synthesize", "--gamma", gamma_vec.as_str()],
        vec![
            "deriv",
            "apply",
            "--spec",
            spec.as_str(),
            "--expr",
            "(t^2 + 1)/(t - 1)",
        ],
        vec![
            "deriv",
            "iterate",
            "--spec",
            spec.as_str(),
            "--expr",
            "t^4",
            "--order",
            "3",
        ],
        vec![
            "system",
            "check",
            "--seq",
            seq.as_str(),
            "--samples",
            "200",
            "--seed",
            "7",
        ],
        vec![
            "system",
            "defect",
            "--seq",
            seq.as_str(),
            "--order",
            "2",
            "--x",
            "t^2 + 1",
            "--y",
            "1/t",
        ],
        vec![
            "system",
            "corld",
            "--seq",
            seq.as_str(),
            "--samples",
            "100",
            "--seed",
            "3",
        ],
        vec![
            "system",
            "solve-next",
            "--seq",
            seq.as_str(),
            "--choices",
            r#"{"t":"t^2"}"#,
        ],
        vec![
            "system",
            "decompose",
            "--seq",
            ext.as_str(),
            "--samples",
            "100",
            "--seed",
            "5",
        ],
        vec![
            "indep",
            "witness",
            "--seq",
            seq.as_str(),
            "--bound",
            "4",
            "--budget",
            "200",
            "--seed",
            "0",
        ],
        vec![
            "indep",
            "certificate",
            "--seq",
            proportional.as_str(),
            "--bound",
            "3",
        ],
        vec![
            "indep",
            "density",
            "--seq",
            seq.as_str(),
            "--embed",
            r#"{"t":3.141592653589793}"#,
            "--target",
            "[0.5,0.25,-1.0]",
            "--eps",
            "1e-6",
            "--bound",
            "6",
        ],
    ];

    for argv in &runs {
        let first = run_cli(argv);
        let second = run_cli(argv);
        assert!(
            first.status.success(),
            "{:?}: {}",
            argv,
            String::from_utf8_lossy(&first.stderr)
        );
        assert_eq!(first.status.code(), second.status.code(), "{:?}", argv);
        assert_eq!(
            first.stdout, second.stdout,
            "{:?} differs between identical runs",
            argv
        );
        serde_json::from_slice::<serde_json::Value>(&first.stdout)
            .expect("every run prints one JSON document");
    }
}
