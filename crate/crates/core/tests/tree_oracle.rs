//! Tree evaluation checked against an independent symbolic expansion.
//!
//! The oracle parses the textual scheme listing, expands every node into an
//! explicit polynomial over the four leaves and evaluates the expanded sum.

mod support;

use hemadisc_core::poly_tree::{decode_scheme, TreeGenome, TreeScheme, COEFFICIENT_COUNT, SCHEME_COUNT};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use support::tree_expansion::{eval_expanded, expand, parse, selected_leaf, Node, LISTING};

#[test]
fn listing_matches_decoded_schemes() {
    for (id, text) in LISTING.iter().enumerate() {
        assert_eq!(decode_scheme(id).unwrap().to_string(), *text);
    }
    assert!(decode_scheme(SCHEME_COUNT).is_err());
}

#[test]
fn schemes_are_distinct_and_use_each_leaf_once() {
    let mut seen = std::collections::HashSet::new();
    for s in TreeScheme::all() {
        assert!(seen.insert(format!("{:?}", s.shape())));
        let text = s.to_string();
        for leaf in ["RBC", "Hb", "HCT", "MCV"] {
            assert_eq!(text.matches(leaf).count(), 1, "{text}");
        }
    }
    assert_eq!(seen.len(), 15);
}

#[test]
fn pass_through_law_for_all_schemes_and_selections() {
    let x = [0.11, 0.23, 0.37, 0.59];
    for (id, text) in LISTING.iter().enumerate() {
        let tree = parse(text);
        for mask in 0..8usize {
            let choice = [mask & 1, (mask >> 1) & 1, (mask >> 2) & 1];
            let mut coef = [0.0; COEFFICIENT_COUNT];
            for k in 0..3 {
                coef[6 * k + 1 + choice[k]] = 1.0;
            }
            let g = TreeGenome::new(id, coef).unwrap();
            assert_eq!(g.eval_tree(&x).unwrap(), x[selected_leaf(&tree, choice)], "scheme {id} mask {mask}");
        }
    }
}

#[test]
fn matches_expansion_on_random_genomes() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7ee);
    let trees: Vec<Node> = LISTING.iter().map(|t| parse(t)).collect();
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let id = rng.random_range(0..SCHEME_COUNT);
        let coef: [f64; COEFFICIENT_COUNT] = std::array::from_fn(|_| rng.random_range(-10.0..10.0));
        let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let got = TreeGenome::new(id, coef).unwrap().eval_tree(&x).unwrap();
        let want = eval_expanded(&expand(&trees[id], &coef), &x);
        let rel = (got - want).abs() / want.abs().max(f64::MIN_POSITIVE);
        assert!(rel <= 1e-9, "scheme {id}: {got} vs {want} (rel {rel:e})");
        worst = worst.max(rel);
    }
    println!("worst relative deviation {worst:e}");
}

#[test]
fn reference_row_matches_expansion() {
    let coef: [f64; COEFFICIENT_COUNT] = std::array::from_fn(|k| (k as f64 * 0.37).sin());
    let x = [5.43, 11.6, 34.0, 62.6];
    for (id, text) in LISTING.iter().enumerate() {
        let got = TreeGenome::new(id, coef).unwrap().eval_tree(&x).unwrap();
        let want = eval_expanded(&expand(&parse(text), &coef), &x);
        assert!((got - want).abs() <= 1e-9 * want.abs(), "scheme {id}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn output_is_lipschitz_in_each_coefficient(
        id in 0..SCHEME_COUNT,
        coef in prop::array::uniform18(-10.0f64..10.0),
        x in prop::array::uniform4(0.0f64..1.0),
        k in 0..COEFFICIENT_COUNT,
    ) {
        let base = TreeGenome::new(id, coef).unwrap().eval_tree(&x).unwrap();
        let slope = |eps: f64| {
            let mut c = coef;
            c[k] += eps;
            (TreeGenome::new(id, c).unwrap().eval_tree(&x).unwrap() - base) / eps
        };
        // Crude global bound for inputs in [0, 1] and |a| < 10.
        let (s1, s2) = (slope(1e-6), slope(5e-7));
        prop_assert!(s1.abs() <= 1e12);
        let roundoff = 8.0 * f64::EPSILON * base.abs() / 5e-7;
        prop_assert!((s1 - s2).abs() <= 1e-3 * (1.0 + s1.abs()) + roundoff, "{s1} vs {s2}");
    }
}
