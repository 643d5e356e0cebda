mod common;

use std::collections::BTreeSet;

use common::surface::*;
use klein::fuzz::rng;
use klein::samples;
use klein::surfcat::*;
use proptest::prelude::*;

#[test]
fn each_rule_is_sound_in_the_two_object_category() {
    let t = two_objects();
    let cases = rule_instances(0, 1);
    for (rule, w) in cases.into_iter().filter(|(r, _)| *r != Rule::R4) {
        let (n, steps) = normalize_with_bound(&w, 100).unwrap();
        assert!(steps.contains(&rule), "{} did not fire on {w}", rule.name());
        assert_eq!(evaluate_in(&t, &w), evaluate_in(&t, &n), "{} on {w}", rule.name());
    }
}

#[test]
fn unit_into_a_long_disc_vanishes() {
    let t = two_objects();
    let w = word(Tree::Compose(vec![
        Tree::Tensor(vec![open_id(&[(0, 1)]), gen(Generator::DiscPlus(vec![1])), open_id(&[(1, 0)])]),
        gen(Generator::DiscPlus(vec![0, 1, 1, 0])),
    ]));
    let (n, steps) = normalize_with_bound(&w, 100).unwrap();
    assert!(n.is_zero() && steps.contains(&Rule::R4));
    assert!(evaluate_in(&t, &w).entries().next().is_none());
}

#[test]
fn random_words_exercise_every_evaluable_rule() {
    let mut fired = BTreeSet::new();
    for seed in 0..400 {
        let t = fuzzed(seed);
        let mut r = rng(seed + 10_000);
        let w = layered_word(&mut r, t.branes);
        let (_, steps) = normalize_with_bound(&w, 10 * w.size() + 10).unwrap();
        fired.extend(steps);
    }
    for rule in [Rule::R1, Rule::R2, Rule::R3, Rule::T1, Rule::Unit] {
        assert!(fired.contains(&rule), "{} never fired", rule.name());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn normalization_preserves_evaluation(seed in any::<u64>()) {
        let t = fuzzed(seed);
        let mut r = rng(seed ^ 0x5eed);
        let w = layered_word(&mut r, t.branes);
        let n = normalize(&w).unwrap();
        prop_assert_eq!(evaluate_in(&t, &w), evaluate_in(&t, &n), "{} ~> {}", w, n);
    }

    #[test]
    fn normalization_preserves_evaluation_with_two_objects(seed in any::<u64>()) {
        let t = two_objects();
        let mut r = rng(seed);
        let w = layered_word(&mut r, t.branes);
        let n = normalize(&w).unwrap();
        prop_assert_eq!(evaluate_in(&t, &w), evaluate_in(&t, &n), "{} ~> {}", w, n);
    }

    #[test]
    fn normal_forms_are_fixed_points(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = layered_word(&mut r, 2);
        let n = normalize(&w).unwrap();
        prop_assert_eq!(normalize(&n).unwrap(), n);
    }

    #[test]
    fn composition_with_identities_is_invisible(seed in any::<u64>()) {
        let mut r = rng(seed);
        let w = layered_word(&mut r, 2);
        let left = compose(&MorphismWord::identity(w.source().clone()), &w).unwrap();
        let right = compose(&w, &MorphismWord::identity(w.target().clone())).unwrap();
        prop_assert_eq!(normalize(&left).unwrap(), normalize(&w).unwrap());
        prop_assert_eq!(normalize(&right).unwrap(), normalize(&w).unwrap());
    }
}

/// `m1` extended to a tensor object with the Koszul rule.
fn m1_on(t: &Target, o: &ObjectLabel) -> klein::exactlin::SparseMatrix {
    use klein::exactlin::{unit_vector, Scalar, SparseMatrix};
    let ev = Evaluator::new(&t.a, Some(&t.cy));
    let basis = ev.basis(o).unwrap();
    let index: std::collections::HashMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let mut m = SparseMatrix::zeros(basis.len(), basis.len());
    for (j, w) in basis.iter().enumerate() {
        let mut passed = 0;
        for r in 0..w.len() {
            for (k, x) in t.a.m(&[unit_vector(w[r])]) {
                let mut image = w.clone();
                image[r] = k;
                let i = index[&image];
                let old = m.get(i, j);
                m.set(i, j, old + x * Scalar::sign(passed));
            }
            passed += t.a.degree(w[r]);
        }
    }
    m
}

#[test]
fn evaluation_intertwines_differentials_on_the_graded_sample() {
    let s = samples::bundled().into_iter().find(|s| s.name == "dg_contractible_pair").unwrap();
    let t = target(&s.category, s.trace.unwrap());
    let mut words: Vec<MorphismWord> = [
        Generator::DiscPlus(vec![0, 0, 0]),
        Generator::DiscPlus(vec![0, 0, 0, 0]),
        Generator::DiscPlus(vec![0, 0, 0, 0, 0]),
        Generator::DiscAllIn(vec![0, 0, 0]),
        Generator::DiscAllIn(vec![0, 0, 0, 0]),
        Generator::DiscAllIn(vec![0, 0, 0, 0, 0]),
        Generator::TwistedDisc(0, 0),
        Generator::DiscIn2(0, 0),
    ]
    .into_iter()
    .map(|g| MorphismWord::generator(g).unwrap())
    .collect();
    let mut r = rng(7);
    // The pairing is degenerate on chains, so the copairing is unavailable.
    words.extend((0..80).map(|_| layered_word(&mut r, 1)).filter(|w| !generators_of(w).iter().any(|g| matches!(g, Generator::DiscOut2(..)))));
    for w in words {
        let e = evaluate_in(&t, &w);
        let de = evaluate_in(&t, &differential(&w));
        let deg = w.terms().next().map_or(0, |(tree, _)| tree.degree());
        let sign = klein::exactlin::Scalar::sign(deg);
        let rhs = m1_on(&t, w.target()).mul(&e).unwrap().add(&e.mul(&m1_on(&t, w.source())).unwrap().scaled(&-sign)).unwrap();
        assert_eq!(de, rhs, "{w}");
    }
}
