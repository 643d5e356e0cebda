mod common;

use std::collections::BTreeMap;

use common::OracleComplex;
use klein::exactlin::{verify_complex, SparseMatrix};
use klein::fuzz::{random_involutive_algebra, rng};
use klein::hochschild::*;
use klein::samples;
use proptest::prelude::*;

fn all_dims(t: &TruncatedComplex) -> BTreeMap<i64, usize> {
    homology(t, None).unwrap().into_iter().map(|r| (r.degree, r.homology)).collect()
}

#[test]
fn sparse_homology_matches_dense_oracle_on_samples() {
    for s in samples::bundled() {
        let trunc = if s.category.dim() >= 4 { 4 } else { 5 };
        let oracle = OracleComplex::new(&s.category, trunc);
        for (v, inv, norm) in [(Variant::Ordinary, false, false), (Variant::Involutive, true, false), (Variant::Normalized, true, true)] {
            let t = build_variant(&s.category, trunc, v).unwrap();
            assert_eq!(all_dims(&t), oracle.homology(trunc, inv, norm), "{} {v}", s.name);
        }
    }
}

#[test]
fn dual_numbers_plus_trunc_five() {
    let c = samples::dual_numbers(1);
    let t = build_ordinary(&c, 5).unwrap();
    let rows = homology(&t, None).unwrap();
    let oracle = OracleComplex::new(&c, 5).homology(5, false, false);
    for r in &rows {
        assert_eq!(r.homology, oracle[&r.degree]);
    }
    assert_eq!(reliable_dims(&rows)[&0], 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fuzzed_algebras(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_involutive_algebra(&mut r, 3);
        let c = &a.category;
        let trunc = 4;
        let mut last = None;
        for v in Variant::ALL {
            let t = build_variant(c, trunc, v).unwrap();
            verify_complex(&t.complex).unwrap();
            for k in t.complex.degrees() {
                let i = induced_involution(c, &t, k).unwrap();
                prop_assert_eq!(i.mul(&i).unwrap(), SparseMatrix::identity(t.complex.dim(k)));
                let d = t.complex.differential(k);
                let lhs = d.mul(&i).unwrap();
                let rhs = induced_involution(c, &t, k - 1).unwrap().mul(&d).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
            if let Some(prev) = &last {
                // The quotient map from the previous variant is a chain map.
                let prev: &TruncatedComplex = prev;
                for k in t.complex.degrees() {
                    let map = |k: i64| t.projection(k).mul(&prev.section(k)).unwrap();
                    let lhs = t.complex.differential(k).mul(&map(k)).unwrap();
                    let rhs = map(k - 1).mul(&prev.complex.differential(k)).unwrap();
                    prop_assert_eq!(lhs, rhs);
                }
            }
            last = Some(t);
        }
        let inv = build_involutive(c, trunc).unwrap();
        let norm = build_normalized_involutive(c, trunc).unwrap();
        prop_assert_eq!(reliable_dims(&homology(&inv, None).unwrap()), reliable_dims(&homology(&norm, None).unwrap()));
    }
}
