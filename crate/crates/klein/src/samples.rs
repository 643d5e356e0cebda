//! Small built-in categories used by tests, the CLI and the bundled files.

use crate::exactlin::{Scalar, SparseMatrix, SparseVector};
use crate::invcat::{BraneSet, GradedHomSpace, InvolutiveCategory};

/// A category together with an optional trace functional (one coefficient
/// per global basis element; only endomorphisms may carry weight).
#[derive(Clone, Debug)]
pub struct Sample {
    pub name: &'static str,
    pub category: InvolutiveCategory,
    pub trace: Option<SparseVector>,
}

fn vec_of(c: &InvolutiveCategory, terms: &[(&str, i64)]) -> SparseVector {
    let mut v = SparseVector::new();
    for (n, x) in terms {
        let i = c.index_of(n).expect("sample basis name");
        crate::exactlin::add_entry(&mut v, i, Scalar::from_int(*x));
    }
    v
}

/// One-object algebra from a product table. `products` lists
/// `(f, g, g∘f)`; absent pairs compose to zero.
fn one_object(
    basis: &[(&str, i64)],
    products: &[(&str, &str, &[(&str, i64)])],
    unit: &[(&str, i64)],
    star: &[(&str, &[(&str, i64)])],
    diff: &[(&str, &[(&str, i64)])],
) -> InvolutiveCategory {
    let branes = BraneSet::new(["a"]).unwrap();
    let hom = GradedHomSpace {
        source: 0,
        target: 0,
        basis: basis.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
    };
    let mut c = InvolutiveCategory::new(branes, vec![hom]).unwrap();
    for (f, g, r) in products {
        let (fi, gi) = (c.index_of(f).unwrap(), c.index_of(g).unwrap());
        let r = vec_of(&c, r);
        c.set_composition(fi, gi, r);
    }
    let u = vec_of(&c, unit);
    c.set_unit(0, u);
    c.set_star(images(&c, star)).unwrap();
    c.set_diff(images(&c, diff)).unwrap();
    c
}

fn images(c: &InvolutiveCategory, rows: &[(&str, &[(&str, i64)])]) -> SparseMatrix {
    let mut m = SparseMatrix::zeros(c.dim(), c.dim());
    for (src, img) in rows {
        let j = c.index_of(src).unwrap();
        for (k, x) in vec_of(c, img) {
            m.set(k, j, x);
        }
    }
    m
}

/// The ground field as a one-object category.
pub fn ground_field() -> InvolutiveCategory {
    one_object(&[("1", 0)], &[("1", "1", &[("1", 1)])], &[("1", 1)], &[("1", &[("1", 1)])], &[])
}

/// Group algebra of Z/2 with the identity involution.
pub fn group_algebra_z2() -> InvolutiveCategory {
    one_object(
        &[("1", 0), ("s", 0)],
        &[
            ("1", "1", &[("1", 1)]),
            ("1", "s", &[("s", 1)]),
            ("s", "1", &[("s", 1)]),
            ("s", "s", &[("1", 1)]),
        ],
        &[("1", 1)],
        &[("1", &[("1", 1)]), ("s", &[("s", 1)])],
        &[],
    )
}

/// Dual numbers K[x]/x² with `x⋆ = sign·x`.
pub fn dual_numbers(sign: i64) -> InvolutiveCategory {
    one_object(
        &[("1", 0), ("x", 0)],
        &[("1", "1", &[("1", 1)]), ("1", "x", &[("x", 1)]), ("x", "1", &[("x", 1)])],
        &[("1", 1)],
        &[("1", &[("1", 1)]), ("x", &[("x", sign)])],
        &[],
    )
}

/// M₂(K) with the transpose involution; basis `eij`.
pub fn matrix_algebra() -> InvolutiveCategory {
    let names = ["e11", "e12", "e21", "e22"];
    let idx = |i: usize, j: usize| names[2 * (i - 1) + (j - 1)];
    let basis: Vec<(&str, i64)> = names.iter().map(|n| (*n, 0)).collect();
    let mut products: Vec<(&str, &str, Vec<(&str, i64)>)> = Vec::new();
    for a in 1..=2 {
        for b in 1..=2 {
            for c in 1..=2 {
                for d in 1..=2 {
                    // compose(E_ab, E_cd) = E_cd · E_ab = δ_{da} E_cb
                    let r = if d == a { vec![(idx(c, b), 1)] } else { vec![] };
                    products.push((idx(a, b), idx(c, d), r));
                }
            }
        }
    }
    let products: Vec<(&str, &str, &[(&str, i64)])> =
        products.iter().map(|(f, g, r)| (*f, *g, r.as_slice())).collect();
    one_object(
        &basis,
        &products,
        &[("e11", 1), ("e22", 1)],
        &[
            ("e11", &[("e11", 1)]),
            ("e12", &[("e21", 1)]),
            ("e21", &[("e12", 1)]),
            ("e22", &[("e22", 1)]),
        ],
        &[],
    )
}

/// Two objects with one-dimensional hom spaces `u_ab` and `u_bc∘u_ab = u_ac`.
pub fn two_object_matrix_category() -> InvolutiveCategory {
    let branes = BraneSet::new(["a", "b"]).unwrap();
    let name = |s: usize, t: usize| match (s, t) {
        (0, 0) => "p1",
        (0, 1) => "x12",
        (1, 0) => "x21",
        _ => "p2",
    };
    let homs = (0..2)
        .flat_map(|s| (0..2).map(move |t| (s, t)))
        .map(|(s, t)| GradedHomSpace { source: s, target: t, basis: vec![(name(s, t).to_string(), 0)] })
        .collect();
    let mut c = InvolutiveCategory::new(branes, homs).unwrap();
    let mut star = SparseMatrix::zeros(4, 4);
    for s in 0..2 {
        for t in 0..2 {
            let f = c.index_of(name(s, t)).unwrap();
            star.set(c.index_of(name(t, s)).unwrap(), f, Scalar::one());
            for u in 0..2 {
                let g = c.index_of(name(t, u)).unwrap();
                let r = c.index_of(name(s, u)).unwrap();
                c.set_composition(f, g, crate::exactlin::unit_vector(r));
            }
        }
    }
    c.set_unit(0, vec_of(&c, &[("p1", 1)]));
    c.set_unit(1, vec_of(&c, &[("p2", 1)]));
    c.set_star(star).unwrap();
    c
}

/// A graded DG algebra `K·1 ⊕ K·x ⊕ K·y` with `|y| = 1`, `dy = x` and all
/// products of `x, y` zero. Its homology is `K·1`.
pub fn dg_contractible_pair() -> InvolutiveCategory {
    one_object(
        &[("1", 0), ("x", 0), ("y", 1)],
        &[("1", "1", &[("1", 1)]), ("1", "x", &[("x", 1)]), ("x", "1", &[("x", 1)]), ("1", "y", &[("y", 1)]), ("y", "1", &[("y", 1)])],
        &[("1", 1)],
        &[("1", &[("1", 1)]), ("x", &[("x", 1)]), ("y", &[("y", 1)])],
        &[("y", &[("x", 1)])],
    )
}

fn trace(c: &InvolutiveCategory, terms: &[(&str, i64)]) -> SparseVector {
    vec_of(c, terms)
}

/// The bundled paper-anchored examples with their traces.
///
/// `K[x]/x²` with `x⋆ = -x` carries no trace: a star-invariant trace must
/// vanish on `x`, which makes the pairing degenerate.
pub fn bundled() -> Vec<Sample> {
    let k = ground_field();
    let z2 = group_algebra_z2();
    let m2 = matrix_algebra();
    let dp = dual_numbers(1);
    let dm = dual_numbers(-1);
    let two = two_object_matrix_category();
    let dg = dg_contractible_pair();
    vec![
        Sample { name: "ground_field", trace: Some(trace(&k, &[("1", 1)])), category: k },
        Sample { name: "group_algebra_z2", trace: Some(trace(&z2, &[("1", 1)])), category: z2 },
        Sample { name: "matrix_algebra", trace: Some(trace(&m2, &[("e11", 1), ("e22", 1)])), category: m2 },
        Sample { name: "dual_numbers_plus", trace: Some(trace(&dp, &[("x", 1)])), category: dp },
        Sample { name: "dual_numbers_minus", trace: None, category: dm },
        Sample { name: "two_object_matrix", trace: Some(trace(&two, &[("p1", 1), ("p2", 1)])), category: two },
        Sample { name: "dg_contractible_pair", trace: Some(trace(&dg, &[("1", 1)])), category: dg },
    ]
}

/// The composition constant `(f, g, coord)` bumped by one in each sample's
/// perturbed variant.
pub const PERTURBATIONS: [(&str, (&str, &str, &str)); 7] = [
    ("ground_field", ("1", "1", "1")),
    ("group_algebra_z2", ("1", "s", "1")),
    ("matrix_algebra", ("e11", "e12", "e12")),
    ("dual_numbers_plus", ("1", "x", "1")),
    ("dual_numbers_minus", ("1", "x", "1")),
    ("two_object_matrix", ("x12", "x21", "p1")),
    ("dg_contractible_pair", ("1", "y", "y")),
];

/// A bundled sample with one composition constant off by one.
pub fn perturbed(name: &str) -> Option<Sample> {
    let (_, (f, g, coord)) = PERTURBATIONS.iter().find(|(n, _)| *n == name)?;
    let s = bundled().into_iter().find(|s| s.name == name)?;
    let c = &s.category;
    let (f, g, coord) = (c.index_of(f).ok()?, c.index_of(g).ok()?, c.index_of(coord).ok()?);
    Some(Sample { category: perturb_composition(c, f, g, coord, Scalar::one()), ..s })
}

/// Adds `delta` to the coefficient of `coord` in `compose(f, g)`.
pub fn perturb_composition(
    c: &InvolutiveCategory,
    f: usize,
    g: usize,
    coord: usize,
    delta: Scalar,
) -> InvolutiveCategory {
    let mut out = c.clone();
    let mut r = out.compose_basis(f, g);
    crate::exactlin::add_entry(&mut r, coord, delta);
    out.set_composition(f, g, r);
    out
}
