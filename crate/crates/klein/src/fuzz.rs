//! Seeded random generators for property tests and the CLI.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactlin::{add_entry, inverse, Scalar, SparseMatrix, SparseVector};
use crate::graphs::MobiusGraph;
use crate::invcat::{BraneSet, GradedHomSpace, InvolutiveCategory};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected Möbius graph with at most `max_half_edges` half-edges.
/// Univalent vertices become legs labelled in vertex order.
pub fn random_mobius_graph<R: Rng>(rng: &mut R, max_half_edges: usize) -> MobiusGraph {
    let max_edges = (max_half_edges / 2).max(1);
    let core = rng.gen_range(1..=max_edges.min(5));
    let mut ends: Vec<(usize, usize)> = Vec::new();
    for v in 1..core {
        ends.push((rng.gen_range(0..v), v));
    }
    let total = rng.gen_range(ends.len().max(1)..=max_edges);
    let mut next_vertex = core;
    while ends.len() < total {
        if rng.gen_bool(0.25) {
            ends.push((rng.gen_range(0..core), next_vertex));
            next_vertex += 1;
        } else {
            ends.push((rng.gen_range(0..core), rng.gen_range(0..core)));
        }
    }
    let mut iota = Vec::new();
    let mut lambda = Vec::new();
    for &(a, b) in &ends {
        let h = iota.len();
        iota.extend([h + 1, h]);
        lambda.extend([a, b]);
    }
    let mut orders: Vec<Vec<usize>> = vec![Vec::new(); next_vertex];
    for (h, &v) in lambda.iter().enumerate() {
        orders[v].push(h);
    }
    for o in &mut orders {
        o.shuffle(rng);
    }
    let colour = (0..iota.len()).map(|_| rng.gen_range(0..2u8)).collect();
    let mut legs = BTreeMap::new();
    for (v, o) in orders.iter().enumerate() {
        if o.len() == 1 {
            let n = legs.len() + 1;
            legs.insert(v, n);
        }
    }
    MobiusGraph::from_parts(next_vertex, iota, lambda, orders, legs, colour).expect("generated graph is valid")
}

/// Same graph with vertices and half-edges renumbered by random permutations.
pub fn relabel<R: Rng>(rng: &mut R, g: &MobiusGraph) -> MobiusGraph {
    let fg = g.graph();
    let mut vp: Vec<usize> = (0..fg.num_vertices()).collect();
    let mut hp: Vec<usize> = (0..fg.num_half_edges()).collect();
    vp.shuffle(rng);
    hp.shuffle(rng);
    let n = fg.num_half_edges();
    let mut iota = vec![0; n];
    let mut lambda = vec![0; n];
    let mut colour = vec![0; n];
    for h in 0..n {
        iota[hp[h]] = hp[fg.iota(h)];
        lambda[hp[h]] = vp[fg.lambda(h)];
        colour[hp[h]] = g.colour(h);
    }
    let mut orders = vec![Vec::new(); fg.num_vertices()];
    for v in 0..fg.num_vertices() {
        orders[vp[v]] = g.ribbon().cyclic_order(v).iter().map(|&h| hp[h]).collect();
    }
    let legs = g.ribbon().leg_labels().iter().map(|(&v, &l)| (vp[v], l)).collect();
    MobiusGraph::from_parts(fg.num_vertices(), iota, lambda, orders, legs, colour).unwrap()
}

/// A small involutive algebra with an optional trace.
#[derive(Clone, Debug)]
pub struct FuzzAlgebra {
    pub name: String,
    pub category: InvolutiveCategory,
    pub trace: Option<SparseVector>,
}

type Terms = Vec<(usize, i64)>;

fn vector(terms: &[(usize, i64)]) -> SparseVector {
    let mut v = SparseVector::new();
    for &(i, x) in terms {
        add_entry(&mut v, i, Scalar::from_int(x));
    }
    v
}

/// One-object algebra; `compose(f, g)` gives `g∘f` as basis terms.
fn table(
    name: &str,
    names: &[&str],
    compose: impl Fn(usize, usize) -> Terms,
    unit: &[(usize, i64)],
    star: impl Fn(usize) -> Terms,
    trace: Option<&[(usize, i64)]>,
) -> FuzzAlgebra {
    let branes = BraneSet::new(["a"]).unwrap();
    let basis = names.iter().map(|n| (n.to_string(), 0)).collect();
    let mut c = InvolutiveCategory::new(branes, vec![GradedHomSpace { source: 0, target: 0, basis }]).unwrap();
    let n = names.len();
    for f in 0..n {
        for g in 0..n {
            let r = vector(&compose(f, g));
            if !r.is_empty() {
                c.set_composition(f, g, r);
            }
        }
    }
    c.set_unit(0, vector(unit));
    let cols: Vec<SparseVector> = (0..n).map(|i| vector(&star(i))).collect();
    c.set_star(SparseMatrix::from_columns(n, &cols)).unwrap();
    FuzzAlgebra { name: name.to_string(), category: c, trace: trace.map(vector) }
}

fn cyclic_group(name: &str, order: usize, inverse_star: bool) -> FuzzAlgebra {
    let names: Vec<String> = (0..order).map(|i| format!("g{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    table(
        name,
        &refs,
        |f, g| vec![((f + g) % order, 1)],
        &[(0, 1)],
        |i| vec![(if inverse_star { (order - i) % order } else { i }, 1)],
        Some(&[(0, 1)]),
    )
}

/// `E_ab` with index `2(a-1) + (b-1)`; `compose(E_ab, E_cd) = δ_{da} E_cb`.
fn matrix_units(f: usize, g: usize) -> Terms {
    let (a, b) = (f / 2, f % 2);
    let (c, d) = (g / 2, g % 2);
    if d == a {
        vec![(2 * c + b, 1)]
    } else {
        vec![]
    }
}

/// Known involutive algebras of dimension ≤ 4, all passing the axiom checks.
pub fn base_algebras() -> Vec<FuzzAlgebra> {
    let nil = |order: usize| move |f: usize, g: usize| if f + g < order { vec![(f + g, 1)] } else { vec![] };
    let diag = |f: usize, g: usize| if f == g { vec![(f, 1)] } else { vec![] };
    // Quaternions (-1,-1): basis 1,i,j,k with product table q[a][b] = a·b.
    let q: [[(usize, i64); 4]; 4] = [
        [(0, 1), (1, 1), (2, 1), (3, 1)],
        [(1, 1), (0, -1), (3, 1), (2, -1)],
        [(2, 1), (3, -1), (0, -1), (1, 1)],
        [(3, 1), (2, 1), (1, -1), (0, -1)],
    ];
    vec![
        table("field", &["1"], |_, _| vec![(0, 1)], &[(0, 1)], |i| vec![(i, 1)], Some(&[(0, 1)])),
        table("k2", &["e1", "e2"], diag, &[(0, 1), (1, 1)], |i| vec![(i, 1)], Some(&[(0, 1), (1, 1)])),
        table("k2_swap", &["e1", "e2"], diag, &[(0, 1), (1, 1)], |i| vec![(1 - i, 1)], Some(&[(0, 1), (1, 1)])),
        table("k3", &["e1", "e2", "e3"], diag, &[(0, 1), (1, 1), (2, 1)], |i| vec![(i, 1)], Some(&[(0, 1), (1, 1), (2, 1)])),
        table("dual_plus", &["1", "x"], nil(2), &[(0, 1)], |i| vec![(i, 1)], Some(&[(1, 1)])),
        table("dual_minus", &["1", "x"], nil(2), &[(0, 1)], |i| vec![(i, if i == 1 { -1 } else { 1 })], None),
        table("cubic_minus", &["1", "x", "x2"], nil(3), &[(0, 1)], |i| vec![(i, if i == 1 { -1 } else { 1 })], Some(&[(2, 1)])),
        table(
            "dual_times_k",
            &["e", "x", "f"],
            |a, b| match (a, b) {
                (0, 0) => vec![(0, 1)],
                (0, 1) | (1, 0) => vec![(1, 1)],
                (2, 2) => vec![(2, 1)],
                _ => vec![],
            },
            &[(0, 1), (2, 1)],
            |i| vec![(i, 1)],
            Some(&[(1, 1), (2, 1)]),
        ),
        cyclic_group("z2", 2, false),
        cyclic_group("z3", 3, false),
        cyclic_group("z3_inverse", 3, true),
        cyclic_group("z4_inverse", 4, true),
        table(
            "upper_triangular",
            &["e11", "e12", "e22"],
            |f, g| {
                let full = [0, 1, 3];
                let back = |x: usize| full.iter().position(|&y| y == x);
                matrix_units(full[f], full[g]).into_iter().filter_map(|(x, s)| back(x).map(|i| (i, s))).collect()
            },
            &[(0, 1), (2, 1)],
            |i| vec![([2, 1, 0][i], 1)],
            None,
        ),
        table("m2_transpose", &["e11", "e12", "e21", "e22"], matrix_units, &[(0, 1), (3, 1)], |i| vec![([0, 2, 1, 3][i], 1)], Some(&[(0, 1), (3, 1)])),
        table(
            "m2_symplectic",
            &["e11", "e12", "e21", "e22"],
            matrix_units,
            &[(0, 1), (3, 1)],
            |i| vec![([3, 1, 2, 0][i], if i == 1 || i == 2 { -1 } else { 1 })],
            Some(&[(0, 1), (3, 1)]),
        ),
        table(
            "quaternions",
            &["1", "i", "j", "k"],
            |f, g| vec![q[g][f]],
            &[(0, 1)],
            |i| vec![(i, if i == 0 { 1 } else { -1 })],
            Some(&[(0, 1)]),
        ),
    ]
}

/// Random invertible matrix with small integer entries and its inverse.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> (SparseMatrix, SparseMatrix) {
    let mut l = SparseMatrix::identity(n);
    let mut u = SparseMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l.set(i, j, Scalar::from_int(rng.gen_range(-2..=2)));
            u.set(j, i, Scalar::from_int(rng.gen_range(-2..=2)));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = SparseMatrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p.set(i, j, Scalar::one());
    }
    let m = l.mul(&u).unwrap().mul(&p).unwrap();
    let inv = inverse(&m).expect("unipotent times permutation is invertible");
    (m, inv)
}

/// Rewrites a one-object algebra in the basis given by the columns of `p`.
pub fn change_basis(a: &FuzzAlgebra, p: &SparseMatrix, p_inv: &SparseMatrix) -> FuzzAlgebra {
    let c = &a.category;
    let n = c.dim();
    let mut out = c.clone();
    let col = |j: usize| p.column(j);
    for f in 0..n {
        for g in 0..n {
            out.set_composition(f, g, p_inv.apply(&c.compose(&col(f), &col(g))));
        }
    }
    out.set_unit(0, p_inv.apply(c.unit(0)));
    out.set_star(p_inv.mul(c.star_matrix()).unwrap().mul(p).unwrap()).unwrap();
    out.set_diff(p_inv.mul(c.diff_matrix()).unwrap().mul(p).unwrap()).unwrap();
    let trace = a.trace.as_ref().map(|t| {
        let mut v = SparseVector::new();
        for j in 0..n {
            let mut x = Scalar::zero();
            for (i, y) in p.column(j) {
                if let Some(ti) = t.get(&i) {
                    x += ti.clone() * y;
                }
            }
            add_entry(&mut v, j, x);
        }
        v
    });
    FuzzAlgebra { name: format!("{}~", a.name), category: out, trace }
}

/// A base algebra of dimension ≤ `max_dim` in a random basis.
pub fn random_involutive_algebra<R: Rng>(rng: &mut R, max_dim: usize) -> FuzzAlgebra {
    let pool: Vec<FuzzAlgebra> = base_algebras().into_iter().filter(|a| a.category.dim() <= max_dim).collect();
    let a = pool.choose(rng).expect("non-empty pool").clone();
    let (p, p_inv) = random_invertible(rng, a.category.dim());
    change_basis(&a, &p, &p_inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::{check_calabi_yau, from_dg, CalabiYauData};
    use crate::invcat::{check_dg_axioms, check_involution_axioms};

    fn assert_valid(a: &FuzzAlgebra) {
        let c = &a.category;
        assert!(check_dg_axioms(c).unwrap().passed(), "{}", a.name);
        assert!(check_involution_axioms(c).unwrap().passed(), "{}", a.name);
        if let Some(t) = &a.trace {
            let ai = from_dg(c).unwrap();
            let rep = check_calabi_yau(&ai, &CalabiYauData::new(t.clone())).unwrap();
            assert!(rep.passed(), "{}: {rep}", a.name);
        }
    }

    #[test]
    fn base_algebras_pass() {
        for a in base_algebras() {
            assert_valid(&a);
        }
    }

    #[test]
    fn basis_changes_pass() {
        let mut r = rng(11);
        for _ in 0..40 {
            assert_valid(&random_involutive_algebra(&mut r, 4));
        }
    }
}
