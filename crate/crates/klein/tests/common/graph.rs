//! Helpers for graph tests, including a brute-force isomorphism oracle.

use klein::graphs::*;
use rand::Rng;

pub fn random_flips<R: Rng>(r: &mut R, g: &MobiusGraph) -> MobiusGraph {
    let mut out = g.clone();
    for v in 0..g.graph().num_vertices() {
        if r.gen_bool(0.5) {
            out = out.flip_vertex(v);
        }
    }
    out
}

pub fn after_contraction(h: usize, k: usize, x: usize) -> usize {
    x - usize::from(x > h) - usize::from(x > k)
}

/// Boundary count of an orientable graph: gauge every edge to be untwisted,
/// then count the cycles of `σ∘ι`.
pub fn oriented_faces(g: &MobiusGraph) -> Option<usize> {
    let fg = g.graph();
    let mut side = vec![None; fg.num_vertices()];
    let mut cur = g.clone();
    for root in 0..fg.num_vertices() {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some(false);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for h in fg.half_edges_at(v) {
                let w = fg.lambda(fg.iota(h));
                let want = side[v].unwrap() ^ (g.twist(h) == 1);
                match side[w] {
                    None => {
                        side[w] = Some(want);
                        stack.push(w);
                    }
                    Some(s) if s != want => return None,
                    _ => {}
                }
            }
        }
    }
    for v in 0..fg.num_vertices() {
        if side[v] == Some(true) {
            cur = cur.flip_vertex(v);
        }
    }
    let n = fg.num_half_edges();
    let succ = |h: usize| {
        let o = cur.ribbon().cyclic_order(fg.lambda(h));
        let i = o.iter().position(|&x| x == h).unwrap();
        o[(i + 1) % o.len()]
    };
    let mut seen = vec![false; n];
    let mut faces = 0;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        faces += 1;
        let mut h = s;
        while !seen[h] {
            seen[h] = true;
            h = succ(fg.iota(h));
        }
    }
    Some(faces)
}

/// Exhaustive search over half-edge bijections and flip vectors.
pub fn brute_force_isomorphic(a: &MobiusGraph, b: &MobiusGraph) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    if ga.num_vertices() != gb.num_vertices() || ga.num_half_edges() != gb.num_half_edges() {
        return false;
    }
    let n = ga.num_half_edges();
    let nv = ga.num_vertices();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut found = false;
    permutations(&mut perm, 0, &mut |p| {
        let mut vmap = vec![usize::MAX; nv];
        for h in 0..n {
            let (v, w) = (ga.lambda(h), gb.lambda(p[h]));
            if vmap[v] != usize::MAX && vmap[v] != w {
                return false;
            }
            vmap[v] = w;
        }
        if vmap.iter().any(|&w| w == usize::MAX) {
            return false;
        }
        for flips in 0..(1u32 << nv) {
            let iso = Isomorphism {
                vertex_map: vmap.clone(),
                half_edge_map: p.to_vec(),
                reversed: (0..nv).map(|v| flips >> v & 1 == 1).collect(),
            };
            if verify_isomorphism(a, b, &iso) {
                found = true;
                return true;
            }
        }
        false
    });
    found
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if k == p.len() {
        return f(p);
    }
    for i in k..p.len() {
        p.swap(k, i);
        if permutations(p, k + 1, f) {
            return true;
        }
        p.swap(k, i);
    }
    false
}

pub fn leg_free(g: &MobiusGraph) -> bool {
    g.ribbon().leg_labels().is_empty()
}
