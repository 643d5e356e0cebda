//! Finite, ribbon and Möbius graphs in half-edge form.
//!
//! Vertices and half-edges are numbered from zero. `iota` pairs half-edges
//! into edges (no fixed points), `lambda` attaches each half-edge to a
//! vertex, and a leg is a univalent vertex.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGraph {
    num_vertices: usize,
    iota: Vec<usize>,
    lambda: Vec<usize>,
}

impl FiniteGraph {
    pub fn new(num_vertices: usize, iota: Vec<usize>, lambda: Vec<usize>) -> Result<Self> {
        if iota.len() != lambda.len() {
            return Err(Error::InvalidGraph("iota and lambda have different lengths".into()));
        }
        for (h, &k) in iota.iter().enumerate() {
            if k >= iota.len() || iota[k] != h {
                return Err(Error::InvalidGraph(format!("iota is not an involution at half-edge {h}")));
            }
            if k == h {
                return Err(Error::InvalidGraph(format!("half-edge {h} is not paired")));
            }
        }
        if let Some(h) = lambda.iter().position(|&v| v >= num_vertices) {
            return Err(Error::InvalidGraph(format!("half-edge {h} attached to unknown vertex")));
        }
        Ok(FiniteGraph { num_vertices, iota, lambda })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_half_edges(&self) -> usize {
        self.iota.len()
    }

    pub fn num_edges(&self) -> usize {
        self.iota.len() / 2
    }

    pub fn iota(&self, h: usize) -> usize {
        self.iota[h]
    }

    pub fn lambda(&self, h: usize) -> usize {
        self.lambda[h]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.lambda.iter().filter(|&&u| u == v).count()
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.iota.len()).filter(|&h| self.lambda[h] == v).collect()
    }

    pub fn is_leg(&self, v: usize) -> bool {
        self.valence(v) == 1
    }

    /// Edges as `(h, iota(h))` with `h < iota(h)`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.iota.len()).filter(|&h| h < self.iota[h]).map(|h| (h, self.iota[h])).collect()
    }

    pub fn is_loop(&self, h: usize) -> bool {
        self.lambda[h] == self.lambda[self.iota[h]]
    }

    /// Neither end of the edge is univalent.
    pub fn is_internal(&self, h: usize) -> bool {
        !self.is_leg(self.lambda[h]) && !self.is_leg(self.lambda[self.iota[h]])
    }

    pub fn is_connected(&self) -> bool {
        if self.num_vertices == 0 {
            return true;
        }
        self.component_of(0).len() == self.num_vertices
    }

    /// Vertices reachable from `v`, in BFS order.
    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.num_vertices];
        let mut order = vec![v];
        seen[v] = true;
        let mut i = 0;
        while i < order.len() {
            let u = order[i];
            i += 1;
            for h in self.half_edges_at(u) {
                let w = self.lambda[self.iota[h]];
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                }
            }
        }
        order
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RibbonGraph {
    graph: FiniteGraph,
    cyclic_order: Vec<Vec<usize>>,
    leg_labels: BTreeMap<usize, usize>,
}

impl RibbonGraph {
    /// `leg_labels` maps each leg vertex to its label in `1..=n`.
    pub fn new(graph: FiniteGraph, cyclic_order: Vec<Vec<usize>>, leg_labels: BTreeMap<usize, usize>) -> Result<Self> {
        if cyclic_order.len() != graph.num_vertices() {
            return Err(Error::InvalidGraph("need one cyclic order per vertex".into()));
        }
        for (v, order) in cyclic_order.iter().enumerate() {
            let mut got = order.clone();
            got.sort_unstable();
            if got != graph.half_edges_at(v) {
                return Err(Error::InvalidGraph(format!("cyclic order at vertex {v} does not list its half-edges")));
            }
        }
        let legs: Vec<usize> = (0..graph.num_vertices()).filter(|&v| graph.is_leg(v)).collect();
        let labelled: Vec<usize> = leg_labels.keys().copied().collect();
        if labelled != legs {
            return Err(Error::InvalidGraph("leg labels must cover exactly the univalent vertices".into()));
        }
        let mut labels: Vec<usize> = leg_labels.values().copied().collect();
        labels.sort_unstable();
        if labels != (1..=legs.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidGraph("leg labels must be 1..n without repeats".into()));
        }
        Ok(RibbonGraph { graph, cyclic_order, leg_labels })
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.graph
    }

    pub fn cyclic_order(&self, v: usize) -> &[usize] {
        &self.cyclic_order[v]
    }

    pub fn leg_label(&self, v: usize) -> Option<usize> {
        self.leg_labels.get(&v).copied()
    }

    pub fn leg_labels(&self) -> &BTreeMap<usize, usize> {
        &self.leg_labels
    }

    /// Cyclic successor (`step = 1`) or predecessor (`step = -1`) of `h` at its vertex.
    fn rotate(&self, h: usize, step: i64) -> usize {
        let order = &self.cyclic_order[self.graph.lambda(h)];
        let i = order.iter().position(|&x| x == h).expect("half-edge in its cyclic order") as i64;
        order[(i + step).rem_euclid(order.len() as i64) as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusGraph {
    ribbon: RibbonGraph,
    colour: Vec<u8>,
}

impl MobiusGraph {
    pub fn new(ribbon: RibbonGraph, colour: Vec<u8>) -> Result<Self> {
        if colour.len() != ribbon.graph.num_half_edges() || colour.iter().any(|&c| c > 1) {
            return Err(Error::InvalidGraph("need a colour in {0,1} for every half-edge".into()));
        }
        Ok(MobiusGraph { ribbon, colour })
    }

    /// Builds a graph from raw tables; see the module docs.
    pub fn from_parts(
        num_vertices: usize,
        iota: Vec<usize>,
        lambda: Vec<usize>,
        cyclic_order: Vec<Vec<usize>>,
        leg_labels: BTreeMap<usize, usize>,
        colour: Vec<u8>,
    ) -> Result<Self> {
        let g = FiniteGraph::new(num_vertices, iota, lambda)?;
        MobiusGraph::new(RibbonGraph::new(g, cyclic_order, leg_labels)?, colour)
    }

    pub fn ribbon(&self) -> &RibbonGraph {
        &self.ribbon
    }

    pub fn graph(&self) -> &FiniteGraph {
        &self.ribbon.graph
    }

    pub fn colour(&self, h: usize) -> u8 {
        self.colour[h]
    }

    pub fn colours(&self) -> &[u8] {
        &self.colour
    }

    /// Colour sum of the edge through `h`.
    pub fn twist(&self, h: usize) -> u8 {
        (self.colour[h] + self.colour[self.graph().iota(h)]) % 2
    }

    /// Reverses the cyclic order at `v` and flips the colours of its half-edges.
    pub fn flip_vertex(&self, v: usize) -> MobiusGraph {
        let mut out = self.clone();
        out.ribbon.cyclic_order[v].reverse();
        for h in self.graph().half_edges_at(v) {
            out.colour[h] ^= 1;
        }
        out
    }

    pub fn is_reduced(&self) -> bool {
        (0..self.graph().num_vertices()).all(|v| {
            let k = self.graph().valence(v);
            k == 1 || k >= 3
        })
    }
}

impl fmt::Display for MobiusGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.graph();
        write!(f, "{} vertices, {} edges", g.num_vertices(), g.num_edges())?;
        for v in 0..g.num_vertices() {
            let cells: Vec<String> =
                self.ribbon.cyclic_order[v].iter().map(|&h| format!("{h}:{}->{}", self.colour[h], g.iota(h))).collect();
            write!(f, "\n  v{v}: ({})", cells.join(" "))?;
            if let Some(l) = self.ribbon.leg_label(v) {
                write!(f, " leg {l}")?;
            }
        }
        Ok(())
    }
}

/// Contracts the edge through half-edge `h`.
///
/// If the two half-edges have different colours, the far endpoint is
/// flipped first; the result is the same up to isomorphism either way.
pub fn contract_edge(gamma: &MobiusGraph, h: usize) -> Result<MobiusGraph> {
    let g = gamma.graph();
    if h >= g.num_half_edges() {
        return Err(Error::InvalidGraph(format!("no half-edge {h}")));
    }
    if g.is_loop(h) {
        return Err(Error::LoopContraction(h));
    }
    if !g.is_internal(h) {
        return Err(Error::ExternalEdge(h));
    }
    let k = g.iota(h);
    let (v, w) = (g.lambda(h), g.lambda(k));
    let gamma = if gamma.colour(h) != gamma.colour(k) { gamma.flip_vertex(w) } else { gamma.clone() };
    let r = &gamma.ribbon;

    let rotated = |order: &[usize], start: usize| -> Vec<usize> {
        let i = order.iter().position(|&x| x == start).unwrap();
        order[i + 1..].iter().chain(order[..i].iter()).copied().collect()
    };
    let mut merged = rotated(&r.cyclic_order[v], h);
    merged.extend(rotated(&r.cyclic_order[w], k));

    let new_h = |x: usize| x - usize::from(x > h) - usize::from(x > k);
    let new_v = |u: usize| if u == w { new_vertex(v, w) } else { new_vertex(u, w) };
    let n = g.num_half_edges();
    let keep: Vec<usize> = (0..n).filter(|&x| x != h && x != k).collect();
    let iota = keep.iter().map(|&x| new_h(g.iota(x))).collect();
    let lambda = keep.iter().map(|&x| new_v(g.lambda(x))).collect();
    let colour = keep.iter().map(|&x| gamma.colour(x)).collect();
    let mut orders = Vec::new();
    for u in 0..g.num_vertices() {
        if u == w {
            continue;
        }
        let o = if u == v { &merged } else { &r.cyclic_order[u] };
        orders.push(o.iter().map(|&x| new_h(x)).collect());
    }
    let legs = r.leg_labels.iter().map(|(&u, &l)| (new_v(u), l)).collect();
    MobiusGraph::from_parts(g.num_vertices() - 1, iota, lambda, orders, legs, colour)
}

fn new_vertex(u: usize, removed: usize) -> usize {
    u - usize::from(u > removed)
}

/// Half-edges (one per edge) that `reduce` may contract: internal non-loop
/// edges at a bivalent vertex.
pub fn reducible_edges(gamma: &MobiusGraph) -> Vec<usize> {
    let g = gamma.graph();
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        let bivalent = g.valence(g.lambda(a)) == 2 || g.valence(g.lambda(b)) == 2;
        if bivalent && !g.is_loop(a) && g.is_internal(a) {
            out.push(a);
        }
    }
    out
}

/// Contracts edges at bivalent vertices until the graph is reduced, always
/// taking the first candidate.
pub fn reduce(gamma: &MobiusGraph) -> Result<MobiusGraph> {
    reduce_with(gamma, |_| 0)
}

/// As `reduce`, with `pick` choosing among the current candidates.
pub fn reduce_with(gamma: &MobiusGraph, mut pick: impl FnMut(usize) -> usize) -> Result<MobiusGraph> {
    let g = gamma.graph();
    let has_branch = (0..g.num_vertices()).any(|v| g.valence(v) >= 3);
    if !has_branch && !gamma.is_reduced() {
        return Err(Error::NotReducible);
    }
    let mut cur = gamma.clone();
    loop {
        let cands = reducible_edges(&cur);
        if cands.is_empty() {
            break;
        }
        let i = pick(cands.len()) % cands.len();
        cur = contract_edge(&cur, cands[i])?;
    }
    if cur.is_reduced() {
        Ok(cur)
    } else {
        Err(Error::NotReducible)
    }
}

/// A Möbius graph isomorphism: vertex and half-edge bijections plus, per
/// vertex, whether the cyclic order (and colouring) is reversed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
    pub reversed: Vec<bool>,
}

/// Which structure a graph map has to respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivalence {
    /// Möbius graph isomorphism: at each vertex the cyclic order and the
    /// colours are both kept or both reversed.
    Strict,
    /// Ribbon graph isomorphism up to per-vertex reversal that keeps the
    /// twist (colour sum) of every edge relative to the reversals. Colours
    /// are otherwise ignored.
    Twist,
}

struct Search<'a> {
    a: &'a MobiusGraph,
    b: &'a MobiusGraph,
    mode: Equivalence,
    vmap: Vec<Option<usize>>,
    hmap: Vec<Option<usize>>,
    rev: Vec<bool>,
    vused: Vec<bool>,
    hused: Vec<bool>,
}

type Snapshot = (Vec<Option<usize>>, Vec<Option<usize>>, Vec<bool>, Vec<bool>, Vec<bool>);

impl Search<'_> {
    /// Maps vertex `lambda(h)` with orientation choice `flip` so that
    /// `h ↦ k`, then follows edges.
    fn propagate(&mut self, h: usize, k: usize, flip: bool) -> bool {
        let (ga, gb) = (self.a.graph(), self.b.graph());
        let mut queue = VecDeque::from([(h, k, flip)]);
        while let Some((h, k, flip)) = queue.pop_front() {
            let v = ga.lambda(h);
            if let Some(img) = self.hmap[h] {
                if img != k || self.rev[v] != flip {
                    return false;
                }
                continue;
            }
            let w = gb.lambda(k);
            if self.hused[k] || self.vmap[v].is_some() || self.vused[w] {
                return false;
            }
            if ga.valence(v) != gb.valence(w) || self.a.ribbon.leg_label(v) != self.b.ribbon.leg_label(w) {
                return false;
            }
            let (oa, ob) = (&self.a.ribbon.cyclic_order[v], &self.b.ribbon.cyclic_order[w]);
            let d = oa.len() as i64;
            let i = oa.iter().position(|&x| x == h).unwrap() as i64;
            let j = ob.iter().position(|&x| x == k).unwrap() as i64;
            let step = if flip { -1 } else { 1 };
            let mut pairs = Vec::with_capacity(oa.len());
            for t in 0..d {
                let x = oa[((i + t) % d) as usize];
                let y = ob[(j + step * t).rem_euclid(d) as usize];
                let colour_ok = self.mode == Equivalence::Twist || (self.a.colour(x) ^ u8::from(flip)) == self.b.colour(y);
                if !colour_ok || self.hused[y] || self.hmap[x].is_some() {
                    return false;
                }
                pairs.push((x, y));
            }
            self.vmap[v] = Some(w);
            self.vused[w] = true;
            self.rev[v] = flip;
            for (x, y) in pairs {
                self.hmap[x] = Some(y);
                self.hused[y] = true;
                // Orientation at the far end that keeps the edge twist.
                let far = flip ^ (self.a.twist(x) != self.b.twist(y));
                queue.push_back((ga.iota(x), gb.iota(y), far));
            }
        }
        true
    }

    fn snapshot(&self) -> Snapshot {
        (self.vmap.clone(), self.hmap.clone(), self.rev.clone(), self.vused.clone(), self.hused.clone())
    }

    fn restore(&mut self, s: Snapshot) {
        (self.vmap, self.hmap, self.rev, self.vused, self.hused) = s;
    }

    /// Matches the remaining components of `a`, one root at a time.
    fn solve(&mut self, roots: &[usize]) -> bool {
        let Some((&v, rest)) = roots.split_first() else {
            return true;
        };
        let ga = self.a.graph();
        let gb = self.b.graph();
        let hs = ga.half_edges_at(v);
        if hs.is_empty() {
            for w in 0..gb.num_vertices() {
                if !self.vused[w] && gb.valence(w) == 0 {
                    self.vmap[v] = Some(w);
                    self.vused[w] = true;
                    if self.solve(rest) {
                        return true;
                    }
                    self.vmap[v] = None;
                    self.vused[w] = false;
                }
            }
            return false;
        }
        let h = hs[0];
        for k in 0..gb.num_half_edges() {
            if self.hused[k] {
                continue;
            }
            let flips: &[bool] = match self.mode {
                Equivalence::Strict if self.a.colour(h) == self.b.colour(k) => &[false],
                Equivalence::Strict => &[true],
                Equivalence::Twist => &[false, true],
            };
            for &flip in flips {
                let saved = self.snapshot();
                if self.propagate(h, k, flip) && self.solve(rest) {
                    return true;
                }
                self.restore(saved);
            }
        }
        false
    }
}

/// Searches for a Möbius graph isomorphism `a → b`.
///
/// Each connected component is pinned down by the image of one half-edge
/// and the orientation choice there; the cyclic orders then propagate the
/// map along edges.
pub fn is_isomorphic(a: &MobiusGraph, b: &MobiusGraph) -> Option<Isomorphism> {
    find_equivalence(a, b, Equivalence::Strict)
}

/// Searches for a twist-preserving ribbon graph isomorphism `a → b`.
pub fn is_twist_equivalent(a: &MobiusGraph, b: &MobiusGraph) -> Option<Isomorphism> {
    find_equivalence(a, b, Equivalence::Twist)
}

pub fn find_equivalence(a: &MobiusGraph, b: &MobiusGraph, mode: Equivalence) -> Option<Isomorphism> {
    let (ga, gb) = (a.graph(), b.graph());
    if ga.num_vertices() != gb.num_vertices() || ga.num_half_edges() != gb.num_half_edges() {
        return None;
    }
    let mut val_a: Vec<usize> = (0..ga.num_vertices()).map(|v| ga.valence(v)).collect();
    let mut val_b: Vec<usize> = (0..gb.num_vertices()).map(|v| gb.valence(v)).collect();
    val_a.sort_unstable();
    val_b.sort_unstable();
    if val_a != val_b {
        return None;
    }
    let mut twists_a: Vec<u8> = ga.edges().iter().filter(|(h, _)| ga.is_loop(*h)).map(|&(h, _)| a.twist(h)).collect();
    let mut twists_b: Vec<u8> = gb.edges().iter().filter(|(h, _)| gb.is_loop(*h)).map(|&(h, _)| b.twist(h)).collect();
    twists_a.sort_unstable();
    twists_b.sort_unstable();
    if twists_a != twists_b {
        return None;
    }

    let mut roots = Vec::new();
    let mut seen = vec![false; ga.num_vertices()];
    for v in 0..ga.num_vertices() {
        if !seen[v] {
            for u in ga.component_of(v) {
                seen[u] = true;
            }
            roots.push(v);
        }
    }
    let mut s = Search {
        a,
        b,
        mode,
        vmap: vec![None; ga.num_vertices()],
        hmap: vec![None; ga.num_half_edges()],
        rev: vec![false; ga.num_vertices()],
        vused: vec![false; gb.num_vertices()],
        hused: vec![false; gb.num_half_edges()],
    };
    if !s.solve(&roots) {
        return None;
    }
    Some(Isomorphism {
        vertex_map: s.vmap.into_iter().map(Option::unwrap).collect(),
        half_edge_map: s.hmap.into_iter().map(Option::unwrap).collect(),
        reversed: s.rev,
    })
}

/// Independent check of an isomorphism witness against the definition.
pub fn verify_isomorphism(a: &MobiusGraph, b: &MobiusGraph, iso: &Isomorphism) -> bool {
    verify_equivalence(a, b, iso, Equivalence::Strict)
}

pub fn verify_equivalence(a: &MobiusGraph, b: &MobiusGraph, iso: &Isomorphism, mode: Equivalence) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    let (vm, hm) = (&iso.vertex_map, &iso.half_edge_map);
    if vm.len() != ga.num_vertices() || hm.len() != ga.num_half_edges() || iso.reversed.len() != vm.len() {
        return false;
    }
    let bij = |m: &[usize], n: usize| {
        let mut s = m.to_vec();
        s.sort_unstable();
        s == (0..n).collect::<Vec<_>>()
    };
    if !bij(vm, gb.num_vertices()) || !bij(hm, gb.num_half_edges()) {
        return false;
    }
    for h in 0..ga.num_half_edges() {
        if gb.lambda(hm[h]) != vm[ga.lambda(h)] || gb.iota(hm[h]) != hm[ga.iota(h)] {
            return false;
        }
        let flip = u8::from(iso.reversed[ga.lambda(h)]);
        if mode == Equivalence::Strict && b.colour(hm[h]) != a.colour(h) ^ flip {
            return false;
        }
        // Twist parity relative to the chosen orientations.
        let fw = u8::from(iso.reversed[ga.lambda(ga.iota(h))]);
        if b.twist(hm[h]) != (a.twist(h) + flip + fw) % 2 {
            return false;
        }
    }
    for v in 0..ga.num_vertices() {
        if a.ribbon.leg_label(v) != b.ribbon.leg_label(vm[v]) {
            return false;
        }
        let step = if iso.reversed[v] { -1 } else { 1 };
        for &h in a.ribbon.cyclic_order(v) {
            if b.ribbon.rotate(hm[h], step) != hm[a.ribbon.rotate(h, 1)] {
                return false;
            }
        }
    }
    true
}

/// Surface type `(g, u, h)`: `u = 0` for orientable surfaces, otherwise the
/// crosscap number `k = 2g + u` with `u ∈ {1, 2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TopologicalType {
    pub g: usize,
    pub u: usize,
    pub h: usize,
}

impl TopologicalType {
    pub fn orientable(g: usize, h: usize) -> Self {
        TopologicalType { g, u: 0, h }
    }

    /// Non-orientable surface with `k ≥ 1` crosscaps.
    pub fn non_orientable(k: usize, h: usize) -> Self {
        assert!(k >= 1, "non-orientable surfaces have at least one crosscap");
        let u = if k % 2 == 1 { 1 } else { 2 };
        TopologicalType { g: (k - u) / 2, u, h }
    }

    pub fn is_orientable(&self) -> bool {
        self.u == 0
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.g as i64 - self.u as i64 - self.h as i64
    }
}

impl fmt::Display for TopologicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.g, self.u, self.h)
    }
}

/// Number of boundary components of the thickening.
///
/// A state is a half-edge about to be traversed plus a turning direction.
/// Crossing an edge with odd colour sum reverses the direction. Each boundary
/// circle is traced once in each direction, so it accounts for two orbits.
pub fn boundary_components(gamma: &MobiusGraph) -> usize {
    let g = gamma.graph();
    let n = g.num_half_edges();
    let idx = |h: usize, dir: i64| 2 * h + usize::from(dir < 0);
    let mut seen = vec![false; 2 * n];
    let mut orbits = 0;
    for start in 0..2 * n {
        if seen[start] {
            continue;
        }
        orbits += 1;
        let (mut h, mut dir) = (start / 2, if start % 2 == 0 { 1i64 } else { -1 });
        while !seen[idx(h, dir)] {
            seen[idx(h, dir)] = true;
            let k = g.iota(h);
            if gamma.twist(h) == 1 {
                dir = -dir;
            }
            h = gamma.ribbon.rotate(k, dir);
        }
    }
    orbits / 2 + (0..g.num_vertices()).filter(|&v| g.valence(v) == 0).count()
}

/// Whether some choice of vertex flips makes every edge untwisted.
pub fn is_orientable(gamma: &MobiusGraph) -> bool {
    let g = gamma.graph();
    let mut side: Vec<Option<u8>> = vec![None; g.num_vertices()];
    for root in 0..g.num_vertices() {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some(0);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            let sv = side[v].unwrap();
            for h in g.half_edges_at(v) {
                let w = g.lambda(g.iota(h));
                let want = sv ^ gamma.twist(h);
                match side[w] {
                    None => {
                        side[w] = Some(want);
                        stack.push(w);
                    }
                    Some(s) if s != want => return false,
                    Some(_) => {}
                }
            }
        }
    }
    true
}

/// Type of the surface obtained by thickening a connected leg-free graph.
pub fn thicken_type(gamma: &MobiusGraph) -> Result<TopologicalType> {
    let g = gamma.graph();
    if !g.is_connected() || g.num_vertices() == 0 {
        return Err(Error::Disconnected);
    }
    if (0..g.num_vertices()).any(|v| g.is_leg(v)) {
        return Err(Error::LegsPresent);
    }
    let chi = g.num_vertices() as i64 - g.num_edges() as i64;
    let h = boundary_components(gamma);
    let rest = 2 - h as i64 - chi;
    if is_orientable(gamma) {
        debug_assert!(rest >= 0 && rest % 2 == 0);
        Ok(TopologicalType::orientable((rest / 2) as usize, h))
    } else {
        debug_assert!(rest >= 1);
        Ok(TopologicalType::non_orientable(rest as usize, h))
    }
}

/// Tuples `(g, u, h, n)` whose moduli space is empty.
pub const EMPTY_MODULI: [(usize, usize, usize, usize); 5] = [(0, 0, 1, 0), (0, 0, 1, 1), (0, 0, 1, 2), (0, 0, 2, 0), (0, 1, 1, 0)];

pub fn is_moduli_nonempty(g: usize, u: usize, h: usize, n: usize) -> Result<bool> {
    if u > 2 {
        return Err(Error::InvalidInput(format!("u must be at most 2, got {u}")));
    }
    Ok(!EMPTY_MODULI.contains(&(g, u, h, n)))
}

/// Single vertex with one loop; `twisted` gives the Möbius band.
pub fn loop_graph(twisted: bool) -> MobiusGraph {
    MobiusGraph::from_parts(1, vec![1, 0], vec![0, 0], vec![vec![0, 1]], BTreeMap::new(), vec![0, u8::from(twisted)])
        .unwrap()
}

/// Theta graph: two trivalent vertices joined by three edges. With
/// `planar` the cyclic orders give three boundary circles, otherwise one.
pub fn theta_graph(planar: bool) -> MobiusGraph {
    // Half-edges 0,1,2 at vertex 0 pair with 3,4,5 at vertex 1.
    let second = if planar { vec![5, 4, 3] } else { vec![3, 4, 5] };
    MobiusGraph::from_parts(2, vec![3, 4, 5, 0, 1, 2], vec![0, 0, 0, 1, 1, 1], vec![vec![0, 1, 2], second], BTreeMap::new(), vec![0; 6])
        .unwrap()
}

/// Replaces the edge through `h` by two edges meeting at a new bivalent vertex.
pub fn subdivide_edge(gamma: &MobiusGraph, h: usize) -> MobiusGraph {
    let g = gamma.graph();
    let k = g.iota(h);
    let n = g.num_half_edges();
    let v_new = g.num_vertices();
    // New half-edges n (paired with h) and n+1 (paired with k) at v_new.
    let mut iota: Vec<usize> = (0..n).map(|x| g.iota(x)).collect();
    iota[h] = n;
    iota[k] = n + 1;
    iota.extend([h, k]);
    let mut lambda: Vec<usize> = (0..n).map(|x| g.lambda(x)).collect();
    lambda.extend([v_new, v_new]);
    let mut orders: Vec<Vec<usize>> = (0..g.num_vertices()).map(|v| gamma.ribbon.cyclic_order(v).to_vec()).collect();
    orders.push(vec![n, n + 1]);
    // Both new half-edges take the colour of `h`, so the first new edge is
    // untwisted and the second carries the old twist.
    let mut colour = gamma.colours().to_vec();
    colour.extend([gamma.colour(h), gamma.colour(h)]);
    MobiusGraph::from_parts(v_new + 1, iota, lambda, orders, gamma.ribbon.leg_labels().clone(), colour).unwrap()
}
