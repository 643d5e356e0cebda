//! The surface category presented by discs, twisted discs and annuli.
//!
//! Brane labels are object indices of the target category and an open slot
//! `(s, t)` stands for `Hom(s, t)`. Conventions:
//! - `Tree::Compose` lists maps in the order they are applied.
//! - `D⁺(λ0,…,λ(n-1))` has inputs `(λi, λ(i+1))` for `i < n-1` and output
//!   `(λ0, λ(n-1))`.
//! - `D(λ0,…)` and `A(λ0,…)` have inputs `(λi, λ(i+1 mod n))`. For the
//!   annulus the last slot `(λ(n-1), λ0)` is the special point; the output
//!   is one closed slot.
//! - `Dᵗ(a, b): (a, b) → (b, a)`, `Din(a, b): (a, b), (b, a) → ∅` and
//!   `Dout(a, b): ∅ → (a, b), (b, a)`.
//! - Degrees: discs with `n ≥ 3` points have degree `n - 3`, annuli `n - 1`,
//!   everything else 0. Tensor products carry Koszul signs
//!   `(F ⊗ G)(x ⊗ y) = (-1)^{|G||x|} Fx ⊗ Gy`.
//!
//! Normalization works on wiring diagrams: symmetries become wire crossings,
//! so two trees denote the same morphism of the free symmetric monoidal
//! category iff their diagrams are isomorphic. The coefficient of a diagram
//! refers to its node order; reordering nodes costs the sign of the induced
//! permutation of odd-degree nodes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::ainfty::{from_dg, AInfinityCategory, CalabiYauData};
use crate::error::{Error, Result};
use crate::exactlin::{add_entry, inverse, quotient_presentation, FiniteComplex, Quotient, Scalar, SparseMatrix, SparseVector};
use crate::hochschild::{expand, TruncatedComplex, WordChain};
use crate::invcat::InvolutiveCategory;

/// Environment variable overriding the rewrite step bound.
pub const MAX_STEPS_ENV: &str = "KLEIN_MAX_REWRITE_STEPS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Open(usize, usize),
    Closed,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Open(s, t) => write!(f, "({s},{t})"),
            Slot::Closed => f.write_str("c"),
        }
    }
}

/// An object: an ordered list of open slots `(s(i), t(i))` and closed slots.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectLabel {
    slots: Vec<Slot>,
}

impl ObjectLabel {
    pub fn new(slots: Vec<Slot>) -> Self {
        ObjectLabel { slots }
    }

    pub fn open(pairs: &[(usize, usize)]) -> Self {
        ObjectLabel { slots: pairs.iter().map(|&(s, t)| Slot::Open(s, t)).collect() }
    }

    pub fn empty() -> Self {
        ObjectLabel::default()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn open_count(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Open(..))).count()
    }

    pub fn closed_count(&self) -> usize {
        self.len() - self.open_count()
    }

    /// Source labels of the open slots.
    pub fn s(&self) -> Vec<usize> {
        self.slots.iter().filter_map(|s| if let Slot::Open(a, _) = s { Some(*a) } else { None }).collect()
    }

    /// Target labels of the open slots.
    pub fn t(&self) -> Vec<usize> {
        self.slots.iter().filter_map(|s| if let Slot::Open(_, b) = s { Some(*b) } else { None }).collect()
    }

    pub fn union(&self, other: &ObjectLabel) -> ObjectLabel {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&other.slots);
        ObjectLabel { slots }
    }

    fn range(&self, lo: usize, hi: usize) -> ObjectLabel {
        ObjectLabel { slots: self.slots[lo..hi].to_vec() }
    }
}

impl fmt::Display for ObjectLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.slots.iter().map(|s| s.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    DiscAllIn(Vec<usize>),
    DiscPlus(Vec<usize>),
    TwistedDisc(usize, usize),
    DiscIn2(usize, usize),
    DiscOut2(usize, usize),
    Annulus(Vec<usize>),
    Identity(ObjectLabel),
}

fn chain_slots(l: &[usize]) -> ObjectLabel {
    ObjectLabel::open(&l.windows(2).map(|w| (w[0], w[1])).collect::<Vec<_>>())
}

fn cyclic_slots(l: &[usize]) -> ObjectLabel {
    let n = l.len();
    ObjectLabel::open(&(0..n).map(|i| (l[i], l[(i + 1) % n])).collect::<Vec<_>>())
}

fn labels(l: &[usize]) -> String {
    l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl Generator {
    pub fn validate(&self) -> Result<()> {
        match self {
            Generator::DiscAllIn(l) | Generator::DiscPlus(l) | Generator::Annulus(l) if l.is_empty() => {
                Err(Error::InvalidInput(format!("{} needs at least one marked point", self.kind())))
            }
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Generator::DiscAllIn(_) => "DiscAllIn",
            Generator::DiscPlus(_) => "DiscPlus",
            Generator::TwistedDisc(..) => "TwistedDisc",
            Generator::DiscIn2(..) => "DiscIn2",
            Generator::DiscOut2(..) => "DiscOut2",
            Generator::Annulus(_) => "Annulus",
            Generator::Identity(_) => "Identity",
        }
    }

    pub fn source(&self) -> ObjectLabel {
        match self {
            Generator::DiscAllIn(l) | Generator::Annulus(l) => cyclic_slots(l),
            Generator::DiscPlus(l) => chain_slots(l),
            Generator::TwistedDisc(a, b) => ObjectLabel::open(&[(*a, *b)]),
            Generator::DiscIn2(a, b) => ObjectLabel::open(&[(*a, *b), (*b, *a)]),
            Generator::DiscOut2(..) => ObjectLabel::empty(),
            Generator::Identity(o) => o.clone(),
        }
    }

    pub fn target(&self) -> ObjectLabel {
        match self {
            Generator::DiscAllIn(_) | Generator::DiscIn2(..) => ObjectLabel::empty(),
            Generator::DiscPlus(l) => ObjectLabel::open(&[(l[0], l[l.len() - 1])]),
            Generator::TwistedDisc(a, b) => ObjectLabel::open(&[(*b, *a)]),
            Generator::DiscOut2(a, b) => ObjectLabel::open(&[(*a, *b), (*b, *a)]),
            Generator::Annulus(_) => ObjectLabel::new(vec![Slot::Closed]),
            Generator::Identity(o) => o.clone(),
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Generator::DiscAllIn(l) | Generator::DiscPlus(l) => (l.len() as i64 - 3).max(0),
            Generator::Annulus(l) => l.len() as i64 - 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::DiscAllIn(l) => write!(f, "D({})", labels(l)),
            Generator::DiscPlus(l) => write!(f, "D+({})", labels(l)),
            Generator::TwistedDisc(a, b) => write!(f, "Dt({a},{b})"),
            Generator::DiscIn2(a, b) => write!(f, "Din({a},{b})"),
            Generator::DiscOut2(a, b) => write!(f, "Dout({a},{b})"),
            Generator::Annulus(l) => write!(f, "A({})", labels(l)),
            Generator::Identity(o) => write!(f, "Identity{o}"),
        }
    }
}

/// A composition/tensor expression over generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Gen(Generator),
    /// Applied left to right.
    Compose(Vec<Tree>),
    Tensor(Vec<Tree>),
    /// Output slot `j` is input slot `perm[j]`.
    Permute { source: ObjectLabel, perm: Vec<usize> },
}

impl Tree {
    pub fn gen(g: Generator) -> Tree {
        Tree::Gen(g)
    }

    /// Source and target, checking every composition.
    pub fn boundary(&self) -> Result<(ObjectLabel, ObjectLabel)> {
        match self {
            Tree::Gen(g) => {
                g.validate()?;
                Ok((g.source(), g.target()))
            }
            Tree::Compose(ts) => {
                let Some(first) = ts.first() else {
                    return Err(Error::InvalidInput("empty composition".into()));
                };
                let (src, mut tgt) = first.boundary()?;
                for t in &ts[1..] {
                    let (s, t2) = t.boundary()?;
                    if s != tgt {
                        return Err(Error::LabelMismatch(format!("cannot glue {tgt} to {s}")));
                    }
                    tgt = t2;
                }
                Ok((src, tgt))
            }
            Tree::Tensor(ts) => {
                let mut src = ObjectLabel::empty();
                let mut tgt = ObjectLabel::empty();
                for t in ts {
                    let (s, t2) = t.boundary()?;
                    src = src.union(&s);
                    tgt = tgt.union(&t2);
                }
                Ok((src, tgt))
            }
            Tree::Permute { source, perm } => {
                let mut seen = vec![false; source.len()];
                if perm.len() != source.len() || perm.iter().any(|&p| p >= seen.len() || std::mem::replace(&mut seen[p], true)) {
                    return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of {source}")));
                }
                Ok((source.clone(), ObjectLabel::new(perm.iter().map(|&p| source.slots[p]).collect())))
            }
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Tree::Gen(g) => g.degree(),
            Tree::Compose(ts) | Tree::Tensor(ts) => ts.iter().map(Tree::degree).sum(),
            Tree::Permute { .. } => 0,
        }
    }

    /// Number of non-identity generators.
    pub fn generator_count(&self) -> usize {
        match self {
            Tree::Gen(Generator::Identity(_)) => 0,
            Tree::Gen(_) => 1,
            Tree::Compose(ts) | Tree::Tensor(ts) => ts.iter().map(Tree::generator_count).sum(),
            Tree::Permute { .. } => 0,
        }
    }

    /// Number of nodes in the expression.
    pub fn size(&self) -> usize {
        match self {
            Tree::Gen(_) | Tree::Permute { .. } => 1,
            Tree::Compose(ts) | Tree::Tensor(ts) => 1 + ts.iter().map(Tree::size).sum::<usize>(),
        }
    }

    fn generators<'a>(&'a self, out: &mut Vec<&'a Generator>) {
        match self {
            Tree::Gen(g) => out.push(g),
            Tree::Compose(ts) | Tree::Tensor(ts) => ts.iter().for_each(|t| t.generators(out)),
            Tree::Permute { .. } => {}
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Gen(g) => write!(f, "{g}"),
            Tree::Compose(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "({})", parts.join(" ; "))
            }
            Tree::Tensor(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "[{}]", parts.join(" ⊗ "))
            }
            Tree::Permute { perm, .. } => write!(f, "P{perm:?}"),
        }
    }
}

/// Key ordering terms by generator count, then structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TermKey(Tree);

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.generator_count(), &self.0).cmp(&(other.0.generator_count(), &other.0))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A formal linear combination of trees with a common source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismWord {
    source: ObjectLabel,
    target: ObjectLabel,
    terms: BTreeMap<TermKey, Scalar>,
}

impl MorphismWord {
    pub fn zero(source: ObjectLabel, target: ObjectLabel) -> Self {
        MorphismWord { source, target, terms: BTreeMap::new() }
    }

    pub fn from_tree(t: Tree) -> Result<Self> {
        let (source, target) = t.boundary()?;
        let mut w = MorphismWord::zero(source, target);
        w.terms.insert(TermKey(t), Scalar::one());
        Ok(w)
    }

    pub fn generator(g: Generator) -> Result<Self> {
        MorphismWord::from_tree(Tree::Gen(g))
    }

    pub fn identity(o: ObjectLabel) -> Self {
        MorphismWord::from_tree(Tree::Gen(Generator::Identity(o))).expect("identity is well formed")
    }

    pub fn from_terms(source: ObjectLabel, target: ObjectLabel, terms: impl IntoIterator<Item = (Tree, Scalar)>) -> Result<Self> {
        let mut w = MorphismWord::zero(source, target);
        for (t, c) in terms {
            let (s, tg) = t.boundary()?;
            if s != w.source || tg != w.target {
                return Err(Error::LabelMismatch(format!("term {t} has type {s} → {tg}, expected {} → {}", w.source, w.target)));
            }
            w.add_term(t, c);
        }
        Ok(w)
    }

    fn add_term(&mut self, t: Tree, c: Scalar) {
        let key = TermKey(t);
        let entry = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn source(&self) -> &ObjectLabel {
        &self.source
    }

    pub fn target(&self) -> &ObjectLabel {
        &self.target
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &Scalar)> {
        self.terms.iter().map(|(k, c)| (&k.0, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// The only tree when this is `1·tree`.
    pub fn single(&self) -> Option<&Tree> {
        match self.terms.iter().next() {
            Some((k, c)) if self.terms.len() == 1 && c.is_one() => Some(&k.0),
            _ => None,
        }
    }

    pub fn add(&self, other: &MorphismWord) -> Result<MorphismWord> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::LabelMismatch("cannot add words of different types".into()));
        }
        let mut w = self.clone();
        for (t, c) in other.terms() {
            w.add_term(t.clone(), c.clone());
        }
        Ok(w)
    }

    pub fn scale(&self, c: &Scalar) -> MorphismWord {
        let mut w = MorphismWord::zero(self.source.clone(), self.target.clone());
        for (t, x) in self.terms() {
            w.add_term(t.clone(), x * c);
        }
        w
    }

    pub fn size(&self) -> usize {
        self.terms().map(|(t, _)| t.size()).sum()
    }
}

impl fmt::Display for MorphismWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (t, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !abs.is_one() {
                write!(f, "{abs}·")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// `w2` after `w1`.
pub fn compose(w1: &MorphismWord, w2: &MorphismWord) -> Result<MorphismWord> {
    if w1.target != w2.source {
        return Err(Error::LabelMismatch(format!("cannot glue {} to {}", w1.target, w2.source)));
    }
    let mut w = MorphismWord::zero(w1.source.clone(), w2.target.clone());
    for (t1, c1) in w1.terms() {
        for (t2, c2) in w2.terms() {
            w.add_term(Tree::Compose(vec![t1.clone(), t2.clone()]), c1 * c2);
        }
    }
    Ok(w)
}

pub fn tensor(w1: &MorphismWord, w2: &MorphismWord) -> MorphismWord {
    let mut w = MorphismWord::zero(w1.source.union(&w2.source), w1.target.union(&w2.target));
    for (t1, c1) in w1.terms() {
        for (t2, c2) in w2.terms() {
            w.add_term(Tree::Tensor(vec![t1.clone(), t2.clone()]), c1 * c2);
        }
    }
    w
}

// ---------------------------------------------------------------------------
// Wiring diagrams

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Node {
    gen: Generator,
    inputs: Vec<usize>,
    outputs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Diagram {
    source: Vec<usize>,
    target: Vec<usize>,
    nodes: Vec<Node>,
    /// Slot type of each wire id.
    wires: Vec<Slot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum End {
    Boundary,
    Node(usize),
}

impl Diagram {
    fn from_tree(t: &Tree) -> Result<Diagram> {
        let (src, tgt) = t.boundary()?;
        let mut d = Diagram { source: Vec::new(), target: Vec::new(), nodes: Vec::new(), wires: Vec::new() };
        let inputs: Vec<usize> = src.slots().iter().map(|&s| d.new_wire(s)).collect();
        d.source = inputs.clone();
        d.target = d.build(t, inputs);
        debug_assert_eq!(d.target.len(), tgt.len());
        Ok(d)
    }

    fn new_wire(&mut self, s: Slot) -> usize {
        self.wires.push(s);
        self.wires.len() - 1
    }

    /// Nodes are pushed in an order realizing the tree as a sequence of
    /// layers: `A ⊗ B = (A ⊗ 1)∘(1 ⊗ B)`, so tensor factors go right to left.
    fn build(&mut self, t: &Tree, inputs: Vec<usize>) -> Vec<usize> {
        match t {
            Tree::Gen(Generator::Identity(_)) => inputs,
            Tree::Gen(g) => {
                let outputs: Vec<usize> = g.target().slots().iter().map(|&s| self.new_wire(s)).collect();
                self.nodes.push(Node { gen: g.clone(), inputs, outputs: outputs.clone() });
                outputs
            }
            Tree::Compose(ts) => ts.iter().fold(inputs, |w, t| self.build(t, w)),
            Tree::Tensor(ts) => {
                let widths: Vec<usize> = ts.iter().map(|t| t.boundary().expect("checked").0.len()).collect();
                let mut starts = vec![0; ts.len()];
                for i in 1..ts.len() {
                    starts[i] = starts[i - 1] + widths[i - 1];
                }
                let mut outs = vec![Vec::new(); ts.len()];
                for i in (0..ts.len()).rev() {
                    let part = inputs[starts[i]..starts[i] + widths[i]].to_vec();
                    outs[i] = self.build(&ts[i], part);
                }
                outs.concat()
            }
            Tree::Permute { perm, .. } => perm.iter().map(|&p| inputs[p]).collect(),
        }
    }

    fn producers(&self) -> Vec<(End, usize)> {
        let mut p = vec![(End::Boundary, usize::MAX); self.wires.len()];
        for (i, &w) in self.source.iter().enumerate() {
            p[w] = (End::Boundary, i);
        }
        for (n, node) in self.nodes.iter().enumerate() {
            for (k, &w) in node.outputs.iter().enumerate() {
                p[w] = (End::Node(n), k);
            }
        }
        p
    }

    fn consumers(&self) -> Vec<(End, usize)> {
        let mut c = vec![(End::Boundary, usize::MAX); self.wires.len()];
        for (i, &w) in self.target.iter().enumerate() {
            c[w] = (End::Boundary, i);
        }
        for (n, node) in self.nodes.iter().enumerate() {
            for (k, &w) in node.inputs.iter().enumerate() {
                c[w] = (End::Node(n), k);
            }
        }
        c
    }

    /// Canonical numbering of wires and nodes, and the sign relating the old
    /// node order to the new one.
    fn canonical(&self) -> (Diagram, Scalar) {
        let prod = self.producers();
        let cons = self.consumers();
        let mut st = Numbering::new(self.wires.len(), self.nodes.len());
        for &w in self.source.iter().chain(self.target.iter()) {
            st.visit_wire(self, &prod, &cons, w);
        }
        // Floating components: start from the root with the smallest encoding.
        loop {
            let rest: Vec<usize> = (0..self.nodes.len()).filter(|&n| st.node_id[n].is_none()).collect();
            if rest.is_empty() {
                break;
            }
            let mut best: Option<(Vec<(Generator, Vec<usize>, Vec<usize>)>, usize)> = None;
            for &r in &rest {
                let mut trial = st.clone();
                let start_node = trial.next_node;
                let start_wire = trial.next_wire;
                trial.visit_node(self, &prod, &cons, r);
                let enc = trial.encode(self, start_node, start_wire);
                if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                    best = Some((enc, r));
                }
            }
            let r = best.expect("nonempty").1;
            st.visit_node(self, &prod, &cons, r);
        }
        let mut wires = vec![Slot::Closed; st.next_wire];
        for (old, id) in st.wire_id.iter().enumerate() {
            if let Some(id) = id {
                wires[*id] = self.wires[old];
            }
        }
        let map = |w: &usize| st.wire_id[*w].expect("every wire is reached");
        let mut nodes: Vec<(usize, Node)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                (
                    st.node_id[i].expect("every node is reached"),
                    Node { gen: n.gen.clone(), inputs: n.inputs.iter().map(map).collect(), outputs: n.outputs.iter().map(map).collect() },
                )
            })
            .collect();
        let order: Vec<usize> = nodes.iter().map(|(id, _)| *id).collect();
        let sign = odd_sign(&self.nodes.iter().map(|n| n.gen.degree()).collect::<Vec<_>>(), &order);
        nodes.sort_by_key(|(id, _)| *id);
        let d = Diagram {
            source: self.source.iter().map(map).collect(),
            target: self.target.iter().map(map).collect(),
            nodes: nodes.into_iter().map(|(_, n)| n).collect(),
            wires,
        };
        (d, sign)
    }

    /// A topological order, smallest index first among the available nodes.
    fn topological(&self) -> Vec<usize> {
        let prod = self.producers();
        let mut ready = vec![false; self.wires.len()];
        for &w in &self.source {
            ready[w] = true;
        }
        let mut done = vec![false; self.nodes.len()];
        let mut order = Vec::with_capacity(self.nodes.len());
        while order.len() < self.nodes.len() {
            let next = (0..self.nodes.len())
                .find(|&n| !done[n] && self.nodes[n].inputs.iter().all(|&w| ready[w]))
                .expect("diagrams are acyclic");
            done[next] = true;
            order.push(next);
            for &w in &self.nodes[next].outputs {
                ready[w] = true;
            }
        }
        let _ = prod;
        order
    }

    /// A tree realizing the diagram, with the sign relating its layer order
    /// to the node order.
    fn to_tree(&self) -> (Tree, Scalar) {
        let order = self.topological();
        let sign = odd_sign(&self.nodes.iter().map(|n| n.gen.degree()).collect::<Vec<_>>(), &inverse_perm(&order));
        let slots = |ws: &[usize]| ObjectLabel::new(ws.iter().map(|&w| self.wires[w]).collect());
        let mut cur = self.source.clone();
        let mut layers = Vec::new();
        for &n in &order {
            let node = &self.nodes[n];
            let k = node.inputs.len();
            let p = if k == 0 {
                cur.len()
            } else {
                let pos: Vec<usize> = node.inputs.iter().map(|w| cur.iter().position(|c| c == w).expect("live wire")).collect();
                if pos.windows(2).all(|w| w[1] == w[0] + 1) {
                    pos[0]
                } else {
                    let others: Vec<usize> = cur.iter().copied().filter(|w| !node.inputs.contains(w)).collect();
                    let p = cur[..pos[0]].iter().filter(|w| !node.inputs.contains(w)).count();
                    let mut next = others[..p].to_vec();
                    next.extend_from_slice(&node.inputs);
                    next.extend_from_slice(&others[p..]);
                    layers.push(permute_tree(&cur, &next, &slots));
                    cur = next;
                    p
                }
            };
            let mut parts = Vec::new();
            if p > 0 {
                parts.push(Tree::Gen(Generator::Identity(slots(&cur[..p]))));
            }
            parts.push(Tree::Gen(node.gen.clone()));
            if p + k < cur.len() {
                parts.push(Tree::Gen(Generator::Identity(slots(&cur[p + k..]))));
            }
            layers.push(if parts.len() == 1 { parts.pop().unwrap() } else { Tree::Tensor(parts) });
            let mut next = cur[..p].to_vec();
            next.extend_from_slice(&node.outputs);
            next.extend_from_slice(&cur[p + k..]);
            cur = next;
        }
        if cur != self.target {
            layers.push(permute_tree(&cur, &self.target, &slots));
        }
        let tree = match layers.len() {
            0 => Tree::Gen(Generator::Identity(slots(&self.source))),
            1 => layers.pop().unwrap(),
            _ => Tree::Compose(layers),
        };
        (tree, sign)
    }

    /// Joins wire `b` onto wire `a`: `a`'s producer now feeds `b`'s consumer.
    fn merge_wires(&mut self, a: usize, b: usize) {
        for n in &mut self.nodes {
            for w in n.inputs.iter_mut() {
                if *w == b {
                    *w = a;
                }
            }
        }
        for w in self.target.iter_mut() {
            if *w == b {
                *w = a;
            }
        }
    }

    fn remove_nodes(&mut self, mut idx: Vec<usize>) {
        idx.sort_unstable();
        for i in idx.into_iter().rev() {
            self.nodes.remove(i);
        }
    }
}

fn permute_tree(from: &[usize], to: &[usize], slots: &dyn Fn(&[usize]) -> ObjectLabel) -> Tree {
    let perm = to.iter().map(|w| from.iter().position(|f| f == w).expect("same wires")).collect();
    Tree::Permute { source: slots(from), perm }
}

fn inverse_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

/// Sign of moving item `i` to position `new_pos[i]`, counting only items of
/// odd degree.
fn odd_sign(degrees: &[i64], new_pos: &[usize]) -> Scalar {
    let odd: Vec<usize> = (0..degrees.len()).filter(|&i| degrees[i] % 2 != 0).map(|i| new_pos[i]).collect();
    let mut inv = 0i64;
    for i in 0..odd.len() {
        for j in i + 1..odd.len() {
            if odd[i] > odd[j] {
                inv += 1;
            }
        }
    }
    Scalar::sign(inv)
}

#[derive(Clone)]
struct Numbering {
    wire_id: Vec<Option<usize>>,
    node_id: Vec<Option<usize>>,
    next_wire: usize,
    next_node: usize,
    node_order: Vec<usize>,
}

impl Numbering {
    fn new(wires: usize, nodes: usize) -> Self {
        Numbering { wire_id: vec![None; wires], node_id: vec![None; nodes], next_wire: 0, next_node: 0, node_order: Vec::new() }
    }

    fn visit_wire(&mut self, d: &Diagram, prod: &[(End, usize)], cons: &[(End, usize)], w: usize) {
        if self.wire_id[w].is_some() {
            return;
        }
        self.wire_id[w] = Some(self.next_wire);
        self.next_wire += 1;
        if let (End::Node(n), _) = prod[w] {
            self.visit_node(d, prod, cons, n);
        }
        if let (End::Node(n), _) = cons[w] {
            self.visit_node(d, prod, cons, n);
        }
    }

    fn visit_node(&mut self, d: &Diagram, prod: &[(End, usize)], cons: &[(End, usize)], n: usize) {
        if self.node_id[n].is_some() {
            return;
        }
        self.node_id[n] = Some(self.next_node);
        self.next_node += 1;
        self.node_order.push(n);
        for &w in d.nodes[n].inputs.iter().chain(d.nodes[n].outputs.iter()) {
            self.visit_wire(d, prod, cons, w);
        }
    }

    /// Nodes numbered from `start_node` on, with wires relative to `start_wire`.
    fn encode(&self, d: &Diagram, start_node: usize, start_wire: usize) -> Vec<(Generator, Vec<usize>, Vec<usize>)> {
        let rel = |w: &usize| self.wire_id[*w].expect("visited") - start_wire;
        self.node_order[start_node..]
            .iter()
            .map(|&n| {
                let node = &d.nodes[n];
                (node.gen.clone(), node.inputs.iter().map(rel).collect(), node.outputs.iter().map(rel).collect())
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Rewriting

/// Names of the rewrite rules, for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    T1,
    T2,
    A1,
    /// `D⁺(λ0, λ1)` is the identity strip.
    Unit,
}

impl Rule {
    pub const ALL: [Rule; 8] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::T1, Rule::T2, Rule::A1, Rule::Unit];

    pub fn name(&self) -> &'static str {
        match self {
            Rule::R1 => "R1",
            Rule::R2 => "R2",
            Rule::R3 => "R3",
            Rule::R4 => "R4",
            Rule::T1 => "T1",
            Rule::T2 => "T2",
            Rule::A1 => "A1",
            Rule::Unit => "unit",
        }
    }
}

enum Step {
    Zero(Rule),
    Rewrite(Rule, Diagram, Scalar),
}

/// Smallest rotation of a label sequence and its offset.
fn min_rotation(l: &[usize]) -> (usize, Vec<usize>) {
    let n = l.len();
    (0..n)
        .map(|r| (r, (0..n).map(|i| l[(i + r) % n]).collect::<Vec<_>>()))
        .min_by(|a, b| a.1.cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("nonempty")
}

/// First applicable rule, scanning nodes in layer order.
fn rewrite_once(d: &Diagram) -> Option<Step> {
    let cons = d.consumers();
    let prod = d.producers();
    let consumer = |w: usize| match cons[w] {
        (End::Node(m), k) => Some((m, k)),
        _ => None,
    };
    for n in d.topological() {
        let node = &d.nodes[n];
        match &node.gen {
            Generator::DiscPlus(l) if l.len() == 2 => {
                let mut e = d.clone();
                e.merge_wires(node.inputs[0], node.outputs[0]);
                e.remove_nodes(vec![n]);
                return Some(Step::Rewrite(Rule::Unit, e, Scalar::one()));
            }
            Generator::TwistedDisc(a, b) => {
                if let Some((m, _)) = consumer(node.outputs[0]) {
                    if d.nodes[m].gen == Generator::TwistedDisc(*b, *a) {
                        let mut e = d.clone();
                        e.merge_wires(node.inputs[0], d.nodes[m].outputs[0]);
                        e.remove_nodes(vec![n, m]);
                        return Some(Step::Rewrite(Rule::R1, e, Scalar::one()));
                    }
                }
            }
            Generator::DiscPlus(l) if l.len() == 1 => {
                if let Some((m, port)) = consumer(node.outputs[0]) {
                    match &d.nodes[m].gen {
                        Generator::DiscPlus(big) if big.len() == 3 => {
                            let other = d.nodes[m].inputs[1 - port];
                            let mut e = d.clone();
                            e.merge_wires(other, d.nodes[m].outputs[0]);
                            e.remove_nodes(vec![n, m]);
                            return Some(Step::Rewrite(Rule::R2, e, Scalar::one()));
                        }
                        Generator::DiscPlus(big) if big.len() >= 4 => return Some(Step::Zero(Rule::R4)),
                        Generator::Annulus(big) if port + 1 < big.len() => return Some(Step::Zero(Rule::A1)),
                        _ => {}
                    }
                }
            }
            Generator::DiscOut2(..) => {
                let (o0, o1) = (node.outputs[0], node.outputs[1]);
                let c0 = consumer(o0);
                let c1 = consumer(o1);
                // Din(a, b) reads (a, b) then (b, a); the snake leaves one port free.
                if let Some((m, 1)) = c0 {
                    if matches!(d.nodes[m].gen, Generator::DiscIn2(..)) && c1 != Some((m, 0)) {
                        let x = d.nodes[m].inputs[0];
                        let mut e = d.clone();
                        e.merge_wires(x, o1);
                        e.remove_nodes(vec![n, m]);
                        return Some(Step::Rewrite(Rule::T1, e, Scalar::one()));
                    }
                }
                if let Some((m, 0)) = c1 {
                    if matches!(d.nodes[m].gen, Generator::DiscIn2(..)) && c0 != Some((m, 1)) {
                        let x = d.nodes[m].inputs[1];
                        let mut e = d.clone();
                        e.merge_wires(x, o0);
                        e.remove_nodes(vec![n, m]);
                        return Some(Step::Rewrite(Rule::T1, e, Scalar::one()));
                    }
                }
            }
            Generator::DiscPlus(mu) if mu.len() >= 3 => {
                let feeders: Vec<Option<usize>> = node
                    .inputs
                    .iter()
                    .map(|&w| match prod[w] {
                        (End::Node(f), _) if matches!(d.nodes[f].gen, Generator::TwistedDisc(..)) => Some(f),
                        _ => None,
                    })
                    .collect();
                if feeders.iter().all(Option::is_some) {
                    let k = mu.len() - 1;
                    let feeders: Vec<usize> = feeders.into_iter().map(Option::unwrap).collect();
                    let lambda: Vec<usize> = mu.iter().rev().copied().collect();
                    let mut e = d.clone();
                    let inputs: Vec<usize> = (0..k).map(|i| d.nodes[feeders[k - 1 - i]].inputs[0]).collect();
                    let mid = e.new_wire(Slot::Open(lambda[0], lambda[k]));
                    let out = node.outputs[0];
                    e.nodes[n] = Node { gen: Generator::DiscPlus(lambda.clone()), inputs, outputs: vec![mid] };
                    e.nodes.push(Node { gen: Generator::TwistedDisc(lambda[0], lambda[k]), inputs: vec![mid], outputs: vec![out] });
                    e.remove_nodes(feeders);
                    return Some(Step::Rewrite(Rule::R3, e, Scalar::one()));
                }
            }
            Generator::DiscAllIn(l) if l.len() >= 3 => {
                let (r, rot) = min_rotation(l);
                if r != 0 && rot != *l {
                    let n_pts = l.len();
                    let mut e = d.clone();
                    let inputs = (0..n_pts).map(|m| node.inputs[(m + r) % n_pts]).collect();
                    e.nodes[n] = Node { gen: Generator::DiscAllIn(rot), inputs, outputs: Vec::new() };
                    return Some(Step::Rewrite(Rule::T2, e, Scalar::sign((r * (n_pts - 1)) as i64)));
                }
            }
            _ => {}
        }
    }
    None
}

/// Default rewrite bound: ten times the size of the input, unless the
/// environment overrides it.
pub fn rewrite_bound(w: &MorphismWord) -> usize {
    std::env::var(MAX_STEPS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(10 * w.size())
}

pub fn normalize(w: &MorphismWord) -> Result<MorphismWord> {
    normalize_with_bound(w, rewrite_bound(w)).map(|(w, _)| w)
}

/// Normal form together with the list of rules applied.
pub fn normalize_with_bound(w: &MorphismWord, bound: usize) -> Result<(MorphismWord, Vec<Rule>)> {
    let mut steps = Vec::new();
    let mut acc: BTreeMap<Diagram, Scalar> = BTreeMap::new();
    for (t, c) in w.terms() {
        let mut d = Diagram::from_tree(t)?;
        let mut coeff = c.clone();
        loop {
            let (canon, s) = d.canonical();
            coeff = coeff * s;
            d = canon;
            match rewrite_once(&d) {
                None => break,
                Some(Step::Zero(rule)) => {
                    steps.push(rule);
                    coeff = Scalar::zero();
                }
                Some(Step::Rewrite(rule, e, f)) => {
                    steps.push(rule);
                    coeff = coeff * f;
                    d = e;
                }
            }
            if steps.len() > bound {
                return Err(Error::NonTermination { bound });
            }
            if coeff.is_zero() {
                break;
            }
        }
        if !coeff.is_zero() {
            *acc.entry(d).or_insert_with(Scalar::zero) += &coeff;
        }
    }
    let mut out = MorphismWord::zero(w.source.clone(), w.target.clone());
    for (d, c) in acc {
        if c.is_zero() {
            continue;
        }
        let (t, s) = d.to_tree();
        out.add_term(t, c * s);
    }
    Ok((out, steps))
}

/// Whether two words have the same normal form.
pub fn equivalent(a: &MorphismWord, b: &MorphismWord) -> Result<bool> {
    let diff = a.add(&b.scale(&-Scalar::one()))?;
    Ok(normalize(&diff)?.is_zero())
}

// ---------------------------------------------------------------------------
// Differential

fn id_tree(o: ObjectLabel) -> Tree {
    Tree::Gen(Generator::Identity(o))
}

fn sandwich(before: ObjectLabel, mid: Tree, after: ObjectLabel) -> Tree {
    let mut parts = Vec::new();
    if !before.is_empty() {
        parts.push(id_tree(before));
    }
    parts.push(mid);
    if !after.is_empty() {
        parts.push(id_tree(after));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        Tree::Tensor(parts)
    }
}

fn join(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

/// Boundary of a single generator.
pub fn differential_generator(g: &Generator) -> Vec<(Tree, Scalar)> {
    let mut out = Vec::new();
    match g {
        Generator::DiscPlus(l) | Generator::DiscAllIn(l) => {
            let n = l.len();
            let slots = g.source();
            for i in 0..n {
                for j in i + 2..n {
                    let s = j - i;
                    if s + 2 > n {
                        continue;
                    }
                    let t = n - 1 - j;
                    let inner = Tree::Gen(Generator::DiscPlus(l[i..=j].to_vec()));
                    let outer_labels = join(&l[..=i], &l[j..]);
                    let outer = match g {
                        Generator::DiscPlus(_) => Generator::DiscPlus(outer_labels),
                        _ => Generator::DiscAllIn(outer_labels),
                    };
                    let layer = sandwich(slots.range(0, i), inner, slots.range(j, slots.len()));
                    out.push((Tree::Compose(vec![layer, Tree::Gen(outer)]), Scalar::sign((i + s * t + 1) as i64)));
                }
            }
        }
        Generator::Annulus(l) => {
            let n = l.len();
            let slots = g.source();
            for i in 0..n {
                for j in i + 2..n {
                    let s = j - i;
                    // Slots j..=n-1 follow the chord.
                    let t = n - j;
                    let inner = Tree::Gen(Generator::DiscPlus(l[i..=j].to_vec()));
                    let layer = sandwich(slots.range(0, i), inner, slots.range(j, n));
                    let outer = Generator::Annulus(join(&l[..=i], &l[j..]));
                    out.push((Tree::Compose(vec![layer, Tree::Gen(outer)]), Scalar::sign((i + s * t) as i64)));
                }
            }
            for i in 0..n {
                for j in 0..=i {
                    if (j, i) == (0, n - 1) {
                        continue;
                    }
                    let disc = join(&l[i..], &l[..=j]);
                    let rotate = Tree::Permute { source: slots.clone(), perm: (0..n).map(|m| (m + j) % n).collect() };
                    let rotated = ObjectLabel::new((0..n).map(|m| slots.slots()[(m + j) % n]).collect());
                    let layer = sandwich(rotated.range(0, i - j), Tree::Gen(Generator::DiscPlus(disc)), ObjectLabel::empty());
                    let outer = Generator::Annulus(l[j..=i].to_vec());
                    let sign = Scalar::sign((j * (n - 1) + (i - j)) as i64);
                    let mut chain = Vec::new();
                    if j != 0 {
                        chain.push(rotate);
                    }
                    chain.push(layer);
                    chain.push(Tree::Gen(outer));
                    out.push((Tree::Compose(chain), sign));
                }
            }
        }
        _ => {}
    }
    out
}

fn differential_tree(t: &Tree) -> Vec<(Tree, Scalar)> {
    match t {
        Tree::Gen(g) => differential_generator(g),
        Tree::Permute { .. } => Vec::new(),
        Tree::Compose(ts) | Tree::Tensor(ts) => {
            let is_compose = matches!(t, Tree::Compose(_));
            let mut out = Vec::new();
            for i in 0..ts.len() {
                // d(g∘f) = dg∘f + (-1)^{|g|} g∘df; d(f⊗g) = df⊗g + (-1)^{|f|} f⊗dg.
                let passed: i64 = if is_compose {
                    ts[i + 1..].iter().map(Tree::degree).sum()
                } else {
                    ts[..i].iter().map(Tree::degree).sum()
                };
                for (dt, c) in differential_tree(&ts[i]) {
                    let mut parts = ts.clone();
                    parts[i] = dt;
                    let node = if is_compose { Tree::Compose(parts) } else { Tree::Tensor(parts) };
                    out.push((node, c * Scalar::sign(passed)));
                }
            }
            out
        }
    }
}

/// Cellular differential, extended by the graded Leibniz rule.
pub fn differential(w: &MorphismWord) -> MorphismWord {
    let mut out = MorphismWord::zero(w.source.clone(), w.target.clone());
    for (t, c) in w.terms() {
        for (dt, x) in differential_tree(t) {
            out.add_term(dt, x * c);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Evaluation

/// Evaluates words through the disc dictionary: `Dᵗ ↦ ⋆`, `D⁺ ↦ m`, the unit
/// and identity for one and two points, `Din ↦` pairing, `Dout ↦` copairing.
pub struct Evaluator<'a> {
    pub category: &'a AInfinityCategory,
    pub cy: Option<&'a CalabiYauData>,
}

impl<'a> Evaluator<'a> {
    pub fn new(category: &'a AInfinityCategory, cy: Option<&'a CalabiYauData>) -> Self {
        Evaluator { category, cy }
    }

    fn hom(&self, s: Slot) -> Result<&[usize]> {
        match s {
            Slot::Open(a, b) => {
                let nb = self.category.branes().len();
                if a >= nb || b >= nb {
                    return Err(Error::LabelMismatch(format!("brane label out of range in {s}")));
                }
                Ok(self.category.hom(a, b))
            }
            Slot::Closed => Err(Error::UnsupportedGenerator("closed states".into())),
        }
    }

    /// Tensor basis of an object, first slot most significant.
    pub fn basis(&self, o: &ObjectLabel) -> Result<Vec<Vec<usize>>> {
        let mut acc: Vec<Vec<usize>> = vec![Vec::new()];
        for &s in o.slots() {
            let h = self.hom(s)?;
            acc = acc.iter().flat_map(|w| h.iter().map(move |&x| join(w, &[x]))).collect();
        }
        Ok(acc)
    }

    fn local(&self, s: Slot, v: &SparseVector) -> Result<SparseVector> {
        let h = self.hom(s)?;
        let mut out = SparseVector::new();
        for (g, x) in v {
            match h.iter().position(|y| y == g) {
                Some(i) => add_entry(&mut out, i, x.clone()),
                None => return Err(Error::ShapeMismatch(format!("value leaves Hom{s}"))),
            }
        }
        Ok(out)
    }

    fn word_degree(&self, w: &[usize]) -> i64 {
        w.iter().map(|&x| self.category.degree(x)).sum()
    }

    fn cy(&self) -> Result<&CalabiYauData> {
        self.cy.ok_or_else(|| Error::InvalidInput("evaluation needs Calabi-Yau data".into()))
    }

    fn pairing(&self, f: &SparseVector, g: &SparseVector) -> Result<Scalar> {
        Ok(self.category.pairing(self.cy()?, f, g))
    }

    pub fn evaluate(&self, w: &MorphismWord) -> Result<SparseMatrix> {
        let rows = self.basis(w.target())?.len();
        let cols = self.basis(w.source())?.len();
        let mut acc = SparseMatrix::zeros(rows, cols);
        for (t, c) in w.terms() {
            acc = acc.add(&self.tree(t)?.scaled(c))?;
        }
        Ok(acc)
    }

    pub fn tree(&self, t: &Tree) -> Result<SparseMatrix> {
        let (src, _) = t.boundary()?;
        match t {
            Tree::Gen(g) => self.generator(g),
            Tree::Compose(ts) => {
                let mut m = self.tree(&ts[0])?;
                for t in &ts[1..] {
                    m = self.tree(t)?.mul(&m)?;
                }
                Ok(m)
            }
            Tree::Tensor(ts) => {
                let mut m = SparseMatrix::identity(1);
                let mut left = ObjectLabel::empty();
                for t in ts {
                    let b = self.tree(t)?;
                    let degs: Vec<i64> = self.basis(&left)?.iter().map(|w| self.word_degree(w)).collect();
                    let db = t.degree();
                    let mut k = SparseMatrix::zeros(m.rows() * b.rows(), m.cols() * b.cols());
                    for (i, j, x) in m.entries() {
                        let sign = Scalar::sign(db * degs[j]);
                        for (r, c, y) in b.entries() {
                            k.set(i * b.rows() + r, j * b.cols() + c, &sign * &(x * y));
                        }
                    }
                    m = k;
                    left = left.union(&t.boundary()?.0);
                }
                let _ = src;
                Ok(m)
            }
            Tree::Permute { source, perm } => {
                let basis = self.basis(source)?;
                let (_, tgt) = t.boundary()?;
                let index: HashMap<Vec<usize>, usize> = self.basis(&tgt)?.into_iter().enumerate().map(|(i, w)| (w, i)).collect();
                let mut m = SparseMatrix::zeros(index.len(), basis.len());
                for (j, w) in basis.iter().enumerate() {
                    let image: Vec<usize> = perm.iter().map(|&p| w[p]).collect();
                    let mut e = 0i64;
                    for a in 0..perm.len() {
                        for b in a + 1..perm.len() {
                            if perm[a] > perm[b] {
                                e += self.category.degree(image[a]) * self.category.degree(image[b]);
                            }
                        }
                    }
                    m.set(index[&image], j, Scalar::sign(e));
                }
                Ok(m)
            }
        }
    }

    pub fn generator(&self, g: &Generator) -> Result<SparseMatrix> {
        g.validate()?;
        let c = self.category;
        let src = self.basis(&g.source())?;
        let tgt_obj = g.target();
        let rows = self.basis(&tgt_obj)?.len();
        let mut m = SparseMatrix::zeros(rows, src.len());
        let e = |i: usize| crate::exactlin::unit_vector(i);
        match g {
            Generator::Identity(_) => return Ok(SparseMatrix::identity(src.len())),
            Generator::DiscPlus(l) if l.len() == 1 => {
                for (i, x) in self.local(tgt_obj.slots()[0], c.unit(l[0]))? {
                    m.set(i, 0, x);
                }
            }
            Generator::DiscPlus(l) if l.len() == 2 => return Ok(SparseMatrix::identity(src.len())),
            Generator::DiscPlus(_) => {
                for (j, w) in src.iter().enumerate() {
                    for (i, x) in self.local(tgt_obj.slots()[0], &c.product_basis(w))? {
                        m.set(i, j, x);
                    }
                }
            }
            Generator::TwistedDisc(..) => {
                for (j, w) in src.iter().enumerate() {
                    for (i, x) in self.local(tgt_obj.slots()[0], &c.star(&e(w[0])))? {
                        m.set(i, j, x);
                    }
                }
            }
            Generator::DiscIn2(..) => {
                for (j, w) in src.iter().enumerate() {
                    m.set(0, j, self.pairing(&e(w[0]), &e(w[1]))?);
                }
            }
            Generator::DiscAllIn(l) => {
                let n = l.len();
                for (j, w) in src.iter().enumerate() {
                    let head = match n {
                        1 => c.unit(l[0]).clone(),
                        2 => e(w[0]),
                        _ => c.product_basis(&w[..n - 1]),
                    };
                    m.set(0, j, self.pairing(&head, &e(w[n - 1]))?);
                }
            }
            Generator::DiscOut2(u, v) => {
                let huv = c.hom(*u, *v);
                let hvu = c.hom(*v, *u);
                let gram: Vec<Vec<Scalar>> = hvu
                    .iter()
                    .map(|&p| huv.iter().map(|&q| self.pairing(&e(p), &e(q))).collect::<Result<Vec<_>>>())
                    .collect::<Result<_>>()?;
                let gram = SparseMatrix::from_dense(hvu.len(), huv.len(), &gram)?;
                let inv = (hvu.len() == huv.len()).then(|| inverse(&gram)).flatten();
                let Some(inv) = inv else {
                    return Err(Error::NondegeneracyRequired(format!("Hom({v},{u}) ⊗ Hom({u},{v})")));
                };
                for (q, r, x) in inv.entries() {
                    m.set(q * hvu.len() + r, 0, x.clone());
                }
            }
            Generator::Annulus(_) => return Err(Error::UnsupportedGenerator(g.to_string())),
        }
        Ok(m)
    }
}

/// Matrix of a word in a category with optional Calabi-Yau data.
pub fn evaluate(w: &MorphismWord, c: &AInfinityCategory, cy: Option<&CalabiYauData>) -> Result<SparseMatrix> {
    Evaluator::new(c, cy).evaluate(w)
}

/// All generators occurring in a word.
pub fn generators_of(w: &MorphismWord) -> Vec<Generator> {
    let mut out = Vec::new();
    for (t, _) in w.terms() {
        let mut gs = Vec::new();
        t.generators(&mut gs);
        out.extend(gs.into_iter().cloned());
    }
    out
}

// ---------------------------------------------------------------------------
// Closed states

/// Annulus words `(g0, …, g(n-1))` with `gi` in the slots of
/// `A(λ0, …, λ(n-1))`, modulo unit insertion away from the special slot and
/// the twisted reflection.
#[derive(Clone, Debug)]
pub struct ClosedStateComplex {
    pub trunc: usize,
    pub complex: FiniteComplex,
    pub words: BTreeMap<i64, Vec<Vec<usize>>>,
    index: HashMap<Vec<usize>, (i64, usize)>,
    pub quotients: BTreeMap<i64, Quotient>,
}

impl ClosedStateComplex {
    pub fn dim(&self, k: i64) -> usize {
        self.complex.dim(k)
    }

    pub fn locate(&self, w: &[usize]) -> Option<(i64, usize)> {
        self.index.get(w).copied()
    }

    fn vector(&self, k: i64, chain: &WordChain) -> Result<SparseVector> {
        let mut v = SparseVector::new();
        for (w, x) in chain {
            match self.locate(w) {
                Some((deg, i)) if deg == k => add_entry(&mut v, i, x.clone()),
                _ => return Err(Error::InvalidInput(format!("annulus word of length {} leaves degree {k}", w.len()))),
            }
        }
        Ok(v)
    }

    /// Class of a combination of annulus words in degree `k`.
    pub fn class_of(&self, k: i64, chain: &WordChain) -> Result<SparseVector> {
        let v = self.vector(k, chain)?;
        Ok(self.quotients.get(&k).map_or(SparseVector::new(), |q| q.projection.apply(&v)))
    }
}

fn annulus_degree(a: &AInfinityCategory, w: &[usize]) -> i64 {
    w.iter().map(|&x| a.degree(x)).sum::<i64>() + w.len() as i64 - 1
}

fn push_chain(out: &mut WordChain, chain: WordChain) {
    for (w, x) in chain {
        let e = out.entry(w.clone()).or_insert_with(Scalar::zero);
        *e += &x;
        if e.is_zero() {
            out.remove(&w);
        }
    }
}

/// Boundary of an annulus word: the algebra differential on each slot plus
/// one term per disc with two inputs glued into the annulus. Slots `i < n-1`
/// sit after the special slot in the Koszul order.
fn annulus_differential(a: &AInfinityCategory, g: &[usize]) -> WordChain {
    let n = g.len();
    let deg = |i: usize| a.degree(g[i]);
    let e = |i: usize| crate::exactlin::unit_vector(g[i]);
    // before[m] = |g(n-1)| + Σ_{j<m} (|gj| + 1)
    let mut before = vec![deg(n - 1); n];
    for m in 1..n {
        before[m] = before[m - 1] + deg(m - 1) + 1;
    }
    let mut out = WordChain::new();
    let with = |slot: usize, v: SparseVector| -> Vec<SparseVector> { (0..n).map(|j| if j == slot { v.clone() } else { e(j) }).collect() };
    for m in 0..n {
        let dv = a.m(&[e(m)]);
        if dv.is_empty() {
            continue;
        }
        let s = if m == n - 1 { Scalar::one() } else { -Scalar::sign(before[m]) };
        push_chain(&mut out, expand(&with(m, dv), &s));
    }
    if n < 2 {
        return out;
    }
    let m2 = |x: usize, y: usize| a.m(&[e(x), e(y)]);
    // Discs away from the special slot.
    for m in 0..n.saturating_sub(2) {
        let mut fs: Vec<SparseVector> = (0..n).map(e).collect();
        fs.splice(m..=m + 1, [m2(m, m + 1)]);
        push_chain(&mut out, expand(&fs, &Scalar::sign(before[m + 1])));
    }
    // The disc through the special slot and the first slot.
    let mut fs: Vec<SparseVector> = (1..n - 1).map(e).collect();
    fs.push(m2(n - 1, 0));
    push_chain(&mut out, expand(&fs, &Scalar::sign(deg(n - 1))));
    // The disc through the last ordinary slot and the special slot.
    let mut fs: Vec<SparseVector> = (0..n - 2).map(e).collect();
    fs.push(m2(n - 2, n - 1));
    push_chain(&mut out, expand(&fs, &-Scalar::sign((deg(n - 2) + 1) * before[n - 2])));
    out
}

/// Twisted reflection `(g0, …, g(n-2), g(n-1)) ↦ ε (g(n-2)⋆, …, g0⋆, g(n-1)⋆)`.
fn annulus_reflection(a: &AInfinityCategory, g: &[usize]) -> WordChain {
    let n = g.len();
    let shifted: Vec<i64> = g[..n - 1].iter().map(|&x| a.degree(x) + 1).collect();
    let mut exp = shifted.len() as i64;
    for i in 0..shifted.len() {
        for k in i + 1..shifted.len() {
            exp += shifted[i] * shifted[k];
        }
    }
    let mut fs: Vec<SparseVector> = g[..n - 1].iter().rev().map(|&x| a.star(&crate::exactlin::unit_vector(x))).collect();
    fs.push(a.star(&crate::exactlin::unit_vector(g[n - 1])));
    expand(&fs, &Scalar::sign(exp))
}

/// Closed-state complex of a DG category, truncated at annuli with `trunc`
/// marked points.
pub fn closed_state_complex(c: &InvolutiveCategory, trunc: usize) -> Result<ClosedStateComplex> {
    if trunc == 0 {
        return Err(Error::InvalidInput("trunc must be at least 1".into()));
    }
    let a = from_dg(c)?;
    let mut words: BTreeMap<i64, Vec<Vec<usize>>> = BTreeMap::new();
    for n in 1..=trunc {
        let mut ws = a.cyclic_words(n);
        ws.sort();
        for w in ws {
            words.entry(annulus_degree(&a, &w)).or_default().push(w);
        }
    }
    let mut index = HashMap::new();
    for (&k, ws) in &words {
        for (i, w) in ws.iter().enumerate() {
            index.insert(w.clone(), (k, i));
        }
    }
    let mut cs = ClosedStateComplex { trunc, complex: FiniteComplex::new(0, vec![], vec![])?, words, index, quotients: BTreeMap::new() };
    let (lo, hi) = match (cs.words.keys().next(), cs.words.keys().next_back()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0, 0),
    };
    let mut rels: BTreeMap<i64, Vec<SparseVector>> = BTreeMap::new();
    for k in lo..=hi {
        let mut r = Vec::new();
        for w in cs.words.get(&k).cloned().unwrap_or_default() {
            let mut chain = annulus_reflection(&a, &w);
            for x in chain.values_mut() {
                *x = -x.clone();
            }
            push_chain(&mut chain, WordChain::from([(w.clone(), Scalar::one())]));
            if !chain.is_empty() {
                r.push(cs.vector(k, &chain)?);
            }
        }
        // Unit discs glued into an ordinary slot of a shorter annulus.
        for u in cs.words.get(&(k - 1)).cloned().unwrap_or_default() {
            if u.len() >= trunc {
                continue;
            }
            for p in 0..u.len() {
                let obj = a.element(u[p]).source;
                let mut fs: Vec<SparseVector> = u.iter().map(|&x| crate::exactlin::unit_vector(x)).collect();
                fs.insert(p, a.unit(obj).clone());
                let chain = expand(&fs, &Scalar::one());
                if !chain.is_empty() {
                    r.push(cs.vector(k, &chain)?);
                }
            }
        }
        let dim = cs.words.get(&k).map_or(0, Vec::len);
        cs.quotients.insert(k, quotient_presentation(dim, &r)?);
        rels.insert(k, r);
    }
    let mut dims = Vec::new();
    let mut diffs = Vec::new();
    for k in lo..=hi {
        let ws = cs.words.get(&k).cloned().unwrap_or_default();
        let below = cs.words.get(&(k - 1)).map_or(0, Vec::len);
        let mut d = SparseMatrix::zeros(below, ws.len());
        for (j, w) in ws.iter().enumerate() {
            for (i, x) in cs.vector(k - 1, &annulus_differential(&a, w))? {
                d.set(i, j, x);
            }
        }
        let q = &cs.quotients[&k];
        let induced = match cs.quotients.get(&(k - 1)) {
            Some(qb) => {
                for r in &rels[&k] {
                    if !qb.projection.apply(&d.apply(r)).is_empty() {
                        return Err(Error::DescentFailure { degree: k });
                    }
                }
                qb.projection.mul(&d)?.mul(&q.section)?
            }
            None => SparseMatrix::zeros(0, q.dim),
        };
        dims.push(q.dim);
        diffs.push(induced);
    }
    cs.complex = FiniteComplex::new(lo, dims, diffs)?;
    Ok(cs)
}

/// The identification of closed states with normalized involutive Hochschild
/// chains: the annulus word `(g0, …, g(n-1))` goes to `g(n-1) ⊗ g0 ⊗ … ⊗ g(n-2)`.
pub fn identification(cs: &ClosedStateComplex, hh: &TruncatedComplex, k: i64) -> Result<SparseMatrix> {
    let ws = cs.words.get(&k).cloned().unwrap_or_default();
    let mut r = SparseMatrix::zeros(hh.words.dim(k), ws.len());
    for (j, w) in ws.iter().enumerate() {
        let mut f = vec![w[w.len() - 1]];
        f.extend_from_slice(&w[..w.len() - 1]);
        match hh.words.locate(&f) {
            Some((deg, i)) if deg == k => r.set(i, j, Scalar::one()),
            _ => return Err(Error::InvalidInput(format!("no Hochschild word for annulus word in degree {k}"))),
        }
    }
    let section = cs.quotients.get(&k).map_or(SparseMatrix::zeros(ws.len(), 0), |q| q.section.clone());
    hh.projection(k).mul(&r)?.mul(&section)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonRow {
    pub degree: i64,
    pub closed_dim: usize,
    pub hochschild_dim: usize,
    /// The identification is square and invertible.
    pub invertible: bool,
    /// `d_hh ∘ Φ_k = Φ_(k-1) ∘ d_closed`.
    pub commutes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn equal(&self) -> bool {
        self.rows.iter().all(|r| r.closed_dim == r.hochschild_dim && r.invertible && r.commutes)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "degree  closed  hochschild  iso  chain-map")?;
        for r in &self.rows {
            writeln!(f, "{:>6}  {:>6}  {:>10}  {:>3}  {:>9}", r.degree, r.closed_dim, r.hochschild_dim, yes(r.invertible), yes(r.commutes))?;
        }
        if self.equal() {
            write!(f, "EQUAL (dims and differentials)")
        } else {
            write!(f, "DIFFERENT")
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Compares the closed-state complex with the normalized involutive
/// Hochschild complex degree by degree.
pub fn compare_with_hochschild(c: &InvolutiveCategory, trunc: usize) -> Result<Comparison> {
    let cs = closed_state_complex(c, trunc)?;
    let hh = crate::hochschild::build_normalized_involutive(c, trunc)?;
    let lo = cs.complex.min_degree().min(hh.complex.min_degree());
    let hi = cs.complex.max_degree().max(hh.complex.max_degree());
    let mut rows = Vec::new();
    for k in lo..=hi {
        let phi = identification(&cs, &hh, k)?;
        let invertible = phi.rows() == phi.cols() && crate::exactlin::rank(&phi) == phi.rows();
        let commutes = if k > lo {
            let phi_below = identification(&cs, &hh, k - 1)?;
            hh.complex.differential(k).mul(&phi)? == phi_below.mul(&cs.complex.differential(k))?
        } else {
            true
        };
        rows.push(ComparisonRow { degree: k, closed_dim: cs.dim(k), hochschild_dim: hh.complex.dim(k), invertible, commutes });
    }
    Ok(Comparison { rows })
}
