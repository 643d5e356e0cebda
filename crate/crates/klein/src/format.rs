//! JSON file formats for categories, graphs and surface words.
//!
//! Every file is an object with `"format_version": 1` and a `"kind"` of
//! `"category"`, `"graph"` or `"word"`. Rationals are strings such as
//! `"-3/4"`. Basis elements are referred to by name, branes by name in
//! category files and by index in words.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ainfty::{from_dg_with_nmax, AInfinityCategory, CalabiYauData};
use crate::error::{Error, Result};
use crate::exactlin::{add_entry, Scalar, SparseMatrix, SparseVector};
use crate::graphs::MobiusGraph;
use crate::invcat::{BraneSet, GradedHomSpace, InvolutiveCategory, Quiver};
use crate::surfcat::{Generator, MorphismWord, ObjectLabel, Slot, Tree};

pub const FORMAT_VERSION: u64 = 1;

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse { location: location.into(), message: message.into() }
}

/// Named linear combination, e.g. `{"e11": "1", "e22": "-1/2"}`.
pub type Combination = BTreeMap<String, Scalar>;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    pub name: String,
    #[serde(default)]
    pub degree: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomJson {
    pub source: String,
    pub target: String,
    pub basis: Vec<BasisJson>,
}

/// `result = second ∘ first`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComposeJson {
    pub first: String,
    pub second: String,
    pub result: Combination,
}

/// `m_n(inputs) = result`, inputs in composition order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductJson {
    pub inputs: Vec<String>,
    pub result: Combination,
}

/// A category file. With `products` it describes an A∞-category directly;
/// otherwise `compose` and `diff` describe a DG category. Basis elements
/// missing from `star` are fixed by the involution.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryJson {
    pub format_version: u64,
    pub kind: String,
    #[serde(default)]
    pub name: String,
    pub branes: Vec<String>,
    pub homs: Vec<HomJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compose: Vec<ComposeJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diff: BTreeMap<String, Combination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub products: Option<BTreeMap<String, Vec<ProductJson>>>,
    pub unit: BTreeMap<String, Combination>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub star: BTreeMap<String, Combination>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Combination>,
}

#[derive(Clone, Debug)]
pub enum LoadedCategory {
    Dg(InvolutiveCategory),
    AInfinity(AInfinityCategory),
}

#[derive(Clone, Debug)]
pub struct CategoryFile {
    pub name: String,
    pub category: LoadedCategory,
    pub trace: Option<SparseVector>,
}

impl CategoryFile {
    pub fn dg(&self) -> Option<&InvolutiveCategory> {
        match &self.category {
            LoadedCategory::Dg(c) => Some(c),
            LoadedCategory::AInfinity(_) => None,
        }
    }

    /// The A∞-category, built from the DG data when needed.
    pub fn ainfty(&self, n_max: usize) -> Result<AInfinityCategory> {
        match &self.category {
            LoadedCategory::Dg(c) => from_dg_with_nmax(c, n_max),
            LoadedCategory::AInfinity(a) => Ok(a.clone()),
        }
    }

    pub fn calabi_yau(&self) -> Option<CalabiYauData> {
        self.trace.clone().map(CalabiYauData::new)
    }
}

fn check_header(v: &Value, kind: &str) -> Result<()> {
    let version = v.get("format_version").ok_or_else(|| parse_err("format_version", "missing"))?;
    if version.as_u64() != Some(FORMAT_VERSION) {
        return Err(parse_err("format_version", format!("unsupported version {version}, expected {FORMAT_VERSION}")));
    }
    match v.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(()),
        Some(k) => Err(parse_err("kind", format!("expected \"{kind}\", found \"{k}\""))),
        None => Err(parse_err("kind", "missing")),
    }
}

fn read_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("line {} column {}", e.line(), e.column()), e.to_string()))
}

fn typed<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| parse_err(what, e.to_string()))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_err(path.display().to_string(), e.to_string()))
}

fn combination(q: &Quiver, c: &Combination, at: &str) -> Result<SparseVector> {
    let mut v = SparseVector::new();
    for (name, x) in c {
        let i = q.index_of(name).map_err(|_| parse_err(format!("{at}.{name}"), "unknown basis element"))?;
        add_entry(&mut v, i, x.clone());
    }
    Ok(v)
}

fn names(q: &Quiver, v: &SparseVector) -> Combination {
    v.iter().map(|(&i, x)| (q.name(i).to_string(), x.clone())).collect()
}

fn element(q: &Quiver, name: &str, at: &str) -> Result<usize> {
    q.index_of(name).map_err(|_| parse_err(at, format!("unknown basis element {name}")))
}

fn matrix_of(q: &Quiver, rows: &BTreeMap<String, Combination>, at: &str, default_identity: bool) -> Result<SparseMatrix> {
    let n = q.dim();
    let mut m = if default_identity { SparseMatrix::identity(n) } else { SparseMatrix::zeros(n, n) };
    for (src, img) in rows {
        let j = element(q, src, &format!("{at}.{src}"))?;
        for i in 0..n {
            m.set(i, j, Scalar::zero());
        }
        for (i, x) in combination(q, img, &format!("{at}.{src}"))? {
            m.set(i, j, x);
        }
    }
    Ok(m)
}

pub fn parse_category(text: &str) -> Result<CategoryFile> {
    let v = read_json(text)?;
    check_header(&v, "category")?;
    let f: CategoryJson = typed(v, "category")?;
    let branes = BraneSet::new(f.branes.iter().cloned()).map_err(|e| parse_err("branes", e.to_string()))?;
    let mut homs = Vec::new();
    for (k, h) in f.homs.iter().enumerate() {
        let at = format!("homs[{k}]");
        let brane = |n: &str| branes.index(n).ok_or_else(|| parse_err(at.clone(), format!("unknown brane {n}")));
        homs.push(GradedHomSpace {
            source: brane(&h.source)?,
            target: brane(&h.target)?,
            basis: h.basis.iter().map(|b| (b.name.clone(), b.degree)).collect(),
        });
    }
    let quiver = Quiver::new(branes.clone(), homs.clone()).map_err(|e| parse_err("homs", e.to_string()))?;
    let star = matrix_of(&quiver, &f.star, "star", true)?;
    let mut units = Vec::new();
    for a in 0..branes.len() {
        let name = branes.name(a);
        let u = f.unit.get(name).ok_or_else(|| parse_err(format!("unit.{name}"), "missing unit"))?;
        units.push(combination(&quiver, u, &format!("unit.{name}"))?);
    }
    if let Some(extra) = f.unit.keys().find(|k| branes.index(k).is_none()) {
        return Err(parse_err(format!("unit.{extra}"), "unknown brane"));
    }
    let trace = f.trace.as_ref().map(|t| combination(&quiver, t, "trace")).transpose()?;
    let category = match &f.products {
        Some(products) => {
            if !f.compose.is_empty() || !f.diff.is_empty() {
                return Err(parse_err("products", "give either products or compose/diff, not both"));
            }
            let n_max = products
                .keys()
                .map(|k| k.parse::<usize>().map_err(|_| parse_err(format!("products.{k}"), "arity must be a positive integer")))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .max()
                .unwrap_or(2)
                .max(2);
            let mut a = AInfinityCategory::new(quiver.clone(), n_max)?;
            for (arity, list) in products {
                let n: usize = arity.parse().expect("checked above");
                for (k, p) in list.iter().enumerate() {
                    let at = format!("products.{arity}[{k}]");
                    if p.inputs.len() != n {
                        return Err(parse_err(at, format!("expected {n} inputs")));
                    }
                    let word = p.inputs.iter().map(|x| element(&quiver, x, &at)).collect::<Result<Vec<_>>>()?;
                    let r = combination(&quiver, &p.result, &at)?;
                    a.set_product(word, r).map_err(|e| parse_err(at, e.to_string()))?;
                }
            }
            a.set_star(star).map_err(|e| parse_err("star", e.to_string()))?;
            for (i, u) in units.into_iter().enumerate() {
                a.set_unit(i, u);
            }
            LoadedCategory::AInfinity(a)
        }
        None => {
            let mut c = InvolutiveCategory::new(branes, homs).map_err(|e| parse_err("homs", e.to_string()))?;
            for (k, p) in f.compose.iter().enumerate() {
                let at = format!("compose[{k}]");
                let (a, b) = (element(&quiver, &p.first, &at)?, element(&quiver, &p.second, &at)?);
                if !quiver.composable(a, b) {
                    return Err(parse_err(at, format!("{} and {} are not composable", p.first, p.second)));
                }
                c.set_composition(a, b, combination(&quiver, &p.result, &at)?);
            }
            c.set_diff(matrix_of(&quiver, &f.diff, "diff", false)?).map_err(|e| parse_err("diff", e.to_string()))?;
            c.set_star(star).map_err(|e| parse_err("star", e.to_string()))?;
            for (i, u) in units.into_iter().enumerate() {
                c.set_unit(i, u);
            }
            c.validate_shapes().map_err(|e| parse_err("category", e.to_string()))?;
            LoadedCategory::Dg(c)
        }
    };
    Ok(CategoryFile { name: f.name, category, trace })
}

pub fn load_category(path: &Path) -> Result<CategoryFile> {
    parse_category(&read_file(path)?)
}

fn homs_json(q: &Quiver) -> Vec<HomJson> {
    q.hom_pairs()
        .map(|(s, t)| HomJson {
            source: q.branes().name(s).to_string(),
            target: q.branes().name(t).to_string(),
            basis: q.hom(s, t).iter().map(|&i| BasisJson { name: q.name(i).to_string(), degree: q.degree(i) }).collect(),
        })
        .collect()
}

/// Non-identity columns of the involution.
fn star_json(q: &Quiver, star: &SparseMatrix) -> BTreeMap<String, Combination> {
    (0..q.dim())
        .filter_map(|j| {
            let col = star.column(j);
            let fixed = col.len() == 1 && col.get(&j).is_some_and(Scalar::is_one);
            (!fixed).then(|| (q.name(j).to_string(), names(q, &col)))
        })
        .collect()
}

pub fn category_json(name: &str, c: &InvolutiveCategory, trace: Option<&SparseVector>) -> CategoryJson {
    let q = c.quiver();
    CategoryJson {
        format_version: FORMAT_VERSION,
        kind: "category".into(),
        name: name.into(),
        branes: q.branes().names().to_vec(),
        homs: homs_json(q),
        compose: c
            .composition_table()
            .iter()
            .filter(|(_, r)| !r.is_empty())
            .map(|(&(f, g), r)| ComposeJson { first: q.name(f).into(), second: q.name(g).into(), result: names(q, r) })
            .collect(),
        diff: (0..q.dim())
            .filter_map(|j| {
                let col = c.diff_matrix().column(j);
                (!col.is_empty()).then(|| (q.name(j).to_string(), names(q, &col)))
            })
            .collect(),
        products: None,
        unit: (0..q.branes().len()).map(|a| (q.branes().name(a).to_string(), names(q, c.unit(a)))).collect(),
        star: star_json(q, c.star_matrix()),
        trace: trace.map(|t| names(q, t)),
    }
}

pub fn ainfty_json(name: &str, a: &AInfinityCategory, trace: Option<&SparseVector>) -> CategoryJson {
    let q = a.quiver();
    let mut products = BTreeMap::new();
    for n in 1..=a.n_max() {
        if let Some(table) = a.product_table(n) {
            let list: Vec<ProductJson> = table
                .iter()
                .filter(|(_, r)| !r.is_empty())
                .map(|(w, r)| ProductJson { inputs: w.iter().map(|&i| q.name(i).to_string()).collect(), result: names(q, r) })
                .collect();
            if !list.is_empty() {
                products.insert(n.to_string(), list);
            }
        }
    }
    CategoryJson {
        format_version: FORMAT_VERSION,
        kind: "category".into(),
        name: name.into(),
        branes: q.branes().names().to_vec(),
        homs: homs_json(q),
        compose: Vec::new(),
        diff: BTreeMap::new(),
        products: Some(products),
        unit: (0..q.branes().len()).map(|a2| (q.branes().name(a2).to_string(), names(q, a.unit(a2)))).collect(),
        star: star_json(q, a.star_matrix()),
        trace: trace.map(|t| names(q, t)),
    }
}

pub fn to_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

// ---------------------------------------------------------------------------
// Graphs

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfEdgeJson {
    pub id: usize,
    pub vertex: usize,
    #[serde(default)]
    pub colour: u8,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegJson {
    pub vertex: usize,
    pub label: usize,
}

/// Half-edges are numbered `0..n`; `edges` pairs them up and each vertex
/// lists its half-edges in cyclic order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub format_version: u64,
    pub kind: String,
    #[serde(default)]
    pub name: String,
    pub vertices: usize,
    pub half_edges: Vec<HalfEdgeJson>,
    pub edges: Vec<[usize; 2]>,
    pub cyclic_order: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<LegJson>,
}

pub fn parse_graph(text: &str) -> Result<MobiusGraph> {
    let v = read_json(text)?;
    check_header(&v, "graph")?;
    let f: GraphJson = typed(v, "graph")?;
    let n = f.half_edges.len();
    let mut lambda = vec![usize::MAX; n];
    let mut colour = vec![0u8; n];
    for (k, h) in f.half_edges.iter().enumerate() {
        if h.id >= n || lambda[h.id] != usize::MAX {
            return Err(parse_err(format!("half_edges[{k}]"), format!("half-edge ids must be 0..{n} without repeats")));
        }
        lambda[h.id] = h.vertex;
        colour[h.id] = h.colour;
    }
    let mut iota = vec![usize::MAX; n];
    for (k, &[a, b]) in f.edges.iter().enumerate() {
        if a >= n || b >= n || a == b || iota[a] != usize::MAX || iota[b] != usize::MAX {
            return Err(parse_err(format!("edges[{k}]"), "each half-edge must appear in exactly one edge"));
        }
        iota[a] = b;
        iota[b] = a;
    }
    if let Some(h) = iota.iter().position(|&x| x == usize::MAX) {
        return Err(parse_err("edges", format!("half-edge {h} is not paired")));
    }
    let legs = f.legs.iter().map(|l| (l.vertex, l.label)).collect();
    MobiusGraph::from_parts(f.vertices, iota, lambda, f.cyclic_order, legs, colour).map_err(|e| parse_err("graph", e.to_string()))
}

pub fn load_graph(path: &Path) -> Result<MobiusGraph> {
    parse_graph(&read_file(path)?)
}

pub fn graph_json(name: &str, g: &MobiusGraph) -> GraphJson {
    let fg = g.graph();
    GraphJson {
        format_version: FORMAT_VERSION,
        kind: "graph".into(),
        name: name.into(),
        vertices: fg.num_vertices(),
        half_edges: (0..fg.num_half_edges()).map(|h| HalfEdgeJson { id: h, vertex: fg.lambda(h), colour: g.colour(h) }).collect(),
        edges: fg.edges().into_iter().map(|(a, b)| [a, b]).collect(),
        cyclic_order: (0..fg.num_vertices()).map(|v| g.ribbon().cyclic_order(v).to_vec()).collect(),
        legs: g.ribbon().leg_labels().iter().map(|(&vertex, &label)| LegJson { vertex, label }).collect(),
    }
}

// ---------------------------------------------------------------------------
// Surface words

/// `[s, t]` for an open slot, `"c"` for a closed one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlotJson {
    Open([usize; 2]),
    Closed(String),
}

/// One of `{"gen": …, "labels": […]}`, `{"gen": "Identity", "slots": […]}`,
/// `{"compose": […]}` (applied in order), `{"tensor": […]}` or
/// `{"permute": […], "source": […]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeJson {
    Gen {
        gen: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        labels: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slots: Option<Vec<SlotJson>>,
    },
    Compose {
        compose: Vec<TreeJson>,
    },
    Tensor {
        tensor: Vec<TreeJson>,
    },
    Permute {
        permute: Vec<usize>,
        source: Vec<SlotJson>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    #[serde(default = "Scalar::one")]
    pub coeff: Scalar,
    pub tree: TreeJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordJson {
    pub format_version: u64,
    pub kind: String,
    #[serde(default)]
    pub name: String,
    pub terms: Vec<TermJson>,
}

fn slot_from(s: &SlotJson, at: &str) -> Result<Slot> {
    match s {
        SlotJson::Open([a, b]) => Ok(Slot::Open(*a, *b)),
        SlotJson::Closed(c) if c == "c" => Ok(Slot::Closed),
        SlotJson::Closed(c) => Err(parse_err(at, format!("slot must be [s, t] or \"c\", found \"{c}\""))),
    }
}

fn slot_json(s: &Slot) -> SlotJson {
    match s {
        Slot::Open(a, b) => SlotJson::Open([*a, *b]),
        Slot::Closed => SlotJson::Closed("c".into()),
    }
}

fn tree_from(t: &TreeJson, at: &str) -> Result<Tree> {
    Ok(match t {
        TreeJson::Gen { gen, labels, slots } => {
            let pair = || match labels.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(parse_err(at, format!("{gen} takes two labels"))),
            };
            let g = match gen.as_str() {
                "DiscAllIn" | "D" => Generator::DiscAllIn(labels.clone()),
                "DiscPlus" | "D+" => Generator::DiscPlus(labels.clone()),
                "Annulus" | "A" => Generator::Annulus(labels.clone()),
                "TwistedDisc" | "Dt" => {
                    let (a, b) = pair()?;
                    Generator::TwistedDisc(a, b)
                }
                "DiscIn2" | "Din" => {
                    let (a, b) = pair()?;
                    Generator::DiscIn2(a, b)
                }
                "DiscOut2" | "Dout" => {
                    let (a, b) = pair()?;
                    Generator::DiscOut2(a, b)
                }
                "Identity" => {
                    let slots = slots.as_ref().ok_or_else(|| parse_err(at, "Identity needs slots"))?;
                    Generator::Identity(ObjectLabel::new(slots.iter().map(|s| slot_from(s, at)).collect::<Result<_>>()?))
                }
                other => return Err(parse_err(at, format!("unknown generator {other}"))),
            };
            g.validate().map_err(|e| parse_err(at, e.to_string()))?;
            Tree::Gen(g)
        }
        TreeJson::Compose { compose } => {
            Tree::Compose(compose.iter().enumerate().map(|(k, t)| tree_from(t, &format!("{at}.compose[{k}]"))).collect::<Result<_>>()?)
        }
        TreeJson::Tensor { tensor } => {
            Tree::Tensor(tensor.iter().enumerate().map(|(k, t)| tree_from(t, &format!("{at}.tensor[{k}]"))).collect::<Result<_>>()?)
        }
        TreeJson::Permute { permute, source } => Tree::Permute {
            source: ObjectLabel::new(source.iter().map(|s| slot_from(s, at)).collect::<Result<_>>()?),
            perm: permute.clone(),
        },
    })
}

pub fn tree_json(t: &Tree) -> TreeJson {
    match t {
        Tree::Gen(g) => {
            let (gen, labels) = match g {
                Generator::DiscAllIn(l) => ("DiscAllIn", l.clone()),
                Generator::DiscPlus(l) => ("DiscPlus", l.clone()),
                Generator::Annulus(l) => ("Annulus", l.clone()),
                Generator::TwistedDisc(a, b) => ("TwistedDisc", vec![*a, *b]),
                Generator::DiscIn2(a, b) => ("DiscIn2", vec![*a, *b]),
                Generator::DiscOut2(a, b) => ("DiscOut2", vec![*a, *b]),
                Generator::Identity(o) => {
                    return TreeJson::Gen { gen: "Identity".into(), labels: Vec::new(), slots: Some(o.slots().iter().map(slot_json).collect()) }
                }
            };
            TreeJson::Gen { gen: gen.into(), labels, slots: None }
        }
        Tree::Compose(ts) => TreeJson::Compose { compose: ts.iter().map(tree_json).collect() },
        Tree::Tensor(ts) => TreeJson::Tensor { tensor: ts.iter().map(tree_json).collect() },
        Tree::Permute { source, perm } => TreeJson::Permute { permute: perm.clone(), source: source.slots().iter().map(slot_json).collect() },
    }
}

pub fn parse_word(text: &str) -> Result<MorphismWord> {
    let v = read_json(text)?;
    check_header(&v, "word")?;
    let f: WordJson = typed(v, "word")?;
    let Some(first) = f.terms.first() else {
        return Err(parse_err("terms", "a word needs at least one term"));
    };
    let first = tree_from(&first.tree, "terms[0].tree")?;
    let (source, target) = first.boundary().map_err(|e| parse_err("terms[0].tree", e.to_string()))?;
    let mut trees = Vec::new();
    for (k, t) in f.terms.iter().enumerate() {
        let at = format!("terms[{k}].tree");
        trees.push((tree_from(&t.tree, &at)?, t.coeff.clone()));
    }
    MorphismWord::from_terms(source, target, trees)
}

pub fn load_word(path: &Path) -> Result<MorphismWord> {
    parse_word(&read_file(path)?)
}

pub fn word_json(name: &str, w: &MorphismWord) -> WordJson {
    WordJson {
        format_version: FORMAT_VERSION,
        kind: "word".into(),
        name: name.into(),
        terms: w.terms().map(|(t, c)| TermJson { coeff: c.clone(), tree: tree_json(t) }).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{is_isomorphic, loop_graph, theta_graph, MobiusGraph};
    use crate::samples;

    fn data(name: &str) -> std::path::PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
    }

    fn same_category(a: &InvolutiveCategory, b: &InvolutiveCategory) {
        assert_eq!(to_pretty(&category_json("", a, None)), to_pretty(&category_json("", b, None)));
    }

    /// Planar theta with a bivalent vertex on the third edge.
    fn subdivided_theta() -> MobiusGraph {
        MobiusGraph::from_parts(
            3,
            vec![3, 4, 6, 0, 1, 7, 2, 5],
            vec![0, 0, 0, 1, 1, 1, 2, 2],
            vec![vec![0, 1, 2], vec![5, 4, 3], vec![6, 7]],
            BTreeMap::new(),
            vec![0; 8],
        )
        .unwrap()
    }

    /// Regenerates `data/`: `cargo test -p klein write_bundled_data -- --ignored`.
    #[test]
    #[ignore]
    fn write_bundled_data() {
        let write = |name: &str, text: String| std::fs::write(data(name), text).unwrap();
        for s in samples::bundled() {
            write(&format!("{}.json", s.name), to_pretty(&category_json(s.name, &s.category, s.trace.as_ref())));
            let p = samples::perturbed(s.name).unwrap();
            let name = format!("{}_perturbed", s.name);
            write(&format!("{name}.json"), to_pretty(&category_json(&name, &p.category, p.trace.as_ref())));
        }
        write("mobius_loop.json", to_pretty(&graph_json("mobius_loop", &loop_graph(true))));
        write("annulus_loop.json", to_pretty(&graph_json("annulus_loop", &loop_graph(false))));
        let r1 = crate::surfcat::compose(
            &MorphismWord::generator(Generator::TwistedDisc(0, 1)).unwrap(),
            &MorphismWord::generator(Generator::TwistedDisc(1, 0)).unwrap(),
        )
        .unwrap();
        write("twist_twice.json", to_pretty(&word_json("twist_twice", &r1)));
        let strip = ObjectLabel::open(&[(0, 0)]);
        let id = || Tree::Gen(Generator::Identity(strip.clone()));
        let snake = Tree::Compose(vec![
            Tree::Tensor(vec![id(), Tree::Gen(Generator::DiscOut2(0, 0))]),
            Tree::Tensor(vec![Tree::Gen(Generator::DiscIn2(0, 0)), id()]),
        ]);
        write("snake.json", to_pretty(&word_json("snake", &MorphismWord::from_tree(snake).unwrap())));
        write("strip.json", to_pretty(&word_json("strip", &MorphismWord::identity(strip.clone()))));
        write("theta.json", to_pretty(&graph_json("theta", &theta_graph(true))));
        write("theta_subdivided.json", to_pretty(&graph_json("theta_subdivided", &subdivided_theta())));
    }

    #[test]
    fn categories_round_trip() {
        for s in samples::bundled() {
            let text = to_pretty(&category_json(s.name, &s.category, s.trace.as_ref()));
            let back = parse_category(&text).unwrap();
            same_category(back.dg().unwrap(), &s.category);
            assert_eq!(back.trace, s.trace);
        }
    }

    #[test]
    fn bundled_files_match_the_samples() {
        for s in samples::bundled() {
            let f = load_category(&data(&format!("{}.json", s.name))).unwrap();
            same_category(f.dg().unwrap(), &s.category);
            assert_eq!(f.trace, s.trace, "{}", s.name);
            let p = samples::perturbed(s.name).unwrap();
            let f = load_category(&data(&format!("{}_perturbed.json", s.name))).unwrap();
            same_category(f.dg().unwrap(), &p.category);
        }
        let m = load_graph(&data("mobius_loop.json")).unwrap();
        assert!(is_isomorphic(&m, &loop_graph(true)).is_some());
        let a = load_graph(&data("annulus_loop.json")).unwrap();
        assert!(is_isomorphic(&a, &loop_graph(false)).is_some());
    }

    #[test]
    fn ainfty_files_round_trip() {
        let s = &samples::bundled()[2];
        let a = crate::ainfty::from_dg(&s.category).unwrap();
        let text = to_pretty(&ainfty_json("m2", &a, s.trace.as_ref()));
        let back = parse_category(&text).unwrap();
        let LoadedCategory::AInfinity(b) = &back.category else { panic!("expected products") };
        assert_eq!(to_pretty(&ainfty_json("m2", b, s.trace.as_ref())), text);
    }

    #[test]
    fn errors_carry_locations() {
        let err = parse_category("{ \"format_version\": 1, ").unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location.starts_with("line 1")), "{err}");
        let err = parse_category(r#"{"format_version": 2, "kind": "category"}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "format_version"));
        let mut j = category_json("k", &samples::ground_field(), None);
        j.compose[0].result.insert("nope".into(), Scalar::one());
        let err = parse_category(&to_pretty(&j)).unwrap_err();
        assert!(matches!(err, Error::Parse { ref location, .. } if location == "compose[0].nope"), "{err}");
    }

    #[test]
    fn graphs_and_words_round_trip() {
        for twisted in [false, true] {
            let g = loop_graph(twisted);
            let back = parse_graph(&to_pretty(&graph_json("loop", &g))).unwrap();
            assert_eq!(back, g);
        }
        let w = crate::surfcat::compose(
            &MorphismWord::generator(Generator::TwistedDisc(0, 1)).unwrap(),
            &MorphismWord::generator(Generator::TwistedDisc(1, 0)).unwrap(),
        )
        .unwrap();
        let text = to_pretty(&word_json("r1", &w));
        assert_eq!(parse_word(&text).unwrap(), w);
        let short = r#"{"format_version": 1, "kind": "word", "terms": [{"coeff": "-1/2", "tree": {"gen": "D+", "labels": [0, 1, 2]}}]}"#;
        let w = parse_word(short).unwrap();
        assert_eq!(w.terms().next().unwrap().1, &Scalar::from_ratio(-1, 2));
    }
}
