//! Basis-presented involutive DG categories.
//!
//! All hom spaces share one global basis, so elements are sparse vectors
//! over global indices and `d`, `⋆` are single square matrices.
//!
//! Conventions:
//! - `compose(f, g)` for `f: a→b`, `g: b→c` is `g∘f : a→c`.
//! - Leibniz: `d(g∘f) = d(g)∘f + (-1)^{|g|} g∘d(f)`.
//! - `⋆` is an anti-homomorphism with the Koszul sign
//!   `(g∘f)⋆ = (-1)^{|f||g|} f⋆∘g⋆`, which is the plain law in degree 0.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactlin::{add_entry, axpy, unit_vector, Scalar, SparseMatrix, SparseVector};
use crate::report::{CheckReport, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraneSet {
    names: Vec<String>,
}

impl BraneSet {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidInput(format!("duplicate brane {n}")));
            }
        }
        Ok(BraneSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedHomSpace {
    pub source: usize,
    pub target: usize,
    pub basis: Vec<(String, i64)>,
}

/// One global basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    pub degree: i64,
    pub source: usize,
    pub target: usize,
}

/// Objects and hom bases, shared by the DG and A∞ structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    branes: BraneSet,
    basis: Vec<BasisElement>,
    /// Global indices of each hom space, keyed by (source, target).
    homs: BTreeMap<(usize, usize), Vec<usize>>,
}

impl Quiver {
    pub fn new(branes: BraneSet, homs: Vec<GradedHomSpace>) -> Result<Self> {
        let mut basis = Vec::new();
        let mut index = BTreeMap::new();
        for h in homs {
            if h.source >= branes.len() || h.target >= branes.len() {
                return Err(Error::InvalidInput("hom space refers to an unknown brane".into()));
            }
            if index.contains_key(&(h.source, h.target)) {
                return Err(Error::InvalidInput(format!(
                    "hom space ({}, {}) given twice",
                    branes.name(h.source),
                    branes.name(h.target)
                )));
            }
            let mut ids = Vec::new();
            for (name, degree) in h.basis {
                if basis.iter().any(|b: &BasisElement| b.name == name) {
                    return Err(Error::InvalidInput(format!("duplicate basis name {name}")));
                }
                ids.push(basis.len());
                basis.push(BasisElement { name, degree, source: h.source, target: h.target });
            }
            index.insert((h.source, h.target), ids);
        }
        Ok(Quiver { branes, basis, homs: index })
    }
    pub fn branes(&self) -> &BraneSet {
        &self.branes
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn element(&self, i: usize) -> &BasisElement {
        &self.basis[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b.name == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// Global indices of `Hom(a, b)`; empty if the space is zero.
    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        self.homs.get(&(a, b)).map_or(&[], |v| v.as_slice())
    }

    pub fn hom_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.homs.keys().copied()
    }

    pub fn is_single_object(&self) -> bool {
        self.branes.len() == 1
    }

    pub fn composable(&self, f: usize, g: usize) -> bool {
        self.basis[f].target == self.basis[g].source
    }

    pub fn max_abs_degree(&self) -> i64 {
        self.basis.iter().map(|b| b.degree.abs()).max().unwrap_or(0)
    }

    pub fn is_ungraded(&self) -> bool {
        self.basis.iter().all(|b| b.degree == 0)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    /// All composable basis pairs `(f, g)`.
    pub fn composable_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.dim();
        let mut out = Vec::new();
        for f in 0..n {
            for g in 0..n {
                if self.composable(f, g) {
                    out.push((f, g));
                }
            }
        }
        out
    }

    /// All composable basis words `f1 ⊗ … ⊗ fn` (target of `fi` = source of `f(i+1)`).
    pub fn composable_words(&self, len: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = if len == 0 { vec![] } else { (0..self.dim()).map(|i| vec![i]).collect() };
        for _ in 1..len {
            let mut next = Vec::new();
            for w in &out {
                let last = *w.last().unwrap();
                for g in 0..self.dim() {
                    if self.composable(last, g) {
                        let mut v = w.clone();
                        v.push(g);
                        next.push(v);
                    }
                }
            }
            out = next;
        }
        out
    }

    /// Composable words that also close up: target of the last is the
    /// source of the first.
    pub fn cyclic_words(&self, len: usize) -> Vec<Vec<usize>> {
        self.composable_words(len)
            .into_iter()
            .filter(|w| self.composable(*w.last().unwrap(), w[0]))
            .collect()
    }

    pub fn describe(&self, v: &SparseVector) -> String {
        format_vector(v, |i| self.name(i).to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvolutiveCategory {
    quiver: Quiver,
    compose: BTreeMap<(usize, usize), SparseVector>,
    units: Vec<SparseVector>,
    diff: SparseMatrix,
    star: SparseMatrix,
}

impl std::ops::Deref for InvolutiveCategory {
    type Target = Quiver;
    fn deref(&self) -> &Quiver {
        &self.quiver
    }
}

impl InvolutiveCategory {
    /// A category with the given hom bases and zero structure maps.
    pub fn new(branes: BraneSet, homs: Vec<GradedHomSpace>) -> Result<Self> {
        let quiver = Quiver::new(branes, homs)?;
        let n = quiver.dim();
        let units = vec![SparseVector::new(); quiver.branes.len()];
        Ok(InvolutiveCategory {
            quiver,
            compose: BTreeMap::new(),
            units,
            diff: SparseMatrix::zeros(n, n),
            star: SparseMatrix::zeros(n, n),
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn set_composition(&mut self, f: usize, g: usize, result: SparseVector) {
        let result: SparseVector = result.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        if result.is_empty() {
            self.compose.remove(&(f, g));
        } else {
            self.compose.insert((f, g), result);
        }
    }

    pub fn set_unit(&mut self, a: usize, unit: SparseVector) {
        self.units[a] = unit;
    }

    pub fn set_diff(&mut self, diff: SparseMatrix) -> Result<()> {
        self.check_square(&diff, "differential")?;
        self.diff = diff;
        Ok(())
    }

    pub fn set_star(&mut self, star: SparseMatrix) -> Result<()> {
        self.check_square(&star, "involution")?;
        self.star = star;
        Ok(())
    }

    fn check_square(&self, m: &SparseMatrix, what: &str) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "{what} matrix is {}x{}, expected {}x{}",
                m.rows(),
                m.cols(),
                self.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn unit(&self, a: usize) -> &SparseVector {
        &self.units[a]
    }

    pub fn diff_matrix(&self) -> &SparseMatrix {
        &self.diff
    }

    pub fn star_matrix(&self) -> &SparseMatrix {
        &self.star
    }

    /// `g∘f` for basis elements; zero when not composable.
    pub fn compose_basis(&self, f: usize, g: usize) -> SparseVector {
        self.compose.get(&(f, g)).cloned().unwrap_or_default()
    }

    /// Bilinear extension of `compose_basis`.
    pub fn compose(&self, f: &SparseVector, g: &SparseVector) -> SparseVector {
        let mut acc = SparseVector::new();
        for (&i, x) in f {
            for (&j, y) in g {
                if let Some(r) = self.compose.get(&(i, j)) {
                    axpy(&mut acc, &(x * y), r);
                }
            }
        }
        acc
    }

    pub fn d(&self, v: &SparseVector) -> SparseVector {
        self.diff.apply(v)
    }

    pub fn star(&self, v: &SparseVector) -> SparseVector {
        self.star.apply(v)
    }

    /// Nonzero structure constants, keyed by (first, second).
    pub fn composition_table(&self) -> &BTreeMap<(usize, usize), SparseVector> {
        &self.compose
    }

    /// Structural consistency: every structure constant lands in the right
    /// hom space.
    pub fn validate_shapes(&self) -> Result<()> {
        for (&(f, g), r) in &self.compose {
            if !self.composable(f, g) {
                return Err(Error::ShapeMismatch(format!(
                    "composition constant for non-composable pair ({}, {})",
                    self.name(f),
                    self.name(g)
                )));
            }
            let (a, c) = (self.basis[f].source, self.basis[g].target);
            self.expect_in(r, a, c, || format!("{}∘{}", self.name(g), self.name(f)))?;
        }
        for (a, u) in self.units.iter().enumerate() {
            self.expect_in(u, a, a, || format!("unit of {}", self.branes.name(a)))?;
        }
        for (i, b) in self.basis.iter().enumerate() {
            self.expect_in(&self.diff.column(i), b.source, b.target, || {
                format!("d({})", b.name)
            })?;
            self.expect_in(&self.star.column(i), b.target, b.source, || {
                format!("{}⋆", b.name)
            })?;
        }
        Ok(())
    }

    fn expect_in(
        &self,
        v: &SparseVector,
        a: usize,
        b: usize,
        what: impl Fn() -> String,
    ) -> Result<()> {
        for &i in v.keys() {
            let e = &self.basis[i];
            if e.source != a || e.target != b {
                return Err(Error::ShapeMismatch(format!(
                    "{} has a component {} outside Hom({}, {})",
                    what(),
                    e.name,
                    self.branes.name(a),
                    self.branes.name(b)
                )));
            }
        }
        Ok(())
    }

}

pub fn format_vector(v: &SparseVector, name: impl Fn(usize) -> String) -> String {
    if v.is_empty() {
        return "0".into();
    }
    let terms: Vec<String> = v
        .iter()
        .map(|(&i, x)| if x.is_one() { name(i) } else { format!("({x})·{}", name(i)) })
        .collect();
    terms.join(" + ")
}

/// Records a violation at the first coordinate where `lhs` and `rhs` differ.
pub(crate) fn compare(
    report: &mut CheckReport,
    law: &str,
    inputs: Vec<String>,
    lhs: &SparseVector,
    rhs: &SparseVector,
    name: impl Fn(usize) -> String,
) {
    report.checked += 1;
    if lhs == rhs {
        return;
    }
    let coord = lhs
        .keys()
        .chain(rhs.keys())
        .copied()
        .filter(|k| lhs.get(k) != rhs.get(k))
        .min()
        .expect("vectors differ somewhere");
    report.record(Violation {
        law: law.to_string(),
        inputs,
        coordinate: name(coord),
        lhs: lhs.get(&coord).cloned().unwrap_or_default(),
        rhs: rhs.get(&coord).cloned().unwrap_or_default(),
        detail: None,
    });
}

pub(crate) fn degree_violation(report: &mut CheckReport, law: &str, inputs: Vec<String>, comp: &str, got: i64, want: i64) {
    report.record(Violation {
        law: law.to_string(),
        inputs,
        coordinate: format!("{comp} (degree {got}, expected {want})"),
        lhs: Scalar::from_int(got),
        rhs: Scalar::from_int(want),
        detail: None,
    });
}

/// Checks degrees, `d² = 0`, Leibniz, associativity and the unit laws.
pub fn check_dg_axioms(c: &InvolutiveCategory) -> Result<CheckReport> {
    c.validate_shapes()?;
    let mut rep = CheckReport::new("dg axioms");
    let name = |i: usize| c.name(i).to_string();
    let n = c.dim();

    for (&(f, g), r) in &c.compose {
        rep.checked += 1;
        let want = c.degree(f) + c.degree(g);
        for &k in r.keys() {
            if c.degree(k) != want {
                degree_violation(&mut rep, "composition degree", vec![name(f), name(g)], c.name(k), c.degree(k), want);
                break;
            }
        }
    }
    for i in 0..n {
        rep.checked += 1;
        for (k, _) in c.d(&unit_vector(i)) {
            if c.degree(k) != c.degree(i) - 1 {
                degree_violation(&mut rep, "differential degree", vec![name(i)], c.name(k), c.degree(k), c.degree(i) - 1);
                break;
            }
        }
    }
    for a in 0..c.branes.len() {
        rep.checked += 1;
        for &k in c.unit(a).keys() {
            if c.degree(k) != 0 {
                degree_violation(&mut rep, "unit degree", vec![c.branes.name(a).to_string()], c.name(k), c.degree(k), 0);
                break;
            }
        }
    }

    for i in 0..n {
        let e = unit_vector(i);
        compare(&mut rep, "d∘d = 0", vec![name(i)], &c.d(&c.d(&e)), &SparseVector::new(), name);
    }

    let pairs = c.composable_pairs();
    for &(f, g) in &pairs {
        let (ef, eg) = (unit_vector(f), unit_vector(g));
        let lhs = c.d(&c.compose(&ef, &eg));
        let mut rhs = c.compose(&ef, &c.d(&eg));
        let sign = Scalar::sign(c.degree(g));
        axpy(&mut rhs, &sign, &c.compose(&c.d(&ef), &eg));
        compare(&mut rep, "leibniz", vec![name(f), name(g)], &lhs, &rhs, name);
    }

    for &(f, g) in &pairs {
        for h in 0..n {
            if !c.composable(g, h) {
                continue;
            }
            let (ef, eg, eh) = (unit_vector(f), unit_vector(g), unit_vector(h));
            let lhs = c.compose(&c.compose(&ef, &eg), &eh);
            let rhs = c.compose(&ef, &c.compose(&eg, &eh));
            compare(&mut rep, "associativity", vec![name(f), name(g), name(h)], &lhs, &rhs, name);
        }
    }

    for i in 0..n {
        let e = unit_vector(i);
        let b = &c.basis[i];
        let left = c.compose(c.unit(b.source), &e);
        compare(&mut rep, "left unit", vec![format!("1_{}", c.branes.name(b.source)), name(i)], &left, &e, name);
        let right = c.compose(&e, c.unit(b.target));
        compare(&mut rep, "right unit", vec![name(i), format!("1_{}", c.branes.name(b.target))], &right, &e, name);
    }
    Ok(rep)
}

/// Checks that `⋆` is a degree-preserving, unit-fixing, `d`-compatible
/// involutive anti-homomorphism.
pub fn check_involution_axioms(c: &InvolutiveCategory) -> Result<CheckReport> {
    c.validate_shapes()?;
    let mut rep = CheckReport::new("involution axioms");
    let name = |i: usize| c.name(i).to_string();
    let n = c.dim();
    for i in 0..n {
        let e = unit_vector(i);
        let s = c.star(&e);
        rep.checked += 1;
        if let Some(&k) = s.keys().find(|&&k| c.degree(k) != c.degree(i)) {
            degree_violation(&mut rep, "involution degree", vec![name(i)], c.name(k), c.degree(k), c.degree(i));
        }
        compare(&mut rep, "involutivity", vec![name(i)], &c.star(&s), &e, name);
        compare(&mut rep, "d-compatibility", vec![name(i)], &c.d(&s), &c.star(&c.d(&e)), name);
    }
    for a in 0..c.branes.len() {
        let u = c.unit(a);
        compare(&mut rep, "unit fixed", vec![format!("1_{}", c.branes.name(a))], &c.star(u), u, name);
    }
    for (f, g) in c.composable_pairs() {
        let (ef, eg) = (unit_vector(f), unit_vector(g));
        let lhs = c.star(&c.compose(&ef, &eg));
        let mut rhs = SparseVector::new();
        axpy(&mut rhs, &Scalar::sign(c.degree(f) * c.degree(g)), &c.compose(&c.star(&eg), &c.star(&ef)));
        compare(&mut rep, "anti-homomorphism", vec![name(f), name(g)], &lhs, &rhs, name);
    }
    Ok(rep)
}

/// Image of an element under `⋆`, landing in the reversed hom space.
pub fn apply_star(c: &InvolutiveCategory, element: &SparseVector) -> Result<SparseVector> {
    if let Some(&i) = element.keys().find(|&&i| i >= c.dim()) {
        return Err(Error::UnknownElement(format!("basis index {i}")));
    }
    Ok(c.star(element))
}

/// `apply_star` on a named basis element.
pub fn apply_star_named(c: &InvolutiveCategory, name: &str) -> Result<SparseVector> {
    apply_star(c, &unit_vector(c.index_of(name)?))
}

/// Builds a sparse element from `(name, coefficient)` pairs.
pub fn element(c: &InvolutiveCategory, terms: &[(&str, Scalar)]) -> Result<SparseVector> {
    let mut v = SparseVector::new();
    for (n, x) in terms {
        add_entry(&mut v, c.index_of(n)?, x.clone());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn ground_field_passes() {
        let k = samples::ground_field();
        assert!(check_dg_axioms(&k).unwrap().passed());
        assert!(check_involution_axioms(&k).unwrap().passed());
    }

    #[test]
    fn matrix_algebra_passes_and_transpose_works() {
        let m = samples::matrix_algebra();
        assert!(check_dg_axioms(&m).unwrap().passed());
        assert!(check_involution_axioms(&m).unwrap().passed());
        let e21 = element(&m, &[("e21", Scalar::one())]).unwrap();
        assert_eq!(apply_star_named(&m, "e12").unwrap(), e21);
        let twice = apply_star(&m, &apply_star(&m, &e21).unwrap()).unwrap();
        assert_eq!(twice, e21);
        assert_eq!(m.star_matrix().mul(m.star_matrix()).unwrap(), SparseMatrix::identity(4));
    }

    #[test]
    fn unit_is_star_fixed() {
        for c in [samples::ground_field(), samples::group_algebra_z2(), samples::matrix_algebra()] {
            assert_eq!(apply_star(&c, c.unit(0)).unwrap(), c.unit(0).clone());
        }
    }

    #[test]
    fn perturbed_matrix_algebra_has_exactly_the_brute_force_triples() {
        let mut m = samples::matrix_algebra();
        let (e11, e12) = (m.index_of("e11").unwrap(), m.index_of("e12").unwrap());
        let mut r = m.compose_basis(e11, e12);
        add_entry(&mut r, e12, Scalar::one());
        m.set_composition(e11, e12, r);
        let rep = check_dg_axioms(&m).unwrap();
        assert!(!rep.passed());
        assert!(rep.has_law("associativity"));

        // Brute force over dense multiplication tables, independent of `compose`.
        let n = m.dim();
        let table: Vec<Vec<Vec<Scalar>>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        let mut out = vec![Scalar::zero(); n];
                        for (k, x) in m.compose_basis(a, b) {
                            out[k] = x;
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        let mut broken = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut l = vec![Scalar::zero(); n];
                    let mut r = vec![Scalar::zero(); n];
                    for k in 0..n {
                        for t in 0..n {
                            l[t] += &table[a][b][k] * &table[k][c][t];
                            r[t] += &table[b][c][k] * &table[a][k][t];
                        }
                    }
                    if l != r {
                        broken += 1;
                    }
                }
            }
        }
        assert!(broken > 0);
        assert_eq!(rep.count("associativity"), broken);
    }

    #[test]
    fn negative_identity_star_fails_unit_law() {
        let mut c = samples::group_algebra_z2();
        c.set_star(SparseMatrix::identity(2).scaled(&-Scalar::one())).unwrap();
        let rep = check_involution_axioms(&c).unwrap();
        assert!(rep.has_law("unit fixed"));
    }

    #[test]
    fn shape_errors_and_unknown_elements() {
        let mut c = samples::ground_field();
        assert!(c.set_star(SparseMatrix::identity(2)).is_err());
        assert!(matches!(apply_star(&c, &unit_vector(7)), Err(Error::UnknownElement(_))));
        assert!(matches!(apply_star_named(&c, "nope"), Err(Error::UnknownElement(_))));
        let two = samples::two_object_matrix_category();
        let mut bad = two.clone();
        let (e11, e12) = (bad.index_of("p1").unwrap(), bad.index_of("x12").unwrap());
        bad.set_composition(e11, e12, unit_vector(e11));
        assert!(matches!(check_dg_axioms(&bad), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn dg_sample_satisfies_leibniz() {
        let c = samples::dg_contractible_pair();
        let rep = check_dg_axioms(&c).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(check_involution_axioms(&c).unwrap().passed());
        for i in 0..c.dim() {
            let e = unit_vector(i);
            assert!(c.d(&e).keys().all(|&k| c.degree(k) == c.degree(i) - 1));
            assert!(c.star(&e).keys().all(|&k| c.degree(k) == c.degree(i)));
        }
    }
}
