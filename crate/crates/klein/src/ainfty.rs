//! Involutive A∞-categories with Calabi-Yau data.
//!
//! Products act on composable basis words `f1 ⊗ … ⊗ fn` with
//! `fi: c_i → c_{i+1}` and have degree `n - 2` (so `m1` lowers degree).
//!
//! Sign conventions:
//! - The relation applies `Id^{⊗i} ⊗ m_j ⊗ Id^{⊗l}` with the Koszul sign
//!   `(-1)^{j·(|f1|+…+|fi|)}` on top of the printed `(-1)^{i+jl}`.
//! - `(f1 ⊗ … ⊗ fn)⋆ = (-1)^{Σ_{i<k}|fi||fk|} fn⋆ ⊗ … ⊗ f1⋆`.
//! - A DG category becomes `m1 = d`, `m2(f ⊗ g) = (-1)^{|f||g|} g∘f`.
//! - The pairing is `⟨f, g⟩ = Tr(g∘f) = (-1)^{|f||g|} Tr(m2(f ⊗ g))`; its
//!   symmetry and star laws carry the sign `(-1)^{|f||g|}`.
//!
//! In degree zero all of these reduce to the unsigned formulas.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactlin::{axpy, complement_basis, kernel_basis, rank, unit_vector, Scalar, SparseMatrix, SparseVector};
use crate::invcat::{compare, degree_violation, format_vector, InvolutiveCategory, Quiver};
use crate::report::{CheckReport, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinityCategory {
    quiver: Quiver,
    /// `products[n][word]` is `m_n(word)` for a composable basis word.
    products: BTreeMap<usize, BTreeMap<Vec<usize>, SparseVector>>,
    star: SparseMatrix,
    units: Vec<SparseVector>,
    n_max: usize,
}

impl std::ops::Deref for AInfinityCategory {
    type Target = Quiver;
    fn deref(&self) -> &Quiver {
        &self.quiver
    }
}

impl AInfinityCategory {
    /// Zero products, zero involution and zero units.
    pub fn new(quiver: Quiver, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidInput("n_max must be at least 1".into()));
        }
        let n = quiver.dim();
        let units = vec![SparseVector::new(); quiver.branes().len()];
        Ok(AInfinityCategory {
            quiver,
            products: BTreeMap::new(),
            star: SparseMatrix::zeros(n, n),
            units,
            n_max,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn set_product(&mut self, word: Vec<usize>, result: SparseVector) -> Result<()> {
        let n = word.len();
        if n == 0 || n > self.n_max {
            return Err(Error::ShapeMismatch(format!(
                "product of arity {n} outside 1..={}",
                self.n_max
            )));
        }
        if word.iter().any(|&i| i >= self.dim()) || result.keys().any(|&i| i >= self.dim()) {
            return Err(Error::ShapeMismatch("product refers to an unknown basis element".into()));
        }
        let result: SparseVector = result.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        let table = self.products.entry(n).or_default();
        if result.is_empty() {
            table.remove(&word);
        } else {
            table.insert(word, result);
        }
        Ok(())
    }

    pub fn set_star(&mut self, star: SparseMatrix) -> Result<()> {
        if star.rows() != self.dim() || star.cols() != self.dim() {
            return Err(Error::ShapeMismatch("involution matrix has the wrong shape".into()));
        }
        self.star = star;
        Ok(())
    }

    pub fn set_unit(&mut self, a: usize, unit: SparseVector) {
        self.units[a] = unit;
    }

    pub fn unit(&self, a: usize) -> &SparseVector {
        &self.units[a]
    }

    pub fn star_matrix(&self) -> &SparseMatrix {
        &self.star
    }

    pub fn star(&self, v: &SparseVector) -> SparseVector {
        self.star.apply(v)
    }

    pub fn product_table(&self, n: usize) -> Option<&BTreeMap<Vec<usize>, SparseVector>> {
        self.products.get(&n)
    }

    /// `m_n` on a basis word; zero beyond `n_max` or when not composable.
    pub fn product_basis(&self, word: &[usize]) -> SparseVector {
        self.products
            .get(&word.len())
            .and_then(|t| t.get(word))
            .cloned()
            .unwrap_or_default()
    }

    /// Multilinear extension of `m_n` to arbitrary arguments.
    pub fn m(&self, args: &[SparseVector]) -> SparseVector {
        let mut acc = SparseVector::new();
        if args.is_empty() || args.len() > self.n_max || args.iter().any(|a| a.is_empty()) {
            return acc;
        }
        let Some(table) = self.products.get(&args.len()) else {
            return acc;
        };
        let mut word = Vec::with_capacity(args.len());
        self.expand(args, table, &mut word, Scalar::one(), &mut acc);
        acc
    }

    fn expand(
        &self,
        args: &[SparseVector],
        table: &BTreeMap<Vec<usize>, SparseVector>,
        word: &mut Vec<usize>,
        coeff: Scalar,
        acc: &mut SparseVector,
    ) {
        let k = word.len();
        if k == args.len() {
            if let Some(r) = table.get(word.as_slice()) {
                axpy(acc, &coeff, r);
            }
            return;
        }
        for (&i, x) in &args[k] {
            if let Some(&last) = word.last() {
                if !self.composable(last, i) {
                    continue;
                }
            }
            word.push(i);
            self.expand(args, table, word, &coeff * x, acc);
            word.pop();
        }
    }

    fn word_degree(&self, word: &[usize]) -> i64 {
        word.iter().map(|&i| self.degree(i)).sum()
    }

    fn word_names(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|&i| self.name(i).to_string()).collect()
    }

    /// Every structure constant lands in the hom space it should.
    pub fn validate_shapes(&self) -> Result<()> {
        for table in self.products.values() {
            for (word, r) in table {
                if word.windows(2).any(|w| !self.composable(w[0], w[1])) {
                    return Err(Error::ShapeMismatch(format!(
                        "product on non-composable word ({})",
                        self.word_names(word).join(", ")
                    )));
                }
                let (a, b) = (self.element(word[0]).source, self.element(*word.last().unwrap()).target);
                if r.keys().any(|&k| self.element(k).source != a || self.element(k).target != b) {
                    return Err(Error::ShapeMismatch(format!(
                        "m{}({}) leaves Hom({}, {})",
                        word.len(),
                        self.word_names(word).join(", "),
                        self.branes().name(a),
                        self.branes().name(b)
                    )));
                }
            }
        }
        for (a, u) in self.units.iter().enumerate() {
            if u.keys().any(|&k| self.element(k).source != a || self.element(k).target != a) {
                return Err(Error::ShapeMismatch(format!("unit of {} is not an endomorphism", self.branes().name(a))));
            }
        }
        for (i, b) in self.basis().iter().enumerate() {
            if self.star.column(i).keys().any(|&k| self.element(k).source != b.target || self.element(k).target != b.source) {
                return Err(Error::ShapeMismatch(format!("{}⋆ is not in the reversed hom space", b.name)));
            }
        }
        Ok(())
    }

    /// `⟨f, g⟩ = Tr(g∘f)` for vectors `f ∈ Hom(e1, e2)`, `g ∈ Hom(e2, e1)`.
    pub fn pairing(&self, cy: &CalabiYauData, f: &SparseVector, g: &SparseVector) -> Scalar {
        let mut total = Scalar::zero();
        for (&i, x) in f {
            for (&j, y) in g {
                if !self.composable(i, j) || !self.composable(j, i) {
                    continue;
                }
                let sign = Scalar::sign(self.degree(i) * self.degree(j));
                let t = cy.evaluate(&self.product_basis(&[i, j]));
                if !t.is_zero() {
                    total += sign * t * x * y;
                }
            }
        }
        total
    }
}

/// A trace `Tr: Hom(e, e) → K` on every object, stored as one coefficient
/// per global basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CalabiYauData {
    pub trace: SparseVector,
    pub degree: i64,
}

impl CalabiYauData {
    pub fn new(trace: SparseVector) -> Self {
        CalabiYauData { trace, degree: 0 }
    }

    pub fn evaluate(&self, v: &SparseVector) -> Scalar {
        let mut t = Scalar::zero();
        for (i, x) in v {
            if let Some(c) = self.trace.get(i) {
                t += c * x;
            }
        }
        t
    }
}

fn koszul_reverse_sign(c: &AInfinityCategory, word: &[usize]) -> Scalar {
    let mut e = 0i64;
    for i in 0..word.len() {
        for k in i + 1..word.len() {
            e += c.degree(word[i]) * c.degree(word[k]);
        }
    }
    Scalar::sign(e)
}

/// Largest arity with a possibly nonzero term in the relation: an outer
/// product of arity `n_max` with one input replaced by an inner one.
pub fn relation_bound(n_max: usize) -> usize {
    2 * n_max - 1
}

/// Left-hand side of the A∞ relation on one basis word.
pub fn relation_residual(c: &AInfinityCategory, word: &[usize]) -> SparseVector {
    let n = word.len();
    let mut acc = SparseVector::new();
    for j in 1..=n.min(c.n_max()) {
        for i in 0..=n - j {
            let l = n - i - j;
            if i + 1 + l > c.n_max() {
                continue;
            }
            let inner = c.product_basis(&word[i..i + j]);
            if inner.is_empty() {
                continue;
            }
            let e = (i + j * l) as i64 + j as i64 * c.word_degree(&word[..i]);
            let mut args: Vec<SparseVector> = word[..i].iter().map(|&x| unit_vector(x)).collect();
            args.push(inner);
            args.extend(word[i + j..].iter().map(|&x| unit_vector(x)));
            axpy(&mut acc, &Scalar::sign(e), &c.m(&args));
        }
    }
    acc
}

/// Checks product degrees and the A∞ relation on every composable basis
/// word up to `relation_bound(n_max)`.
pub fn check_ainfty_relations(c: &AInfinityCategory) -> Result<CheckReport> {
    c.validate_shapes()?;
    let mut rep = CheckReport::new("A∞ relations");
    let name = |i: usize| c.name(i).to_string();
    for (&n, table) in &c.products {
        for (word, r) in table {
            rep.checked += 1;
            let want = c.word_degree(word) + n as i64 - 2;
            if let Some(&k) = r.keys().find(|&&k| c.degree(k) != want) {
                degree_violation(&mut rep, "product degree", c.word_names(word), c.name(k), c.degree(k), want);
            }
        }
    }
    for n in 1..=relation_bound(c.n_max()) {
        let law = format!("A∞ relation n={n}");
        for word in c.composable_words(n) {
            let residual = relation_residual(c, &word);
            rep.checked += 1;
            if let Some((&k, x)) = residual.iter().next() {
                rep.record(Violation {
                    law: law.clone(),
                    inputs: c.word_names(&word),
                    coordinate: name(k),
                    lhs: x.clone(),
                    rhs: Scalar::zero(),
                    detail: Some(format!("residual {}", format_vector(&residual, name))),
                });
            }
        }
    }
    Ok(rep)
}

/// Strict unit laws: `m2(f ⊗ 1) = f`, `m2(1 ⊗ g) = g`, and `m_n` vanishes
/// for `n ≥ 3` whenever any argument is a unit.
pub fn check_unit_axioms(c: &AInfinityCategory) -> Result<CheckReport> {
    c.validate_shapes()?;
    let mut rep = CheckReport::new("unit axioms");
    let name = |i: usize| c.name(i).to_string();
    for a in 0..c.branes().len() {
        rep.checked += 1;
        if let Some(&k) = c.unit(a).keys().find(|&&k| c.degree(k) != 0) {
            degree_violation(&mut rep, "unit degree", vec![c.branes().name(a).to_string()], c.name(k), c.degree(k), 0);
        }
    }
    for i in 0..c.dim() {
        let e = unit_vector(i);
        let b = c.element(i);
        let unit_in = format!("1_{}", c.branes().name(b.source));
        let unit_out = format!("1_{}", c.branes().name(b.target));
        let right = c.m(&[e.clone(), c.unit(b.target).clone()]);
        compare(&mut rep, "right unit", vec![name(i), unit_out], &right, &e, name);
        let left = c.m(&[c.unit(b.source).clone(), e.clone()]);
        compare(&mut rep, "left unit", vec![unit_in, name(i)], &left, &e, name);
    }
    for n in 3..=c.n_max() {
        for word in c.composable_words(n - 1) {
            // Insert a unit at every slot where it fits.
            for pos in 0..n {
                let obj = if pos < n - 1 { c.element(word[pos]).source } else { c.element(word[n - 2]).target };
                let mut args: Vec<SparseVector> = word.iter().map(|&x| unit_vector(x)).collect();
                args.insert(pos, c.unit(obj).clone());
                let mut inputs = c.word_names(&word);
                inputs.insert(pos, format!("1_{}", c.branes().name(obj)));
                compare(&mut rep, "unit kills higher products", inputs, &c.m(&args), &SparseVector::new(), name);
            }
        }
    }
    Ok(rep)
}

/// `(m_n(f1 ⊗ … ⊗ fn))⋆ = m_n((f1 ⊗ … ⊗ fn)⋆)`, plus `⋆⋆ = id` and `1⋆ = 1`.
pub fn check_involution_compatibility(c: &AInfinityCategory) -> Result<CheckReport> {
    c.validate_shapes()?;
    let mut rep = CheckReport::new("involution compatibility");
    let name = |i: usize| c.name(i).to_string();
    for i in 0..c.dim() {
        let e = unit_vector(i);
        compare(&mut rep, "involutivity", vec![name(i)], &c.star(&c.star(&e)), &e, name);
        rep.checked += 1;
        if let Some(&k) = c.star(&e).keys().find(|&&k| c.degree(k) != c.degree(i)) {
            degree_violation(&mut rep, "involution degree", vec![name(i)], c.name(k), c.degree(k), c.degree(i));
        }
    }
    for a in 0..c.branes().len() {
        let u = c.unit(a);
        compare(&mut rep, "unit fixed", vec![format!("1_{}", c.branes().name(a))], &c.star(u), u, name);
    }
    for n in 1..=c.n_max() {
        let law = format!("m{n} commutes with ⋆");
        for word in c.composable_words(n) {
            let lhs = c.star(&c.product_basis(&word));
            let args: Vec<SparseVector> = word.iter().rev().map(|&x| c.star(&unit_vector(x))).collect();
            let mut rhs = SparseVector::new();
            axpy(&mut rhs, &koszul_reverse_sign(c, &word), &c.m(&args));
            compare(&mut rep, &law, c.word_names(&word), &lhs, &rhs, name);
        }
    }
    Ok(rep)
}

/// Homology representatives of `Hom(a, b)` under `m1`, as global vectors.
pub fn hom_homology(c: &AInfinityCategory, a: usize, b: usize) -> Vec<SparseVector> {
    let ids = c.hom(a, b).to_vec();
    let local: BTreeMap<usize, usize> = ids.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let mut d = SparseMatrix::zeros(ids.len(), ids.len());
    for (col, &g) in ids.iter().enumerate() {
        for (k, x) in c.m(&[unit_vector(g)]) {
            if let Some(&row) = local.get(&k) {
                d.set(row, col, x);
            }
        }
    }
    let boundaries = d.column_vectors();
    let cycles = kernel_basis(&d);
    complement_basis(ids.len(), &boundaries, &cycles)
        .into_iter()
        .map(|v| v.into_iter().map(|(k, x)| (ids[k], x)).collect())
        .collect()
}

/// Trace invariance, pairing symmetry, non-degeneracy on homology, the
/// twisted involutive law and the cyclic identity.
pub fn check_calabi_yau(c: &AInfinityCategory, cy: &CalabiYauData) -> Result<CheckReport> {
    c.validate_shapes()?;
    let mut rep = CheckReport::new("Calabi-Yau structure");
    let name = |i: usize| c.name(i).to_string();
    for &i in cy.trace.keys() {
        if i >= c.dim() || c.element(i).source != c.element(i).target {
            return Err(Error::ShapeMismatch(format!("trace is nonzero off the endomorphisms (index {i})")));
        }
    }
    let scalar_cmp = |rep: &mut CheckReport, law: &str, inputs: Vec<String>, lhs: Scalar, rhs: Scalar| {
        rep.checked += 1;
        if lhs != rhs {
            rep.record(Violation { law: law.into(), inputs, coordinate: "K".into(), lhs, rhs, detail: None });
        }
    };

    for i in 0..c.dim() {
        let b = c.element(i);
        if b.source != b.target {
            continue;
        }
        let e = unit_vector(i);
        if let Some(t) = cy.trace.get(&i) {
            rep.checked += 1;
            if c.degree(i) != cy.degree && !t.is_zero() {
                degree_violation(&mut rep, "trace degree", vec![name(i)], c.name(i), c.degree(i), cy.degree);
            }
        }
        scalar_cmp(&mut rep, "trace star-invariance", vec![name(i)], cy.evaluate(&c.star(&e)), cy.evaluate(&e));
        scalar_cmp(&mut rep, "trace closed", vec![name(i)], cy.evaluate(&c.m(&[e])), Scalar::zero());
    }

    for (a, b) in c.hom_pairs().collect::<Vec<_>>() {
        for &f in c.hom(a, b) {
            for &g in c.hom(b, a) {
                let (ef, eg) = (unit_vector(f), unit_vector(g));
                let sign = Scalar::sign(c.degree(f) * c.degree(g));
                let fg = c.pairing(cy, &ef, &eg);
                scalar_cmp(&mut rep, "pairing symmetry", vec![name(f), name(g)], fg.clone(), &sign * &c.pairing(cy, &eg, &ef));
                let twisted = c.pairing(cy, &c.star(&eg), &c.star(&ef));
                scalar_cmp(&mut rep, "twisted involutive pairing", vec![name(f), name(g)], fg, sign * twisted);
            }
        }
    }

    for a in 0..c.branes().len() {
        for b in 0..c.branes().len() {
            let h1 = hom_homology(c, a, b);
            let h2 = hom_homology(c, b, a);
            let p = SparseMatrix::from_dense(
                h1.len(),
                h2.len(),
                &h1.iter().map(|x| h2.iter().map(|y| c.pairing(cy, x, y)).collect()).collect::<Vec<_>>(),
            )?;
            let r = rank(&p);
            rep.checked += 1;
            if r != h1.len() || r != h2.len() {
                rep.record(Violation {
                    law: "non-degeneracy on homology".into(),
                    inputs: vec![c.branes().name(a).to_string(), c.branes().name(b).to_string()],
                    coordinate: format!("pairing rank vs dim H(Hom({}, {}))", c.branes().name(a), c.branes().name(b)),
                    lhs: Scalar::from_int(r as i64),
                    rhs: Scalar::from_int(h1.len().max(h2.len()) as i64),
                    detail: Some(format!("homology dims {} and {}", h1.len(), h2.len())),
                });
            }
        }
    }

    for n in 2..=c.n_max() + 1 {
        let law = format!("cyclic identity n={n}");
        for word in c.cyclic_words(n) {
            let head: Vec<SparseVector> = word[..n - 1].iter().map(|&x| unit_vector(x)).collect();
            let tail: Vec<SparseVector> = word[1..].iter().map(|&x| unit_vector(x)).collect();
            let lhs = c.pairing(cy, &c.m(&head), &unit_vector(word[n - 1]));
            let e = (n + 1) as i64 + c.degree(word[0]) * c.word_degree(&word[1..]);
            let rhs = Scalar::sign(e) * c.pairing(cy, &c.m(&tail), &unit_vector(word[0]));
            scalar_cmp(&mut rep, &law, c.word_names(&word), lhs, rhs);
        }
    }
    Ok(rep)
}

/// `m1 = d`, `m2(f ⊗ g) = (-1)^{|f||g|} g∘f`, higher products zero.
///
/// Only shape errors are raised; a category failing its axioms produces an
/// A∞ structure failing the corresponding relations.
pub fn from_dg(c: &InvolutiveCategory) -> Result<AInfinityCategory> {
    from_dg_with_nmax(c, 2)
}

pub fn from_dg_with_nmax(c: &InvolutiveCategory, n_max: usize) -> Result<AInfinityCategory> {
    c.validate_shapes()?;
    let mut a = AInfinityCategory::new(c.quiver().clone(), n_max.max(2))?;
    for i in 0..c.dim() {
        a.set_product(vec![i], c.d(&unit_vector(i)))?;
    }
    for (&(f, g), r) in c.composition_table() {
        let sign = Scalar::sign(c.degree(f) * c.degree(g));
        a.set_product(vec![f, g], crate::exactlin::scale(r, &sign))?;
    }
    for b in 0..c.branes().len() {
        a.set_unit(b, c.unit(b).clone());
    }
    a.set_star(c.star_matrix().clone())?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invcat::check_dg_axioms;
    use crate::samples;

    fn cy_of(s: &samples::Sample) -> CalabiYauData {
        CalabiYauData::new(s.trace.clone().expect("sample has a trace"))
    }

    #[test]
    fn bundled_samples_pass_everything() {
        for s in samples::bundled() {
            let a = from_dg(&s.category).unwrap();
            assert!(check_ainfty_relations(&a).unwrap().passed(), "{}", s.name);
            assert!(check_unit_axioms(&a).unwrap().passed(), "{}", s.name);
            assert!(check_involution_compatibility(&a).unwrap().passed(), "{}", s.name);
            if s.trace.is_some() {
                let rep = check_calabi_yau(&a, &cy_of(&s)).unwrap();
                assert!(rep.passed(), "{}: {rep}", s.name);
            }
        }
    }

    #[test]
    fn zero_products_pass() {
        let q = samples::matrix_algebra().quiver().clone();
        let a = AInfinityCategory::new(q, 3).unwrap();
        assert!(check_ainfty_relations(&a).unwrap().passed());
    }

    #[test]
    fn ground_field_has_multiplication() {
        let a = from_dg(&samples::ground_field()).unwrap();
        assert_eq!(a.product_basis(&[0, 0]), unit_vector(0));
    }

    #[test]
    fn perturbed_matrix_product_fails_at_arity_three() {
        let m = samples::matrix_algebra();
        let (e11, e12) = (m.index_of("e11").unwrap(), m.index_of("e12").unwrap());
        let p = samples::perturb_composition(&m, e11, e12, e12, Scalar::one());
        let a = from_dg(&p).unwrap();
        let rep = check_ainfty_relations(&a).unwrap();
        assert!(rep.has_law("A∞ relation n=3"));
        assert!(!rep.has_law("A∞ relation n=1") && !rep.has_law("A∞ relation n=2"));
        // Same broken triples as a direct comparison of the two associations.
        let mut broken = 0;
        for w in a.composable_words(3) {
            let l = a.m(&[a.m(&[unit_vector(w[0]), unit_vector(w[1])]), unit_vector(w[2])]);
            let r = a.m(&[unit_vector(w[0]), a.m(&[unit_vector(w[1]), unit_vector(w[2])])]);
            if l != r {
                broken += 1;
            }
        }
        assert_eq!(rep.count("A∞ relation n=3"), broken);
    }

    #[test]
    fn identity_star_on_matrices_fails_compatibility() {
        let mut m = samples::matrix_algebra();
        m.set_star(SparseMatrix::identity(4)).unwrap();
        let a = from_dg(&m).unwrap();
        let rep = check_involution_compatibility(&a).unwrap();
        assert!(rep.has_law("m2 commutes with ⋆"));
        let (e12, e21) = (m.index_of("e12").unwrap(), m.index_of("e21").unwrap());
        let lhs = a.star(&a.product_basis(&[e12, e21]));
        let rhs = a.product_basis(&[e21, e12]);
        assert_ne!(lhs, rhs);
    }

    #[test]
    fn group_algebra_pairing_matrix_is_identity() {
        let s = &samples::bundled()[1];
        let a = from_dg(&s.category).unwrap();
        let cy = cy_of(s);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { Scalar::one() } else { Scalar::zero() };
                assert_eq!(a.pairing(&cy, &unit_vector(i), &unit_vector(j)), want);
            }
        }
    }

    #[test]
    fn zero_trace_is_degenerate() {
        let a = from_dg(&samples::matrix_algebra()).unwrap();
        let rep = check_calabi_yau(&a, &CalabiYauData::new(SparseVector::new())).unwrap();
        assert!(rep.has_law("non-degeneracy on homology"));
    }

    #[test]
    fn dual_numbers_minus_admits_no_invariant_nondegenerate_trace() {
        let a = from_dg(&samples::dual_numbers(-1)).unwrap();
        // Any trace t1·Tr(1) + tx·Tr(x): star-invariance forces tx = 0.
        for (t1, tx) in [(1, 0), (0, 1), (1, 1), (2, -3)] {
            let tr: SparseVector = [(0, Scalar::from_int(t1)), (1, Scalar::from_int(tx))]
                .into_iter()
                .filter(|(_, x)| !x.is_zero())
                .collect();
            let rep = check_calabi_yau(&a, &CalabiYauData::new(tr)).unwrap();
            assert!(!rep.passed());
        }
    }

    #[test]
    fn dg_relation_iff_dg_axioms_on_graded_sample() {
        let c = samples::dg_contractible_pair();
        assert!(check_dg_axioms(&c).unwrap().passed());
        let a = from_dg(&c).unwrap();
        assert!(check_ainfty_relations(&a).unwrap().passed());
        // Break Leibniz: d(1) = x.
        let mut bad = c.clone();
        let mut d = bad.diff_matrix().clone();
        d.set(1, 0, Scalar::one());
        bad.set_diff(d).unwrap();
        assert!(!check_dg_axioms(&bad).unwrap().passed());
        let rep = check_ainfty_relations(&from_dg(&bad).unwrap()).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn arity_above_nmax_is_rejected() {
        let mut a = AInfinityCategory::new(samples::ground_field().quiver().clone(), 2).unwrap();
        assert!(a.set_product(vec![0, 0, 0], unit_vector(0)).is_err());
        assert_eq!(relation_bound(2), 3);
        assert_eq!(relation_bound(4), 7);
    }

    #[test]
    fn homology_of_contractible_pair_is_the_unit() {
        let a = from_dg(&samples::dg_contractible_pair()).unwrap();
        let h = hom_homology(&a, 0, 0);
        assert_eq!(h.len(), 1);
    }
}
