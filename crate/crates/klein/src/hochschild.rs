//! Truncated Hochschild chain complexes: ordinary, involutive and normalized
//! involutive.
//!
//! A cyclic word `f0 ⊗ f1 ⊗ … ⊗ fN` has `fi ∈ Hom(ai, a(i+1))` with indices
//! mod `N+1`, and chain degree `Σ|fi| + N`. Products inside words use
//! `a·b = (-1)^{|a||b|} b∘a`, which is `m2` of `from_dg`; in degree 0 the
//! differential is term for term the usual alternating formula with
//! `f(i+1)∘fi` and the wrap-around term `(-1)^N (f0∘fN) ⊗ f1 ⊗ … ⊗ f(N-1)`.
//!
//! The involutive quotient identifies `f0 ⊗ f1 ⊗ … ⊗ fN` with
//! `ε · f0⋆ ⊗ fN⋆ ⊗ … ⊗ f1⋆`, where `ε` is the Koszul sign of reversing the
//! `N` suspended tail entries times `(-1)^N`. In degree 0, `ε = (-1)^{N(N+1)/2}`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::exactlin::{quotient_presentation, rank, FiniteComplex, Quotient, Scalar, SparseMatrix, SparseVector};
use crate::invcat::{InvolutiveCategory, Quiver};

/// A combination of basis words.
pub type WordChain = BTreeMap<Vec<usize>, Scalar>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord {
    pub maps: Vec<usize>,
}

impl CyclicWord {
    pub fn new(q: &Quiver, maps: Vec<usize>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::InvalidInput("cyclic words have length at least 1".into()));
        }
        if let Some(&bad) = maps.iter().find(|&&m| m >= q.dim()) {
            return Err(Error::UnknownElement(format!("basis index {bad}")));
        }
        for i in 0..maps.len() {
            let (f, g) = (maps[i], maps[(i + 1) % maps.len()]);
            if !q.composable(f, g) {
                return Err(Error::LabelMismatch(format!(
                    "{} does not end where {} starts",
                    q.name(f),
                    q.name(g)
                )));
            }
        }
        Ok(CyclicWord { maps })
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn internal_degree(&self, q: &Quiver) -> i64 {
        internal_degree(q, &self.maps)
    }

    pub fn chain_degree(&self, q: &Quiver) -> i64 {
        chain_degree(q, &self.maps)
    }

    pub fn display(&self, q: &Quiver) -> String {
        word_name(q, &self.maps)
    }
}

fn internal_degree(q: &Quiver, w: &[usize]) -> i64 {
    w.iter().map(|&f| q.degree(f)).sum()
}

pub fn chain_degree(q: &Quiver, w: &[usize]) -> i64 {
    internal_degree(q, w) + w.len() as i64 - 1
}

pub fn word_name(q: &Quiver, w: &[usize]) -> String {
    w.iter().map(|&f| q.name(f)).collect::<Vec<_>>().join("⊗")
}

fn add_term(acc: &mut WordChain, w: Vec<usize>, x: Scalar) {
    if x.is_zero() {
        return;
    }
    match acc.entry(w) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(x);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += x;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// Multilinear expansion of `v0 ⊗ v1 ⊗ …` into basis words.
pub fn expand(factors: &[SparseVector], coeff: &Scalar) -> WordChain {
    let mut acc: Vec<(Vec<usize>, Scalar)> = vec![(Vec::new(), coeff.clone())];
    for v in factors {
        let mut next = Vec::with_capacity(acc.len() * v.len());
        for (w, c) in &acc {
            for (i, x) in v {
                let mut w2 = w.clone();
                w2.push(*i);
                next.push((w2, c * x));
            }
        }
        acc = next;
    }
    let mut out = WordChain::new();
    for (w, c) in acc {
        add_term(&mut out, w, c);
    }
    out
}

fn basis_vec(i: usize) -> SparseVector {
    crate::exactlin::unit_vector(i)
}

/// `a·b = (-1)^{|a||b|} b∘a` on basis elements.
fn product(c: &InvolutiveCategory, a: usize, b: usize) -> SparseVector {
    let s = Scalar::sign(c.degree(a) * c.degree(b));
    crate::exactlin::scale(&c.compose_basis(a, b), &s)
}

/// Hochschild differential of a basis word.
pub fn differential(c: &InvolutiveCategory, w: &[usize]) -> WordChain {
    let n = w.len();
    let deg = |i: usize| c.degree(w[i]);
    // eps[i] = |a0| + Σ_{1≤j≤i} (|aj| + 1)
    let mut eps = vec![deg(0); n];
    for i in 1..n {
        eps[i] = eps[i - 1] + deg(i) + 1;
    }
    let mut out = WordChain::new();
    let factors = |replace: usize, v: SparseVector| -> Vec<SparseVector> {
        (0..n).map(|j| if j == replace { v.clone() } else { basis_vec(w[j]) }).collect()
    };
    for i in 0..n {
        let dv = c.d(&basis_vec(w[i]));
        if dv.is_empty() {
            continue;
        }
        let s = if i == 0 { Scalar::one() } else { -Scalar::sign(eps[i - 1]) };
        for (word, x) in expand(&factors(i, dv), &s) {
            add_term(&mut out, word, x);
        }
    }
    for i in 0..n.saturating_sub(1) {
        let p = product(c, w[i], w[i + 1]);
        let s = if i == 0 { Scalar::sign(deg(0)) } else { Scalar::sign(eps[i]) };
        let mut fs: Vec<SparseVector> = w.iter().map(|&f| basis_vec(f)).collect();
        fs.splice(i..=i + 1, [p]);
        for (word, x) in expand(&fs, &s) {
            add_term(&mut out, word, x);
        }
    }
    if n >= 2 {
        let last = n - 1;
        let p = product(c, w[last], w[0]);
        let s = -Scalar::sign((deg(last) + 1) * eps[last - 1]);
        let mut fs = vec![p];
        fs.extend(w[1..last].iter().map(|&f| basis_vec(f)));
        for (word, x) in expand(&fs, &s) {
            add_term(&mut out, word, x);
        }
    }
    out
}

/// Sign of the tail reversal for a word.
fn involution_sign(c: &InvolutiveCategory, w: &[usize]) -> Scalar {
    let shifted: Vec<i64> = w[1..].iter().map(|&f| c.degree(f) + 1).collect();
    let mut e = shifted.len() as i64;
    for i in 0..shifted.len() {
        for k in i + 1..shifted.len() {
            e += shifted[i] * shifted[k];
        }
    }
    Scalar::sign(e)
}

/// Chain-level involution `f0 ⊗ f1 ⊗ … ⊗ fN ↦ ε · f0⋆ ⊗ fN⋆ ⊗ … ⊗ f1⋆`.
pub fn chain_involution(c: &InvolutiveCategory, w: &[usize]) -> WordChain {
    let mut fs = vec![c.star(&basis_vec(w[0]))];
    fs.extend(w[1..].iter().rev().map(|&f| c.star(&basis_vec(f))));
    expand(&fs, &involution_sign(c, w))
}

/// Words with a unit in some position after the first, expanded in the basis.
/// Each comes from a word `u` one shorter with `1_a` inserted.
fn unit_insertions(c: &InvolutiveCategory, shorter: &[Vec<usize>]) -> Vec<WordChain> {
    let mut out = Vec::new();
    for u in shorter {
        for pos in 1..=u.len() {
            let a = c.element(u[pos - 1]).target;
            let mut fs: Vec<SparseVector> = u.iter().map(|&f| basis_vec(f)).collect();
            fs.insert(pos, c.unit(a).clone());
            let chain = expand(&fs, &Scalar::one());
            if !chain.is_empty() {
                out.push(chain);
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    Ordinary,
    Involutive,
    Normalized,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Ordinary, Variant::Involutive, Variant::Normalized];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Ordinary => "ordinary",
            Variant::Involutive => "involutive",
            Variant::Normalized => "normalized",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The ordinary word basis of each chain degree, up to a length bound.
#[derive(Clone, Debug)]
pub struct WordBasis {
    pub words: BTreeMap<i64, Vec<Vec<usize>>>,
    index: HashMap<Vec<usize>, (i64, usize)>,
}

impl WordBasis {
    pub fn new(q: &Quiver, trunc: usize) -> Self {
        let mut words: BTreeMap<i64, Vec<Vec<usize>>> = BTreeMap::new();
        for len in 1..=trunc {
            for w in q.cyclic_words(len) {
                words.entry(chain_degree(q, &w)).or_default().push(w);
            }
        }
        let mut index = HashMap::new();
        for (&k, ws) in &words {
            for (i, w) in ws.iter().enumerate() {
                index.insert(w.clone(), (k, i));
            }
        }
        WordBasis { words, index }
    }

    pub fn dim(&self, k: i64) -> usize {
        self.words.get(&k).map_or(0, Vec::len)
    }

    pub fn locate(&self, w: &[usize]) -> Option<(i64, usize)> {
        self.index.get(w).copied()
    }

    /// Coordinates of a chain supported in degree `k`; words outside the
    /// basis are an error.
    pub fn vector(&self, k: i64, chain: &WordChain) -> Result<SparseVector> {
        let mut v = SparseVector::new();
        for (w, x) in chain {
            match self.locate(w) {
                Some((deg, i)) if deg == k => crate::exactlin::add_entry(&mut v, i, x.clone()),
                _ => {
                    return Err(Error::InvalidInput(format!("word of length {} leaves degree {k}", w.len())));
                }
            }
        }
        Ok(v)
    }
}

#[derive(Clone, Debug)]
pub struct TruncatedComplex {
    pub variant: Variant,
    pub trunc: usize,
    pub complex: FiniteComplex,
    pub words: WordBasis,
    /// Per degree: quotient of the ordinary chain group (identity for `Ordinary`).
    pub quotients: BTreeMap<i64, Quotient>,
    /// Whether every basis element has internal degree ≥ 0.
    pub nonnegative: bool,
}

impl TruncatedComplex {
    /// Ordinary words representing the basis of the chain group in degree `k`.
    pub fn basis_words(&self, k: i64) -> Vec<&[usize]> {
        match (self.quotients.get(&k), self.words.words.get(&k)) {
            (Some(q), Some(ws)) => q.representatives.iter().map(|&i| ws[i].as_slice()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn projection(&self, k: i64) -> SparseMatrix {
        self.quotients.get(&k).map_or(SparseMatrix::zeros(0, 0), |q| q.projection.clone())
    }

    pub fn section(&self, k: i64) -> SparseMatrix {
        self.quotients.get(&k).map_or(SparseMatrix::zeros(0, 0), |q| q.section.clone())
    }

    /// Highest degree whose homology cannot see the truncation.
    pub fn reliable_limit(&self) -> Option<i64> {
        (self.nonnegative && self.trunc >= 2).then_some(self.trunc as i64 - 2)
    }
}

fn check_trunc(trunc: usize) -> Result<()> {
    if trunc == 0 {
        return Err(Error::InvalidInput("trunc must be at least 1".into()));
    }
    Ok(())
}

/// Ordinary differential `d_k` on the word basis.
fn ordinary_differential(c: &InvolutiveCategory, wb: &WordBasis, k: i64) -> Result<SparseMatrix> {
    let cols = wb.dim(k);
    let mut m = SparseMatrix::zeros(wb.dim(k - 1), cols);
    if let Some(ws) = wb.words.get(&k) {
        for (j, w) in ws.iter().enumerate() {
            let v = wb.vector(k - 1, &differential(c, w))?;
            for (i, x) in v {
                m.set(i, j, x);
            }
        }
    }
    Ok(m)
}

/// Matrix of the chain involution on the ordinary word basis in degree `k`.
pub fn involution_matrix(c: &InvolutiveCategory, wb: &WordBasis, k: i64) -> Result<SparseMatrix> {
    let n = wb.dim(k);
    let mut m = SparseMatrix::zeros(n, n);
    if let Some(ws) = wb.words.get(&k) {
        for (j, w) in ws.iter().enumerate() {
            for (i, x) in wb.vector(k, &chain_involution(c, w))? {
                m.set(i, j, x);
            }
        }
    }
    Ok(m)
}

fn relations(c: &InvolutiveCategory, wb: &WordBasis, trunc: usize, variant: Variant, k: i64) -> Result<Vec<SparseVector>> {
    let mut rels = Vec::new();
    let Some(ws) = wb.words.get(&k) else {
        return Ok(rels);
    };
    if variant == Variant::Ordinary {
        return Ok(rels);
    }
    for w in ws {
        let mut r = chain_involution(c, w);
        for x in r.values_mut() {
            *x = -x.clone();
        }
        add_term(&mut r, w.clone(), Scalar::one());
        if !r.is_empty() {
            rels.push(wb.vector(k, &r)?);
        }
    }
    if variant == Variant::Normalized {
        // Shorter words of degree k - 1 gain a degree-0 unit.
        let shorter: Vec<Vec<usize>> = wb
            .words
            .get(&(k - 1))
            .map(|ws| ws.iter().filter(|w| w.len() < trunc).cloned().collect())
            .unwrap_or_default();
        for chain in unit_insertions(c, &shorter) {
            rels.push(wb.vector(k, &chain)?);
        }
    }
    Ok(rels)
}

fn build(c: &InvolutiveCategory, trunc: usize, variant: Variant) -> Result<TruncatedComplex> {
    check_trunc(trunc)?;
    let wb = WordBasis::new(c, trunc);
    let (lo, hi) = match (wb.words.keys().next(), wb.words.keys().next_back()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => (0, 0),
    };
    let mut quotients = BTreeMap::new();
    let mut rels = BTreeMap::new();
    for k in lo..=hi {
        let r = relations(c, &wb, trunc, variant, k)?;
        quotients.insert(k, quotient_presentation(wb.dim(k), &r)?);
        rels.insert(k, r);
    }
    let mut dims = Vec::new();
    let mut diffs = Vec::new();
    for k in lo..=hi {
        let d = ordinary_differential(c, &wb, k)?;
        let q = &quotients[&k];
        let below = quotients.get(&(k - 1));
        let induced = match below {
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
    let complex = FiniteComplex::new(lo, dims, diffs)?;
    let nonnegative = (0..c.dim()).all(|i| c.degree(i) >= 0);
    Ok(TruncatedComplex { variant, trunc, complex, words: wb, quotients, nonnegative })
}

pub fn build_ordinary(c: &InvolutiveCategory, trunc: usize) -> Result<TruncatedComplex> {
    build(c, trunc, Variant::Ordinary)
}

pub fn build_involutive(c: &InvolutiveCategory, trunc: usize) -> Result<TruncatedComplex> {
    build(c, trunc, Variant::Involutive)
}

pub fn build_normalized_involutive(c: &InvolutiveCategory, trunc: usize) -> Result<TruncatedComplex> {
    build(c, trunc, Variant::Normalized)
}

pub fn build_variant(c: &InvolutiveCategory, trunc: usize, variant: Variant) -> Result<TruncatedComplex> {
    build(c, trunc, variant)
}

/// The chain involution induced on the chain group of degree `k`.
pub fn induced_involution(c: &InvolutiveCategory, t: &TruncatedComplex, k: i64) -> Result<SparseMatrix> {
    let i = involution_matrix(c, &t.words, k)?;
    t.projection(k).mul(&i)?.mul(&t.section(k))
}

/// Class of a combination of words in the chain group of degree `k`.
pub fn class_of(t: &TruncatedComplex, k: i64, chain: &WordChain) -> Result<SparseVector> {
    let v = t.words.vector(k, chain)?;
    Ok(t.projection(k).apply(&v))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyRow {
    pub degree: i64,
    pub chain_dim: usize,
    /// Rank of the differential out of this degree.
    pub rank_out: usize,
    pub homology: usize,
    pub reliable: bool,
}

/// Homology per degree. Degrees above `max_reliable_degree` (or above the
/// truncation window when `None`) are flagged unreliable.
pub fn homology(t: &TruncatedComplex, max_reliable_degree: Option<i64>) -> Result<Vec<HomologyRow>> {
    let limit = t.reliable_limit();
    let cutoff = match (max_reliable_degree, limit) {
        (Some(m), Some(l)) if m > l => {
            return Err(Error::InvalidInput(format!("degree {m} is beyond the reliable window (at most {l})")));
        }
        (Some(_), None) => {
            return Err(Error::InvalidInput("no reliable window for this complex".into()));
        }
        (Some(m), Some(_)) => Some(m),
        (None, l) => l,
    };
    let c = &t.complex;
    crate::exactlin::verify_complex(c)?;
    let mut rows = Vec::new();
    for k in c.degrees() {
        let r_out = rank(&c.differential(k));
        let r_in = rank(&c.differential(k + 1));
        rows.push(HomologyRow {
            degree: k,
            chain_dim: c.dim(k),
            rank_out: r_out,
            homology: c.dim(k) - r_out - r_in,
            reliable: cutoff.is_some_and(|m| k >= 0 && k <= m),
        });
    }
    Ok(rows)
}

/// `degree -> homology` restricted to the reliable rows.
pub fn reliable_dims(rows: &[HomologyRow]) -> BTreeMap<i64, usize> {
    rows.iter().filter(|r| r.reliable).map(|r| (r.degree, r.homology)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn dims(t: &TruncatedComplex) -> BTreeMap<i64, usize> {
        reliable_dims(&homology(t, None).unwrap())
    }

    #[test]
    fn ground_field() {
        let k = samples::ground_field();
        for v in Variant::ALL {
            let t = build_variant(&k, 4, v).unwrap();
            assert_eq!(dims(&t), BTreeMap::from([(0, 1), (1, 0), (2, 0)]), "{v}");
        }
        let n = build_normalized_involutive(&k, 4).unwrap();
        for deg in 1..=3 {
            assert_eq!(n.complex.dim(deg), 0);
        }
        // With the signed involution 1⊗1 ~ -1⊗1, so chain groups differ
        // from the ordinary ones in degrees 1 and 2 but homology agrees.
        let i = build_involutive(&k, 6).unwrap();
        let dims_i: Vec<usize> = (0..=5).map(|d| i.complex.dim(d)).collect();
        assert_eq!(dims_i, vec![1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn matrix_algebra_ordinary() {
        let t = build_ordinary(&samples::matrix_algebra(), 4).unwrap();
        assert_eq!(dims(&t), BTreeMap::from([(0, 1), (1, 0), (2, 0)]));
    }

    #[test]
    fn dual_numbers() {
        let t = build_ordinary(&samples::dual_numbers(1), 5).unwrap();
        assert_eq!(dims(&t)[&0], 2);
        let minus = build_involutive(&samples::dual_numbers(-1), 2).unwrap();
        assert_eq!(minus.complex.dim(0), 1);
        let z2 = build_involutive(&samples::group_algebra_z2(), 2).unwrap();
        assert_eq!(z2.complex.dim(0), 2);
    }

    #[test]
    fn normalization_clause() {
        let c = samples::matrix_algebra();
        let t = build_normalized_involutive(&c, 3).unwrap();
        let (e11, e12, e22) = (c.index_of("e11").unwrap(), c.index_of("e12").unwrap(), c.index_of("e22").unwrap());
        let head_unit = WordChain::from([(vec![e11, e12], Scalar::one()), (vec![e22, e12], Scalar::one())]);
        let tail_unit = WordChain::from([(vec![e12, e11], Scalar::one()), (vec![e12, e22], Scalar::one())]);
        let head_unit = class_of(&t, 1, &head_unit).unwrap();
        let tail_unit = class_of(&t, 1, &tail_unit).unwrap();
        assert!(!head_unit.is_empty());
        assert!(tail_unit.is_empty());
    }

    #[test]
    fn involution_commutes_and_squares_to_one() {
        for s in samples::bundled() {
            let c = &s.category;
            let wb = WordBasis::new(c, 4);
            for k in 0..=4 {
                let i = involution_matrix(c, &wb, k).unwrap();
                assert_eq!(i.mul(&i).unwrap(), SparseMatrix::identity(wb.dim(k)), "{} {k}", s.name);
                let d = ordinary_differential(c, &wb, k).unwrap();
                let lhs = d.mul(&i).unwrap();
                let rhs = involution_matrix(c, &wb, k - 1).unwrap().mul(&d).unwrap();
                assert_eq!(lhs, rhs, "{} degree {k}", s.name);
            }
        }
    }

    #[test]
    fn complexes_are_complexes() {
        for s in samples::bundled() {
            for v in Variant::ALL {
                let t = build_variant(&s.category, 4, v).unwrap();
                crate::exactlin::verify_complex(&t.complex).unwrap();
            }
        }
    }

    #[test]
    fn reliability_window() {
        let t = build_ordinary(&samples::ground_field(), 4).unwrap();
        let rows = homology(&t, None).unwrap();
        assert!(rows.iter().filter(|r| r.reliable).map(|r| r.degree).eq(0..=2));
        assert!(!rows.iter().find(|r| r.degree == 3).unwrap().reliable);
        assert!(homology(&t, Some(3)).is_err());
        assert!(build_ordinary(&samples::ground_field(), 0).is_err());
    }
}
