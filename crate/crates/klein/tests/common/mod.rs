//! Helpers shared by the integration tests. The dense oracles in this file
//! never call the sparse elimination or the Hochschild builders of the
//! library.
#![allow(dead_code)]

pub mod graph;
pub mod surface;

use std::collections::BTreeMap;

use klein::exactlin::{unit_vector, SparseVector};
use klein::invcat::InvolutiveCategory;
use num::{BigRational, One, Signed, Zero};

pub type Dense = Vec<Vec<BigRational>>;

fn q(x: &klein::exactlin::Scalar) -> BigRational {
    x.as_rational().clone()
}

/// Rank by plain Gaussian elimination over the rationals.
pub fn dense_rank(m: &Dense) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &pivot;
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Fraction-free determinant (Bareiss) of a square integer-valued matrix.
pub fn bareiss_det(m: &Dense) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut sign = BigRational::one();
    let mut prev = BigRational::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(p) => {
                    a.swap(k, p);
                    sign = -sign;
                }
                None => return BigRational::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Rank as the size of the largest nonzero minor, by exhaustive search.
/// Only for tiny matrices.
pub fn minor_rank(m: &Dense) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    for k in (1..=rows.min(cols)).rev() {
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Dense = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
                if !bareiss_det(&sub).is_zero() {
                    return k;
                }
            }
        }
    }
    0
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

type Chain = BTreeMap<Vec<usize>, BigRational>;

fn push(chain: &mut Chain, w: Vec<usize>, x: BigRational) {
    let e = chain.entry(w).or_insert_with(BigRational::zero);
    *e += x;
}

fn tensor(c: &InvolutiveCategory, parts: &[SparseVector], coeff: BigRational, out: &mut Chain) {
    let mut acc = vec![(Vec::new(), coeff)];
    for v in parts {
        let mut next = Vec::new();
        for (w, x) in &acc {
            for (i, y) in v {
                let mut w2: Vec<usize> = w.clone();
                w2.push(*i);
                next.push((w2, x * q(y)));
            }
        }
        acc = next;
    }
    let _ = c;
    for (w, x) in acc {
        push(out, w, x);
    }
}

fn sgn(e: i64) -> BigRational {
    if e.rem_euclid(2) == 0 {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

/// Brute-force model of the three truncated Hochschild complexes.
pub struct OracleComplex {
    pub words: BTreeMap<i64, Vec<Vec<usize>>>,
    c: InvolutiveCategory,
}

impl OracleComplex {
    pub fn new(c: &InvolutiveCategory, trunc: usize) -> Self {
        let n = c.dim();
        let mut words: BTreeMap<i64, Vec<Vec<usize>>> = BTreeMap::new();
        // Every sequence of basis indices, filtered for brane compatibility.
        for len in 1..=trunc {
            let total = n.pow(len as u32);
            for code in 0..total {
                let mut w = Vec::with_capacity(len);
                let mut x = code;
                for _ in 0..len {
                    w.push(x % n);
                    x /= n;
                }
                let ok = (0..len).all(|i| c.element(w[i]).target == c.element(w[(i + 1) % len]).source);
                if ok {
                    let deg: i64 = w.iter().map(|&f| c.degree(f)).sum::<i64>() + len as i64 - 1;
                    words.entry(deg).or_default().push(w);
                }
            }
        }
        OracleComplex { words, c: c.clone() }
    }

    fn dim(&self, k: i64) -> usize {
        self.words.get(&k).map_or(0, Vec::len)
    }

    fn column(&self, k: i64, chain: &Chain) -> Vec<BigRational> {
        let ws = self.words.get(&k).cloned().unwrap_or_default();
        let mut col = vec![BigRational::zero(); ws.len()];
        for (w, x) in chain {
            if x.is_zero() {
                continue;
            }
            let i = ws.iter().position(|v| v == w).expect("term in the expected degree");
            col[i] += x.clone();
        }
        col
    }

    fn prod(&self, a: usize, b: usize) -> SparseVector {
        let s = if (self.c.degree(a) * self.c.degree(b)) % 2 == 0 { 1 } else { -1 };
        self.c.compose_basis(a, b).into_iter().map(|(i, x)| (i, x * klein::exactlin::Scalar::from_int(s))).collect()
    }

    fn d_word(&self, w: &[usize]) -> Chain {
        let c = &self.c;
        let n = w.len();
        let deg = |i: usize| c.degree(w[i]);
        let basis = |i: usize| unit_vector(w[i]);
        let mut out = Chain::new();
        let mut run = deg(0);
        for i in 0..n {
            let dv = c.d(&unit_vector(w[i]));
            let s = if i == 0 { BigRational::one() } else { -sgn(run) };
            if i > 0 {
                run += deg(i) + 1;
            }
            let parts: Vec<SparseVector> = (0..n).map(|j| if j == i { dv.clone() } else { basis(j) }).collect();
            tensor(c, &parts, s, &mut out);
        }
        let mut e = deg(0);
        for i in 0..n.saturating_sub(1) {
            if i > 0 {
                e += deg(i) + 1;
            }
            let s = if i == 0 { sgn(deg(0)) } else { sgn(e) };
            let mut parts: Vec<SparseVector> = (0..i).map(basis).collect();
            parts.push(self.prod(w[i], w[i + 1]));
            parts.extend((i + 2..n).map(basis));
            tensor(c, &parts, s, &mut out);
        }
        if n >= 2 {
            let before_last: i64 = deg(0) + (1..n - 1).map(|j| deg(j) + 1).sum::<i64>();
            let s = -sgn((deg(n - 1) + 1) * before_last);
            let mut parts = vec![self.prod(w[n - 1], w[0])];
            parts.extend((1..n - 1).map(basis));
            tensor(c, &parts, s, &mut out);
        }
        out
    }

    fn involution(&self, w: &[usize]) -> Chain {
        let tail: Vec<i64> = w[1..].iter().map(|&f| self.c.degree(f) + 1).collect();
        let mut e = tail.len() as i64;
        for i in 0..tail.len() {
            for k in i + 1..tail.len() {
                e += tail[i] * tail[k];
            }
        }
        let mut parts = vec![self.c.star(&unit_vector(w[0]))];
        for &f in w[1..].iter().rev() {
            parts.push(self.c.star(&unit_vector(f)));
        }
        let mut out = Chain::new();
        tensor(&self.c, &parts, sgn(e), &mut out);
        out
    }

    /// Columns spanning the relations in degree `k` (as a list of columns).
    fn relations(&self, k: i64, involutive: bool, normalized: bool, trunc: usize) -> Vec<Vec<BigRational>> {
        let mut rels = Vec::new();
        let Some(ws) = self.words.get(&k) else {
            return rels;
        };
        if involutive {
            for w in ws {
                let mut ch = self.involution(w);
                for x in ch.values_mut() {
                    *x = -x.clone();
                }
                push(&mut ch, w.clone(), BigRational::one());
                rels.push(self.column(k, &ch));
            }
        }
        if normalized {
            for u in self.words.get(&(k - 1)).cloned().unwrap_or_default() {
                if u.len() >= trunc {
                    continue;
                }
                for pos in 1..=u.len() {
                    let a = self.c.element(u[pos - 1]).target;
                    let mut parts: Vec<SparseVector> = u.iter().map(|&f| unit_vector(f)).collect();
                    parts.insert(pos, self.c.unit(a).clone());
                    let mut ch = Chain::new();
                    tensor(&self.c, &parts, BigRational::one(), &mut ch);
                    rels.push(self.column(k, &ch));
                }
            }
        }
        rels
    }

    fn boundary_columns(&self, k: i64) -> Vec<Vec<BigRational>> {
        self.words.get(&k).cloned().unwrap_or_default().iter().map(|w| self.column(k - 1, &self.d_word(w))).collect()
    }

    /// Homology of the quotient complex per degree, via
    /// `rank d̄_k = rank[d(C_k) | R_{k-1}] - rank R_{k-1}`.
    pub fn homology(&self, trunc: usize, involutive: bool, normalized: bool) -> BTreeMap<i64, usize> {
        let cols_rank = |k: i64, cols: &[Vec<BigRational>]| -> usize {
            let rows = self.dim(k);
            if rows == 0 || cols.is_empty() {
                return 0;
            }
            let m: Dense = (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
            dense_rank(&m)
        };
        let degrees: Vec<i64> = self.words.keys().copied().collect();
        let rel_rank: BTreeMap<i64, usize> = degrees
            .iter()
            .map(|&k| (k, cols_rank(k, &self.relations(k, involutive, normalized, trunc))))
            .collect();
        let rank_bar = |k: i64| -> usize {
            if !self.words.contains_key(&k) || !self.words.contains_key(&(k - 1)) {
                return 0;
            }
            let mut cols = self.boundary_columns(k);
            let rels = self.relations(k - 1, involutive, normalized, trunc);
            let r = cols_rank(k - 1, &rels);
            cols.extend(rels);
            cols_rank(k - 1, &cols) - r
        };
        let mut out = BTreeMap::new();
        for &k in &degrees {
            let dim = self.dim(k) - rel_rank[&k];
            out.insert(k, dim - rank_bar(k) - rank_bar(k + 1));
        }
        out
    }

    /// `max |entry|` of d∘d over all words, zero iff d² = 0 on the ordinary complex.
    pub fn d_squared_is_zero(&self) -> bool {
        for ws in self.words.values() {
            for w in ws {
                let mut total = Chain::new();
                for (v, x) in self.d_word(w) {
                    for (u, y) in self.d_word(&v) {
                        push(&mut total, u, &x * &y);
                    }
                }
                if total.values().any(|x| x.abs() > BigRational::zero()) {
                    return false;
                }
            }
        }
        true
    }
}
