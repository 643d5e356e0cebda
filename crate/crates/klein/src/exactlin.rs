//! Exact linear algebra over the rationals.
//!
//! Matrices are sparse, keyed by `(row, col)`, and act on column vectors:
//! column `j` is the image of basis vector `j`. Elimination is pivoted
//! Gaussian elimination with a fixed pivot rule (lowest column first, rows
//! in input order), so every result is deterministic.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact rational number, always stored in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Scalar(BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `(-1)^k` for a possibly negative exponent.
    pub fn sign(k: i64) -> Self {
        if k.rem_euclid(2) == 0 {
            Scalar::one()
        } else {
            -Scalar::one()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Scalar(self.0.recip())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            location: "scalar".into(),
            message: format!("not a rational \"p/q\": {s:?}"),
        };
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Scalar(BigRational::new(n, d)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                Scalar((self.0).$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                Scalar((&self.0).$m(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &'a Scalar) -> Scalar {
                Scalar((self.0).$m(&rhs.0))
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);

impl std::ops::Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(self.0 / rhs.0)
    }
}

impl<'a> std::ops::Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero");
        Scalar(&self.0 / &rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.0 -= &rhs.0;
    }
}

/// Sparse vector: index to nonzero coefficient.
pub type SparseVector = BTreeMap<usize, Scalar>;

/// Adds `coeff * v` into `acc`, dropping entries that cancel.
pub fn axpy(acc: &mut SparseVector, coeff: &Scalar, v: &SparseVector) {
    if coeff.is_zero() {
        return;
    }
    for (&i, x) in v {
        add_entry(acc, i, coeff * x);
    }
}

/// Adds `x` to `acc[i]`, removing the entry if the result is zero.
pub fn add_entry(acc: &mut SparseVector, i: usize, x: Scalar) {
    if x.is_zero() {
        return;
    }
    match acc.entry(i) {
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

pub fn scale(v: &SparseVector, c: &Scalar) -> SparseVector {
    if c.is_zero() {
        return SparseVector::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

pub fn unit_vector(i: usize) -> SparseVector {
    let mut v = SparseVector::new();
    v.insert(i, Scalar::one());
    v
}

/// A sparse matrix with exact rational entries. Absent entries are zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SparseMatrix::zeros(n, n);
        for i in 0..n {
            m.entries.insert((i, i), Scalar::one());
        }
        m
    }

    pub fn from_dense(rows: usize, cols: usize, data: &[Vec<Scalar>]) -> Result<Self> {
        if data.len() != rows || data.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!(
                "dense data does not have shape {rows}x{cols}"
            )));
        }
        let mut m = SparseMatrix::zeros(rows, cols);
        for (i, r) in data.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    /// Convenience constructor from small integers.
    pub fn from_ints(data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let mut m = SparseMatrix::zeros(rows, cols);
        for (i, r) in data.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, Scalar::from_int(x));
            }
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[SparseVector]) -> Self {
        let mut m = SparseMatrix::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (&i, x) in c {
                assert!(i < rows, "column entry out of bounds");
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), x)| (i, j, x))
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// Sets an entry; storing zero removes it.
    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        if i >= self.rows || j >= self.cols {
            if x.is_zero() {
                return;
            }
            panic!("index ({i},{j}) out of bounds for {}x{}", self.rows, self.cols);
        }
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: Scalar) {
        let cur = self.get(i, j);
        self.set(i, j, cur + x);
    }

    pub fn row(&self, i: usize) -> SparseVector {
        self.entries
            .range((i, 0)..(i + 1, 0))
            .map(|(&(_, j), x)| (j, x.clone()))
            .collect()
    }

    pub fn row_vectors(&self) -> Vec<SparseVector> {
        let mut out = vec![SparseVector::new(); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i].insert(j, x.clone());
        }
        out
    }

    pub fn column(&self, j: usize) -> SparseVector {
        self.entries
            .iter()
            .filter(|(&(_, c), _)| c == j)
            .map(|(&(i, _), x)| (i, x.clone()))
            .collect()
    }

    pub fn column_vectors(&self) -> Vec<SparseVector> {
        let mut out = vec![SparseVector::new(); self.cols];
        for (&(i, j), x) in &self.entries {
            out[j].insert(i, x.clone());
        }
        out
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self.entries.iter().map(|(&(i, j), x)| ((j, i), x.clone())).collect(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let rhs_rows = rhs.row_vectors();
        let mut out = SparseMatrix::zeros(self.rows, rhs.cols);
        for (i, row) in self.row_vectors().into_iter().enumerate() {
            let mut acc = SparseVector::new();
            for (k, a) in &row {
                axpy(&mut acc, a, &rhs_rows[*k]);
            }
            for (j, x) in acc {
                out.entries.insert((i, j), x);
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = self.clone();
        for (&(i, j), x) in &rhs.entries {
            out.add_at(i, j, x.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        self.add(&rhs.scaled(&-Scalar::one()))
    }

    pub fn scaled(&self, c: &Scalar) -> SparseMatrix {
        if c.is_zero() {
            return SparseMatrix::zeros(self.rows, self.cols);
        }
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|(&k, x)| (k, x * c)).collect(),
        }
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &SparseVector) -> SparseVector {
        let mut acc = SparseVector::new();
        for (&(i, j), x) in &self.entries {
            if let Some(y) = v.get(&j) {
                add_entry(&mut acc, i, x * y);
            }
        }
        acc
    }

    /// Kronecker product, row-major in the tensor index: `(i1,i2) -> i1*r2 + i2`.
    pub fn kron(&self, rhs: &SparseMatrix) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for (&(i1, j1), a) in &self.entries {
            for (&(i2, j2), b) in &rhs.entries {
                out.entries.insert((i1 * rhs.rows + i2, j1 * rhs.cols + j2), a * b);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut d = vec![vec![Scalar::zero(); self.cols]; self.rows];
        for (&(i, j), x) in &self.entries {
            d[i][j] = x.clone();
        }
        d
    }
}

impl fmt::Debug for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SparseMatrix {}x{} [", self.rows, self.cols)?;
        for r in self.to_dense() {
            let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Row echelon data. Each pivot row has leading coefficient 1 at its key.
struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseVector>,
    reduced: bool,
}

impl Echelon {
    fn new(ncols: usize, reduced: bool) -> Self {
        Echelon { ncols, pivots: BTreeMap::new(), reduced }
    }

    fn reduce(&self, mut r: SparseVector) -> SparseVector {
        let mut cursor = 0usize;
        loop {
            let next = r
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| self.pivots.contains_key(c));
            let Some(c) = next else { break };
            let coeff = -r[&c].clone();
            axpy(&mut r, &coeff, &self.pivots[&c]);
            cursor = c + 1;
        }
        r
    }

    /// Inserts a row; returns whether the rank grew.
    fn push(&mut self, r: SparseVector) -> bool {
        let r = self.reduce(r);
        let Some((&p, lead)) = r.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        let r = scale(&r, &inv);
        if self.reduced {
            for row in self.pivots.values_mut() {
                if let Some(x) = row.get(&p).cloned() {
                    axpy(row, &-x, &r);
                }
            }
        }
        self.pivots.insert(p, r);
        true
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect()
    }
}

/// Exact rank over the rationals.
pub fn rank(m: &SparseMatrix) -> usize {
    // Eliminate along the shorter side; rank is the same.
    let rows = if m.rows <= m.cols { m.row_vectors() } else { m.column_vectors() };
    let width = m.rows.max(m.cols);
    let mut e = Echelon::new(width, false);
    for r in rows {
        e.push(r);
    }
    e.rank()
}

/// Rank of a family of sparse vectors of the given length.
pub fn rank_of_vectors(len: usize, vs: &[SparseVector]) -> usize {
    let mut e = Echelon::new(len, false);
    for v in vs {
        e.push(v.clone());
    }
    e.rank()
}

/// The members of `candidates` that are independent modulo `span`, chosen
/// greedily in order.
pub fn complement_basis(len: usize, span: &[SparseVector], candidates: &[SparseVector]) -> Vec<SparseVector> {
    let mut e = Echelon::new(len, false);
    for v in span {
        e.push(v.clone());
    }
    candidates.iter().filter(|v| e.push((*v).clone())).cloned().collect()
}

/// Reduced row echelon form of the rows of `m`: (pivot columns, pivot rows).
pub fn rref(m: &SparseMatrix) -> (Vec<usize>, Vec<SparseVector>) {
    let mut e = Echelon::new(m.cols, true);
    for r in m.row_vectors() {
        e.push(r);
    }
    let pivots: Vec<usize> = e.pivots.keys().copied().collect();
    let rows = e.pivots.into_values().collect();
    (pivots, rows)
}

/// Inverse of a square matrix, or `None` if it is singular.
pub fn inverse(m: &SparseMatrix) -> Option<SparseMatrix> {
    let n = m.rows;
    if m.cols != n {
        return None;
    }
    let mut e = Echelon::new(2 * n, true);
    for (i, mut r) in m.row_vectors().into_iter().enumerate() {
        r.insert(n + i, Scalar::one());
        e.push(r);
    }
    let pivots: Vec<usize> = e.pivots.keys().copied().collect();
    if pivots != (0..n).collect::<Vec<_>>() {
        return None;
    }
    let mut inv = SparseMatrix::zeros(n, n);
    for (i, row) in e.pivots.values().enumerate() {
        let lead = row[&i].clone();
        for (c, x) in row.range(n..) {
            inv.set(i, c - n, x.clone() / lead.clone());
        }
    }
    Some(inv)
}

/// Basis of the null space, one vector per free column of the RREF.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<SparseVector> {
    let mut e = Echelon::new(m.cols, true);
    for r in m.row_vectors() {
        e.push(r);
    }
    let mut out = Vec::new();
    for f in e.free_columns() {
        let mut v = unit_vector(f);
        for (&p, row) in &e.pivots {
            if let Some(x) = row.get(&f) {
                v.insert(p, -x);
            }
        }
        out.push(v);
    }
    out
}

/// A presented quotient `K^n / span(relations)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    pub dim: usize,
    /// `dim x ambient` matrix killing every relation.
    pub projection: SparseMatrix,
    /// `ambient x dim` matrix with `projection * section = id`.
    pub section: SparseMatrix,
    /// Ambient index of each quotient basis vector.
    pub representatives: Vec<usize>,
}

impl Quotient {
    /// Coordinates of the class of ambient basis vector `i`.
    pub fn class_of(&self, i: usize) -> SparseVector {
        self.projection.column(i)
    }
}

/// Quotient of `K^ambient_dim` by the span of `relations`.
///
/// The quotient basis is the set of non-pivot columns of the relation RREF.
pub fn quotient_presentation(ambient_dim: usize, relations: &[SparseVector]) -> Result<Quotient> {
    let mut e = Echelon::new(ambient_dim, true);
    for r in relations {
        if let Some((&i, _)) = r.iter().next_back() {
            if i >= ambient_dim {
                return Err(Error::ShapeMismatch(format!(
                    "relation index {i} outside ambient dimension {ambient_dim}"
                )));
            }
        }
        e.push(r.clone());
    }
    let free = e.free_columns();
    let index: BTreeMap<usize, usize> = free.iter().enumerate().map(|(k, &f)| (f, k)).collect();
    let mut projection = SparseMatrix::zeros(free.len(), ambient_dim);
    let mut section = SparseMatrix::zeros(ambient_dim, free.len());
    for (&f, &k) in &index {
        projection.set(k, f, Scalar::one());
        section.set(f, k, Scalar::one());
    }
    for (&p, row) in &e.pivots {
        for (c, x) in row.iter() {
            if c == &p {
                continue;
            }
            projection.set(index[c], p, -x);
        }
    }
    Ok(Quotient { dim: free.len(), projection, section, representatives: free })
}

/// A bounded chain complex with homological differentials `d_k: C_k -> C_{k-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteComplex {
    min_degree: i64,
    dims: Vec<usize>,
    /// `diffs[i]` is `d_{min_degree + i}`, of shape `dim(k-1) x dim(k)`.
    diffs: Vec<SparseMatrix>,
}

impl FiniteComplex {
    /// `dims[i]` is the dimension in degree `min_degree + i`; `diffs[i]` is the
    /// differential out of that degree. Degrees outside the range are zero.
    pub fn new(min_degree: i64, dims: Vec<usize>, diffs: Vec<SparseMatrix>) -> Result<Self> {
        if dims.len() != diffs.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} degrees but {} differentials",
                dims.len(),
                diffs.len()
            )));
        }
        for (i, d) in diffs.iter().enumerate() {
            let below = if i == 0 { 0 } else { dims[i - 1] };
            if d.rows() != below || d.cols() != dims[i] {
                return Err(Error::ShapeMismatch(format!(
                    "d_{} has shape {}x{}, expected {}x{}",
                    min_degree + i as i64,
                    d.rows(),
                    d.cols(),
                    below,
                    dims[i]
                )));
            }
        }
        Ok(FiniteComplex { min_degree, dims, diffs })
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> {
        self.min_degree..=self.max_degree()
    }

    pub fn dim(&self, k: i64) -> usize {
        self.index(k).map_or(0, |i| self.dims[i])
    }

    /// `d_k`, or a correctly shaped zero matrix outside the stored range.
    pub fn differential(&self, k: i64) -> SparseMatrix {
        match self.index(k) {
            Some(i) => self.diffs[i].clone(),
            None => SparseMatrix::zeros(self.dim(k - 1), self.dim(k)),
        }
    }

    fn index(&self, k: i64) -> Option<usize> {
        let i = k - self.min_degree;
        (i >= 0 && (i as usize) < self.dims.len()).then_some(i as usize)
    }
}

/// Checks `d_k * d_{k+1} = 0` for every degree.
pub fn verify_complex(c: &FiniteComplex) -> Result<()> {
    for k in c.degrees() {
        let dd = c.differential(k).mul(&c.differential(k + 1))?;
        if !dd.is_zero() {
            return Err(Error::ComplexInvalid { degree: k });
        }
    }
    Ok(())
}

/// `dim H_k = dim ker d_k - rank d_{k+1}` for each stored degree.
pub fn homology_dims(c: &FiniteComplex) -> Result<BTreeMap<i64, usize>> {
    verify_complex(c)?;
    let ranks: BTreeMap<i64, usize> =
        (c.min_degree()..=c.max_degree() + 1).map(|k| (k, rank(&c.differential(k)))).collect();
    Ok(c.degrees().map(|k| (k, c.dim(k) - ranks[&k] - ranks[&(k + 1)])).collect())
}
