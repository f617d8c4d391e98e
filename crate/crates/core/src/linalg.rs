//! Exact sparse linear algebra over the rationals.
//!
//! Vectors are sorted lists of `(index, coefficient)` pairs with no explicit
//! zeros. Row reduction keeps every pivot row normalized to a leading 1, so a
//! span can be queried for membership, reduced normal forms and rank without
//! any floating point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self { entries: vec![(i, Q::one())] }
    }

    pub fn single(i: usize, c: Q) -> Self {
        if c.is_zero() {
            Self::new()
        } else {
            Self { entries: vec![(i, c)] }
        }
    }

    /// Builds a vector from unsorted pairs, summing repeated indices.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, c) in pairs {
            if c.is_zero() {
                continue;
            }
            *acc.entry(i).or_insert_with(Q::zero) += c;
        }
        Self {
            entries: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); dim];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, Q)> {
        self.entries.iter()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    pub fn leading(&self) -> Option<(usize, &Q)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &Q, other: &SparseVec) -> SparseVec {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (0, 0);
        while a < self.entries.len() || b < other.entries.len() {
            let ia = self.entries.get(a).map(|e| e.0);
            let ib = other.entries.get(b).map(|e| e.0);
            match (ia, ib) {
                (Some(x), Some(y)) if x == y => {
                    let v = &self.entries[a].1 + c * &other.entries[b].1;
                    if !v.is_zero() {
                        out.push((x, v));
                    }
                    a += 1;
                    b += 1;
                }
                (Some(x), Some(y)) if x < y => {
                    out.push(self.entries[a].clone());
                    a += 1;
                }
                (Some(_), None) => {
                    out.push(self.entries[a].clone());
                    a += 1;
                }
                (_, Some(y)) => {
                    out.push((y, c * &other.entries[b].1));
                    b += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(&Q::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.add_scaled(&-Q::one(), other)
    }

    pub fn scale(&self, c: &Q) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVec {
        self.scale(&-Q::one())
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let (mut a, mut b) = (0, 0);
        let mut acc = Q::zero();
        while a < self.entries.len() && b < other.entries.len() {
            let (ia, ib) = (self.entries[a].0, other.entries[b].0);
            if ia == ib {
                acc += &self.entries[a].1 * &other.entries[b].1;
                a += 1;
                b += 1;
            } else if ia < ib {
                a += 1;
            } else {
                b += 1;
            }
        }
        acc
    }

    /// Re-indexes entries through `f`; entries mapped to `None` are dropped.
    pub fn remap<F: Fn(usize) -> Option<usize>>(&self, f: F) -> SparseVec {
        SparseVec::from_pairs(self.entries.iter().filter_map(|(i, c)| f(*i).map(|j| (j, c.clone()))))
    }

    /// Keeps the entries whose index satisfies `keep`.
    pub fn restrict<F: Fn(usize) -> bool>(&self, keep: F) -> SparseVec {
        SparseVec {
            entries: self.entries.iter().filter(|(i, _)| keep(*i)).cloned().collect(),
        }
    }

    pub fn max_abs_height(&self) -> BigInt {
        self.entries
            .iter()
            .map(|(_, c)| c.numer().abs().max(c.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Row echelon basis of a subspace, built incrementally.
///
/// Every stored row has a distinct leading column and a leading coefficient
/// of 1. Leading terms never cancel in a combination of rows, so the rows
/// whose leading column lies in a "tail" set of columns span exactly the
/// intersection of the subspace with that coordinate subspace.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a SparseVec>>(vs: I) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v.clone());
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// Eliminates leading terms until the leading column is not a pivot.
    fn reduce_leading(&self, mut v: SparseVec) -> SparseVec {
        while let Some((lead, c)) = v.leading() {
            match self.pivots.get(&lead) {
                Some(&r) => {
                    let c = -c.clone();
                    v = v.add_scaled(&c, &self.rows[r]);
                }
                None => break,
            }
        }
        v
    }

    /// Inserts `v`; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let v = self.reduce_leading(v);
        match v.leading() {
            None => false,
            Some((lead, c)) => {
                let inv = c.recip();
                let v = v.scale(&inv);
                self.pivots.insert(lead, self.rows.len());
                self.rows.push(v);
                true
            }
        }
    }

    /// Fully reduces `v` modulo the span: the result has no entry in any
    /// pivot column and differs from `v` by an element of the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut v = v.clone();
        let mut cursor = 0usize;
        loop {
            let next = v
                .iter()
                .find(|(i, _)| *i >= cursor && self.pivots.contains_key(i))
                .map(|(i, c)| (*i, c.clone()));
            match next {
                None => return v,
                Some((col, c)) => {
                    let r = self.pivots[&col];
                    v = v.add_scaled(&-c, &self.rows[r]);
                    cursor = col + 1;
                }
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce_leading(v.clone()).is_zero()
    }

    /// Number of rows whose leading column satisfies `pred`.
    pub fn count_pivots_where<F: Fn(usize) -> bool>(&self, pred: F) -> usize {
        self.pivots.keys().filter(|c| pred(**c)).count()
    }

    /// Rewrites the rows into reduced row echelon form.
    pub fn into_reduced(self) -> Echelon {
        let mut out = Echelon::new();
        // Back-substitute from the last pivot column down.
        let mut cols: Vec<usize> = self.pivots.keys().copied().collect();
        cols.reverse();
        let mut reduced: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for col in cols {
            let mut row = self.rows[self.pivots[&col]].clone();
            let others: Vec<(usize, Q)> = row
                .iter()
                .filter(|(i, _)| *i != col && reduced.contains_key(i))
                .cloned()
                .collect();
            for (i, c) in others {
                row = row.add_scaled(&-c, &reduced[&i]);
            }
            reduced.insert(col, row);
        }
        for (col, row) in reduced {
            out.pivots.insert(col, out.rows.len());
            out.rows.push(row);
        }
        out
    }
}

/// Linear map stored by the images of the source basis vectors.
#[derive(Clone, Debug)]
pub struct LinearMap {
    pub source_dim: usize,
    pub target_dim: usize,
    pub columns: Vec<SparseVec>,
}

impl LinearMap {
    pub fn new(source_dim: usize, target_dim: usize, columns: Vec<SparseVec>) -> Self {
        debug_assert_eq!(columns.len(), source_dim);
        Self {
            source_dim,
            target_dim,
            columns,
        }
    }

    pub fn zero(source_dim: usize, target_dim: usize) -> Self {
        Self::new(source_dim, target_dim, vec![SparseVec::new(); source_dim])
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (j, c) in v.iter() {
            for (i, m) in self.columns[*j].iter() {
                *acc.entry(*i).or_insert_with(Q::zero) += c * m;
            }
        }
        SparseVec::from_pairs(acc)
    }

    /// `self ∘ first`
    pub fn compose(&self, first: &LinearMap) -> LinearMap {
        assert_eq!(first.target_dim, self.source_dim, "dimension mismatch in composition");
        let columns = first.columns.iter().map(|c| self.apply(c)).collect();
        LinearMap::new(first.source_dim, self.target_dim, columns)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVec::is_zero)
    }

    pub fn rank(&self) -> usize {
        if self.source_dim == 0 || self.target_dim == 0 {
            return 0;
        }
        Echelon::from_vectors(&self.columns).rank()
    }

    pub fn nullity(&self) -> usize {
        self.source_dim - self.rank()
    }

    pub fn image(&self) -> Echelon {
        Echelon::from_vectors(&self.columns)
    }

    /// Basis of the kernel, in source coordinates.
    pub fn kernel(&self) -> Vec<SparseVec> {
        kernel_of_columns(&self.columns, self.target_dim)
    }

    /// Entry (row, col).
    pub fn entry(&self, row: usize, col: usize) -> Q {
        self.columns[col].get(row)
    }
}

/// Kernel of the map sending basis vector `j` to `columns[j]`.
pub fn kernel_of_columns(columns: &[SparseVec], target_dim: usize) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    let mut kernel = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        let aug = col.add(&SparseVec::unit(target_dim + j));
        let reduced = ech.reduce_leading(aug);
        match reduced.leading() {
            Some((lead, _)) if lead < target_dim => {
                ech.insert(reduced);
            }
            Some(_) => {
                kernel.push(reduced.remap(|i| i.checked_sub(target_dim)));
                // Kept in the echelon so later kernel vectors stay independent.
                ech.insert(reduced);
            }
            None => unreachable!("augmented vector cannot vanish"),
        }
    }
    kernel
}

/// Intersection of two subspaces given by spanning sets in a common space.
pub fn intersect(a: &[SparseVec], b: &[SparseVec], dim: usize) -> Vec<SparseVec> {
    // x ∈ span(a) ∩ span(b)  ⇔  x = Σ s_i a_i = Σ t_j b_j.
    let mut columns: Vec<SparseVec> = a.to_vec();
    columns.extend(b.iter().map(SparseVec::neg));
    let ker = kernel_of_columns(&columns, dim);
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for k in ker {
        let mut x = SparseVec::new();
        for (i, c) in k.iter() {
            if *i < a.len() {
                x = x.add_scaled(c, &a[*i]);
            }
        }
        if ech.insert(x.clone()) {
            out.push(x);
        }
    }
    out
}

/// Inverse of a square dense matrix, `None` if singular.
pub fn dense_inverse(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].recip();
        for j in 0..n {
            a[col][j] = &a[col][j] * &p;
            inv[col][j] = &inv[col][j] * &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn dense_rank(m: &[Vec<Q>]) -> usize {
    Echelon::from_vectors(m.iter().map(|r| SparseVec::from_dense(r)).collect::<Vec<_>>().iter()).rank()
}
