//! The graded algebra `A = P[z] / (Σ_{a∈Q} [a,a*] − zμ)`.
//!
//! Paths compose left to right: `xy` is "first `x`, then `y`", so a basis
//! element with tail `i` and head `j` lies in `e_i A e_j`.
//!
//! The algebra is built one degree at a time. Since the defining relation is
//! homogeneous of degree 2, the ideal in degree `d` is `I(d-1)·V + P[z](d-2)·ρ`,
//! which gives a small presentation of `A(d)`: it is the quotient of
//!
//! ```text
//! B(d) = ⊕_a A(d-1) e_{t(a)} ⊗ a  ⊕  A(d-2)·z
//! ```
//!
//! by the span of `y·ρ_i` (`y` a basis element of `A(d-2)` ending at `i`) and
//! of `(w z)⊗a − (w a)·z` (`w` a basis element of `A(d-3)`), the latter
//! accounting for monomials `z^k p` reachable both ways. No saturation is
//! needed because the ideal is generated in a single degree.

use std::cmp::Reverse;
use std::collections::HashMap;
use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{Echelon, SparseVec, Q};
use crate::quiver::{enumerate_roots, Quiver, RootData, Weight};

/// A generator of `P[z]` over `R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Gen {
    Arrow(usize),
    Z,
}

/// `z^k` times a path of the double quiver (possibly a trivial path).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub z_power: usize,
    pub tail: usize,
    pub head: usize,
    pub path: Vec<usize>,
}

impl Monomial {
    pub fn idempotent(v: usize) -> Self {
        Monomial {
            z_power: 0,
            tail: v,
            head: v,
            path: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.path.len() + 2 * self.z_power
    }

    fn times_arrow(&self, quiver: &Quiver, a: usize) -> Self {
        let arrow = quiver.arrow(a);
        debug_assert_eq!(arrow.tail, self.head);
        let mut path = self.path.clone();
        path.push(a);
        Monomial {
            z_power: self.z_power,
            tail: self.tail,
            head: arrow.head,
            path,
        }
    }

    fn times_z(&self) -> Self {
        Monomial {
            z_power: self.z_power + 1,
            ..self.clone()
        }
    }

    /// Pivoting order: higher `z` powers first, then paths lexicographically.
    fn order_key(&self) -> (Reverse<usize>, Vec<usize>, usize, usize) {
        (Reverse(self.z_power), self.path.clone(), self.tail, self.head)
    }

    pub fn name(&self) -> String {
        let mut s = String::new();
        match self.z_power {
            0 => {}
            1 => s.push('z'),
            k => s.push_str(&format!("z^{k}")),
        }
        if self.path.is_empty() {
            s.push_str(&format!("e{}", self.tail));
        } else {
            for a in &self.path {
                s.push_str(&format!("a{a}"));
            }
        }
        s
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// All monomials `z^k·p` of degree `d` in `P[z]`, ordered by `z` power and
/// then lexicographically by arrow ids.
pub fn free_slice(quiver: &Quiver, d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for k in 0..=d / 2 {
        let len = d - 2 * k;
        let mut paths = paths_of_length(quiver, len);
        paths.sort_by(|a, b| a.path.cmp(&b.path).then(a.tail.cmp(&b.tail)));
        out.extend(paths.into_iter().map(|mut m| {
            m.z_power = k;
            m
        }));
    }
    out
}

pub(crate) fn paths_of_length(quiver: &Quiver, len: usize) -> Vec<Monomial> {
    let mut cur: Vec<Monomial> = (0..quiver.rank).map(Monomial::idempotent).collect();
    for _ in 0..len {
        let mut next = Vec::new();
        for m in &cur {
            for a in quiver.arrows_from(m.head) {
                next.push(m.times_arrow(quiver, a.id));
            }
        }
        cur = next;
    }
    cur
}

/// Checks that `μ` has no zero entry and pairs nontrivially with every root.
pub fn validate_weight(quiver: &Quiver, roots: &RootData, mu: &Weight) -> Result<()> {
    if mu.0.len() != quiver.rank {
        return Err(Error::LengthMismatch {
            expected: quiver.rank,
            got: mu.0.len(),
        });
    }
    if !mu.all_nonzero() || !mu.is_regular(roots) {
        return Err(Error::NonRegularWeight(format!("{:?}", mu.to_strings())));
    }
    Ok(())
}

/// The per-vertex components `ρ_i = e_i(Σ_{a∈Q̄} ε_a a a*)e_i − μ_i z e_i`
/// expressed in the coordinates of `free_slice(quiver, 2)`.
pub fn relation_elements(quiver: &Quiver, mu: &Weight) -> Result<Vec<SparseVec>> {
    let roots = enumerate_roots(quiver)?;
    validate_weight(quiver, &roots, mu)?;
    let slice = free_slice(quiver, 2);
    let index: HashMap<&Monomial, usize> = slice.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut out = Vec::with_capacity(quiver.rank);
    for v in 0..quiver.rank {
        let mut pairs = Vec::new();
        for a in quiver.arrows_from(v) {
            let m = Monomial::idempotent(v)
                .times_arrow(quiver, a.id)
                .times_arrow(quiver, a.star);
            pairs.push((index[&m], Q::from_integer(a.sign.into())));
        }
        let zm = Monomial::idempotent(v).times_z();
        pairs.push((index[&zm], -mu.0[v].clone()));
        out.push(SparseVec::from_pairs(pairs));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisElement {
    pub degree: usize,
    pub tail: usize,
    pub head: usize,
    pub monomial: Monomial,
    /// `(b, g)` with this element equal to `b·g`; `None` for idempotents.
    #[serde(skip)]
    pub parent: Option<(usize, Gen)>,
}

/// Elements of `A` are sparse vectors over the global basis index.
pub type Element = SparseVec;

#[derive(Clone, Debug)]
pub struct GradedAlgebra {
    pub quiver: Quiver,
    pub roots: RootData,
    pub weight: Weight,
    pub degree_cap: usize,
    basis: Vec<BasisElement>,
    /// `degree_start[d]..degree_start[d+1]` indexes the basis of `A(d)`.
    degree_start: Vec<usize>,
    rmul_arrow: Vec<Vec<SparseVec>>,
    rmul_z: Vec<SparseVec>,
    table: Vec<Vec<SparseVec>>,
}

impl GradedAlgebra {
    pub fn coxeter_number(&self) -> usize {
        self.roots.coxeter_number
    }

    /// `2h − 4`.
    pub fn top_degree(&self) -> usize {
        2 * self.coxeter_number() - 4
    }

    pub fn rank(&self) -> usize {
        self.quiver.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn basis_element(&self, i: usize) -> &BasisElement {
        &self.basis[i]
    }

    pub fn degree_range(&self, d: usize) -> std::ops::Range<usize> {
        if d + 1 >= self.degree_start.len() {
            let n = self.basis.len();
            return n..n;
        }
        self.degree_start[d]..self.degree_start[d + 1]
    }

    pub fn dim_in_degree(&self, d: usize) -> usize {
        self.degree_range(d).len()
    }

    pub fn degree_dims(&self) -> Vec<usize> {
        (0..=self.top_degree()).map(|d| self.dim_in_degree(d)).collect()
    }

    pub fn idempotent(&self, v: usize) -> usize {
        self.degree_start[0] + v
    }

    /// Basis index of the arrow `a` (degree-one elements are never reduced).
    pub fn arrow_index(&self, a: usize) -> usize {
        let r = self.degree_range(1);
        r.clone()
            .find(|&i| self.basis[i].monomial.path == [a])
            .expect("arrows are basis elements")
    }

    pub fn one(&self) -> Element {
        SparseVec::from_pairs((0..self.rank()).map(|v| (self.idempotent(v), Q::one())))
    }

    pub fn e(&self, v: usize) -> Element {
        SparseVec::unit(self.idempotent(v))
    }

    pub fn arrow(&self, a: usize) -> Element {
        SparseVec::unit(self.arrow_index(a))
    }

    pub fn z(&self) -> Element {
        (0..self.rank()).fold(SparseVec::new(), |acc, v| acc.add(&self.rmul_z[self.idempotent(v)]))
    }

    pub fn mu(&self) -> Element {
        SparseVec::from_pairs((0..self.rank()).map(|v| (self.idempotent(v), self.weight.0[v].clone())))
    }

    pub fn mu_inverse(&self) -> Element {
        SparseVec::from_pairs((0..self.rank()).map(|v| (self.idempotent(v), self.weight.0[v].recip())))
    }

    /// Product of two basis elements.
    pub fn basis_product(&self, x: usize, y: usize) -> &SparseVec {
        &self.table[x][y]
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let mut pairs: Vec<(usize, Q)> = Vec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let ab = a * b;
                for (k, c) in self.table[*i][*j].iter() {
                    pairs.push((*k, &ab * c));
                }
            }
        }
        SparseVec::from_pairs(pairs)
    }

    pub fn commutator(&self, x: &Element, y: &Element) -> Element {
        self.multiply(x, y).sub(&self.multiply(y, x))
    }

    /// Right multiplication by a generator, applied to an element.
    pub fn right_mul_gen(&self, x: &Element, g: Gen) -> Element {
        let table = match g {
            Gen::Arrow(a) => &self.rmul_arrow[a],
            Gen::Z => &self.rmul_z,
        };
        let mut pairs = Vec::new();
        for (i, c) in x.iter() {
            for (k, m) in table[*i].iter() {
                pairs.push((*k, c * m));
            }
        }
        SparseVec::from_pairs(pairs)
    }

    /// Normal form of a monomial of `P[z]`.
    pub fn reduce_monomial(&self, m: &Monomial) -> Element {
        if m.degree() > self.degree_cap {
            return SparseVec::new();
        }
        let mut x = self.e(m.tail);
        for _ in 0..m.z_power {
            x = self.right_mul_gen(&x, Gen::Z);
        }
        for &a in &m.path {
            x = self.right_mul_gen(&x, Gen::Arrow(a));
        }
        x
    }

    /// `Σ_{a∈Q̄} ε_a a a*`
    pub fn commutator_sum(&self) -> Element {
        let mut acc = SparseVec::new();
        for a in self.quiver.double_arrows() {
            let t = self.multiply(&self.arrow(a.id), &self.arrow(a.star));
            acc = acc.add_scaled(&Q::from_integer(a.sign.into()), &t);
        }
        acc
    }

    /// Homogeneous components of an element, by degree.
    pub fn degree_of_index(&self, i: usize) -> usize {
        self.basis[i].degree
    }

    /// `H_A(t)` as coefficient arrays `[i][j][d]`.
    pub fn hilbert_matrix(&self) -> Vec<Vec<Vec<u64>>> {
        let r = self.rank();
        let top = self.top_degree();
        let mut h = vec![vec![vec![0u64; top + 1]; r]; r];
        for b in &self.basis {
            h[b.tail][b.head][b.degree] += 1;
        }
        h
    }

    /// `H_A(1)`.
    pub fn hilbert_at_one(&self) -> Vec<Vec<u64>> {
        self.hilbert_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|c| c.iter().sum()).collect())
            .collect()
    }

    pub fn is_diagonal(&self, i: usize) -> bool {
        self.basis[i].tail == self.basis[i].head
    }

    pub fn to_json(&self) -> serde_json::Value {
        let top = self.top_degree();
        serde_json::json!({
            "quiver": self.quiver.name(),
            "weight": self.weight.to_strings(),
            "coxeter_number": self.coxeter_number(),
            "top_degree": top,
            "degree_dims": (0..=top).map(|d| self.dim_in_degree(d)).collect::<Vec<_>>(),
            "total_dim": self.dim(),
            "basis": (0..=top).map(|d| self.degree_range(d).map(|i| self.basis[i].monomial.name()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "hilbert_matrix": self.hilbert_matrix(),
        })
    }
}

/// Builds `A` in every degree up to `degree_cap` (at least `2h − 2`).
pub fn build_algebra(quiver: &Quiver, mu: &Weight, degree_cap: Option<usize>) -> Result<GradedAlgebra> {
    let roots = enumerate_roots(quiver)?;
    validate_weight(quiver, &roots, mu)?;
    let h = roots.coxeter_number;
    let top = 2 * h - 4;
    let cap = degree_cap.unwrap_or(2 * h);
    if cap < 2 * h - 2 {
        return Err(Error::Config(format!(
            "degree cap {cap} is below 2h-2 = {}; vanishing above the top degree would go unwitnessed",
            2 * h - 2
        )));
    }
    let narrows = quiver.double_arrows().len();
    let mut basis: Vec<BasisElement> = (0..quiver.rank)
        .map(|v| BasisElement {
            degree: 0,
            tail: v,
            head: v,
            monomial: Monomial::idempotent(v),
            parent: None,
        })
        .collect();
    let mut degree_start = vec![0, quiver.rank];
    let mut rmul_arrow: Vec<Vec<SparseVec>> = vec![Vec::new(); narrows];
    let mut rmul_z: Vec<SparseVec> = Vec::new();

    for d in 1..=cap {
        let range = |k: usize| -> std::ops::Range<usize> {
            if d < k {
                0..0
            } else {
                degree_start[d - k]..degree_start[d - k + 1]
            }
        };
        // Coordinates of B(d).
        let mut coords: Vec<(usize, Gen, Monomial)> = Vec::new();
        for x in range(1) {
            for a in quiver.arrows_from(basis[x].head) {
                coords.push((x, Gen::Arrow(a.id), basis[x].monomial.times_arrow(quiver, a.id)));
            }
        }
        for y in range(2) {
            coords.push((y, Gen::Z, basis[y].monomial.times_z()));
        }
        coords.sort_by(|a, b| a.2.order_key().cmp(&b.2.order_key()).then((a.0, a.1).cmp(&(b.0, b.1))));
        let index: HashMap<(usize, Gen), usize> =
            coords.iter().enumerate().map(|(i, c)| ((c.0, c.1), i)).collect();

        let mut kernel = Echelon::new();
        // y·ρ_i
        for y in range(2) {
            let v = basis[y].head;
            let mut pairs = Vec::new();
            for a in quiver.arrows_from(v) {
                let sign = Q::from_integer(a.sign.into());
                for (x, c) in rmul_arrow[a.id][y].iter() {
                    pairs.push((index[&(*x, Gen::Arrow(a.star))], &sign * c));
                }
            }
            pairs.push((index[&(y, Gen::Z)], -mu.0[v].clone()));
            kernel.insert(SparseVec::from_pairs(pairs));
        }
        // (w z)⊗a − (w a)·z
        for w in range(3) {
            for a in quiver.arrows_from(basis[w].head) {
                let mut pairs = Vec::new();
                for (x, c) in rmul_z[w].iter() {
                    pairs.push((index[&(*x, Gen::Arrow(a.id))], c.clone()));
                }
                for (y, c) in rmul_arrow[a.id][w].iter() {
                    pairs.push((index[&(*y, Gen::Z)], -c.clone()));
                }
                kernel.insert(SparseVec::from_pairs(pairs));
            }
        }
        let kernel = kernel.into_reduced();

        let start = basis.len();
        let mut new_index: HashMap<usize, usize> = HashMap::new();
        for (ci, (src, g, m)) in coords.iter().enumerate() {
            if !kernel.is_pivot(ci) {
                new_index.insert(ci, basis.len());
                basis.push(BasisElement {
                    degree: d,
                    tail: m.tail,
                    head: m.head,
                    monomial: m.clone(),
                    parent: Some((*src, *g)),
                });
            }
        }
        degree_start.push(basis.len());
        let n = basis.len();
        for v in rmul_arrow.iter_mut() {
            v.resize(n, SparseVec::new());
        }
        rmul_z.resize(n, SparseVec::new());
        for (ci, (src, g, _)) in coords.iter().enumerate() {
            let nf = kernel
                .reduce(&SparseVec::unit(ci))
                .remap(|j| new_index.get(&j).copied());
            match g {
                Gen::Arrow(a) => rmul_arrow[*a][*src] = nf,
                Gen::Z => rmul_z[*src] = nf,
            }
        }
        if d > top && basis.len() > start {
            return Err(Error::Invariant(format!(
                "A({d}) has dimension {} although the top degree is {top}",
                basis.len() - start
            )));
        }
    }

    let n = basis.len();
    let mut table = vec![vec![SparseVec::new(); n]; n];
    for y in 0..n {
        match basis[y].parent {
            None => {
                for (x, row) in table.iter_mut().enumerate() {
                    if basis[x].head == basis[y].tail {
                        row[y] = SparseVec::unit(x);
                    }
                }
            }
            Some((p, g)) => {
                let map = match g {
                    Gen::Arrow(a) => &rmul_arrow[a],
                    Gen::Z => &rmul_z,
                };
                for row in table.iter_mut() {
                    let prev = &row[p];
                    if prev.is_zero() {
                        continue;
                    }
                    let mut pairs = Vec::new();
                    for (k, c) in prev.iter() {
                        for (l, m) in map[*k].iter() {
                            pairs.push((*l, c * m));
                        }
                    }
                    row[y] = SparseVec::from_pairs(pairs);
                }
            }
        }
    }

    Ok(GradedAlgebra {
        quiver: quiver.clone(),
        roots,
        weight: mu.clone(),
        degree_cap: cap,
        basis,
        degree_start,
        rmul_arrow,
        rmul_z,
        table,
    })
}

/// Splits an element into its homogeneous components.
pub fn homogeneous_parts(alg: &GradedAlgebra, x: &Element) -> Vec<(usize, Element)> {
    let mut parts: std::collections::BTreeMap<usize, Vec<(usize, Q)>> = Default::default();
    for (i, c) in x.iter() {
        parts.entry(alg.degree_of_index(*i)).or_default().push((*i, c.clone()));
    }
    parts
        .into_iter()
        .map(|(d, v)| (d, SparseVec::from_pairs(v)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::linalg::q;
    use crate::quiver::DynkinType;

    fn alg(kind: DynkinType, rank: usize) -> GradedAlgebra {
        let quiver = Quiver::build(kind, rank).unwrap();
        build_algebra(&quiver, &Weight::rho(rank), None).unwrap()
    }

    #[test]
    fn free_slices_of_a2() {
        let a2 = Quiver::build(DynkinType::A, 2).unwrap();
        assert_eq!(free_slice(&a2, 0).len(), 2);
        assert_eq!(free_slice(&a2, 1).len(), 2);
        let s2 = free_slice(&a2, 2);
        assert_eq!(s2.len(), 4);
        assert!(s2[..2].iter().all(|m| m.z_power == 0));
    }

    #[test]
    fn relation_components() {
        let a2 = Quiver::build(DynkinType::A, 2).unwrap();
        let rel = relation_elements(&a2, &Weight::rho(2)).unwrap();
        assert_eq!(rel.len(), 2);
        for r in &rel {
            assert_eq!(r.nnz(), 2);
        }
        let slice = free_slice(&a2, 2);
        let path_sum: Q = rel
            .iter()
            .flat_map(|r| r.iter())
            .filter(|(i, _)| slice[*i].z_power == 0)
            .map(|(_, c)| c.clone())
            .sum();
        assert!(path_sum.is_zero());
        let a1 = Quiver::build(DynkinType::A, 1).unwrap();
        let rel1 = relation_elements(&a1, &Weight::rho(1)).unwrap();
        assert_eq!(rel1[0], SparseVec::single(0, q(-1)));
        assert!(relation_elements(&a2, &Weight::from_ints(&[1, -1])).is_err());
    }

    #[test]
    fn a2_dimensions() {
        let a = alg(DynkinType::A, 2);
        assert_eq!(a.degree_dims(), vec![2, 2, 2]);
        assert_eq!(a.dim(), 6);
        assert_eq!(a.hilbert_matrix(), vec![vec![vec![1, 0, 1], vec![0, 1, 0]], vec![vec![0, 1, 0], vec![1, 0, 1]]]);
    }

    #[test]
    fn a1_is_one_dimensional() {
        let a = alg(DynkinType::A, 1);
        assert_eq!(a.dim(), 1);
        assert!(a.z().is_zero());
    }

    #[test]
    fn a3_total_dimension() {
        let a = alg(DynkinType::A, 3);
        assert_eq!(a.dim(), 20);
        assert_eq!(a.hilbert_at_one(), vec![vec![3, 2, 1], vec![2, 4, 2], vec![1, 2, 3]]);
    }

    #[test]
    fn unit_and_relation() {
        for (k, r) in [(DynkinType::A, 2), (DynkinType::A, 3), (DynkinType::D, 4)] {
            let a = alg(k, r);
            let one = a.one();
            for i in 0..a.dim() {
                let x = SparseVec::unit(i);
                assert_eq!(a.multiply(&x, &one), x);
                assert_eq!(a.multiply(&one, &x), x);
            }
            let lhs = a.commutator_sum();
            let rhs = a.multiply(&a.z(), &a.mu());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn z_is_central() {
        let a = alg(DynkinType::D, 4);
        let z = a.z();
        for i in 0..a.dim() {
            let x = SparseVec::unit(i);
            assert!(a.commutator(&z, &x).is_zero());
        }
    }

    #[test]
    fn products_above_top_vanish() {
        let a = alg(DynkinType::A, 3);
        let top = a.top_degree();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                if a.degree_of_index(i) + a.degree_of_index(j) > top {
                    assert!(a.basis_product(i, j).is_zero());
                }
            }
        }
    }

    #[test]
    fn low_cap_rejected() {
        let quiver = Quiver::build(DynkinType::A, 3).unwrap();
        assert!(build_algebra(&quiver, &Weight::rho(3), Some(5)).is_err());
        assert!(build_algebra(&quiver, &Weight::rho(3), Some(6)).is_ok());
    }

    #[test]
    fn basis_monomials_reduce_to_themselves() {
        let a = alg(DynkinType::A, 4);
        for (i, b) in a.basis().iter().enumerate() {
            assert_eq!(a.reduce_monomial(&b.monomial), SparseVec::unit(i));
        }
    }
}
