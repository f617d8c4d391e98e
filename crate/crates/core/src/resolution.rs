//! The period-4 bimodule resolution
//!
//! ```text
//! 0 → C_4 → C_3 → C_2 → C_1 → C_0 → A → 0
//! C_0 = A⊗A,  C_1 = A⊗V⊗A ⊕ A⊗A[2],  C_2 = A⊗V⊗A[2] ⊕ A⊗A[2],
//! C_3 = A⊗A[4],  C_4 = A⊗A[2h]
//! ```
//!
//! with all tensor products over `R`. `M[s]` is `M` with every degree raised
//! by `s`. Each module is materialized degree by degree with a basis of
//! vertex-compatible basis tensors.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::frobenius::{DualBasisPair, TraceForm};
use crate::linalg::{LinearMap, SparseVec, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Summand {
    /// `A ⊗_R A` raised by `offset`.
    AA { offset: usize },
    /// `A ⊗_R V ⊗_R A` raised by `offset`.
    AVA { offset: usize },
}

impl Summand {
    pub fn offset(&self) -> usize {
        match self {
            Summand::AA { offset } | Summand::AVA { offset } => *offset,
        }
    }

    /// Combined degree of the two `A` legs in total degree `d`.
    fn leg_degree(&self, d: usize) -> Option<usize> {
        let extra = match self {
            Summand::AA { offset } => *offset,
            Summand::AVA { offset } => offset + 1,
        };
        d.checked_sub(extra)
    }
}

/// Summands of `C_i` for `0 ≤ i ≤ 4`.
pub fn summands(alg: &GradedAlgebra, i: usize) -> Vec<Summand> {
    use Summand::*;
    match i {
        0 => vec![AA { offset: 0 }],
        1 => vec![AVA { offset: 0 }, AA { offset: 2 }],
        2 => vec![AVA { offset: 2 }, AA { offset: 2 }],
        3 => vec![AA { offset: 4 }],
        4 => vec![AA {
            offset: 2 * alg.coxeter_number(),
        }],
        _ => panic!("C_{i} is not part of one period"),
    }
}

/// A basis tensor: `left ⊗ right` or `left ⊗ arrow ⊗ right`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TensorKey {
    pub summand: usize,
    pub left: usize,
    pub arrow: Option<usize>,
    pub right: usize,
}

/// The degree-`d` part of `C_i`.
#[derive(Clone, Debug)]
pub struct BimoduleSlice {
    pub index: usize,
    pub degree: usize,
    pub summands: Vec<Summand>,
    pub basis: Vec<TensorKey>,
    lookup: HashMap<TensorKey, usize>,
}

impl BimoduleSlice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, key: &TensorKey) -> Option<usize> {
        self.lookup.get(key).copied()
    }
}

/// Maximal total degree in which `C_i` can be nonzero.
pub fn max_degree(alg: &GradedAlgebra, i: usize) -> usize {
    summands(alg, i)
        .iter()
        .map(|s| match s {
            Summand::AA { offset } => 2 * alg.top_degree() + offset,
            Summand::AVA { offset } => 2 * alg.top_degree() + offset + 1,
        })
        .max()
        .unwrap_or(0)
}

/// Largest degree in which some `C_i`, `0 ≤ i ≤ 4`, is nonzero.
pub fn period_max_degree(alg: &GradedAlgebra) -> usize {
    (0..=4).map(|i| max_degree(alg, i)).max().unwrap_or(0)
}

pub fn build_complex_slice(alg: &GradedAlgebra, i: usize, d: usize) -> Result<BimoduleSlice> {
    let cap = period_max_degree(alg);
    if d > cap {
        return Err(Error::DegreeBeyondCap { degree: d as i64, cap });
    }
    let sums = summands(alg, i);
    let top = alg.top_degree();
    let mut basis = Vec::new();
    for (si, s) in sums.iter().enumerate() {
        let Some(legs) = s.leg_degree(d) else { continue };
        for d1 in 0..=legs.min(top) {
            let d2 = legs - d1;
            if d2 > top {
                continue;
            }
            for x in alg.degree_range(d1) {
                let hx = alg.basis_element(x).head;
                let mids: Vec<(Option<usize>, usize)> = match s {
                    Summand::AA { .. } => vec![(None, hx)],
                    Summand::AVA { .. } => alg.quiver.arrows_from(hx).map(|a| (Some(a.id), a.head)).collect(),
                };
                for (arrow, v) in mids {
                    for y in alg.degree_range(d2) {
                        if alg.basis_element(y).tail == v {
                            basis.push(TensorKey {
                                summand: si,
                                left: x,
                                arrow,
                                right: y,
                            });
                        }
                    }
                }
            }
        }
    }
    let lookup = basis.iter().enumerate().map(|(k, key)| (*key, k)).collect();
    Ok(BimoduleSlice {
        index: i,
        degree: d,
        summands: sums,
        basis,
        lookup,
    })
}

/// Accumulates `c · L ⊗ (α ⊗) R` into a target slice, dropping tensors that
/// vanish over `R`.
struct Builder<'a> {
    alg: &'a GradedAlgebra,
    target: &'a BimoduleSlice,
    pairs: Vec<(usize, Q)>,
}

impl<'a> Builder<'a> {
    fn new(alg: &'a GradedAlgebra, target: &'a BimoduleSlice) -> Self {
        Builder {
            alg,
            target,
            pairs: Vec::new(),
        }
    }

    fn push(&mut self, c: &Q, summand: usize, left: &Element, arrow: Option<usize>, right: &Element) {
        for (x, a) in left.iter() {
            let hx = self.alg.basis_element(*x).head;
            let v = match arrow {
                None => hx,
                Some(al) => {
                    let ar = self.alg.quiver.arrow(al);
                    if ar.tail != hx {
                        continue;
                    }
                    ar.head
                }
            };
            for (y, b) in right.iter() {
                if self.alg.basis_element(*y).tail != v {
                    continue;
                }
                let key = TensorKey {
                    summand,
                    left: *x,
                    arrow,
                    right: *y,
                };
                let k = self
                    .target
                    .index_of(&key)
                    .unwrap_or_else(|| panic!("{key:?} missing from C_{}({})", self.target.index, self.target.degree));
                self.pairs.push((k, c * a * b));
            }
        }
    }

    fn finish(self) -> SparseVec {
        SparseVec::from_pairs(self.pairs)
    }
}

/// Target of `d_0`: `A(d)` in local coordinates.
fn multiply_out(alg: &GradedAlgebra, src: &BimoduleSlice) -> LinearMap {
    let start = alg.degree_range(src.degree).start;
    let target_dim = alg.dim_in_degree(src.degree);
    let cols = src
        .basis
        .iter()
        .map(|k| alg.basis_product(k.left, k.right).remap(|j| Some(j - start)))
        .collect();
    LinearMap::new(src.dim(), target_dim, cols)
}

/// `d_i : C_i(d) → C_{i-1}(d)` for `1 ≤ i ≤ 4`.
pub fn differential(
    alg: &GradedAlgebra,
    db: &DualBasisPair,
    i: usize,
    src: &BimoduleSlice,
    tgt: &BimoduleSlice,
) -> LinearMap {
    let one = Q::one();
    let minus = -Q::one();
    let z = alg.z();
    let cols: Vec<SparseVec> = src
        .basis
        .iter()
        .map(|key| {
            let b1 = SparseVec::unit(key.left);
            let b2 = SparseVec::unit(key.right);
            let mut out = Builder::new(alg, tgt);
            match (i, key.summand) {
                // b1⊗α⊗b2 ↦ b1α⊗b2 − b1⊗αb2
                (1, 0) => {
                    let al = alg.arrow(key.arrow.expect("V leg"));
                    out.push(&one, 0, &alg.multiply(&b1, &al), None, &b2);
                    out.push(&minus, 0, &b1, None, &alg.multiply(&al, &b2));
                }
                // b3⊗b4 ↦ b3z⊗b4 − b3⊗zb4
                (1, 1) => {
                    out.push(&one, 0, &alg.multiply(&b1, &z), None, &b2);
                    out.push(&minus, 0, &b1, None, &alg.multiply(&z, &b2));
                }
                // b1⊗α⊗b2 ↦ (−b1z⊗α⊗b2 + b1⊗α⊗zb2, b1α⊗b2 − b1⊗αb2)
                (2, 0) => {
                    let a = key.arrow.expect("V leg");
                    let al = alg.arrow(a);
                    out.push(&minus, 0, &alg.multiply(&b1, &z), Some(a), &b2);
                    out.push(&one, 0, &b1, Some(a), &alg.multiply(&z, &b2));
                    out.push(&one, 1, &alg.multiply(&b1, &al), None, &b2);
                    out.push(&minus, 1, &b1, None, &alg.multiply(&al, &b2));
                }
                // b3⊗b4 ↦ (Σ ε_a (b3a⊗a*⊗b4 + b3⊗a⊗a*b4), −b3μ⊗b4)
                (2, 1) => {
                    push_moment(alg, &mut out, 0, &b1, &b2);
                    out.push(&minus, 1, &alg.multiply(&b1, &alg.mu()), None, &b2);
                }
                // b1⊗b2 ↦ (Σ ε_a (b1a⊗a*⊗b2 + b1⊗a⊗a*b2), b1z⊗b2 − b1⊗zb2)
                (3, 0) => {
                    push_moment(alg, &mut out, 0, &b1, &b2);
                    out.push(&one, 1, &alg.multiply(&b1, &z), None, &b2);
                    out.push(&minus, 1, &b1, None, &alg.multiply(&z, &b2));
                }
                // b1⊗b2 ↦ Σ b1x_i⊗x_i*b2
                (4, 0) => {
                    for (x, y) in db.basis.iter().zip(&db.dual) {
                        out.push(&one, 0, &alg.multiply(&b1, x), None, &alg.multiply(y, &b2));
                    }
                }
                _ => unreachable!("no summand {} in C_{i}", key.summand),
            }
            out.finish()
        })
        .collect();
    LinearMap::new(src.dim(), tgt.dim(), cols)
}

/// Adds `Σ_a ε_a (b1 a ⊗ a* ⊗ b2 + b1 ⊗ a ⊗ a* b2)` to summand `s`.
fn push_moment(alg: &GradedAlgebra, out: &mut Builder<'_>, s: usize, b1: &Element, b2: &Element) {
    for a in alg.quiver.double_arrows() {
        let eps = Q::from_integer(a.sign.into());
        let al = alg.arrow(a.id);
        let st = alg.arrow(a.star);
        out.push(&eps, s, &alg.multiply(b1, &al), Some(a.star), b2);
        out.push(&eps, s, b1, Some(a.id), &alg.multiply(&st, b2));
    }
}

/// All slices and differentials of one period of the resolution.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// `slices[i][d]` is `C_i(d)`.
    pub slices: Vec<Vec<BimoduleSlice>>,
    /// `maps[i][d]` is `d_i` in degree `d` (`d_0` lands in `A(d)`).
    pub maps: Vec<Vec<LinearMap>>,
    pub max_degree: usize,
}

impl Resolution {
    pub fn dim(&self, i: usize, d: usize) -> usize {
        self.slices[i].get(d).map_or(0, BimoduleSlice::dim)
    }
}

pub fn build_resolution(alg: &GradedAlgebra, db: &DualBasisPair) -> Result<Resolution> {
    let max_degree = period_max_degree(alg);
    let slices: Vec<Vec<BimoduleSlice>> = (0..=4)
        .map(|i| {
            (0..=max_degree)
                .into_par_iter()
                .map(|d| build_complex_slice(alg, i, d))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut maps = Vec::with_capacity(5);
    maps.push((0..=max_degree).into_par_iter().map(|d| multiply_out(alg, &slices[0][d])).collect());
    for i in 1..=4 {
        let m: Vec<LinearMap> = (0..=max_degree)
            .into_par_iter()
            .map(|d| differential(alg, db, i, &slices[i][d], &slices[i - 1][d]))
            .collect();
        maps.push(m);
    }
    Ok(Resolution {
        slices,
        maps,
        max_degree,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub check: String,
    pub degree: usize,
    pub basis_vector: usize,
    pub image: Vec<(usize, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolutionReport {
    pub degree_bound: usize,
    /// `(i, d, dim C_i(d))`
    pub dims: Vec<(usize, usize, usize)>,
    /// `(i, d, rank d_{i+1}, nullity d_i)` for `0 ≤ i ≤ 3`.
    pub exactness: Vec<(usize, usize, usize, usize)>,
    pub compositions_vanish: bool,
    pub wraparound_vanishes: bool,
    pub augmentation_surjective: bool,
    pub exact: bool,
    pub counterexamples: Vec<Counterexample>,
}

impl ResolutionReport {
    pub fn passed(&self) -> bool {
        self.compositions_vanish && self.wraparound_vanishes && self.augmentation_surjective && self.exact
    }
}

fn first_nonzero(check: &str, d: usize, m: &LinearMap) -> Option<Counterexample> {
    m.columns.iter().enumerate().find(|(_, c)| !c.is_zero()).map(|(j, c)| Counterexample {
        check: check.to_string(),
        degree: d,
        basis_vector: j,
        image: c.iter().map(|(i, v)| (*i, v.to_string())).collect(),
    })
}

pub fn verify_resolution(alg: &GradedAlgebra, res: &Resolution, degree_bound: usize) -> ResolutionReport {
    let mut counterexamples = Vec::new();
    let mut compositions_vanish = true;
    for i in 0..4 {
        for d in 0..=res.max_degree {
            let c = res.maps[i].get(d).map(|m| m.compose(&res.maps[i + 1][d]));
            if let Some(c) = c {
                if let Some(ce) = first_nonzero(&format!("d_{i}∘d_{}", i + 1), d, &c) {
                    compositions_vanish = false;
                    counterexamples.push(ce);
                }
            }
        }
    }
    // C_5 = C_1[2h] with d_5 = d_1 shifted.
    let shift = 2 * alg.coxeter_number();
    let mut wraparound_vanishes = true;
    for d in shift..=res.max_degree {
        let c = res.maps[4][d].compose(&res.maps[1][d - shift]);
        if let Some(ce) = first_nonzero("d_4∘d_1[2h]", d, &c) {
            wraparound_vanishes = false;
            counterexamples.push(ce);
        }
    }
    let bound = degree_bound.min(res.max_degree);
    let rows: Vec<Vec<(usize, usize, usize, usize)>> = (0..=bound)
        .into_par_iter()
        .map(|d| {
            (0..4)
                .map(|i| (i, d, res.maps[i + 1][d].rank(), res.maps[i][d].nullity()))
                .collect()
        })
        .collect();
    let exactness: Vec<_> = rows.into_iter().flatten().collect();
    let exact = exactness.iter().all(|(_, _, r, n)| r == n);
    let augmentation_surjective =
        (0..=bound).all(|d| res.maps[0][d].rank() == alg.dim_in_degree(d));
    let dims = (0..=4)
        .flat_map(|i| (0..=res.max_degree).map(move |d| (i, d)))
        .map(|(i, d)| (i, d, res.dim(i, d)))
        .collect();
    ResolutionReport {
        degree_bound: bound,
        dims,
        exactness,
        compositions_vanish,
        wraparound_vanishes,
        augmentation_surjective,
        exact,
        counterexamples,
    }
}

/// `(α, β) = ε_β δ_{α* β}` on `V`.
pub fn v_form(alg: &GradedAlgebra, alpha: usize, beta: usize) -> i64 {
    let b = alg.quiver.arrow(beta);
    if alg.quiver.arrow(alpha).star == beta {
        b.sign.into()
    } else {
        0
    }
}

/// `(x⊗y, a⊗b) = Tr(xb) Tr(ya)`, times `(α, β)` for `A⊗V⊗A`. Summands are
/// paired by position.
fn tensor_form(alg: &GradedAlgebra, tr: &TraceForm, u: &TensorKey, w: &TensorKey) -> Q {
    if u.summand != w.summand {
        return Q::zero();
    }
    let v = match (u.arrow, w.arrow) {
        (None, None) => 1,
        (Some(a), Some(b)) => v_form(alg, a, b),
        _ => 0,
    };
    if v == 0 {
        return Q::zero();
    }
    let t1 = tr.pair_basis(alg, u.left, w.right);
    if t1.is_zero() {
        return t1;
    }
    t1 * tr.pair_basis(alg, u.right, w.left) * Q::from_integer(v.into())
}

fn form(alg: &GradedAlgebra, tr: &TraceForm, s: &BimoduleSlice, x: &SparseVec, t: &BimoduleSlice, y: &SparseVec) -> Q {
    let mut acc = Q::zero();
    for (i, a) in x.iter() {
        for (j, b) in y.iter() {
            let f = tensor_form(alg, tr, &s.basis[*i], &t.basis[*j]);
            if !f.is_zero() {
                acc += f * a * b;
            }
        }
    }
    acc
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfDualityReport {
    /// `(d̄_4 x, b) = (x, d_0 b)`
    pub d0_d4: bool,
    /// `(d_3 u, ξ) = −(u, d_1 ξ)`
    pub d1_d3: bool,
    /// `(d_2 η, ξ) = (η, d_2 ιξ)`
    pub d2_iota: bool,
    pub pairs_checked: usize,
}

impl SelfDualityReport {
    pub fn passed(&self) -> bool {
        self.d0_d4 && self.d1_d3 && self.d2_iota
    }
}

/// Checks the three adjointness identities on all pairs of basis vectors.
pub fn selfduality_check(alg: &GradedAlgebra, tr: &TraceForm, db: &DualBasisPair, res: &Resolution) -> SelfDualityReport {
    let n = res.max_degree;
    let one = Q::one();
    let mut pairs_checked = 0usize;

    // d̄_4 : A → A⊗A, x ↦ Σ x x_i ⊗ x_i*, against d_0.
    let mut d0_d4 = true;
    for d in 0..=alg.top_degree() {
        let c0 = &res.slices[0][d + alg.top_degree()];
        for x in alg.degree_range(d) {
            let mut b = Builder::new(alg, c0);
            for (xi, yi) in db.basis.iter().zip(&db.dual) {
                b.push(&one, 0, &alg.multiply(&SparseVec::unit(x), xi), None, yi);
            }
            let img = b.finish();
            for e in 0..=n {
                let c0e = &res.slices[0][e];
                for (k, key) in c0e.basis.iter().enumerate() {
                    let lhs = form(alg, tr, c0, &img, c0e, &SparseVec::unit(k));
                    let rhs = tr.eval(&alg.multiply(&SparseVec::unit(x), alg.basis_product(key.left, key.right)));
                    pairs_checked += 1;
                    if lhs != rhs {
                        d0_d4 = false;
                    }
                }
            }
        }
    }

    // u ∈ C_3, ξ ∈ C_1: (d_3 u, ξ)_{C_2×C_1} = −(u, d_1 ξ)_{C_3×C_0}
    let mut d1_d3 = true;
    for d in 0..=n {
        for e in 0..=n {
            let (s3, s2, s1, s0) = (&res.slices[3][d], &res.slices[2][d], &res.slices[1][e], &res.slices[0][e]);
            for (ui, col) in res.maps[3][d].columns.iter().enumerate() {
                for (xi, col1) in res.maps[1][e].columns.iter().enumerate() {
                    let lhs = form(alg, tr, s2, col, s1, &SparseVec::unit(xi));
                    let rhs = form(alg, tr, s3, &SparseVec::unit(ui), s0, col1);
                    pairs_checked += 1;
                    if lhs != -rhs {
                        d1_d3 = false;
                    }
                }
            }
        }
    }

    // η, ξ ∈ C_2: (d_2 η, ξ)_{C_1×C_2} = (η, d_2 ιξ)_{C_2×C_1}, ι(x, y) = (−x, y)
    let mut d2_iota = true;
    for d in 0..=n {
        for e in 0..=n {
            let (s2d, s1d, s2e, s1e) = (&res.slices[2][d], &res.slices[1][d], &res.slices[2][e], &res.slices[1][e]);
            for (ei, col) in res.maps[2][d].columns.iter().enumerate() {
                for (xi, col2) in res.maps[2][e].columns.iter().enumerate() {
                    let iota = if s2e.basis[xi].summand == 0 { -Q::one() } else { Q::one() };
                    let lhs = form(alg, tr, s1d, col, s2e, &SparseVec::unit(xi));
                    let rhs = form(alg, tr, s2d, &SparseVec::unit(ei), s1e, &col2.scale(&iota));
                    pairs_checked += 1;
                    if lhs != rhs {
                        d2_iota = false;
                    }
                }
            }
        }
    }

    SelfDualityReport {
        d0_d4,
        d1_d3,
        d2_iota,
        pairs_checked,
    }
}
