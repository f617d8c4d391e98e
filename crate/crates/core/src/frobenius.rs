//! Symmetric trace form on `A`, dual bases and the Casimir element.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{dense_inverse, dense_rank, qr, Echelon, SparseVec, Q};

pub const TRACE_RETRIES: u32 = 16;

#[derive(Clone, Debug)]
pub struct TraceForm {
    pub seed: u64,
    pub top_degree: usize,
    /// `Tr(x) = Σ functional_i x_i`, supported on the top degree.
    pub functional: SparseVec,
}

impl TraceForm {
    pub fn eval(&self, x: &Element) -> Q {
        self.functional.dot(x)
    }

    pub fn pair(&self, alg: &GradedAlgebra, x: &Element, y: &Element) -> Q {
        self.eval(&alg.multiply(x, y))
    }

    /// `Tr(b_i b_j)` for basis elements, without materializing the product.
    pub fn pair_basis(&self, alg: &GradedAlgebra, i: usize, j: usize) -> Q {
        self.functional.dot(alg.basis_product(i, j))
    }
}

/// A block of the trace pairing: basis elements of `e_i A(d) e_j` against
/// those of `e_j A(top-d) e_i`.
#[derive(Clone, Debug, Serialize)]
pub struct GramBlock {
    pub degree: usize,
    pub tail: usize,
    pub head: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

type BlockKey = (usize, usize, usize);

fn blocks(alg: &GradedAlgebra) -> BTreeMap<BlockKey, Vec<usize>> {
    let mut out: BTreeMap<BlockKey, Vec<usize>> = BTreeMap::new();
    for (i, b) in alg.basis().iter().enumerate() {
        out.entry((b.degree, b.tail, b.head)).or_default().push(i);
    }
    out
}

fn partner(alg: &GradedAlgebra, key: BlockKey) -> BlockKey {
    (alg.top_degree() - key.0, key.2, key.1)
}

pub fn gram_blocks(alg: &GradedAlgebra, tr: &TraceForm) -> Vec<GramBlock> {
    let bl = blocks(alg);
    let mut out = Vec::new();
    for (key, xs) in &bl {
        let ys = bl.get(&partner(alg, *key)).cloned().unwrap_or_default();
        let m: Vec<Vec<Q>> = xs
            .iter()
            .map(|&x| ys.iter().map(|&y| tr.pair_basis(alg, x, y)).collect())
            .collect();
        out.push(GramBlock {
            degree: key.0,
            tail: key.1,
            head: key.2,
            rows: xs.len(),
            cols: ys.len(),
            rank: dense_rank(&m),
        });
    }
    out
}

fn nondegenerate(alg: &GradedAlgebra, tr: &TraceForm) -> bool {
    gram_blocks(alg, tr)
        .iter()
        .all(|b| b.rows == b.cols && b.rank == b.rows)
}

/// Basis of `[A,A] ∩ A_top`, reduced.
fn top_commutators(alg: &GradedAlgebra) -> Echelon {
    let top = alg.top_degree();
    let mut gens: Vec<(usize, Element)> = (0..alg.rank()).map(|v| (0, alg.e(v))).collect();
    gens.extend(alg.quiver.double_arrows().iter().map(|a| (1, alg.arrow(a.id))));
    let mut ech = Echelon::new();
    for (dg, g) in &gens {
        if *dg > top {
            continue;
        }
        for x in alg.degree_range(top - dg) {
            ech.insert(alg.commutator(g, &SparseVec::unit(x)));
        }
    }
    ech.into_reduced()
}

/// A pseudo-random functional on `A_top` vanishing on `[A,A] ∩ A_top`,
/// resampled until every Gram block is invertible.
pub fn build_trace(alg: &GradedAlgebra, seed: u64) -> Result<TraceForm> {
    let top = alg.top_degree();
    let comm = top_commutators(alg);
    let free: Vec<usize> = alg.degree_range(top).filter(|&i| !comm.is_pivot(i)).collect();
    for attempt in 0..TRACE_RETRIES {
        let s = seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut values: BTreeMap<usize, Q> = BTreeMap::new();
        for &i in &free {
            let mut n = 0;
            while n == 0 {
                n = rng.gen_range(-7i64..=7);
            }
            values.insert(i, qr(n, rng.gen_range(1i64..=7)));
        }
        // Pivot coordinates are forced by vanishing on each reduced row.
        for row in comm.rows() {
            let (p, _) = row.leading().expect("nonzero row");
            let mut acc = Q::zero();
            for (j, c) in row.iter() {
                if *j != p {
                    acc -= c * values.get(j).cloned().unwrap_or_else(Q::zero);
                }
            }
            values.insert(p, acc);
        }
        let tr = TraceForm {
            seed: s,
            top_degree: top,
            functional: SparseVec::from_pairs(values),
        };
        if nondegenerate(alg, &tr) {
            return Ok(tr);
        }
    }
    Err(Error::DegenerateTrace {
        seed,
        tries: TRACE_RETRIES,
    })
}

/// `{x_i}` with `{x_i*}` satisfying `Tr(x_i x_j*) = δ_ij`.
#[derive(Clone, Debug)]
pub struct DualBasisPair {
    pub basis: Vec<Element>,
    pub dual: Vec<Element>,
}

/// Dual basis of the normal-form monomial basis.
pub fn dual_basis(alg: &GradedAlgebra, tr: &TraceForm) -> Result<DualBasisPair> {
    let basis: Vec<Element> = (0..alg.dim()).map(SparseVec::unit).collect();
    dual_basis_of(alg, tr, &basis)
}

/// Dual basis of an arbitrary block-adapted basis: every `basis[k]` must be a
/// combination of monomials from the block of monomial `k`.
pub fn dual_basis_of(alg: &GradedAlgebra, tr: &TraceForm, basis: &[Element]) -> Result<DualBasisPair> {
    let bl = blocks(alg);
    let mut dual = vec![SparseVec::new(); alg.dim()];
    for (key, xs) in &bl {
        let ys = bl.get(&partner(alg, *key)).cloned().unwrap_or_default();
        if xs.len() != ys.len() {
            return Err(Error::Invariant(format!("Gram block {key:?} is not square")));
        }
        // g[k][m] = Tr(x_k y_m); x_l* = Σ_m (g⁻¹)[m][l] y_m
        let g: Vec<Vec<Q>> = xs
            .iter()
            .map(|&x| ys.iter().map(|&y| tr.pair(alg, &basis[x], &SparseVec::unit(y))).collect())
            .collect();
        let inv = dense_inverse(&g).ok_or_else(|| Error::Invariant(format!("Gram block {key:?} is singular")))?;
        for (l, &x) in xs.iter().enumerate() {
            dual[x] = SparseVec::from_pairs(ys.iter().enumerate().map(|(m, &y)| (y, inv[m][l].clone())));
        }
    }
    let pair = DualBasisPair {
        basis: basis.to_vec(),
        dual,
    };
    for (i, x) in pair.basis.iter().enumerate() {
        for (j, y) in pair.dual.iter().enumerate() {
            let v = tr.pair(alg, x, y);
            let expected = if i == j { Q::one() } else { Q::zero() };
            if v != expected {
                return Err(Error::Invariant(format!("dual basis fails at ({i},{j})")));
            }
        }
    }
    Ok(pair)
}

/// Elements of `A ⊗_R A`, indexed by `i·n + j` for basis elements `i`, `j`.
pub type Tensor = SparseVec;

pub fn tensor(alg: &GradedAlgebra, x: &Element, y: &Element) -> Tensor {
    let n = alg.dim();
    let mut pairs = Vec::new();
    for (i, a) in x.iter() {
        for (j, b) in y.iter() {
            if alg.basis_element(*i).head == alg.basis_element(*j).tail {
                pairs.push((i * n + j, a * b));
            }
        }
    }
    SparseVec::from_pairs(pairs)
}

/// `Σ_i l·x_i·m ⊗ l'·x_i*·m'`, with `None` standing for the unit.
fn casimir_variant(
    alg: &GradedAlgebra,
    db: &DualBasisPair,
    left: Option<&Element>,
    mid_left: Option<&Element>,
    mid_right: Option<&Element>,
    right: Option<&Element>,
) -> Tensor {
    let mut acc = SparseVec::new();
    for (x, y) in db.basis.iter().zip(&db.dual) {
        let mut a = x.clone();
        if let Some(l) = left {
            a = alg.multiply(l, &a);
        }
        if let Some(m) = mid_left {
            a = alg.multiply(&a, m);
        }
        let mut b = y.clone();
        if let Some(m) = mid_right {
            b = alg.multiply(m, &b);
        }
        if let Some(r) = right {
            b = alg.multiply(&b, r);
        }
        acc = acc.add(&tensor(alg, &a, &b));
    }
    acc
}

/// `Ω = Σ x_i ⊗ x_i*`
pub fn casimir(alg: &GradedAlgebra, db: &DualBasisPair) -> Tensor {
    casimir_variant(alg, db, None, None, None, None)
}

#[derive(Clone, Debug, Serialize)]
pub struct CasimirFailure {
    pub generator: String,
    pub identity: String,
}

/// Checks `Σ g x_i ⊗ x_i* = Σ x_i ⊗ x_i* g` and `Σ x_i g ⊗ x_i* = Σ x_i ⊗ g x_i*`
/// for the unit, every arrow and `z`.
pub fn casimir_check(alg: &GradedAlgebra, db: &DualBasisPair) -> std::result::Result<(), CasimirFailure> {
    let mut gens: Vec<(String, Element)> = vec![("1".into(), alg.one()), ("z".into(), alg.z())];
    for a in alg.quiver.double_arrows() {
        gens.push((format!("a{}", a.id), alg.arrow(a.id)));
    }
    for (name, g) in &gens {
        let outer_l = casimir_variant(alg, db, Some(g), None, None, None);
        let outer_r = casimir_variant(alg, db, None, None, None, Some(g));
        if outer_l != outer_r {
            return Err(CasimirFailure {
                generator: name.clone(),
                identity: "g·Ω = Ω·g".into(),
            });
        }
        let inner_l = casimir_variant(alg, db, None, Some(g), None, None);
        let inner_r = casimir_variant(alg, db, None, None, Some(g), None);
        if inner_l != inner_r {
            return Err(CasimirFailure {
                generator: name.clone(),
                identity: "Σ x_i g ⊗ x_i* = Σ x_i ⊗ g x_i*".into(),
            });
        }
    }
    Ok(())
}

/// A random block-triangular change of the monomial basis (unit diagonal,
/// hence invertible), for basis-independence checks.
pub fn random_block_basis(alg: &GradedAlgebra, seed: u64) -> Vec<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut basis: Vec<Element> = (0..alg.dim()).map(SparseVec::unit).collect();
    for xs in blocks(alg).values() {
        for (k, &x) in xs.iter().enumerate() {
            let mut v = SparseVec::unit(x);
            for &y in &xs[k + 1..] {
                v = v.add_scaled(&qr(rng.gen_range(-5i64..=5), rng.gen_range(1i64..=5)), &SparseVec::unit(y));
            }
            basis[x] = v;
        }
    }
    basis
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceReport {
    pub seed: u64,
    pub top_degree: usize,
    pub functional: Vec<(String, String)>,
    pub gram_ranks: Vec<usize>,
    pub gram_dims: Vec<usize>,
}

pub fn trace_report(alg: &GradedAlgebra, tr: &TraceForm) -> TraceReport {
    let top = alg.top_degree();
    let mut ranks = vec![0; top + 1];
    let mut dims = vec![0; top + 1];
    for b in gram_blocks(alg, tr) {
        ranks[b.degree] += b.rank;
        dims[b.degree] += b.rows;
    }
    TraceReport {
        seed: tr.seed,
        top_degree: top,
        functional: tr
            .functional
            .iter()
            .map(|(i, c)| (alg.basis_element(*i).monomial.name(), c.to_string()))
            .collect(),
        gram_ranks: ranks,
        gram_dims: dims,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::quiver::{DynkinType, Quiver, Weight};

    fn alg(kind: DynkinType, rank: usize) -> GradedAlgebra {
        let quiver = Quiver::build(kind, rank).unwrap();
        build_algebra(&quiver, &Weight::rho(rank), None).unwrap()
    }

    #[test]
    fn a1_trace() {
        let a = alg(DynkinType::A, 1);
        let tr = build_trace(&a, 0).unwrap();
        let t = tr.eval(&a.e(0));
        assert!(!t.is_zero());
        let db = dual_basis(&a, &tr).unwrap();
        assert_eq!(db.dual[0], SparseVec::single(0, t.recip()));
    }

    #[test]
    fn a2_trace_is_symmetric_and_nondegenerate() {
        let a = alg(DynkinType::A, 2);
        let tr = build_trace(&a, 7).unwrap();
        for i in 0..a.dim() {
            for j in 0..a.dim() {
                assert_eq!(tr.pair_basis(&a, i, j), tr.pair_basis(&a, j, i));
            }
        }
        let rep = trace_report(&a, &tr);
        assert_eq!(rep.gram_ranks, vec![2, 2, 2]);
    }

    #[test]
    fn dual_basis_trace_sum() {
        let a = alg(DynkinType::A, 2);
        let tr = build_trace(&a, 1).unwrap();
        let db = dual_basis(&a, &tr).unwrap();
        let h1 = a.hilbert_at_one();
        for k in 0..2 {
            for j in 0..2 {
                let mut s = Q::zero();
                for (x, y) in db.basis.iter().zip(&db.dual) {
                    let t = a.multiply(&a.multiply(&a.multiply(&a.e(k), x), &a.e(j)), y);
                    s += tr.eval(&t);
                }
                assert_eq!(s, Q::from_integer((h1[k][j] as i64).into()));
            }
        }
    }

    #[test]
    fn casimir_identities_and_basis_independence() {
        for (k, r) in [(DynkinType::A, 2), (DynkinType::A, 3)] {
            let a = alg(k, r);
            let tr = build_trace(&a, 3).unwrap();
            let db = dual_basis(&a, &tr).unwrap();
            casimir_check(&a, &db).unwrap();
            let other = dual_basis_of(&a, &tr, &random_block_basis(&a, 99)).unwrap();
            assert_eq!(casimir(&a, &db), casimir(&a, &other));
        }
    }
}
