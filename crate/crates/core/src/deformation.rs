//! Filtered deformations
//!
//! ```text
//! A(λ)_c = P[z] / (Σ_{a∈Q̄} ε_a a a* = zμ + Σ λ_i e_i + Σ c_i^j z^j e_i)
//! ```
//!
//! The relation is not homogeneous, so the dimension of the quotient is
//! computed through a filtration: with `J_D` the span of all products
//! `u·ρ̃_i·v` of filtration degree at most `D`, the space
//! `J ∩ P[z]_{≤d}` is approached by `J_D ∩ P[z]_{≤d}` for growing `D`.
//! Columns are ordered by decreasing degree, so the echelon rows whose
//! leading monomial has degree `≤ d` span exactly `J_D ∩ P[z]_{≤d}`.
//!
//! Parameters are either specialized to numbers, or put on a formal line
//! `c = ε·c̃` over `Q[ε]/ε^N`; in the latter case `ε` carries filtration
//! degree `−2(h−2)` so that every term of the relation has degree at most 2.

use std::collections::HashMap;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{paths_of_length, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{kernel_of_columns, qr, Echelon, SparseVec, Q};
use crate::quiver::{enumerate_roots, Quiver, Weight};
use crate::subspace::Structure;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationParams {
    pub lambda: Vec<Q>,
    /// `c[i][j-1] = c_i^j` for `1 ≤ j ≤ h−1`.
    pub c: Vec<Vec<Q>>,
    pub seed: Option<u64>,
}

fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-7i64..=7);
    }
    qr(n, rng.gen_range(1i64..=7))
}

impl DeformationParams {
    pub fn zero(rank: usize, h: usize) -> Self {
        DeformationParams {
            lambda: vec![Q::zero(); rank],
            c: vec![vec![Q::zero(); h - 1]; rank],
            seed: None,
        }
    }

    /// Seeded values with numerators and denominators of size at most 7.
    pub fn random(rank: usize, h: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = (0..rank).map(|_| small_rational(&mut rng)).collect();
        let c = (0..rank)
            .map(|_| (1..h).map(|_| small_rational(&mut rng)).collect())
            .collect();
        DeformationParams {
            lambda,
            c,
            seed: Some(seed),
        }
    }

    /// Keeps `λ` and `c^1`, zeroes `c^j` for `j ≥ 2`.
    pub fn linear_part(&self) -> Self {
        let mut p = self.clone();
        for row in &mut p.c {
            for x in row.iter_mut().skip(1) {
                *x = Q::zero();
            }
        }
        p
    }

    pub fn without_c(&self) -> Self {
        let mut p = self.clone();
        for row in &mut p.c {
            for x in row.iter_mut() {
                *x = Q::zero();
            }
        }
        p
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "seed": self.seed,
            "lambda": self.lambda.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "c": self.c.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    /// Parameters are numbers.
    Specialized,
    /// `c = ε·c̃` over `Q[ε]/ε^N`.
    FormalLine { n: usize },
}

/// `ε^e z^k · path` with its end vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct FMono {
    e: usize,
    k: usize,
    tail: usize,
    head: usize,
    path: Vec<usize>,
}

/// A term of a deformed relation: coefficient, `ε` power, `z` power and a
/// path from the vertex to itself.
#[derive(Clone, Debug)]
struct Term {
    coeff: Q,
    e: usize,
    k: usize,
    path: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct DeformedRelation {
    pub vertex: usize,
    terms: Vec<Term>,
}

impl DeformedRelation {
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `(coefficient, ε power, z power, path)` per term.
    pub fn terms(&self) -> Vec<(Q, usize, usize, Vec<usize>)> {
        self.terms.iter().map(|t| (t.coeff.clone(), t.e, t.k, t.path.clone())).collect()
    }
}

/// `ρ̃_i = Σ_{t(a)=i} ε_a a a* − μ_i z − λ_i − Σ_j c_i^j z^j` (at vertex `i`).
pub fn deformed_relations(quiver: &Quiver, mu: &Weight, params: &DeformationParams, mode: Mode) -> Result<Vec<DeformedRelation>> {
    if mu.0.len() != quiver.rank || params.lambda.len() != quiver.rank || params.c.len() != quiver.rank {
        return Err(Error::LengthMismatch {
            expected: quiver.rank,
            got: mu.0.len().min(params.lambda.len()).min(params.c.len()),
        });
    }
    if !mu.all_nonzero() {
        return Err(Error::NonRegularWeight(format!("{:?}", mu.to_strings())));
    }
    let ce = match mode {
        Mode::Specialized => 0,
        Mode::FormalLine { .. } => 1,
    };
    let mut out = Vec::new();
    for v in 0..quiver.rank {
        let mut terms = Vec::new();
        for a in quiver.arrows_from(v) {
            terms.push(Term {
                coeff: Q::from_integer(a.sign.into()),
                e: 0,
                k: 0,
                path: vec![a.id, a.star],
            });
        }
        let mut push = |coeff: Q, e: usize, k: usize| {
            if !coeff.is_zero() {
                terms.push(Term {
                    coeff: -coeff,
                    e,
                    k,
                    path: Vec::new(),
                });
            }
        };
        push(mu.0[v].clone(), 0, 1);
        push(params.lambda[v].clone(), 0, 0);
        for (j, c) in params.c[v].iter().enumerate() {
            push(c.clone(), ce, j + 1);
        }
        out.push(DeformedRelation { vertex: v, terms });
    }
    Ok(out)
}

const DEGREE_OFFSET: i64 = 1 << 20;

/// Incremental echelon form of `J_D`. Column ids put higher degrees first,
/// so the state stays valid while `D` grows.
///
/// `J_D` is spanned by the left multiples `u·ρ̃_i` (with `u = ε^e z^k p`) of
/// filtration `≤ D` together with `J_{D−1}·a` for arrows `a`; `z` and `ε`
/// are central, so right factors are paths only.
struct Engine<'a> {
    quiver: &'a Quiver,
    relations: Vec<DeformedRelation>,
    /// Number of `ε` powers kept (1 when specialized).
    eps_levels: usize,
    eps_weight: i64,
    ech: Echelon,
    monos: Vec<(i64, FMono)>,
    ids: HashMap<FMono, usize>,
    paths: Vec<Vec<FMono>>,
    /// Rows added while processing the previous level.
    last_rows: std::ops::Range<usize>,
    next_level: i64,
}

impl<'a> Engine<'a> {
    fn new(quiver: &'a Quiver, relations: Vec<DeformedRelation>, eps_levels: usize, eps_weight: i64) -> Self {
        Engine {
            quiver,
            relations,
            eps_levels,
            eps_weight,
            ech: Echelon::new(),
            monos: Vec::new(),
            ids: HashMap::new(),
            paths: Vec::new(),
            last_rows: 0..0,
            next_level: -((eps_levels as i64 - 1) * eps_weight),
        }
    }

    fn lowest_level(&self) -> i64 {
        -((self.eps_levels as i64 - 1) * self.eps_weight)
    }

    fn degree(&self, e: usize, k: usize, len: usize) -> i64 {
        len as i64 + 2 * k as i64 - e as i64 * self.eps_weight
    }

    fn relation_degree(&self, r: &DeformedRelation) -> i64 {
        r.terms.iter().map(|t| self.degree(t.e, t.k, t.path.len())).max().unwrap_or(0)
    }

    fn paths_of(&mut self, len: usize) -> &[FMono] {
        while self.paths.len() <= len {
            let l = self.paths.len();
            let ps = paths_of_length(self.quiver, l)
                .into_iter()
                .map(|m| FMono {
                    e: 0,
                    k: 0,
                    tail: m.tail,
                    head: m.head,
                    path: m.path,
                })
                .collect();
            self.paths.push(ps);
        }
        &self.paths[len]
    }

    fn column(&mut self, m: FMono) -> usize {
        if let Some(&id) = self.ids.get(&m) {
            return id;
        }
        let deg = self.degree(m.e, m.k, m.path.len());
        let id = (((DEGREE_OFFSET - deg) as usize) << 32) | self.monos.len();
        self.monos.push((deg, m.clone()));
        self.ids.insert(m, id);
        id
    }

    fn mono(&self, id: usize) -> &FMono {
        &self.monos[id & 0xffff_ffff].1
    }

    /// Left multiples `u·ρ̃_i` of filtration exactly `level`.
    fn left_multiples(&mut self, level: i64) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for ri in 0..self.relations.len() {
            let rd = self.relation_degree(&self.relations[ri]);
            let v = self.relations[ri].vertex;
            for e in 0..self.eps_levels {
                for k in 0.. {
                    let len = level - rd - self.degree(e, k, 0);
                    if len < 0 {
                        break;
                    }
                    let us: Vec<FMono> = self.paths_of(len as usize).iter().filter(|u| u.head == v).cloned().collect();
                    for u in us {
                        let terms = self.relations[ri].terms.clone();
                        let mut pairs = Vec::with_capacity(terms.len());
                        for t in terms {
                            let te = e + t.e;
                            if te >= self.eps_levels {
                                continue;
                            }
                            let mut path = u.path.clone();
                            path.extend(&t.path);
                            let m = FMono {
                                e: te,
                                k: k + t.k,
                                tail: u.tail,
                                head: v,
                                path,
                            };
                            pairs.push((self.column(m), t.coeff));
                        }
                        out.push(SparseVec::from_pairs(pairs));
                    }
                }
            }
        }
        out
    }

    /// `row·a` for every arrow `a` leaving the head of `row`.
    fn right_multiples(&mut self, row: &SparseVec) -> Vec<SparseVec> {
        let Some((lead, _)) = row.leading() else {
            return Vec::new();
        };
        let head = self.mono(lead).head;
        let arrows: Vec<(usize, usize)> = self.quiver.arrows_from(head).map(|a| (a.id, a.head)).collect();
        let mut out = Vec::new();
        for (a, to) in arrows {
            let pairs: Vec<(usize, Q)> = row
                .iter()
                .map(|(id, c)| {
                    let mut m = self.mono(*id).clone();
                    m.path.push(a);
                    m.head = to;
                    (self.column(m), c.clone())
                })
                .collect();
            out.push(SparseVec::from_pairs(pairs));
        }
        out
    }

    /// Processes every level up to `bound`.
    fn advance(&mut self, bound: i64) {
        while self.next_level <= bound {
            let level = self.next_level;
            let start = self.ech.rank();
            let mut gens = self.left_multiples(level);
            for i in self.last_rows.clone() {
                let row = self.ech.rows()[i].clone();
                gens.extend(self.right_multiples(&row));
            }
            for g in gens {
                self.ech.insert(g);
            }
            self.last_rows = start..self.ech.rank();
            self.next_level += 1;
        }
    }

    /// Quotient dimension at each level in `lo..=hi`.
    fn level_dims(&mut self, hi: i64) -> Vec<usize> {
        let lo = self.lowest_level();
        let mut monos_at: HashMap<i64, usize> = HashMap::new();
        for e in 0..self.eps_levels {
            for k in 0.. {
                if self.degree(e, k, 0) > hi {
                    break;
                }
                let mut len = 0;
                while self.degree(e, k, len) <= hi {
                    let d = self.degree(e, k, len);
                    let n = self.paths_of(len).len();
                    *monos_at.entry(d).or_default() += n;
                    len += 1;
                }
            }
        }
        let mut pivots_at: HashMap<i64, usize> = HashMap::new();
        for c in self.ech.pivot_columns() {
            *pivots_at.entry(DEGREE_OFFSET - (c >> 32) as i64).or_default() += 1;
        }
        (lo..=hi)
            .map(|level| {
                let m: usize = (lo..=level).map(|d| monos_at.get(&d).copied().unwrap_or(0)).sum();
                let p: usize = (lo..=level).map(|d| pivots_at.get(&d).copied().unwrap_or(0)).sum();
                m - p
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FilteredReport {
    pub mode: Mode,
    /// `(level, dimension of the level-d part of the quotient)`
    pub levels: Vec<(i64, usize)>,
    /// Product-degree bounds tried, in order.
    pub bounds_tried: Vec<i64>,
    pub stabilization_degree: i64,
    pub stable: bool,
    /// Dimension over `Q` (over `Q[ε]/ε^N` this counts all `ε` layers).
    pub total_dim: usize,
}

/// Filtered dimension of the deformed quotient.
///
/// Levels `d ≤ level_cap` are computed with product bounds `D = level_cap + 2,
/// level_cap + 4, …` until two consecutive increments leave every level
/// unchanged; giving up past `level_cap + 4·margin` yields
/// [`Error::Inconclusive`]. The quotient is declared stable when, in
/// addition, the top `margin` levels agree.
pub fn filtered_dimension(
    quiver: &Quiver,
    mu: &Weight,
    params: &DeformationParams,
    mode: Mode,
    level_cap: i64,
    margin: i64,
) -> Result<FilteredReport> {
    let roots = enumerate_roots(quiver)?;
    let h = roots.coxeter_number as i64;
    if margin < 2 || level_cap < 2 * h - 4 + margin {
        return Err(Error::Config(format!(
            "need margin ≥ 2 and level cap ≥ 2h-4+margin = {}",
            2 * h - 4 + margin.max(2)
        )));
    }
    let (eps_levels, eps_weight) = match mode {
        Mode::Specialized => (1, 0),
        Mode::FormalLine { n } => (n.max(1), 2 * (h - 2)),
    };
    let mut engine = Engine::new(quiver, deformed_relations(quiver, mu, params, mode)?, eps_levels, eps_weight);
    let lo = engine.lowest_level();
    let mut history: Vec<Vec<usize>> = Vec::new();
    let mut bounds = Vec::new();
    let mut bound = level_cap + 2;
    loop {
        if bound > level_cap + 4 * margin {
            return Err(Error::Inconclusive(format!(
                "filtered dimensions still changing at product degree {}",
                bound - 2
            )));
        }
        engine.advance(bound);
        bounds.push(bound);
        history.push(engine.level_dims(level_cap));
        let n = history.len();
        if n >= 3 && history[n - 1] == history[n - 2] && history[n - 2] == history[n - 3] {
            break;
        }
        bound += 2;
    }
    let dims = history.pop().expect("at least one pass");
    let levels: Vec<(i64, usize)> = (lo..=level_cap).zip(dims.iter().copied()).collect();
    let total_dim = *dims.last().unwrap_or(&0);
    let plateau = dims.iter().rev().take(margin as usize + 1).all(|&d| d == total_dim);
    Ok(FilteredReport {
        mode,
        levels,
        stabilization_degree: *bounds.last().expect("nonempty"),
        bounds_tried: bounds,
        stable: plateau,
        total_dim,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatnessReport {
    pub quiver: String,
    pub params: serde_json::Value,
    pub expected_dim: usize,
    /// Dimension of `A(λ)`, the quotient with `c = 0`.
    pub lambda_dim: usize,
    pub formal_order: usize,
    /// Dimension over `Q` of the deformation over `Q[ε]/ε^N`.
    pub formal_dim: usize,
    /// `formal_dim / N` when free.
    pub rank: usize,
    pub lambda_report: FilteredReport,
    pub formal_report: FilteredReport,
    pub flat: bool,
}

/// Flatness along the line `c = ε·c̃`: `A(λ)_c ⊗ Q[ε]/ε^N` has dimension
/// `N·dim A(λ)` exactly when it is free over `Q[ε]/ε^N`, and `dim A(λ)`
/// must equal `dim A`.
pub fn flatness_check(
    quiver: &Quiver,
    mu: &Weight,
    params: &DeformationParams,
    expected_dim: usize,
    order: usize,
    level_cap: i64,
    margin: i64,
) -> Result<FlatnessReport> {
    let lambda_report = filtered_dimension(quiver, mu, &params.without_c(), Mode::Specialized, level_cap, margin)?;
    let formal_report = filtered_dimension(quiver, mu, params, Mode::FormalLine { n: order }, level_cap, margin)?;
    let lambda_dim = lambda_report.total_dim;
    let formal_dim = formal_report.total_dim;
    let flat = lambda_report.stable
        && formal_report.stable
        && lambda_dim == expected_dim
        && formal_dim == order * lambda_dim;
    Ok(FlatnessReport {
        quiver: quiver.name(),
        params: params.to_json(),
        expected_dim,
        lambda_dim,
        formal_order: order,
        formal_dim,
        rank: formal_dim / order.max(1),
        lambda_report,
        formal_report,
        flat,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaReport {
    pub e_dim: usize,
    pub hh2_dim: usize,
    pub s: usize,
    pub kernel_dim: usize,
    pub surjective: bool,
    /// Labels `z^j e_i` of elements of `E` whose images form a basis.
    pub complement: Vec<String>,
    /// `θ` in coordinates of the chosen quotient representatives.
    pub matrix: Vec<Vec<String>>,
}

/// `θ : E → A / ([A,A] + μZ)` on `E = span{z^j e_i : 0 ≤ j ≤ h−2}`.
pub fn deformation_space_and_theta(alg: &GradedAlgebra, st: &Structure) -> ThetaReport {
    let h = alg.coxeter_number();
    let denom = &st.commutators_plus_mu_center;
    let reps = st.whole.complement(denom);
    let hh2_dim: usize = reps.iter().map(Vec::len).sum();
    let z = alg.z();
    let mut columns = Vec::new();
    let mut labels = Vec::new();
    for v in 0..alg.rank() {
        let mut x = alg.e(v);
        for j in 0..h.saturating_sub(1) {
            labels.push(format!("z^{j}e{v}"));
            columns.push((2 * j, x.clone()));
            x = alg.multiply(&x, &z);
        }
    }
    let dim = alg.dim();
    let mut matrix: Vec<Vec<Q>> = Vec::new();
    for (d, x) in &columns {
        let mut coords = vec![Q::zero(); hh2_dim];
        if *d <= alg.top_degree() {
            // x ≡ Σ c_k r_k modulo the degree-d slice of [A,A] + μZ.
            let offset: usize = reps[..*d].iter().map(Vec::len).sum();
            let nd = denom.basis(*d).len();
            let nr = reps[*d].len();
            let mut cols: Vec<SparseVec> = denom.basis(*d).to_vec();
            cols.extend(reps[*d].iter().cloned());
            cols.push(x.neg());
            let last = cols.len() - 1;
            let ker = kernel_of_columns(&cols, dim);
            if let Some(sol) = ker.iter().find(|k| !k.get(last).is_zero()) {
                let scale = sol.get(last).recip();
                for (k, c) in sol.iter() {
                    if (nd..nd + nr).contains(k) {
                        coords[offset + k - nd] = c * &scale;
                    }
                }
            }
        }
        matrix.push(coords);
    }
    let mut ech = Echelon::new();
    let mut complement = Vec::new();
    for (col, label) in matrix.iter().zip(&labels) {
        if ech.insert(SparseVec::from_dense(col)) {
            complement.push(label.clone());
        }
    }
    let s = ech.rank();
    ThetaReport {
        e_dim: columns.len(),
        hh2_dim,
        s,
        kernel_dim: columns.len() - s,
        surjective: s == hh2_dim,
        complement,
        matrix: matrix
            .iter()
            .map(|c| c.iter().map(|x| x.to_string()).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_algebra;
    use crate::linalg::q;
    use crate::quiver::DynkinType;

    fn quiver(kind: DynkinType, rank: usize) -> Quiver {
        Quiver::build(kind, rank).unwrap()
    }

    #[test]
    fn zero_params_recover_homogeneous_relation() {
        let q2 = quiver(DynkinType::A, 2);
        let rel = deformed_relations(&q2, &Weight::rho(2), &DeformationParams::zero(2, 3), Mode::Specialized).unwrap();
        assert_eq!(rel[0].term_count(), 2);
        let a1 = quiver(DynkinType::A, 1);
        let rel = deformed_relations(&a1, &Weight::rho(1), &DeformationParams::zero(1, 2), Mode::Specialized).unwrap();
        assert_eq!(rel[0].terms(), vec![(q(-1), 0, 1, vec![])]);
    }

    #[test]
    fn a2_zero_params() {
        let q2 = quiver(DynkinType::A, 2);
        let rep = filtered_dimension(&q2, &Weight::rho(2), &DeformationParams::zero(2, 3), Mode::Specialized, 4, 2).unwrap();
        assert!(rep.stable);
        assert_eq!(rep.total_dim, 6);
    }

    #[test]
    fn a1_scalar_solution() {
        let a1 = quiver(DynkinType::A, 1);
        let mut p = DeformationParams::zero(1, 2);
        p.lambda[0] = q(-3);
        let rep = filtered_dimension(&a1, &Weight::rho(1), &p, Mode::Specialized, 2, 2).unwrap();
        assert_eq!(rep.total_dim, 1);
    }

    #[test]
    fn a2_specialized_linear_part_is_flat() {
        let q2 = quiver(DynkinType::A, 2);
        let p = DeformationParams::random(2, 3, 11).linear_part();
        let rep = filtered_dimension(&q2, &Weight::rho(2), &p, Mode::Specialized, 4, 2).unwrap();
        assert_eq!(rep.total_dim, 6);
    }

    #[test]
    fn a2_specialized_quadratic_term_jumps_to_twelve() {
        // e_0Ae_0 = Q[z]/(f_0 (f_0 − f_1)) with quadratic f_i: 4 + 4 + 2 + 2.
        let q2 = quiver(DynkinType::A, 2);
        let p = DeformationParams::random(2, 3, 5);
        let rep = filtered_dimension(&q2, &Weight::rho(2), &p, Mode::Specialized, 8, 2).unwrap();
        assert!(rep.stable);
        assert_eq!(rep.total_dim, 12);
    }

    #[test]
    fn a2_formal_line_is_free() {
        let q2 = quiver(DynkinType::A, 2);
        let p = DeformationParams::random(2, 3, 1);
        let rep = flatness_check(&q2, &Weight::rho(2), &p, 6, 3, 4, 2).unwrap();
        assert!(rep.flat, "{rep:?}");
        assert_eq!(rep.rank, 6);
    }

    #[test]
    fn theta_small() {
        for (k, r, s) in [(DynkinType::A, 1, 0), (DynkinType::A, 2, 1), (DynkinType::A, 3, 3)] {
            let qv = quiver(k, r);
            let alg = build_algebra(&qv, &Weight::rho(r), None).unwrap();
            let st = Structure::compute(&alg);
            let th = deformation_space_and_theta(&alg, &st);
            assert_eq!(th.s, s);
            assert!(th.surjective);
            assert_eq!(th.e_dim, r * (alg.coxeter_number() - 1));
        }
    }

    #[test]
    fn bad_config() {
        let q2 = quiver(DynkinType::A, 2);
        let p = DeformationParams::zero(2, 3);
        assert!(filtered_dimension(&q2, &Weight::rho(2), &p, Mode::Specialized, 3, 2).is_err());
        assert!(filtered_dimension(&q2, &Weight::rho(2), &p, Mode::Specialized, 8, 1).is_err());
    }
}
