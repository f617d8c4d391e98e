//! ADE quivers, their doubles, the Ringel form, roots and exponents.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DynkinType {
    A,
    D,
    E,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DynkinType::A => "A",
            DynkinType::D => "D",
            DynkinType::E => "E",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for DynkinType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(DynkinType::A),
            "D" => Ok(DynkinType::D),
            "E" => Ok(DynkinType::E),
            other => Err(Error::UnsupportedQuiver(format!("unknown Dynkin type {other:?}"))),
        }
    }
}

/// An arrow of the double quiver. Arrows of `Q` carry sign `+1`, their
/// reverses in `Q*` carry `-1`; `star` is the id of the reversed arrow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub id: usize,
    pub tail: usize,
    pub head: usize,
    pub star: usize,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quiver {
    pub kind: DynkinType,
    pub rank: usize,
    /// All arrows of the double quiver; ids `0..r-1` form `Q`, the rest `Q*`.
    pub arrows: Vec<Arrow>,
    pub adjacency: Vec<Vec<i64>>,
}

/// Edges of the Dynkin diagram as `(lower, higher)` vertex pairs.
fn dynkin_edges(kind: DynkinType, rank: usize) -> Result<Vec<(usize, usize)>> {
    let bad = || Error::UnsupportedQuiver(format!("{kind}_{rank}"));
    match kind {
        DynkinType::A if rank >= 1 => Ok((1..rank).map(|i| (i - 1, i)).collect()),
        DynkinType::D if rank >= 4 => {
            let mut e: Vec<_> = (1..rank - 1).map(|i| (i - 1, i)).collect();
            e.push((rank - 3, rank - 1));
            Ok(e)
        }
        DynkinType::E if (6..=8).contains(&rank) => {
            let mut e: Vec<_> = (1..rank - 1).map(|i| (i - 1, i)).collect();
            e.push((2, rank - 1));
            Ok(e)
        }
        _ => Err(bad()),
    }
}

impl Quiver {
    /// Builds the quiver with every edge oriented toward the higher vertex.
    ///
    /// Vertex numbering: `A_n` is the path `0-1-…-(n-1)`; `D_n` is the path
    /// `0-…-(n-2)` with vertex `n-1` attached to `n-3`; `E_n` is the path
    /// `0-…-(n-2)` with vertex `n-1` attached to `2`.
    pub fn build(kind: DynkinType, rank: usize) -> Result<Self> {
        let edges = dynkin_edges(kind, rank)?;
        let m = edges.len();
        let mut arrows = Vec::with_capacity(2 * m);
        for (k, &(t, h)) in edges.iter().enumerate() {
            arrows.push(Arrow {
                id: k,
                tail: t,
                head: h,
                star: k + m,
                sign: 1,
            });
        }
        for (k, &(t, h)) in edges.iter().enumerate() {
            arrows.push(Arrow {
                id: k + m,
                tail: h,
                head: t,
                star: k,
                sign: -1,
            });
        }
        let mut adjacency = vec![vec![0i64; rank]; rank];
        for &(t, h) in &edges {
            adjacency[t][h] += 1;
            adjacency[h][t] += 1;
        }
        Ok(Quiver {
            kind,
            rank,
            arrows,
            adjacency,
        })
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.kind, self.rank)
    }

    pub fn vertex_count(&self) -> usize {
        self.rank
    }

    /// Arrows of `Q` (sign `+1`).
    pub fn quiver_arrows(&self) -> &[Arrow] {
        &self.arrows[..self.arrows.len() / 2]
    }

    pub fn double_arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn arrow(&self, id: usize) -> &Arrow {
        &self.arrows[id]
    }

    pub fn arrows_from(&self, v: usize) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(move |a| a.tail == v)
    }

    pub fn arrows_into(&self, v: usize) -> impl Iterator<Item = &Arrow> {
        self.arrows.iter().filter(move |a| a.head == v)
    }

    /// Ringel form `<α,β> = Σ α_i β_i − Σ_{a∈Q} α_{t(a)} β_{h(a)}`.
    pub fn ringel_form(&self, alpha: &[i64], beta: &[i64]) -> Result<i64> {
        self.check_len(alpha)?;
        self.check_len(beta)?;
        let diag: i64 = alpha.iter().zip(beta).map(|(a, b)| a * b).sum();
        let off: i64 = self
            .quiver_arrows()
            .iter()
            .map(|a| alpha[a.tail] * beta[a.head])
            .sum();
        Ok(diag - off)
    }

    pub fn quadratic_form(&self, alpha: &[i64]) -> Result<i64> {
        self.ringel_form(alpha, alpha)
    }

    /// Symmetrized form `(α,β) = <α,β> + <β,α>`.
    pub fn symmetric_form(&self, alpha: &[i64], beta: &[i64]) -> Result<i64> {
        Ok(self.ringel_form(alpha, beta)? + self.ringel_form(beta, alpha)?)
    }

    fn check_len(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank {
            return Err(Error::LengthMismatch {
                expected: self.rank,
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.kind.to_string(),
            "rank": self.rank,
            "vertices": (0..self.rank).collect::<Vec<_>>(),
            "arrows": self.arrows.iter().map(|a| serde_json::json!({
                "id": a.id,
                "tail": a.tail,
                "head": a.head,
                "star_id": a.star,
                "sign": a.sign,
            })).collect::<Vec<_>>(),
            "adjacency": self.adjacency,
        })
    }
}

/// Largest coefficient of any root of a simply laced Dynkin diagram (E_8).
pub const ROOT_SEARCH_BOX: i64 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootData {
    pub roots: Vec<Vec<i64>>,
    pub coxeter_number: usize,
    pub exponents: Vec<usize>,
}

impl RootData {
    pub fn positive_roots(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.roots.iter().filter(|r| r.iter().all(|&x| x >= 0))
    }
}

/// Root-system exponents, sorted.
pub fn exponent_table(kind: DynkinType, rank: usize) -> Result<Vec<usize>> {
    dynkin_edges(kind, rank)?;
    let mut m: Vec<usize> = match kind {
        DynkinType::A => (1..=rank).collect(),
        DynkinType::D => {
            let mut v: Vec<usize> = (0..rank - 1).map(|i| 2 * i + 1).collect();
            v.push(rank - 1);
            v
        }
        DynkinType::E => match rank {
            6 => vec![1, 4, 5, 7, 8, 11],
            7 => vec![1, 5, 7, 9, 11, 13, 17],
            _ => vec![1, 7, 11, 13, 17, 19, 23, 29],
        },
    };
    m.sort_unstable();
    Ok(m)
}

/// Coxeter number from the classification (used to cross-check `|Δ|/r`).
pub fn coxeter_table(kind: DynkinType, rank: usize) -> Result<usize> {
    dynkin_edges(kind, rank)?;
    Ok(match kind {
        DynkinType::A => rank + 1,
        DynkinType::D => 2 * (rank - 1),
        DynkinType::E => match rank {
            6 => 12,
            7 => 18,
            _ => 30,
        },
    })
}

/// All integer vectors with `q(α) = 1` inside the box `|α_i| ≤ bound`.
///
/// `q(α) = αᵀ G α` with `G = I − C/2`; writing `G = Uᵀ D U` with `U` unit
/// upper triangular turns `q` into a sum of non-negative squares, so the
/// search fixes coordinates from the last to the first and prunes as soon as
/// the partial sum exceeds 1.
pub fn roots_in_box(quiver: &Quiver, bound: i64) -> Vec<Vec<i64>> {
    let r = quiver.rank;
    let half = Rational64::new(1, 2);
    let g: Vec<Vec<Rational64>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let c = Rational64::from_integer(quiver.adjacency[i][j]);
                    if i == j {
                        Rational64::one() - c * half
                    } else {
                        -c * half
                    }
                })
                .collect()
        })
        .collect();
    // LDLᵀ in the form G = Uᵀ D U.
    let mut u = vec![vec![Rational64::zero(); r]; r];
    let mut d = vec![Rational64::zero(); r];
    for i in 0..r {
        let mut s = g[i][i];
        for k in 0..i {
            s -= u[k][i] * u[k][i] * d[k];
        }
        d[i] = s;
        u[i][i] = Rational64::one();
        for j in i + 1..r {
            let mut s = g[i][j];
            for k in 0..i {
                s -= u[k][i] * u[k][j] * d[k];
            }
            u[i][j] = s / d[i];
        }
    }
    let mut out = Vec::new();
    let mut alpha = vec![0i64; r];
    fn rec(
        i: usize,
        budget: Rational64,
        alpha: &mut Vec<i64>,
        u: &[Vec<Rational64>],
        d: &[Rational64],
        bound: i64,
        out: &mut Vec<Vec<i64>>,
    ) {
        let r = alpha.len();
        let shift: Rational64 = (i + 1..r).map(|j| u[i][j] * Rational64::from_integer(alpha[j])).sum();
        for x in -bound..=bound {
            let y = Rational64::from_integer(x) + shift;
            let cost = d[i] * y * y;
            if cost > budget {
                continue;
            }
            alpha[i] = x;
            let rest = budget - cost;
            if i == 0 {
                if rest.is_zero() {
                    out.push(alpha.clone());
                }
            } else {
                rec(i - 1, rest, alpha, u, d, bound, out);
            }
        }
        alpha[i] = 0;
    }
    if r > 0 {
        rec(r - 1, Rational64::one(), &mut alpha, &u, &d, bound, &mut out);
    }
    out.sort();
    out
}

pub fn enumerate_roots(quiver: &Quiver) -> Result<RootData> {
    let roots = roots_in_box(quiver, ROOT_SEARCH_BOX);
    let r = quiver.rank;
    if roots.len() % r != 0 {
        return Err(Error::Invariant(format!(
            "{} roots is not a multiple of the rank {r}",
            roots.len()
        )));
    }
    let h = roots.len() / r;
    let expected_h = coxeter_table(quiver.kind, r)?;
    if h != expected_h {
        return Err(Error::Invariant(format!(
            "Coxeter number {h} from root count disagrees with the classification value {expected_h}"
        )));
    }
    let exponents = exponent_table(quiver.kind, r)?;
    for (i, m) in exponents.iter().enumerate() {
        if exponents[r - 1 - i] != h - m {
            return Err(Error::Invariant(format!("exponent duality fails for {}", quiver.name())));
        }
    }
    Ok(RootData {
        roots,
        coxeter_number: h,
        exponents,
    })
}

/// A weight, one rational per vertex, paired with roots coordinatewise:
/// `(μ, α) = Σ μ_i α_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Weight(pub Vec<Q>);

impl Weight {
    /// `ρ`, the sum of the coordinate weights.
    pub fn rho(rank: usize) -> Self {
        Weight(vec![q(1); rank])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Weight(v.iter().map(|&x| q(x)).collect())
    }

    pub fn pairing(&self, alpha: &[i64]) -> Q {
        self.0
            .iter()
            .zip(alpha)
            .map(|(m, &a)| m * q(a))
            .fold(Q::zero(), |acc, x| acc + x)
    }

    pub fn is_regular(&self, roots: &RootData) -> bool {
        roots.roots.iter().all(|a| !self.pairing(a).is_zero())
    }

    pub fn all_nonzero(&self) -> bool {
        self.0.iter().all(|m| !m.is_zero())
    }

    /// Seeded pseudo-random weight with small nonzero rational entries,
    /// redrawn until regular.
    pub fn random_regular(roots: &RootData, rank: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        loop {
            let w = Weight(
                (0..rank)
                    .map(|_| {
                        let mut n = 0;
                        while n == 0 {
                            n = rng.gen_range(-7i64..=7);
                        }
                        crate::linalg::qr(n, rng.gen_range(1i64..=7))
                    })
                    .collect(),
            );
            if w.is_regular(roots) {
                return w;
            }
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|x| x.to_string()).collect()
    }
}

pub fn is_regular(mu: &Weight, roots: &RootData) -> bool {
    mu.is_regular(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_quivers() {
        let a2 = Quiver::build(DynkinType::A, 2).unwrap();
        assert_eq!(a2.rank, 2);
        assert_eq!(a2.quiver_arrows().len(), 1);
        assert_eq!(a2.double_arrows().len(), 2);
        let d4 = Quiver::build(DynkinType::D, 4).unwrap();
        assert_eq!(d4.quiver_arrows().len(), 3);
        let hub = (0..4).find(|&v| d4.adjacency[v].iter().sum::<i64>() == 3).unwrap();
        assert!(d4.quiver_arrows().iter().all(|a| a.tail == hub || a.head == hub));
    }

    #[test]
    fn unsupported_types() {
        assert!(Quiver::build(DynkinType::D, 3).is_err());
        assert!(Quiver::build(DynkinType::E, 9).is_err());
        assert!(Quiver::build(DynkinType::A, 0).is_err());
    }

    #[test]
    fn star_is_an_involution_with_opposite_signs() {
        let q = Quiver::build(DynkinType::E, 7).unwrap();
        for a in q.double_arrows() {
            let s = q.arrow(a.star);
            assert_eq!(s.star, a.id);
            assert_eq!((s.tail, s.head), (a.head, a.tail));
            assert_eq!(s.sign, -a.sign);
        }
    }

    #[test]
    fn ringel_form_values() {
        let a2 = Quiver::build(DynkinType::A, 2).unwrap();
        assert_eq!(a2.quadratic_form(&[1, 0]).unwrap(), 1);
        assert_eq!(a2.quadratic_form(&[1, 1]).unwrap(), 1);
        assert_eq!(a2.ringel_form(&[0, 0], &[3, -2]).unwrap(), 0);
        assert!(a2.ringel_form(&[1], &[1, 0]).is_err());
        assert_eq!(a2.symmetric_form(&[1, 0], &[0, 1]).unwrap(), -1);
    }

    #[test]
    fn root_counts() {
        let a2 = Quiver::build(DynkinType::A, 2).unwrap();
        let rd = enumerate_roots(&a2).unwrap();
        assert_eq!(rd.roots.len(), 6);
        assert_eq!(rd.coxeter_number, 3);
        assert_eq!(rd.exponents, vec![1, 2]);
        let d5 = enumerate_roots(&Quiver::build(DynkinType::D, 5).unwrap()).unwrap();
        assert_eq!(d5.coxeter_number, 8);
        assert_eq!(d5.exponents, vec![1, 3, 4, 5, 7]);
    }

    #[test]
    fn regularity() {
        let a3 = Quiver::build(DynkinType::A, 3).unwrap();
        let rd = enumerate_roots(&a3).unwrap();
        assert_eq!(rd.roots.len(), 12);
        assert!(Weight::rho(3).is_regular(&rd));
        assert!(!Weight::from_ints(&[0, 0, 0]).is_regular(&rd));
        let a2 = Quiver::build(DynkinType::A, 2).unwrap();
        let rd2 = enumerate_roots(&a2).unwrap();
        assert!(!Weight::from_ints(&[1, -1]).is_regular(&rd2));
        let w = Weight::random_regular(&rd2, 2, 42);
        assert!(w.is_regular(&rd2) && w.all_nonzero());
        assert_eq!(w, Weight::random_regular(&rd2, 2, 42));
    }

    #[test]
    fn json_shape() {
        let j = Quiver::build(DynkinType::A, 2).unwrap().to_json();
        assert_eq!(j["type"], "A");
        assert_eq!(j["arrows"].as_array().unwrap().len(), 2);
        assert_eq!(j["arrows"][1]["sign"], -1);
        assert_eq!(j["arrows"][0]["star_id"], 1);
    }
}
