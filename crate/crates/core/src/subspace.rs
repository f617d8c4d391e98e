//! Graded subspaces of `A` and the structural spaces appearing in the
//! Hochschild (co)homology of `A`.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{intersect, kernel_of_columns, Echelon, SparseVec};

/// A homogeneous subspace of `A`, one echelon basis per degree (in global
/// basis coordinates).
#[derive(Clone, Debug)]
pub struct GradedSubspace {
    pub label: String,
    slices: Vec<Echelon>,
}

impl GradedSubspace {
    pub fn from_slices(label: impl Into<String>, slices: Vec<Echelon>) -> Self {
        GradedSubspace {
            label: label.into(),
            slices,
        }
    }

    pub fn zero(label: impl Into<String>, top: usize) -> Self {
        Self::from_slices(label, vec![Echelon::new(); top + 1])
    }

    /// Spans the given elements, splitting them into homogeneous parts.
    pub fn span(alg: &GradedAlgebra, label: impl Into<String>, elems: &[Element]) -> Self {
        let mut s = Self::zero(label, alg.top_degree());
        for x in elems {
            for (d, part) in crate::algebra::homogeneous_parts(alg, x) {
                s.slices[d].insert(part);
            }
        }
        s
    }

    pub fn top(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn slice(&self, d: usize) -> &Echelon {
        &self.slices[d]
    }

    pub fn basis(&self, d: usize) -> &[SparseVec] {
        self.slices[d].rows()
    }

    pub fn all_vectors(&self) -> impl Iterator<Item = &SparseVec> {
        self.slices.iter().flat_map(|e| e.rows().iter())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.slices.iter().map(Echelon::rank).collect()
    }

    pub fn dim(&self) -> usize {
        self.dims().iter().sum()
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn sum(&self, other: &Self) -> Self {
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| Echelon::from_vectors(a.rows().iter().chain(b.rows())))
            .collect();
        Self::from_slices(format!("{} + {}", self.label, other.label), slices)
    }

    pub fn intersection(&self, other: &Self, alg: &GradedAlgebra) -> Self {
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| Echelon::from_vectors(&intersect(a.rows(), b.rows(), alg.dim())))
            .collect();
        Self::from_slices(format!("{} ∩ {}", self.label, other.label), slices)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.slices
            .iter()
            .zip(&other.slices)
            .all(|(a, b)| b.rows().iter().all(|v| a.contains(v)))
    }

    pub fn same_span(&self, other: &Self) -> bool {
        self.dims() == other.dims() && self.contains(other)
    }

    /// Dimensions of `self / sub`; `sub` must be contained in `self`.
    pub fn quotient_dims(&self, sub: &Self) -> Result<Vec<usize>> {
        if !self.contains(sub) {
            return Err(Error::Invariant(format!("{} is not contained in {}", sub.label, self.label)));
        }
        Ok(self.dims().iter().zip(sub.dims()).map(|(a, b)| a - b).collect())
    }

    /// Representatives of a basis of `self / sub`, degree by degree.
    pub fn complement(&self, sub: &Self) -> Vec<Vec<SparseVec>> {
        self.slices
            .iter()
            .zip(&sub.slices)
            .map(|(a, b)| {
                let mut ech = b.clone();
                a.rows()
                    .iter()
                    .filter(|v| ech.insert((*v).clone()))
                    .cloned()
                    .collect()
            })
            .collect()
    }

    /// Image under left multiplication by `m`.
    pub fn left_multiply(&self, alg: &GradedAlgebra, m: &Element, label: impl Into<String>) -> Self {
        let elems: Vec<Element> = self.all_vectors().map(|v| alg.multiply(m, v)).collect();
        Self::span(alg, label, &elems)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "label": self.label, "dims": self.dims() })
    }
}

impl fmt::Display for GradedSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:?}", self.label, self.dims())
    }
}

/// The whole algebra as a graded subspace.
pub fn whole(alg: &GradedAlgebra) -> GradedSubspace {
    let slices = (0..=alg.top_degree())
        .map(|d| Echelon::from_vectors(&alg.degree_range(d).map(SparseVec::unit).collect::<Vec<_>>()))
        .collect();
    GradedSubspace::from_slices("A", slices)
}

/// Joint kernel of `x ↦ [x, g]` over arrows and idempotents.
pub fn center(alg: &GradedAlgebra) -> GradedSubspace {
    let n = alg.dim();
    let mut gens: Vec<Element> = (0..alg.rank()).map(|v| alg.e(v)).collect();
    gens.extend(alg.quiver.double_arrows().iter().map(|a| alg.arrow(a.id)));
    let slices = (0..=alg.top_degree())
        .map(|d| {
            let range = alg.degree_range(d);
            let columns: Vec<SparseVec> = range
                .clone()
                .map(|i| {
                    let x = SparseVec::unit(i);
                    let mut pairs = Vec::new();
                    for (k, g) in gens.iter().enumerate() {
                        for (j, c) in alg.commutator(&x, g).iter() {
                            pairs.push((k * n + j, c.clone()));
                        }
                    }
                    SparseVec::from_pairs(pairs)
                })
                .collect();
            let ker = kernel_of_columns(&columns, gens.len() * n);
            let start = range.start;
            Echelon::from_vectors(&ker.iter().map(|v| v.remap(|j| Some(j + start))).collect::<Vec<_>>())
        })
        .collect();
    GradedSubspace::from_slices("Z", slices)
}

/// `[A,A]`, spanned by `[g, x]` with `g` an idempotent or an arrow and `x`
/// a basis element. Since `[uv,w] = [u,vw] + [v,wu]`, these span all
/// commutators.
pub fn commutators(alg: &GradedAlgebra) -> GradedSubspace {
    let mut gens: Vec<Element> = (0..alg.rank()).map(|v| alg.e(v)).collect();
    gens.extend(alg.quiver.double_arrows().iter().map(|a| alg.arrow(a.id)));
    let elems: Vec<Element> = gens
        .iter()
        .flat_map(|g| (0..alg.dim()).map(move |i| (g, i)))
        .map(|(g, i)| alg.commutator(g, &SparseVec::unit(i)))
        .collect();
    GradedSubspace::span(alg, "[A,A]", &elems)
}

/// `[A,A]` from every pair of basis elements.
pub fn commutators_from_all_pairs(alg: &GradedAlgebra) -> GradedSubspace {
    let n = alg.dim();
    let mut elems = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let c = alg.commutator(&SparseVec::unit(i), &SparseVec::unit(j));
            if !c.is_zero() {
                elems.push(c);
            }
        }
    }
    GradedSubspace::span(alg, "[A,A]", &elems)
}

pub fn positive_part(alg: &GradedAlgebra) -> GradedSubspace {
    let mut w = whole(alg);
    w.slices[0] = Echelon::new();
    w.relabel("A_+")
}

pub fn top_part(alg: &GradedAlgebra) -> GradedSubspace {
    let top = alg.top_degree();
    let mut s = GradedSubspace::zero("A_top", top);
    s.slices[top] = Echelon::from_vectors(&alg.degree_range(top).map(SparseVec::unit).collect::<Vec<_>>());
    s
}

/// The structural spaces, computed once per algebra.
#[derive(Clone, Debug)]
pub struct Structure {
    pub whole: GradedSubspace,
    pub center: GradedSubspace,
    pub commutators: GradedSubspace,
    pub mu_center: GradedSubspace,
    pub mu_inv_commutators: GradedSubspace,
    pub a_plus: GradedSubspace,
    pub a_top: GradedSubspace,
    /// `Z ∩ μ⁻¹[A,A]`
    pub center_cap_mu_inv: GradedSubspace,
    /// `[A,A] + μZ`
    pub commutators_plus_mu_center: GradedSubspace,
    /// `zZ`
    pub z_center: GradedSubspace,
}

impl Structure {
    pub fn compute(alg: &GradedAlgebra) -> Self {
        let whole = whole(alg);
        let center = center(alg);
        let commutators = commutators(alg);
        let mu_center = center.left_multiply(alg, &alg.mu(), "μZ");
        let mu_inv_commutators = commutators.left_multiply(alg, &alg.mu_inverse(), "μ⁻¹[A,A]");
        let center_cap_mu_inv = center.intersection(&mu_inv_commutators, alg);
        let commutators_plus_mu_center = commutators.sum(&mu_center);
        let z_center = center.left_multiply(alg, &alg.z(), "zZ");
        Structure {
            whole,
            center,
            commutators,
            mu_center,
            mu_inv_commutators,
            a_plus: positive_part(alg),
            a_top: top_part(alg),
            center_cap_mu_inv,
            commutators_plus_mu_center,
            z_center,
        }
    }

    /// `A / ([A,A] + μZ)`
    pub fn hh2_dims(&self) -> Vec<usize> {
        self.whole.quotient_dims(&self.commutators_plus_mu_center).expect("subspace of A")
    }

    /// `A_+ / [A,A]`; `[A,A]` has no degree-zero part and lies in `A_+`.
    pub fn hh3_dims(&self) -> Vec<usize> {
        self.a_plus.quotient_dims(&self.commutators).expect("[A,A] ⊆ A_+")
    }

    /// `Z / A_top`
    pub fn hh4_dims(&self) -> Vec<usize> {
        self.center.quotient_dims(&self.a_top).expect("A_top ⊆ Z")
    }

    /// `A / [A,A]`
    pub fn cocenter_dims(&self) -> Vec<usize> {
        self.whole.quotient_dims(&self.commutators).expect("subspace of A")
    }

    /// Looks up a space by label. Labels may be combined with `+` (sum) and
    /// `&` (intersection), evaluated left to right.
    pub fn lookup(&self, alg: &GradedAlgebra, label: &str) -> Result<GradedSubspace> {
        let mut acc: Option<GradedSubspace> = None;
        let mut op = '+';
        let mut token = String::new();
        let flush = |acc: Option<GradedSubspace>, op: char, token: &str| -> Result<Option<GradedSubspace>> {
            let s = self.atom(token.trim())?;
            Ok(Some(match acc {
                None => s,
                Some(a) if op == '+' => a.sum(&s),
                Some(a) => a.intersection(&s, alg),
            }))
        };
        for ch in label.chars() {
            if ch == '+' || ch == '&' {
                acc = flush(acc, op, &token)?;
                token.clear();
                op = ch;
            } else {
                token.push(ch);
            }
        }
        acc = flush(acc, op, &token)?;
        Ok(acc.expect("at least one atom"))
    }

    fn atom(&self, label: &str) -> Result<GradedSubspace> {
        Ok(match label {
            "A" => self.whole.clone(),
            "Z" => self.center.clone(),
            "[A,A]" | "commutators" => self.commutators.clone(),
            "muZ" | "μZ" => self.mu_center.clone(),
            "mu_inv_commutators" | "μ⁻¹[A,A]" => self.mu_inv_commutators.clone(),
            "A_plus" | "A_+" => self.a_plus.clone(),
            "A_top" => self.a_top.clone(),
            "zZ" => self.z_center.clone(),
            _ => return Err(Error::UnknownLabel(label.to_string())),
        })
    }

    pub fn report(&self) -> StructureReport {
        StructureReport {
            center: self.center.dims(),
            commutators: self.commutators.dims(),
            mu_center: self.mu_center.dims(),
            center_cap_mu_inv_commutators: self.center_cap_mu_inv.dims(),
            quotient_commutators_plus_mu_center: self.hh2_dims(),
            positive_mod_commutators: self.hh3_dims(),
            center_mod_top: self.hh4_dims(),
            z_center: self.z_center.dims(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub center: Vec<usize>,
    pub commutators: Vec<usize>,
    pub mu_center: Vec<usize>,
    pub center_cap_mu_inv_commutators: Vec<usize>,
    pub quotient_commutators_plus_mu_center: Vec<usize>,
    pub positive_mod_commutators: Vec<usize>,
    pub center_mod_top: Vec<usize>,
    pub z_center: Vec<usize>,
}
