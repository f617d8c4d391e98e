//! Verification suites producing one verdict per checked statement.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{build_algebra, GradedAlgebra};
use crate::deformation::{deformation_space_and_theta, filtered_dimension, flatness_check, DeformationParams, Mode};
use crate::error::{Error, Result};
use crate::frobenius::{build_trace, casimir_check, dual_basis, trace_report, DualBasisPair, TraceForm};
use crate::hochschild::{build_flat_complex, by_periodicity, d4_star_injective_on_r, hochschild, pairing_check, HHReport, Side};
use crate::linalg::{dense_inverse, Q};
use crate::quiver::{enumerate_roots, DynkinType, Quiver, RootData, Weight};
use crate::resolution::{build_resolution, selfduality_check, verify_resolution};
use crate::series::{
    det_hilbert, det_hilbert_predicted, euler_identity_with_det, hc_series, p_series, profile_ledger, q_and_qstar,
    ExponentProfile, IdentityRow, TruncatedSeries,
};
use crate::subspace::Structure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Resolution,
    Hochschild,
    Cyclic,
    Deformation,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Resolution, Suite::Hochschild, Suite::Cyclic, Suite::Deformation];

    pub fn needs_algebra(self) -> bool {
        self != Suite::Cyclic
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Resolution => "resolution",
            Suite::Hochschild => "hochschild",
            Suite::Cyclic => "cyclic",
            Suite::Deformation => "deformation",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Timeout,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Timeout => "TIMEOUT",
            Status::Error => "ERROR",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub suite: Suite,
    pub check: String,
    pub quiver: String,
    pub order: Option<usize>,
    pub status: Status,
    pub detail: String,
    pub data: serde_json::Value,
}

impl Verdict {
    pub fn new(suite: Suite, check: &str, quiver: &str, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            suite,
            check: check.to_string(),
            quiver: quiver.to_string(),
            order: None,
            status: if passed { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            data: serde_json::Value::Null,
        }
    }

    pub fn from_error(suite: Suite, check: &str, quiver: &str, err: &Error) -> Self {
        let mut v = Verdict::new(suite, check, quiver, false, err.to_string());
        v.status = match err {
            Error::Inconclusive(_) => Status::Inconclusive,
            _ => Status::Error,
        };
        v
    }

    pub fn with_data(mut self, data: serde_json::Value) -> Self {
        self.data = data;
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    fn from_identity(suite: Suite, row: IdentityRow) -> Self {
        let mut v = Verdict::new(suite, &row.identity, &row.quiver, row.passed, row.detail);
        v.order = Some(row.order);
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightMode {
    Rho,
    Random(u64),
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "rho" {
            return Ok(WeightMode::Rho);
        }
        match s.strip_prefix("random:").map(str::parse::<u64>) {
            Some(Ok(seed)) => Ok(WeightMode::Random(seed)),
            _ => Err(Error::Config(format!("weight must be `rho` or `random:<seed>`, got `{s}`"))),
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightMode::Rho => f.write_str("rho"),
            WeightMode::Random(s) => write!(f, "random:{s}"),
        }
    }
}

impl WeightMode {
    pub fn weight(self, roots: &RootData, rank: usize) -> Weight {
        match self {
            WeightMode::Rho => Weight::rho(rank),
            WeightMode::Random(seed) => Weight::random_regular(roots, rank, seed),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub kind: DynkinType,
    pub rank: usize,
    pub weight: WeightMode,
    pub suites: Vec<Suite>,
    pub degree_cap: Option<usize>,
    /// Series order for built algebras.
    pub order: usize,
    /// Series order for profile-only identities.
    pub profile_order: usize,
    pub seed: u64,
    pub deformation_seeds: usize,
    pub formal_order: usize,
    pub max_coxeter: usize,
}

impl RunConfig {
    pub fn new(kind: DynkinType, rank: usize) -> Self {
        RunConfig {
            kind,
            rank,
            weight: WeightMode::Rho,
            suites: Suite::ALL.to_vec(),
            degree_cap: None,
            order: 40,
            profile_order: 60,
            seed: 1,
            deformation_seeds: 3,
            formal_order: 2,
            max_coxeter: 8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let quiver = Quiver::build(self.kind, self.rank)?;
        let h = enumerate_roots(&quiver)?.coxeter_number;
        if self.suites.iter().any(|s| s.needs_algebra()) && h > self.max_coxeter {
            return Err(Error::Config(format!(
                "{} has Coxeter number {h} > {}; only the cyclic suite runs without an algebra build",
                quiver.name(),
                self.max_coxeter
            )));
        }
        if let Some(cap) = self.degree_cap {
            if cap + 2 < 2 * h {
                return Err(Error::Config(format!("degree cap {cap} is below 2h-2 = {}", 2 * h - 2)));
            }
        }
        if self.formal_order == 0 {
            return Err(Error::Config("formal order must be positive".into()));
        }
        Ok(())
    }
}

/// Algebra data shared by the suites.
pub struct Workspace {
    pub quiver: Quiver,
    pub roots: RootData,
    pub mu: Weight,
    pub alg: GradedAlgebra,
    pub structure: Structure,
    pub trace: TraceForm,
    pub dual: DualBasisPair,
}

impl Workspace {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        let quiver = Quiver::build(cfg.kind, cfg.rank)?;
        let roots = enumerate_roots(&quiver)?;
        let mu = cfg.weight.weight(&roots, cfg.rank);
        let alg = build_algebra(&quiver, &mu, cfg.degree_cap)?;
        let structure = Structure::compute(&alg);
        let trace = build_trace(&alg, cfg.seed)?;
        let dual = dual_basis(&alg, &trace)?;
        Ok(Workspace {
            quiver,
            roots,
            mu,
            alg,
            structure,
            trace,
            dual,
        })
    }

    pub fn name(&self) -> String {
        self.quiver.name()
    }
}

fn series_vec(s: &TruncatedSeries, len: usize) -> Vec<usize> {
    (0..len)
        .map(|k| if k < s.coeffs().len() { s.coeff(k).to_integer().try_into().unwrap_or(usize::MAX) } else { 0 })
        .collect()
}

fn padded(v: &[usize], len: usize) -> Vec<usize> {
    (0..len).map(|k| v.get(k).copied().unwrap_or(0)).collect()
}

/// `H_A(1) = h·(2 − C)^{-1}` entrywise.
pub fn hilbert_at_one_check(ws: &Workspace) -> Verdict {
    let r = ws.quiver.rank;
    let h = ws.alg.coxeter_number() as i64;
    let m: Vec<Vec<Q>> = (0..r)
        .map(|i| (0..r).map(|j| Q::from_integer((2 * i64::from(i == j) - ws.quiver.adjacency[i][j]).into())).collect())
        .collect();
    let h1 = ws.alg.hilbert_at_one();
    let passed = match dense_inverse(&m) {
        Some(inv) => (0..r).all(|i| (0..r).all(|j| inv[i][j].clone() * Q::from_integer(h.into()) == Q::from_integer((h1[i][j] as i64).into()))),
        None => false,
    };
    Verdict::new(Suite::Hochschild, "hilbert_at_one", &ws.name(), passed, "H_A(1) = h(2-C)^-1")
        .with_data(serde_json::json!({ "hilbert_at_one": h1 }))
}

pub fn run_resolution(ws: &Workspace, emit: &mut dyn FnMut(Verdict)) {
    let name = ws.name();
    let tr = trace_report(&ws.alg, &ws.trace);
    emit(
        Verdict::new(
            Suite::Resolution,
            "trace_nondegenerate",
            &name,
            tr.gram_ranks == tr.gram_dims,
            format!("trace seed {}", tr.seed),
        )
        .with_data(serde_json::to_value(&tr).unwrap_or_default()),
    );
    let cas = casimir_check(&ws.alg, &ws.dual);
    emit(Verdict::new(
        Suite::Resolution,
        "casimir_central",
        &name,
        cas.is_ok(),
        cas.err().map(|f| format!("{} fails for {}", f.identity, f.generator)).unwrap_or_default(),
    ));
    let res = match build_resolution(&ws.alg, &ws.dual) {
        Ok(r) => r,
        Err(e) => return emit(Verdict::from_error(Suite::Resolution, "resolution_exact", &name, &e)),
    };
    let bound = 2 * ws.alg.coxeter_number();
    let rep = verify_resolution(&ws.alg, &res, bound);
    emit(Verdict::new(
        Suite::Resolution,
        "resolution_complex",
        &name,
        rep.compositions_vanish && rep.wraparound_vanishes,
        "d_i d_{i+1} = 0",
    ));
    emit(
        Verdict::new(
            Suite::Resolution,
            "resolution_exact",
            &name,
            rep.exact && rep.augmentation_surjective,
            format!("rank d_(i+1) = nullity d_i through degree {bound}"),
        )
        .with_data(serde_json::to_value(&rep).unwrap_or_default()),
    );
    let sd = selfduality_check(&ws.alg, &ws.trace, &ws.dual, &res);
    emit(
        Verdict::new(
            Suite::Resolution,
            "resolution_selfdual",
            &name,
            sd.passed(),
            format!("{} pairs checked", sd.pairs_checked),
        )
        .with_data(serde_json::to_value(&sd).unwrap_or_default()),
    );
}

fn hh_verdict(ws: &Workspace, rep: &HHReport) -> Verdict {
    let label = match rep.side {
        Side::Cohomology => format!("HH^{}", rep.n),
        Side::Homology => format!("HH_{}", rep.n),
    };
    let detail = if rep.passed() {
        format!("total dim {}", rep.total_complex())
    } else {
        format!("mismatch at degrees {:?}", rep.diff_table())
    };
    Verdict::new(Suite::Hochschild, &label, &ws.name(), rep.passed(), detail)
        .with_data(serde_json::json!({ "nonzero": rep.nonzero(), "periodicity": rep.periodicity_applied }))
}

pub fn run_hochschild(ws: &Workspace, emit: &mut dyn FnMut(Verdict)) {
    let name = ws.name();
    let alg = &ws.alg;
    let st = &ws.structure;
    let co = build_flat_complex(alg, &ws.dual, Side::Cohomology);
    emit(Verdict::new(Suite::Hochschild, "cochain_complex", &name, co.compositions_vanish(), "d*_{i+1} d*_i = 0"));
    let mut cohomology: Vec<HHReport> = (0..=4).map(|n| hochschild(alg, st, &co, n)).collect();
    for n in 1..=3 {
        let p = by_periodicity(alg, &cohomology[n]);
        cohomology.push(p);
    }
    for rep in &cohomology {
        emit(hh_verdict(ws, rep));
    }
    emit(Verdict::new(
        Suite::Hochschild,
        "d4_star_injective",
        &name,
        d4_star_injective_on_r(alg, &co),
        "d_4* injects R into A_top",
    ));
    drop(co);

    let ho = build_flat_complex(alg, &ws.dual, Side::Homology);
    emit(Verdict::new(Suite::Hochschild, "chain_complex", &name, ho.compositions_vanish(), "d'_i d'_{i+1} = 0"));
    let mut homology: Vec<HHReport> = (0..=4).map(|n| hochschild(alg, st, &ho, n)).collect();
    for n in 1..=3 {
        let p = by_periodicity(alg, &homology[n]);
        homology.push(p);
    }
    for rep in &homology {
        emit(hh_verdict(ws, rep));
    }
    drop(ho);

    let len = alg.top_degree() + 1;
    match ExponentProfile::new(ws.quiver.kind, ws.quiver.rank) {
        Ok(pr) => {
            let p = series_vec(&p_series(&pr), len);
            let hh0 = padded(&homology[0].series.iter().fold(vec![0; len], |mut acc, row| {
                if row.degree >= 0 && (row.degree as usize) < len {
                    acc[row.degree as usize] = row.dim_complex;
                }
                acc
            }), len);
            emit(
                Verdict::new(Suite::Hochschild, "HH_0_equals_p", &name, hh0 == p, format!("p(t) coefficients {p:?}"))
                    .with_data(serde_json::json!({ "hh0": hh0, "p": p })),
            );
            let pairing = pairing_check(alg, &ws.trace, st);
            let (qs, qstar) = q_and_qstar(&pr);
            emit(Verdict::new(
                Suite::Hochschild,
                "pairing_nondegenerate",
                &name,
                pairing.vanishes_on_kernel && pairing.square_and_invertible,
                format!("{} Gram blocks", pairing.blocks.len()),
            ));
            emit(Verdict::new(Suite::Hochschild, "q_palindrome", &name, pairing.palindrome, "q(t) = t^(2h-4) q_*(1/t)"));
            let q_ok = padded(&pairing.q, len) == series_vec(&qs, len);
            let qstar_ok = padded(&pairing.q_star, len) == series_vec(&qstar, len);
            emit(
                Verdict::new(Suite::Hochschild, "q_star_formula", &name, q_ok && qstar_ok, "q_* = p - sum t^(2(m_i-1))")
                    .with_data(serde_json::json!({ "q": pairing.q, "q_star": pairing.q_star })),
            );
            emit(Verdict::new(
                Suite::Hochschild,
                "zZ_equals_Z_cap_mu_inv",
                &name,
                pairing.z_center_equality,
                "zZ = Z & mu^-1[A,A]",
            ));
        }
        Err(e) => emit(Verdict::from_error(Suite::Hochschild, "HH_0_equals_p", &name, &e)),
    }
    emit(hilbert_at_one_check(ws));
}

/// Profile-only identities: no algebra is needed.
pub fn run_cyclic_profile(kind: DynkinType, rank: usize, order: usize, emit: &mut dyn FnMut(Verdict)) {
    match profile_ledger(kind, rank, order, 1e-9) {
        Ok(rows) => rows.into_iter().for_each(|r| emit(Verdict::from_identity(Suite::Cyclic, r))),
        Err(e) => emit(Verdict::from_error(Suite::Cyclic, "profile_ledger", &format!("{kind}{rank}"), &e)),
    }
}

/// Identities that use the computed Hilbert series of a built algebra.
pub fn run_cyclic_algebra(ws: &Workspace, order: usize, emit: &mut dyn FnMut(Verdict)) {
    let name = ws.name();
    let pr = match ExponentProfile::new(ws.quiver.kind, ws.quiver.rank) {
        Ok(p) => p,
        Err(e) => return emit(Verdict::from_error(Suite::Cyclic, "euler_identity_computed", &name, &e)),
    };
    let computed = det_hilbert(&ws.alg.hilbert_matrix(), order).and_then(|det| {
        let predicted = det_hilbert_predicted(&pr, &ws.quiver.adjacency, order)?;
        Ok((det.clone() == predicted, euler_identity_with_det(&pr, &det, order)?))
    });
    match computed {
        Ok((same, row)) => {
            emit(Verdict::new(Suite::Cyclic, "det_hilbert_formula", &name, same, "det H_A(t) from the built algebra"));
            emit(Verdict::from_identity(Suite::Cyclic, IdentityRow { identity: "euler_identity_computed".into(), ..row }));
        }
        Err(e) => emit(Verdict::from_error(Suite::Cyclic, "euler_identity_computed", &name, &e)),
    }
    let len = ws.alg.top_degree() + 1;
    match hc_series(&pr, order) {
        Ok(hc) => {
            let pos = padded(&ws.structure.hh3_dims(), len) == series_vec(&hc.positive_mod_commutators, len);
            let zt = padded(&ws.structure.hh4_dims(), len) == series_vec(&hc.center_mod_top, len);
            emit(Verdict::new(
                Suite::Cyclic,
                "hc_series_structural",
                &name,
                pos && zt,
                "A_+/[A,A] and Z/A_top match the exponent formulas",
            ));
        }
        Err(e) => emit(Verdict::from_error(Suite::Cyclic, "hc_series_structural", &name, &e)),
    }
}

pub fn run_deformation(ws: &Workspace, cfg: &RunConfig, emit: &mut dyn FnMut(Verdict)) {
    let name = ws.name();
    let h = ws.alg.coxeter_number();
    let r = ws.quiver.rank;
    let margin = 2i64;
    let level_cap = 2 * h as i64 - 4 + margin;
    let zero = DeformationParams::zero(r, h);
    match filtered_dimension(&ws.quiver, &ws.mu, &zero, Mode::Specialized, level_cap, margin) {
        Ok(rep) => emit(Verdict::new(
            Suite::Deformation,
            "filtered_zero_params",
            &name,
            rep.stable && rep.total_dim == ws.alg.dim(),
            format!("filtered dim {} vs graded dim {}", rep.total_dim, ws.alg.dim()),
        )),
        Err(e) => emit(Verdict::from_error(Suite::Deformation, "filtered_zero_params", &name, &e)),
    }
    for k in 0..cfg.deformation_seeds as u64 {
        let seed = cfg.seed + k;
        let params = DeformationParams::random(r, h, seed);
        let check = format!("flatness_seed_{seed}");
        match flatness_check(&ws.quiver, &ws.mu, &params, ws.alg.dim(), cfg.formal_order, level_cap, margin) {
            Ok(rep) => emit(
                Verdict::new(
                    Suite::Deformation,
                    &check,
                    &name,
                    rep.flat,
                    format!(
                        "dim A(lambda) = {}, rank over Q[e]/e^{} = {} (expected {})",
                        rep.lambda_dim, rep.formal_order, rep.rank, rep.expected_dim
                    ),
                )
                .with_data(serde_json::to_value(&rep).unwrap_or_default()),
            ),
            Err(e) => emit(Verdict::from_error(Suite::Deformation, &check, &name, &e)),
        }
    }
    let th = deformation_space_and_theta(&ws.alg, &ws.structure);
    let expected = r * (h - 2) / 2;
    emit(
        Verdict::new(
            Suite::Deformation,
            "theta_surjective",
            &name,
            th.surjective && th.s == expected && th.e_dim == r * (h - 1),
            format!("dim E = {}, s = {}, dim HH^2 = {}", th.e_dim, th.s, th.hh2_dim),
        )
        .with_data(serde_json::to_value(&th).unwrap_or_default()),
    );
}

/// Runs one suite. `ws` must be present for suites that need an algebra.
pub fn run_suite(suite: Suite, cfg: &RunConfig, ws: Option<&Workspace>, emit: &mut dyn FnMut(Verdict)) {
    let name = format!("{}{}", cfg.kind, cfg.rank);
    match (suite, ws) {
        (Suite::Cyclic, ws) => {
            run_cyclic_profile(cfg.kind, cfg.rank, cfg.profile_order, emit);
            if let Some(ws) = ws {
                run_cyclic_algebra(ws, cfg.order, emit);
            }
        }
        (_, None) => emit(Verdict::from_error(
            suite,
            "algebra",
            &name,
            &Error::Config("suite needs a built algebra".into()),
        )),
        (Suite::Resolution, Some(ws)) => run_resolution(ws, emit),
        (Suite::Hochschild, Some(ws)) => run_hochschild(ws, emit),
        (Suite::Deformation, Some(ws)) => run_deformation(ws, cfg, emit),
    }
}

/// Runs the requested suites sequentially and collects the verdicts.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<Verdict>> {
    cfg.validate()?;
    let ws = if cfg.suites.iter().any(|s| s.needs_algebra()) {
        Some(Workspace::build(cfg)?)
    } else {
        None
    };
    let mut out = Vec::new();
    for &s in &cfg.suites {
        run_suite(s, cfg, ws.as_ref(), &mut |v| out.push(v));
    }
    Ok(out)
}
