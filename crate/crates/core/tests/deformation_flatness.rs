use num_traits::Zero;
use preproj::algebra::build_algebra;
use preproj::deformation::{
    deformation_space_and_theta, filtered_dimension, flatness_check, DeformationParams, Mode,
};
use preproj::linalg::{q, Q};
use preproj::quiver::{DynkinType, Quiver, Weight};
use preproj::subspace::Structure;

fn quiver(kind: DynkinType, rank: usize) -> Quiver {
    Quiver::build(kind, rank).unwrap()
}

fn degree(p: &[Q]) -> usize {
    p.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
}

/// For A_2 the quotient is `e_0: Q[z]/(f_0 g)`, `e_1: Q[z]/(f_1 g)` and the
/// two arrow spaces `Q[z]/(g)`, with `g = f_0 − f_1`.
fn a2_specialized_dim(mu: &[Q], p: &DeformationParams) -> usize {
    let poly = |v: usize, sign: i64| -> Vec<Q> {
        let mut f = vec![p.lambda[v].clone(), mu[v].clone() + p.c[v][0].clone(), p.c[v][1].clone()];
        f.iter_mut().for_each(|x| *x = x.clone() * q(sign));
        f
    };
    let f0 = poly(0, 1);
    let f1 = poly(1, -1);
    let g: Vec<Q> = f0.iter().zip(&f1).map(|(a, b)| a - b).collect();
    let dg = degree(&g);
    (degree(&f0) + dg) + (degree(&f1) + dg) + 2 * dg
}

#[test]
fn a2_specialized_matches_polynomial_count() {
    let qv = quiver(DynkinType::A, 2);
    let mu = Weight::rho(2);
    for seed in 1..=3 {
        let p = DeformationParams::random(2, 3, seed);
        let expected = a2_specialized_dim(&mu.0, &p);
        let rep = filtered_dimension(&qv, &mu, &p, Mode::Specialized, 8, 2).unwrap();
        assert!(rep.stable);
        assert_eq!(rep.total_dim, expected, "seed {seed}");
        assert_eq!(expected, 12);
        let lin = filtered_dimension(&qv, &mu, &p.linear_part(), Mode::Specialized, 8, 2).unwrap();
        assert_eq!(lin.total_dim, a2_specialized_dim(&mu.0, &p.linear_part()));
        assert_eq!(lin.total_dim, 6);
    }
}

#[test]
fn a1_scalar_relation() {
    let qv = quiver(DynkinType::A, 1);
    let mut p = DeformationParams::zero(1, 2);
    p.lambda[0] = q(-3);
    let rep = filtered_dimension(&qv, &Weight::rho(1), &p, Mode::Specialized, 2, 2).unwrap();
    assert_eq!(rep.total_dim, 1);
    p.c[0][0] = q(5);
    let rep = filtered_dimension(&qv, &Weight::rho(1), &p, Mode::Specialized, 2, 2).unwrap();
    assert_eq!(rep.total_dim, 1);
}

#[test]
fn levels_are_monotone() {
    let qv = quiver(DynkinType::A, 3);
    let p = DeformationParams::random(3, 4, 9);
    let rep = filtered_dimension(&qv, &Weight::rho(3), &p, Mode::FormalLine { n: 2 }, 6, 2).unwrap();
    assert!(rep.levels.windows(2).all(|w| w[0].1 <= w[1].1));
    assert_eq!(rep.bounds_tried, vec![8, 10, 12]);
}

#[test]
fn formal_line_is_free_on_a2_to_third_order() {
    let qv = quiver(DynkinType::A, 2);
    for seed in 1..=3 {
        let p = DeformationParams::random(2, 3, seed);
        let rep = flatness_check(&qv, &Weight::rho(2), &p, 6, 3, 4, 2).unwrap();
        assert!(rep.flat);
        assert_eq!(rep.formal_dim, 18);
    }
}

#[test]
fn flatness_with_random_weight() {
    let qv = quiver(DynkinType::A, 3);
    let roots = preproj::quiver::enumerate_roots(&qv).unwrap();
    let mu = Weight::random_regular(&roots, 3, 7);
    let p = DeformationParams::random(3, 4, 4);
    let rep = flatness_check(&qv, &mu, &p, 20, 2, 6, 2).unwrap();
    assert!(rep.flat);
}

#[test]
fn theta_rank_is_half_r_times_h_minus_two() {
    for (k, r) in [(DynkinType::A, 1), (DynkinType::A, 4), (DynkinType::D, 4), (DynkinType::D, 5)] {
        let qv = quiver(k, r);
        let alg = build_algebra(&qv, &Weight::rho(r), None).unwrap();
        let st = Structure::compute(&alg);
        let th = deformation_space_and_theta(&alg, &st);
        let h = alg.coxeter_number();
        assert_eq!(th.s, r * (h - 2) / 2, "{k}{r}");
        assert_eq!(th.hh2_dim, st.hh2_dims().iter().sum::<usize>());
        assert!(th.surjective);
        assert_eq!(th.complement.len(), th.s);
    }
}

#[test]
fn rejects_bad_inputs() {
    let qv = quiver(DynkinType::A, 2);
    let p = DeformationParams::zero(2, 3);
    assert!(filtered_dimension(&qv, &Weight::from_ints(&[1, 0]), &p, Mode::Specialized, 4, 2).is_err());
    assert!(filtered_dimension(&qv, &Weight::rho(3), &p, Mode::Specialized, 4, 2).is_err());
}
