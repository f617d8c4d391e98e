use preproj::algebra::{build_algebra, GradedAlgebra};
use preproj::deformation::{filtered_dimension, DeformationParams, Mode};
use preproj::linalg::SparseVec;
use preproj::quiver::{DynkinType, Quiver, Weight};
use proptest::prelude::*;

fn built(kind: DynkinType, rank: usize) -> (Quiver, GradedAlgebra) {
    let q = Quiver::build(kind, rank).unwrap();
    let a = build_algebra(&q, &Weight::rho(rank), None).unwrap();
    (q, a)
}

/// `h · Σ_{ij} ((2 − C)^{-1})_{ij}` by floating Gauss-Jordan.
fn dim_from_cartan(q: &Quiver, h: usize) -> usize {
    let r = q.rank;
    let mut m: Vec<Vec<f64>> = (0..r)
        .map(|i| {
            let mut row: Vec<f64> = (0..r)
                .map(|j| if i == j { 2.0 } else { -(q.adjacency[i][j] as f64) })
                .collect();
            row.extend((0..r).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..r {
        let p = (c..r).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, p);
        let piv = m[c][c];
        m[c].iter_mut().for_each(|x| *x /= piv);
        for i in 0..r {
            if i != c {
                let f = m[i][c];
                let src = m[c].clone();
                m[i].iter_mut().zip(&src).for_each(|(x, s)| *x -= f * s);
            }
        }
    }
    let total: f64 = m.iter().map(|row| row[r..].iter().sum::<f64>()).sum();
    (total * h as f64).round() as usize
}

#[test]
fn dimension_matches_cartan_inverse() {
    for (k, r, h) in [
        (DynkinType::A, 1, 2),
        (DynkinType::A, 2, 3),
        (DynkinType::A, 3, 4),
        (DynkinType::A, 4, 5),
        (DynkinType::D, 4, 6),
    ] {
        let (q, a) = built(k, r);
        assert_eq!(a.coxeter_number(), h);
        assert_eq!(a.dim(), dim_from_cartan(&q, h), "{k}{r}");
    }
}

#[test]
fn hilbert_series_is_symmetric_and_palindromic() {
    for (k, r) in [(DynkinType::A, 3), (DynkinType::D, 4)] {
        let (_, a) = built(k, r);
        let top = a.top_degree();
        let hm = a.hilbert_matrix();
        for i in 0..r {
            for j in 0..r {
                for d in 0..=top {
                    assert_eq!(hm[i][j][d], hm[j][i][d], "transpose symmetry");
                }
            }
        }
        let dims = a.degree_dims();
        assert!(dims.iter().zip(dims.iter().rev()).all(|(x, y)| x == y), "{k}{r}: {dims:?}");
    }
}

#[test]
fn relation_holds_with_arrows_summed_by_hand() {
    let (q, a) = built(DynkinType::A, 3);
    let mut lhs = SparseVec::new();
    for arr in q.double_arrows() {
        let t = a.multiply(&a.arrow(arr.id), &a.arrow(arr.star));
        let c = preproj::linalg::q(arr.sign.into());
        lhs = lhs.add_scaled(&c, &t);
    }
    let rhs = a.multiply(&a.z(), &a.mu());
    assert_eq!(lhs, rhs);
}

#[test]
fn filtered_engine_at_zero_matches_graded_build() {
    for (k, r) in [(DynkinType::A, 1), (DynkinType::A, 2), (DynkinType::A, 3), (DynkinType::D, 4)] {
        let (q, a) = built(k, r);
        let h = a.coxeter_number();
        let rep = filtered_dimension(
            &q,
            &Weight::rho(r),
            &DeformationParams::zero(r, h),
            Mode::Specialized,
            2 * h as i64 - 2,
            2,
        )
        .unwrap();
        assert!(rep.stable);
        assert_eq!(rep.total_dim, a.dim(), "{k}{r}");
        for &(level, dim) in &rep.levels {
            let graded: usize = a.degree_dims().iter().take(level as usize + 1).sum();
            assert_eq!(dim, graded, "{k}{r} level {level}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(x in 0usize..84, y in 0usize..84, w in 0usize..84) {
        let (_, a) = built(DynkinType::D, 4);
        let e = |i: usize| SparseVec::unit(i % a.dim());
        let left = a.multiply(&a.multiply(&e(x), &e(y)), &e(w));
        let right = a.multiply(&e(x), &a.multiply(&e(y), &e(w)));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn z_is_central(x in 0usize..20) {
        let (_, a) = built(DynkinType::A, 3);
        let v = SparseVec::unit(x);
        prop_assert_eq!(a.multiply(&a.z(), &v), a.multiply(&v, &a.z()));
    }

    #[test]
    fn monomial_reduction_is_idempotent(x in 0usize..50) {
        let (_, a) = built(DynkinType::A, 4);
        let b = a.basis_element(x);
        prop_assert_eq!(a.reduce_monomial(&b.monomial), SparseVec::unit(x));
    }
}
