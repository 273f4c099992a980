use frametensor_core::algebras::{
    algebra_norm, check_solidity, jaffard_norm, operator_norm, power_iteration_norm, schur_norm,
    sjostrand_norm, spectral_norm,
};
use frametensor_core::{AlgMatrix, AlgebraSpec, Complex64, DMatrix, IndexSet, Weight};
use proptest::prelude::*;

fn matrix_strategy(max_n: usize) -> impl Strategy<Value = AlgMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |cells| {
            let index = IndexSet::range(n).unwrap();
            let entries =
                DMatrix::from_row_iterator(n, n, cells.into_iter().map(|(r, i)| Complex64::new(r, i)));
            AlgMatrix::square(index, entries).unwrap()
        })
    })
}

fn pair_strategy(max_n: usize) -> impl Strategy<Value = (AlgMatrix, AlgMatrix)> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * n * n).prop_map(move |cells| {
            let index = IndexSet::range(n).unwrap();
            let mut it = cells.into_iter().map(|(r, i)| Complex64::new(r, i));
            let a = DMatrix::from_row_iterator(n, n, it.by_ref().take(n * n));
            let b = DMatrix::from_row_iterator(n, n, it);
            (
                AlgMatrix::square(index.clone(), a).unwrap(),
                AlgMatrix::square(index, b).unwrap(),
            )
        })
    })
}

/// Schur norm straight from the definition: the larger of the weighted
/// row and column sums.
fn schur_oracle(a: &AlgMatrix, delta: f64) -> f64 {
    let n = a.entries().nrows();
    let w = |i: usize, j: usize| (1.0 + (i as f64 - j as f64).abs()).powf(delta);
    let row = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).norm() * w(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    let col = (0..n)
        .map(|j| (0..n).map(|i| a.get(i, j).norm() * w(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    row.max(col)
}

fn exactly_submultiplicative() -> Vec<AlgebraSpec> {
    vec![
        AlgebraSpec::schur(1.0, 0.0).unwrap(),
        AlgebraSpec::schur(1.0, 1.5).unwrap(),
        AlgebraSpec::sjostrand(Weight::polynomial(0.0).unwrap()),
        AlgebraSpec::sjostrand(Weight::polynomial(1.0).unwrap()),
        AlgebraSpec::sjostrand(Weight::exponential_sub(1.0, 0.5).unwrap()),
    ]
}

proptest! {
    #[test]
    fn schur_p1_matches_definition(a in matrix_strategy(6), delta in 0.0f64..3.0) {
        let got = schur_norm(&a, 1.0, delta).unwrap();
        let want = schur_oracle(&a, delta);
        prop_assert!((got - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn norms_are_absolutely_homogeneous(a in matrix_strategy(5), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let alpha = Complex64::new(re, im);
        let scaled = a.scale(alpha);
        for spec in exactly_submultiplicative().into_iter().chain([AlgebraSpec::jaffard(2.0).unwrap()]) {
            let n = algebra_norm(&a, &spec).unwrap();
            let ns = algebra_norm(&scaled, &spec).unwrap();
            prop_assert!((ns - alpha.norm() * n).abs() <= 1e-12 * (1.0 + ns));
        }
    }

    #[test]
    fn triangle_inequality((a, b) in pair_strategy(5)) {
        let sum = a.add(&b).unwrap();
        for spec in exactly_submultiplicative().into_iter().chain([AlgebraSpec::jaffard(3.0).unwrap()]) {
            let lhs = algebra_norm(&sum, &spec).unwrap();
            let rhs = algebra_norm(&a, &spec).unwrap() + algebra_norm(&b, &spec).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn submultiplicative_families((a, b) in pair_strategy(6)) {
        let ab = a.matmul(&b).unwrap();
        for spec in exactly_submultiplicative() {
            let lhs = algebra_norm(&ab, &spec).unwrap();
            let rhs = algebra_norm(&a, &spec).unwrap() * algebra_norm(&b, &spec).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{spec}: {lhs} > {rhs}");
        }
    }

    #[test]
    fn involution_is_isometric(a in matrix_strategy(6)) {
        let specs = exactly_submultiplicative().into_iter().chain([
            AlgebraSpec::jaffard(1.5).unwrap(),
            AlgebraSpec::schur(2.0, 1.0).unwrap(),
            AlgebraSpec::schur(f64::INFINITY, 2.0).unwrap(),
        ]);
        for spec in specs {
            let n = algebra_norm(&a, &spec).unwrap();
            let ns = algebra_norm(&a.adjoint(), &spec).unwrap();
            prop_assert!((n - ns).abs() <= 1e-12 * n.max(1e-300));
        }
    }

    #[test]
    fn operator_norm_below_schur_bound(a in matrix_strategy(8)) {
        // the Schur test: ||A||_op <= sqrt(max row sum * max column sum)
        prop_assert!(operator_norm(&a) <= schur_norm(&a, 1.0, 0.0).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn spectral_norm_agrees_with_power_iteration(a in matrix_strategy(7)) {
        let svd = spectral_norm(a.entries());
        let power = power_iteration_norm(a.entries());
        prop_assert!((svd - power).abs() <= 1e-8 * svd.max(1e-300));
    }

    #[test]
    fn solidity_under_entrywise_domination(
        a in matrix_strategy(6),
        factors in prop::collection::vec(0.0f64..=1.0, 36),
    ) {
        let n = a.entries().nrows();
        let b = AlgMatrix::from_fn(a.rows().clone(), a.cols().clone(), |i, j| {
            a.get(i, j) * factors[i * n + j]
        }).unwrap();
        for spec in exactly_submultiplicative().into_iter().chain([AlgebraSpec::jaffard(2.0).unwrap()]) {
            prop_assert!(check_solidity(&spec, &a, &b).unwrap());
        }
    }
}

#[test]
fn jaffard_and_sjostrand_match_hand_values() {
    let index = IndexSet::range(3).unwrap();
    let a = AlgMatrix::from_fn(index.clone(), index, |i, j| {
        Complex64::new(if i == 0 && j == 2 { 2.0 } else if i == j { 1.0 } else { 0.0 }, 0.0)
    })
    .unwrap();
    // (1 + 2)^2 * 2
    assert_eq!(jaffard_norm(&a, 2.0).unwrap(), 18.0);
    // diagonal sup 1 plus the one off-diagonal entry 2 weighted by (1 + 2)
    let w = Weight::polynomial(1.0).unwrap();
    assert_eq!(sjostrand_norm(&a, &w).unwrap(), 1.0 + 2.0 * 3.0);
}

#[test]
fn domination_violation_is_a_precondition_error() {
    let index = IndexSet::range(2).unwrap();
    let a = AlgMatrix::identity(&index);
    let b = a.scale(Complex64::new(2.0, 0.0));
    assert!(check_solidity(&AlgebraSpec::jaffard(1.0).unwrap(), &a, &b).is_err());
}
