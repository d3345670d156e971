mod common;

use common::*;
use latcount::linalg::{dual_basis, norm, operator_norm, LatticeBasis};
use latcount::nu::hermite_constant;
use latcount::prelude::*;
use latcount::reduction::{enumerate_below, shortest_vector, successive_minima};
use latcount::sample::random_in;
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

/// A basis with entries in `[−3, 3]` whose inverse is not too large.
fn bounded_basis(seed: u64, n: usize) -> Option<(LatticeBasis<BigFloat>, i64)> {
    let mut r = rng(seed);
    let (lo, hi) = (bf("-3"), bf("3"));
    let rows = (0..n).map(|_| (0..n).map(|_| random_in(&mut r, &lo, &hi).unwrap()).collect()).collect();
    let l = LatticeBasis::from_rows(rows).ok()?;
    let inv = l.basis().inverse().ok()?;
    let k = (bf("3") * operator_norm(&inv)).ceil_i64().ok()? + 1;
    (k <= 12).then_some((l, k))
}

proptest! {
    #![proptest_config(cfg(100))]

    #[test]
    fn enumeration_matches_exhaustive_search(seed in any::<u64>(), three in any::<bool>()) {
        let n = if three { 3 } else { 2 };
        let Some((l, k)) = bounded_basis(seed, n) else { return Ok(()) };
        let rho = bf("3");
        let mut got: Vec<Vec<i64>> = enumerate_below(&l, &rho).unwrap().vectors.into_iter().map(|v| v.z).collect();
        got.sort();
        prop_assert_eq!(got, brute_short(&l, &rho, k));
    }
}

proptest! {
    #![proptest_config(cfg(25))]

    #[test]
    fn mahler_relation(seed in any::<u64>(), n in 2usize..=5) {
        let l = unimodular(seed, n);
        let dual = dual_basis(&l).unwrap();
        let primal = successive_minima(&l).unwrap().lambdas;
        let dual = successive_minima(&dual).unwrap().lambdas;
        let slack = bf("1e-20");
        let upper = BigFloat::from_int(factorial(n));
        for i in 0..n {
            let p = dual[i].clone() * primal[n - 1 - i].clone();
            prop_assert!(p >= BigFloat::one() - slack.clone(), "i={} product {}", i, p);
            prop_assert!(p <= upper.clone() + slack.clone(), "i={} product {}", i, p);
        }
    }

    #[test]
    fn shortest_vector_agrees_with_first_minimum(seed in any::<u64>(), n in 2usize..=4) {
        let l = unimodular(seed, n);
        let (sv, lambda) = shortest_vector(&l).unwrap();
        let minima = successive_minima(&l).unwrap();
        prop_assert_eq!(&lambda, &minima.lambdas[0]);
        prop_assert_eq!(sv.norm(), lambda);
        prop_assert!(minima.lambdas.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn dual_of_dual_is_the_same_lattice(seed in any::<u64>(), n in 2usize..=5) {
        let l = unimodular(seed, n);
        let dd = dual_basis(&dual_basis(&l).unwrap()).unwrap();
        let change = l.basis().inverse().unwrap().mul(dd.basis()).unwrap();
        let tol = bf("1e-25");
        for i in 0..n {
            for j in 0..n {
                let x = change[(i, j)].clone();
                prop_assert!((x.clone() - x.round()).abs() <= tol);
            }
        }
        prop_assert!((change.determinant().abs() - BigFloat::one()).abs() <= tol);
    }

    #[test]
    fn dual_determinant_is_reciprocal(seed in any::<u64>(), n in 2usize..=5, scale in 1i64..50) {
        let l = unimodular(seed, n).scale_coordinates(&vec![BigFloat::from_int(scale); n]).unwrap();
        let dual = dual_basis(&l).unwrap();
        let prod = l.det().clone() * dual.det().clone();
        prop_assert!((prod - BigFloat::one()).abs() <= bf("1e-25"));
    }

    #[test]
    fn operator_norm_dominates_columns(seed in any::<u64>(), n in 2usize..=5) {
        let l = unimodular(seed, n);
        let op = operator_norm(l.basis());
        let slack = op.clone() * bf("1e-25");
        for j in 0..n {
            prop_assert!(norm(&l.column(j)) <= op.clone() + slack.clone());
        }
    }
}

#[test]
fn hermite_bound_on_first_minimum() {
    for n in 2..=8 {
        let gamma: BigFloat = hermite_constant(n).unwrap().value;
        for seed in 0..10 {
            let l = unimodular(1000 * n as u64 + seed, n);
            let (_, lambda) = shortest_vector(&l).unwrap();
            assert!(lambda.clone() * lambda.clone() <= gamma, "n={n} seed={seed}: λ₁ = {lambda}");
        }
    }
}

#[test]
fn operator_norm_of_diagonal_is_largest_entry() {
    let m = matrix_from(&[&["2", "0", "0"], &["0", "-7", "0"], &["0", "0", "0.5"]]);
    assert_eq!(operator_norm(&m), bf("7"));
}

#[test]
fn operator_norm_two_by_two_against_characteristic_polynomial() {
    let mut r = rng(11);
    let (lo, hi) = (bf("-5"), bf("5"));
    for _ in 0..20 {
        let e: Vec<BigFloat> = (0..4).map(|_| random_in(&mut r, &lo, &hi).unwrap()).collect();
        let m = latcount::linalg::MatrixN::from_rows(vec![vec![e[0].clone(), e[1].clone()], vec![e[2].clone(), e[3].clone()]]).unwrap();
        // largest root of x² − tr(MᵀM)x + det(M)²
        let tr = e.iter().fold(BigFloat::zero(), |a, x| a + x.clone() * x.clone());
        let det = e[0].clone() * e[3].clone() - e[1].clone() * e[2].clone();
        let disc = tr.clone() * tr.clone() - bf("4") * det.clone() * det;
        let expected = ((tr + disc.sqrt()) / bf("2")).sqrt();
        let got = operator_norm(&m);
        assert!((got - expected.clone()).abs() <= expected * bf("1e-18"));
    }
}
