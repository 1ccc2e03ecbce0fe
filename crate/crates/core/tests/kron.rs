mod common;

use common::{dense_operator, rel_err};
use helmfft::{kron_apply, Complex64 as C64, KroneckerOperator, TriCornerMatrix};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn factor(n: usize) -> impl Strategy<Value = TriCornerMatrix> {
    (
        prop::collection::vec(complex(), n),
        prop::collection::vec(complex(), n - 1),
        prop::collection::vec(complex(), n - 1),
        complex(),
        complex(),
        any::<bool>(),
    )
        .prop_map(|(d, lo, up, c1, c2, corners)| {
            let zero = C64::new(0.0, 0.0);
            let (c1, c2) = if corners { (c1, c2) } else { (zero, zero) };
            TriCornerMatrix::general(d, lo, up, c1, c2)
        })
}

/// An operator on dims with at most three terms, plus an input vector.
fn operator() -> impl Strategy<Value = (KroneckerOperator, Vec<C64>, Vec<C64>)> {
    prop::collection::vec(2usize..10, 2..=3)
        .prop_filter("N <= 1000", |d| d.iter().product::<usize>() <= 1000)
        .prop_flat_map(|dims| {
            let total: usize = dims.iter().product();
            let term = (complex(), dims.iter().map(|&n| factor(n)).collect::<Vec<_>>());
            (
                Just(dims),
                prop::collection::vec(term, 1..=3),
                prop::collection::vec(complex(), total),
                prop::collection::vec(complex(), total),
            )
        })
        .prop_map(|(dims, terms, x, y)| {
            let mut op = KroneckerOperator::new(dims);
            for (c, factors) in terms {
                op.push_term(c, factors).unwrap();
            }
            (op, x, y)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_dense_kronecker_product((op, x, _) in operator()) {
        let got = kron_apply(&op, &x).unwrap();
        let d = dense_operator(&op);
        let want: Vec<C64> = (0..op.len())
            .map(|i| (0..op.len()).map(|j| d[(i, j)] * x[j]).sum())
            .collect();
        prop_assert!(rel_err(&got, &want) <= 1e-12);
    }

    #[test]
    fn is_linear((op, x, y) in operator(), a in complex(), b in complex()) {
        let combo: Vec<C64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = kron_apply(&op, &combo).unwrap();
        let (ox, oy) = (kron_apply(&op, &x).unwrap(), kron_apply(&op, &y).unwrap());
        let rhs: Vec<C64> = ox.iter().zip(&oy).map(|(p, q)| a * p + b * q).collect();
        prop_assert!(rel_err(&lhs, &rhs) <= 1e-12 || common::norm(&rhs) < 1e-12);
    }
}

#[test]
fn x1_is_the_slowest_index() {
    // a factor acting on x_1 only moves data between planes of length n_2 n_3
    let shift = TriCornerMatrix::general(
        vec![C64::new(0.0, 0.0); 3],
        vec![C64::new(1.0, 0.0); 2],
        vec![C64::new(0.0, 0.0); 2],
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    );
    let op = KroneckerOperator::new(vec![3, 2, 2])
        .with_term(C64::new(1.0, 0.0), vec![shift, TriCornerMatrix::identity(2), TriCornerMatrix::identity(2)])
        .unwrap();
    let x: Vec<C64> = (0..12).map(|i| C64::new(i as f64, 0.0)).collect();
    let y = kron_apply(&op, &x).unwrap();
    for i in 0..4 {
        assert_eq!(y[i], C64::new(0.0, 0.0));
        assert_eq!(y[4 + i], x[i]);
        assert_eq!(y[8 + i], x[4 + i]);
    }
}

#[test]
fn rejects_wrong_length() {
    let op = KroneckerOperator::new(vec![3, 3])
        .with_term(C64::new(1.0, 0.0), vec![TriCornerMatrix::identity(3), TriCornerMatrix::identity(3)])
        .unwrap();
    assert!(kron_apply(&op, &[C64::new(0.0, 0.0); 8]).is_err());
}
