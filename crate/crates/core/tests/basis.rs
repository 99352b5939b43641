mod common;

use tchak_core::basis::{enumerate_complex, enumerate_real, num_monomials, vandermonde, MultiIndex};
use tchak_core::Error;

use common::{rank_by_elimination, rng};
use rand::Rng;

fn exps(d: usize, m: usize) -> Vec<Vec<u32>> {
    enumerate_real(d, m)
        .unwrap()
        .indices()
        .iter()
        .map(|i| i.exponents().to_vec())
        .collect()
}

#[test]
fn univariate_cubic_basis() {
    assert_eq!(exps(1, 3), vec![vec![0], vec![1], vec![2], vec![3]]);
}

#[test]
fn bivariate_quadratic_order() {
    assert_eq!(
        exps(2, 2),
        vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]
    );
}

#[test]
fn trivariate_quartic_matches_brute_enumeration() {
    let got = exps(3, 4);
    let mut brute = Vec::new();
    for a in 0..=4u32 {
        for b in 0..=4u32 {
            for c in 0..=4u32 {
                if a + b + c <= 4 {
                    brute.push(vec![a, b, c]);
                }
            }
        }
    }
    assert_eq!(got.len(), 35);
    assert_eq!(brute.len(), 35);
    for e in &brute {
        assert!(got.contains(e));
    }
    let degrees: Vec<u32> = got.iter().map(|e| e.iter().sum()).collect();
    assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn zero_dimension_rejected() {
    assert!(matches!(enumerate_real(0, 2), Err(Error::InvalidDimension(0))));
}

#[test]
fn sizes_match_binomial() {
    fn binom(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }
    for d in 1..=6 {
        for m in 0..=10 {
            let b = enumerate_real(d, m).unwrap();
            assert_eq!(b.len(), binom(m + d, d), "d={d} m={m}");
            assert_eq!(num_monomials(d, m), b.len());
        }
    }
}

#[test]
fn prefix_consistent() {
    for d in 1..=4 {
        for m in 1..=6 {
            let hi = exps(d, m);
            let lo = exps(d, m - 1);
            assert_eq!(&hi[..lo.len()], &lo[..]);
        }
    }
}

#[test]
fn complex_pairs() {
    assert_eq!(enumerate_complex(1).pairs(), &[(0, 0), (0, 1), (1, 0)]);
    assert_eq!(enumerate_complex(2).len(), 6);
    assert_eq!(
        enumerate_complex(2).pairs(),
        &[(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    );
    let n4 = enumerate_complex(4);
    let brute = (0..=4).flat_map(|i| (0..=4).map(move |j| (i, j))).filter(|(i, j)| i + j <= 4).count();
    assert_eq!(n4.len(), 15);
    assert_eq!(brute, 15);
}

#[test]
fn vandermonde_columns() {
    let b = enumerate_real(1, 2).unwrap();
    let v = vandermonde(&b, [[2.0].as_slice()]).unwrap();
    assert_eq!(v.column(0).as_slice(), &[1.0, 2.0, 4.0]);
    let b = enumerate_real(2, 1).unwrap();
    let v = vandermonde(&b, [[0.0, 0.0].as_slice()]).unwrap();
    assert_eq!(v.column(0).as_slice(), &[1.0, 0.0, 0.0]);
}

#[test]
fn vandermonde_rejects_mismatched_nodes() {
    let b = enumerate_real(2, 1).unwrap();
    assert!(vandermonde(&b, [[1.0].as_slice()]).is_err());
}

#[test]
fn vandermonde_rank_on_random_nodes() {
    let mut r = rng(11);
    let b = enumerate_real(1, 3).unwrap();
    let nodes: Vec<Vec<f64>> = (0..10).map(|_| vec![r.gen_range(-1.0..1.0)]).collect();
    let v = vandermonde(&b, nodes.iter().map(Vec::as_slice)).unwrap();
    let rows: Vec<Vec<f64>> = v.row_iter().map(|row| row.iter().copied().collect()).collect();
    assert_eq!(rank_by_elimination(&rows, 1e-12), 4);

    for (d, m) in [(2, 3), (3, 2), (2, 5)] {
        let b = enumerate_real(d, m).unwrap();
        let nodes: Vec<Vec<f64>> = (0..b.len())
            .map(|_| (0..d).map(|_| r.gen_range(-1.0..1.0)).collect())
            .collect();
        let v = vandermonde(&b, nodes.iter().map(Vec::as_slice)).unwrap();
        let rows: Vec<Vec<f64>> = v.row_iter().map(|row| row.iter().copied().collect()).collect();
        assert_eq!(rank_by_elimination(&rows, 1e-13), b.len(), "d={d} m={m}");
    }
}

#[test]
fn monomial_evaluation_is_exact_on_integers() {
    let i = MultiIndex::new(vec![3, 2]);
    assert_eq!(i.degree(), 5);
    assert_eq!(i.eval(&[3.0, -2.0]), 108.0);
}
