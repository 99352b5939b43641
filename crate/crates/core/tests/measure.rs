mod common;

use tchak_core::basis::enumerate_real;
use tchak_core::measure::{
    complex_moments, moments, norm_moment, support_dimension, ComplexMomentSequence, DiscreteMeasure, MomentVector,
    DEFAULT_RANK_TOL,
};
use tchak_core::C64;

use common::{brute_moment, random_measure, rank_by_elimination, rng};

#[test]
fn dirac_moments() {
    let mu = DiscreteMeasure::dirac(vec![0.0, 0.0], 1.0).unwrap();
    assert_eq!(moments(&mu, 2).values, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let mu = DiscreteMeasure::dirac(vec![3.0], 1.0).unwrap();
    assert_eq!(moments(&mu, 3).values, vec![1.0, 3.0, 9.0, 27.0]);
}

#[test]
fn symmetric_pair_kills_odd_moments() {
    let mu = DiscreteMeasure::new(1, vec![vec![-1.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
    assert_eq!(moments(&mu, 2).values, vec![1.0, 0.0, 1.0]);
}

#[test]
fn moments_match_direct_sums() {
    let mut r = rng(3);
    let mu = random_measure(&mut r, 3, 40);
    let mv = moments(&mu, 4);
    for (idx, v) in mv.basis.indices().iter().zip(&mv.values) {
        let b = brute_moment(&mu, idx.exponents());
        assert!((v - b).abs() <= 1e-13 * (1.0 + b.abs()));
    }
}

#[test]
fn norm_moment_examples() {
    let mu = DiscreteMeasure::dirac(vec![0.0, 0.0], 2.0).unwrap();
    for n in 1..5 {
        assert_eq!(norm_moment(&mu, n), 0.0);
    }
    let mu = DiscreteMeasure::new(1, vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]], vec![0.25; 4]).unwrap();
    assert_eq!(norm_moment(&mu, 2), 2.5);
    let mu = DiscreteMeasure::dirac(vec![3.0, 4.0], 1.0).unwrap();
    assert!((norm_moment(&mu, 1) - 5.0).abs() < 1e-15);
}

#[test]
fn even_norm_moment_is_polynomial_moment() {
    // ‖x‖² = x² + y² in d = 2; ‖x‖⁴ = x⁴ + 2x²y² + y⁴.
    let mut r = rng(5);
    let mu = random_measure(&mut r, 2, 30);
    let mv = moments(&mu, 4);
    let at = |e: [u32; 2]| {
        let k = mv.basis.indices().iter().position(|i| i.exponents() == e).unwrap();
        mv.values[k]
    };
    let g2 = at([2, 0]) + at([0, 2]);
    let g4 = at([4, 0]) + 2.0 * at([2, 2]) + at([0, 4]);
    assert!((norm_moment(&mu, 2) - g2).abs() <= 1e-12 * g2);
    assert!((norm_moment(&mu, 4) - g4).abs() <= 1e-12 * g4);
}

#[test]
fn support_dimension_examples() {
    let single = DiscreteMeasure::dirac(vec![0.3, 0.7], 1.0).unwrap();
    for m in 0..6 {
        assert_eq!(support_dimension(&single, m, DEFAULT_RANK_TOL), 1);
    }
    let line = DiscreteMeasure::new(2, vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.5, 2.5]], vec![1.0; 3]).unwrap();
    assert_eq!(support_dimension(&line, 1, DEFAULT_RANK_TOL), 2);

    let mut r = rng(7);
    for (d, m) in [(1, 4), (2, 3), (3, 2)] {
        let n = enumerate_real(d, m).unwrap().len();
        let mu = random_measure(&mut r, d, n + 5);
        let rows: Vec<Vec<f64>> = enumerate_real(d, m)
            .unwrap()
            .indices()
            .iter()
            .map(|i| mu.nodes().map(|x| i.eval(x)).collect())
            .collect();
        let oracle = rank_by_elimination(&rows, 1e-12);
        assert_eq!(oracle, n);
        assert_eq!(support_dimension(&mu, m, DEFAULT_RANK_TOL), n);
    }
}

#[test]
fn complex_moment_examples() {
    let w = 2.5;
    let g = complex_moments(&DiscreteMeasure::from_complex(&[C64::new(0.0, 0.0)], vec![w]).unwrap(), 4).unwrap();
    for i in 0..=4 {
        for j in 0..=4 - i {
            let expect = if i + j == 0 { w } else { 0.0 };
            assert_eq!(g.get(i, j).unwrap(), C64::new(expect, 0.0));
        }
    }
    let g = complex_moments(&DiscreteMeasure::from_complex(&[C64::new(1.0, 0.0)], vec![1.0]).unwrap(), 4).unwrap();
    assert!(g.values().iter().all(|&v| v == C64::new(1.0, 0.0)));

    let pm = DiscreteMeasure::from_complex(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)], vec![0.5, 0.5]).unwrap();
    let g = complex_moments(&pm, 4).unwrap();
    for i in 0..=4usize {
        for j in 0..=4 - i {
            let expect = (1.0 + (-1.0f64).powi((i + j) as i32)) / 2.0;
            assert_eq!(g.get(i, j).unwrap(), C64::new(expect, 0.0));
        }
    }
}

#[test]
fn complex_moments_need_planar_measure() {
    let mu = DiscreteMeasure::dirac(vec![1.0], 1.0).unwrap();
    assert!(complex_moments(&mu, 2).is_err());
}

#[test]
fn sequence_from_entries_validates() {
    let ok = ComplexMomentSequence::from_entries(
        2,
        [
            (0, 0, C64::new(1.0, 0.0)),
            (0, 1, C64::new(0.5, 0.1)),
            (0, 2, C64::new(0.2, 0.0)),
            (1, 1, C64::new(0.4, 0.0)),
        ],
    )
    .unwrap();
    assert_eq!(ok.get(1, 0).unwrap(), C64::new(0.5, -0.1));
    let missing = ComplexMomentSequence::from_entries(2, [(0, 0, C64::new(1.0, 0.0))]);
    assert!(missing.is_err());
}

#[test]
fn duplicate_nodes_merge() {
    let mu = DiscreteMeasure::new(1, vec![vec![0.5], vec![0.5]], vec![0.4, 0.6]).unwrap();
    assert_eq!(mu.len(), 1);
    assert!((mu.weights()[0] - 1.0).abs() < 1e-15);
}

#[test]
fn invalid_measures_rejected() {
    assert!(DiscreteMeasure::new(1, vec![vec![0.0]], vec![-1.0]).is_err());
    assert!(DiscreteMeasure::new(1, vec![vec![0.0]], vec![0.0]).is_err());
    assert!(DiscreteMeasure::new(1, vec![vec![f64::NAN]], vec![1.0]).is_err());
    assert!(DiscreteMeasure::new(2, vec![vec![0.0]], vec![1.0]).is_err());
    assert!(DiscreteMeasure::new(1, vec![], vec![]).is_err());
}

#[test]
fn moment_vector_checks_length() {
    let b = enumerate_real(1, 2).unwrap();
    assert!(MomentVector::new(b.clone(), vec![1.0, 0.0], None).is_err());
    assert!(MomentVector::new(b, vec![1.0, 0.0, 1.0], None).is_ok());
}
