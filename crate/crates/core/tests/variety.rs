mod common;

use rand::Rng;
use tchak_core::variety::{apriori_radius, find_roots, root_count_bound, sharp_example, AnalyticPoly, DEFAULT_ROOT_TOL};
use tchak_core::C64;

use common::{cube_roots_of_unity, rng, same_points};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn residual_ok(p: &AnalyticPoly, z: C64) -> bool {
    p.eval(z).norm() <= DEFAULT_ROOT_TOL * z.norm().max(1.0).powi(p.k() as i32)
}

#[test]
fn linear_root_is_the_constant() {
    let q = c(-0.7, 2.2);
    let p = AnalyticPoly::new(1, vec![(0, 0, q)]).unwrap();
    let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
    assert_eq!(r.roots.len(), 1);
    assert!((r.roots[0] - q).norm() < 1e-12);
}

#[test]
fn harmonic_quadratic_has_four_zeros() {
    let p = sharp_example(2).unwrap();
    let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
    let mut expect = vec![c(0.0, 0.0)];
    expect.extend(cube_roots_of_unity());
    assert!(same_points(&r.roots, &expect, 1e-10), "{:?}", r.roots);
    assert!(r.warnings.is_empty());
}

#[test]
fn cubic_sharp_example_has_nine_zeros() {
    let p = sharp_example(3).unwrap();
    let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
    assert_eq!(r.len(), 9);
    assert!(r.roots.iter().all(|&z| residual_ok(&p, z) && z.norm() <= apriori_radius(&p)));
}

#[test]
fn quintic_sharp_example_has_twenty_five_zeros() {
    let p = sharp_example(5).unwrap();
    assert_eq!(find_roots(&p, DEFAULT_ROOT_TOL).unwrap().len(), 25);
}

#[test]
fn quartic_example_as_printed() {
    // z⁴ + 3z² − z − 3z̄³ − 3z̄² has 8 distinct zeros, not 16.
    let p = sharp_example(4).unwrap();
    let r = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
    assert_eq!(r.len(), 8);
    assert!(r.warnings.is_empty());
}

#[test]
fn bounds_and_radii() {
    assert_eq!(root_count_bound(1), 1);
    assert_eq!(root_count_bound(2), 4);
    assert_eq!(root_count_bound(5), 25);
    assert_eq!(apriori_radius(&AnalyticPoly::new(4, vec![]).unwrap()), 2.0);
    assert_eq!(apriori_radius(&sharp_example(2).unwrap()), 2.0);
    let zero = find_roots(&AnalyticPoly::new(3, vec![]).unwrap(), DEFAULT_ROOT_TOL).unwrap();
    assert_eq!(zero.len(), 1);
    assert!(zero.roots[0].norm() < 1e-12);
}

#[test]
fn invalid_terms_rejected() {
    assert!(AnalyticPoly::new(0, vec![]).is_err());
    assert!(AnalyticPoly::new(2, vec![(1, 1, c(1.0, 0.0))]).is_err());
    assert!(AnalyticPoly::new(2, vec![(0, 1, c(f64::NAN, 0.0))]).is_err());
}

#[test]
fn random_polynomials_respect_bound_and_residual() {
    let mut r = rng(97);
    for k in 1..=4usize {
        for _ in 0..25 {
            let mut terms = Vec::new();
            for i in 0..k {
                for j in 0..k - i {
                    let z = C64::from_polar(r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU));
                    terms.push((i, j, z));
                }
            }
            let p = AnalyticPoly::new(k, terms).unwrap();
            let set = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
            assert!(set.len() <= k * k);
            assert!(set.roots.iter().all(|&z| residual_ok(&p, z)));
            for (a, i) in set.roots.iter().zip(0..) {
                for b in &set.roots[i + 1..] {
                    assert!((a - b).norm() > 1e-8 * set.box_radius);
                }
            }
        }
    }
}

#[test]
fn real_coefficients_give_conjugate_closed_roots() {
    let p = AnalyticPoly::new(3, vec![(0, 1, c(0.4, 0.0)), (2, 0, c(-1.1, 0.0)), (1, 1, c(0.3, 0.0))]).unwrap();
    let set = find_roots(&p, DEFAULT_ROOT_TOL).unwrap();
    for z in &set.roots {
        assert!(set.roots.iter().any(|w| (w - z.conj()).norm() <= 1e-8 * set.box_radius));
    }
}
