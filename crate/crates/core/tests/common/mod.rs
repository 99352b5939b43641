#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tchak_core::measure::DiscreteMeasure;
use tchak_core::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rank by Gaussian elimination with partial pivoting, relative to the largest entry.
pub fn rank_by_elimination(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())) else {
            break;
        };
        if a[p][c].abs() <= rel_tol * scale {
            continue;
        }
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest {
            let f = row[c] / pivot[c];
            for (v, p) in row.iter_mut().zip(pivot).skip(c) {
                *v -= f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Direct monomial moment `Σ ρ_k x_k^e`.
pub fn brute_moment(mu: &DiscreteMeasure, e: &[u32]) -> f64 {
    mu.nodes()
        .zip(mu.weights())
        .map(|(x, w)| w * x.iter().zip(e).map(|(v, &p)| v.powi(p as i32)).product::<f64>())
        .sum()
}

pub fn random_measure(r: &mut ChaCha8Rng, d: usize, n: usize) -> DiscreteMeasure {
    let nodes = (0..n).map(|_| (0..d).map(|_| r.gen_range(-1.0..1.0)).collect()).collect();
    let weights = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
    DiscreteMeasure::new(d, nodes, weights).unwrap()
}

pub fn random_disk_atoms(r: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::from_polar(r.gen::<f64>().sqrt(), r.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

pub fn cube_roots_of_unity() -> [C64; 3] {
    let t = std::f64::consts::TAU / 3.0;
    [C64::new(1.0, 0.0), C64::from_polar(1.0, t), C64::from_polar(1.0, 2.0 * t)]
}

/// Every point of `expect` is within `tol` of some point of `got`, and the counts agree.
pub fn same_points(got: &[C64], expect: &[C64], tol: f64) -> bool {
    got.len() == expect.len() && expect.iter().all(|e| got.iter().any(|g| (g - e).norm() <= tol))
}
