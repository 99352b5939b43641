//! Carathéodory reduction to a vertex of `{w ≥ 0 : A w = A w₀}`.
//!
//! Columns are streamed in index order against an updatable QR factorisation of the
//! currently active, linearly independent columns. A column that is dependent on the
//! active set yields a null vector `v = (c, -1)` of the constraint matrix; moving the
//! weights along `v` until the first weight vanishes removes one atom while keeping
//! `A w` fixed. Every elimination is a split `w = ½(w + t v) + ½(w − t v)` of the kind
//! that shows a non-vertex is not extreme, so the process ends at a vertex whose
//! support columns are independent.

use nalgebra::{DMatrix, DVector};

use crate::linalg::orthonormal_row_basis;
use crate::{Error, Result};

/// Weights at or below this fraction of the total mass are treated as zero.
pub const ZERO_WEIGHT_FRACTION: f64 = 1e-13;

// A column whose component outside the active span is below this fraction of its
// norm is treated as dependent.
const INDEPENDENCE_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Reduction {
    /// Reduced weights, aligned with the input columns; eliminated entries are zero.
    pub weights: Vec<f64>,
    pub eliminations: usize,
    /// Numerical rank of the constraint matrix, the bound on the surviving support.
    pub rank: usize,
}

impl Reduction {
    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&k| self.weights[k] > 0.0).collect()
    }
}

/// Reduces `weights` to a vertex of the polytope `{w ≥ 0 : A w = A·weights}`.
///
/// `rank_tol` is the relative singular-value threshold used to orthonormalise the rows
/// of `a` before reduction.
pub fn reduce_extreme(weights: &[f64], a: &DMatrix<f64>, rank_tol: f64) -> Result<Reduction> {
    if weights.len() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: weights.len(),
        });
    }
    if let Some(k) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::validation(format!("weight {k} is negative or non-finite")));
    }
    let c = orthonormal_row_basis(a, rank_tol);
    let rank = c.nrows();
    let n = weights.len();
    let mut w = weights.to_vec();
    let total: f64 = w.iter().sum();
    let zero_tol = ZERO_WEIGHT_FRACTION * total;
    let target = &c * DVector::from_column_slice(&w);

    let mut eliminations = 0;
    for v in w.iter_mut() {
        if *v > 0.0 && *v <= zero_tol {
            *v = 0.0;
            eliminations += 1;
        }
    }
    if rank == 0 {
        let dropped = w.iter().filter(|&&v| v > 0.0).count();
        return Ok(Reduction {
            weights: vec![0.0; n],
            eliminations: eliminations + dropped,
            rank,
        });
    }

    let mut qr = UpdatableQr::new(rank);
    let mut active: Vec<usize> = Vec::with_capacity(rank);
    let mut deletions_since_refactor = 0;
    let mut col = vec![0.0; rank];

    for j in 0..n {
        if w[j] <= 0.0 {
            continue;
        }
        loop {
            col.copy_from_slice(c.column(j).as_slice());
            let cn = norm(&col);
            let proj = qr.project(&col);
            if active.len() < rank && cn > 0.0 && proj.residual_norm > INDEPENDENCE_TOL * cn {
                qr.append(proj);
                active.push(j);
                break;
            }

            // Dependent: C_active · coef = col, so (coef, -1) is a null direction.
            let coef = qr.solve(&proj.coeffs);
            let sign = if coef.iter().any(|&x| x > 0.0) { 1.0 } else { -1.0 };
            let dir = |slot: Option<usize>| -> f64 {
                match slot {
                    Some(p) => sign * coef[p],
                    None => -sign,
                }
            };

            // Step length: smallest ratio w_i / v_i over positive v_i; ties go to the
            // smallest atom index.
            let mut best: Option<(f64, usize, Option<usize>)> = None;
            let candidates = active
                .iter()
                .enumerate()
                .map(|(p, &idx)| (idx, Some(p)))
                .chain(std::iter::once((j, None)));
            for (idx, slot) in candidates {
                let v = dir(slot);
                if v <= 0.0 {
                    continue;
                }
                let ratio = w[idx] / v;
                best = match best {
                    None => Some((ratio, idx, slot)),
                    Some((t, bi, bs)) => {
                        if ratio < t * (1.0 - 1e-12) || (ratio <= t * (1.0 + 1e-12) && idx < bi) {
                            Some((ratio.min(t), idx, slot))
                        } else {
                            Some((t, bi, bs))
                        }
                    }
                };
            }
            let (t, victim, _) = best.expect("direction always has a positive component");

            for (p, &idx) in active.iter().enumerate() {
                w[idx] -= t * dir(Some(p));
            }
            w[j] -= t * dir(None);
            w[victim] = 0.0;

            let mut removed: Vec<usize> = Vec::new();
            for (p, &idx) in active.iter().enumerate() {
                if w[idx] <= zero_tol {
                    w[idx] = 0.0;
                    removed.push(p);
                }
            }
            if w[j] <= zero_tol {
                w[j] = 0.0;
            }
            eliminations += removed.len() + usize::from(w[j] == 0.0);
            for &p in removed.iter().rev() {
                qr.delete(p);
                active.remove(p);
            }
            deletions_since_refactor += removed.len();
            if deletions_since_refactor >= rank.max(8) {
                qr.refactor(&c, &active);
                deletions_since_refactor = 0;
            }
            if w[j] == 0.0 {
                break;
            }
        }
    }

    polish(&c, &target, &mut w, &active, zero_tol);

    Ok(Reduction {
        weights: w,
        eliminations,
        rank,
    })
}

// Re-solves the weights on the final support against the original constraint values.
fn polish(c: &DMatrix<f64>, target: &DVector<f64>, w: &mut [f64], support: &[usize], zero_tol: f64) {
    if support.is_empty() {
        return;
    }
    let sub = c.select_columns(support);
    let current = DVector::from_iterator(support.len(), support.iter().map(|&k| w[k]));
    let before = (&sub * &current - target).norm();
    let qr = sub.clone().qr();
    let Some(x) = qr.r().solve_upper_triangular(&qr.q().tr_mul(target)) else {
        return;
    };
    if x.iter().any(|v| !v.is_finite() || *v <= zero_tol) {
        return;
    }
    let after = (&sub * &x - target).norm();
    if after <= before {
        for (p, &k) in support.iter().enumerate() {
            w[k] = x[p];
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Projection {
    coeffs: Vec<f64>,
    residual: Vec<f64>,
    residual_norm: f64,
}

/// Thin QR factorisation `C_active = Q R` supporting column append and delete.
struct UpdatableQr {
    rows: usize,
    /// Orthonormal columns of Q.
    q: Vec<Vec<f64>>,
    /// Columns of R; column `k` holds `k + 1` entries.
    r: Vec<Vec<f64>>,
}

impl UpdatableQr {
    fn new(rows: usize) -> Self {
        Self {
            rows,
            q: Vec::with_capacity(rows),
            r: Vec::with_capacity(rows),
        }
    }

    // Classical Gram–Schmidt with one reorthogonalisation pass.
    fn project(&self, a: &[f64]) -> Projection {
        let mut coeffs = vec![0.0; self.q.len()];
        let mut res = a.to_vec();
        for _ in 0..2 {
            for (k, qk) in self.q.iter().enumerate() {
                let d: f64 = qk.iter().zip(&res).map(|(x, y)| x * y).sum();
                coeffs[k] += d;
                for (r, q) in res.iter_mut().zip(qk) {
                    *r -= d * q;
                }
            }
        }
        let residual_norm = norm(&res);
        Projection {
            coeffs,
            residual: res,
            residual_norm,
        }
    }

    fn append(&mut self, p: Projection) {
        let mut rcol = p.coeffs;
        rcol.push(p.residual_norm);
        self.q.push(p.residual.iter().map(|x| x / p.residual_norm).collect());
        self.r.push(rcol);
    }

    // Back substitution R x = y.
    fn solve(&self, y: &[f64]) -> Vec<f64> {
        let k = self.r.len();
        let mut x = y.to_vec();
        for i in (0..k).rev() {
            let s = x[i]
                - x.iter()
                    .enumerate()
                    .skip(i + 1)
                    .map(|(j, xj)| self.r[j][i] * xj)
                    .sum::<f64>();
            let d = self.r[i][i];
            x[i] = if d != 0.0 { s / d } else { 0.0 };
        }
        x
    }

    // Removes column p, restoring triangular form with Givens rotations.
    fn delete(&mut self, p: usize) {
        self.r.remove(p);
        let k = self.r.len();
        for i in p..k {
            // Column i (formerly i+1) has a subdiagonal entry at row i+1.
            let a = self.r[i][i];
            let b = self.r[i][i + 1];
            let h = a.hypot(b);
            let (cs, sn) = if h == 0.0 { (1.0, 0.0) } else { (a / h, b / h) };
            for col in self.r.iter_mut().skip(i) {
                let x = col[i];
                let y = col[i + 1];
                col[i] = cs * x + sn * y;
                col[i + 1] = -sn * x + cs * y;
            }
            let (left, right) = self.q.split_at_mut(i + 1);
            let qi = &mut left[i];
            let qj = &mut right[0];
            for (x, y) in qi.iter_mut().zip(qj.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = cs * u + sn * v;
                *y = -sn * u + cs * v;
            }
            self.r[i].truncate(i + 1);
        }
        self.q.truncate(k);
        for col in self.r.iter_mut() {
            let len = col.len().min(k);
            col.truncate(len);
        }
    }

    // Rebuilds from scratch to shed accumulated rounding.
    fn refactor(&mut self, c: &DMatrix<f64>, active: &[usize]) {
        self.q.clear();
        self.r.clear();
        for &j in active {
            let p = self.project(c.column(j).as_slice());
            self.append(p);
        }
        debug_assert!(self.q.iter().all(|q| q.len() == self.rows));
    }
}
