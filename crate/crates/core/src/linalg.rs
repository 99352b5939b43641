//! Dense linear-algebra helpers shared by the compression and moment-matrix code.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};

use crate::{Error, Result, C64};

/// Neumaier's compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Singular values sorted in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    // Reduce tall or wide inputs to a square triangular factor first.
    let small = if a.ncols() > 2 * a.nrows() {
        a.transpose().qr().r()
    } else if a.nrows() > 2 * a.ncols() {
        a.clone().qr().r()
    } else {
        a.clone()
    };
    let mut sv: Vec<f64> = small.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

/// Count of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        Some(&smax) if smax > 0.0 => sv.iter().filter(|&&s| s > rel_tol * smax).count(),
        _ => 0,
    }
}

/// Scales each row to unit Euclidean norm; all-zero rows are dropped.
pub fn normalize_rows(a: &DMatrix<f64>) -> DMatrix<f64> {
    let rows: Vec<_> = a
        .row_iter()
        .filter_map(|r| {
            let n = r.norm();
            (n > 0.0).then(|| r / n)
        })
        .collect();
    if rows.is_empty() {
        return DMatrix::zeros(0, a.ncols());
    }
    DMatrix::from_rows(&rows)
}

/// Orthonormal basis for the row space of `a` at relative rank tolerance `rel_tol`.
///
/// Returns an `r × ncols` matrix with orthonormal rows; rows of `a` are first scaled to
/// unit norm so the tolerance is insensitive to monomial magnitudes.
pub fn orthonormal_row_basis(a: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let a = normalize_rows(a);
    let (nr, nc) = a.shape();
    if nr == 0 || nc == 0 {
        return DMatrix::zeros(0, nc);
    }
    // a^T = Q R (thin), then R = U Σ V^T, so the row space of a is spanned by Q U.
    let at = a.transpose();
    let (q, r) = if nc >= nr {
        let qr = at.qr();
        (qr.q(), qr.r())
    } else {
        (DMatrix::identity(nc, nc), at)
    };
    let svd = SVD::new(r, true, false);
    let u = svd.u.expect("requested U");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return DMatrix::zeros(0, nc);
    }
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > rel_tol * smax).collect();
    let mut basis = DMatrix::zeros(keep.len(), nc);
    for (row, &k) in keep.iter().enumerate() {
        let col = &q * u.column(k);
        basis.row_mut(row).copy_from(&col.transpose());
    }
    basis
}

/// Least-squares solve through a truncated SVD (minimum-norm solution).
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(b, rel_tol * smax)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Complex least squares through a truncated SVD.
pub fn lstsq_complex(a: &DMatrix<C64>, b: &DVector<C64>, rel_tol: f64) -> DVector<C64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.solve(b, rel_tol * smax)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted descending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors, in the same order as `values`.
    pub vectors: DMatrix<C64>,
}

pub fn hermitian_eigen(m: &DMatrix<C64>) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen {
            values: Vec::new(),
            vectors: DMatrix::zeros(0, 0),
        };
    }
    // Symmetrize against round-off before the solver sees it.
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEigen { values, vectors }
}

/// Eigenvalues of a general complex square matrix.
pub fn complex_eigenvalues(m: &DMatrix<C64>) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Conditioning("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Outcome of a nonnegative least-squares solve.
#[derive(Clone, Debug)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual_norm: f64,
}

/// Lawson–Hanson active-set solver for `min ‖A x − b‖₂` subject to `x ≥ 0`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> NnlsSolution {
    let (m, n) = a.shape();
    let mut x = DVector::zeros(n);
    let mut passive = vec![false; n];
    let anorm = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let tol = 10.0 * f64::EPSILON * (m.max(n) as f64) * anorm.max(1.0) * b.norm().max(1.0);
    let max_outer = 3 * n.max(1) + 10;

    let mut blocked = vec![false; n];
    let mut w = a.tr_mul(&(b - a * &x));
    for _ in 0..max_outer {
        let candidate = (0..n)
            .filter(|&j| !passive[j] && !blocked[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        passive[j] = true;

        let mut inner = 0;
        loop {
            inner += 1;
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let sub = a.select_columns(&idx);
            let z_p = solve_full_column(&sub, b);
            if idx.iter().zip(z_p.iter()).all(|(_, &z)| z > 0.0) || inner > 3 * n + 10 {
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z_p[k].max(0.0);
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z_p[k] <= 0.0 {
                    let denom = x[i] - z_p[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z_p[k] - x[i]);
                if x[i] <= f64::EPSILON * x.amax().max(1.0) {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
        // An index dropped straight after entering would re-enter forever.
        if passive[j] {
            blocked.iter_mut().for_each(|v| *v = false);
        } else {
            blocked[j] = true;
        }
        w = a.tr_mul(&(b - a * &x));
    }
    let residual_norm = (b - a * &x).norm();
    NnlsSolution { x, residual_norm }
}

// Least squares for a matrix expected to have full column rank; falls back to SVD.
fn solve_full_column(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.nrows() >= a.ncols() {
        let qr = a.clone().qr();
        let r = qr.r();
        let diag_ok = (0..r.ncols()).all(|i| r[(i, i)].abs() > 1e-13 * r[(0, 0)].abs());
        if diag_ok {
            let qtb = qr.q().tr_mul(b);
            if let Some(sol) = r.solve_upper_triangular(&qtb) {
                return sol;
            }
        }
    }
    lstsq(a, b, 1e-13)
}
