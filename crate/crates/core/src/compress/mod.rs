//! Quadrature compression by Carathéodory reduction.
//!
//! Every routine here locates a vertex of a polytope of nonnegative weight vectors
//! on a fixed node set. Vertices have linearly independent support columns, which is
//! what bounds the size of the resulting rule.

mod reduce;

pub use reduce::{reduce_extreme, Reduction, ZERO_WEIGHT_FRACTION};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::{enumerate_real, num_monomials, vandermonde};
use crate::linalg::{nnls, CompensatedSum};
use crate::measure::{
    AffineNormalization,
    absolute_moments, moments, norm_moment, norm_power, normalized_vandermonde, support_dimension,
    DiscreteMeasure, MomentVector, DEFAULT_RANK_TOL,
};
use crate::{BoundKind, Error, Result};

/// Result of a compression or grid-representation run.
#[derive(Clone, Debug, Serialize)]
pub struct CompressionReport {
    pub rule: DiscreteMeasure,
    pub bound: BoundKind,
    /// The size the rule is guaranteed not to exceed.
    pub size_bound: usize,
    /// `N_{m,d}`, the unrestricted polynomial dimension.
    pub full_space_dim: usize,
    /// Rank of the constraint system the reduction ran on.
    pub vertex_rank: usize,
    pub achieved_size: usize,
    pub max_moment_residual: f64,
    /// `Γ − ∫‖x‖ⁿ d(rule)` for norm-constrained runs.
    pub norm_slack: Option<f64>,
    pub eliminations: usize,
}

/// Per-moment comparison of a rule against a reference measure.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    pub degree: usize,
    pub absolute: Vec<f64>,
    /// `|Δ_i| / Σ ρ_k |x_k^i|` over the reference measure (total mass when that vanishes).
    pub relative: Vec<f64>,
    pub max_absolute: f64,
    pub max_relative: f64,
    pub norm_slack: Option<f64>,
}

/// Compares the degree-`m` moments of `rule` with those of `mu`; with `norm_degree = Some(n)`
/// also reports `Γ(mu) − ∫‖x‖ⁿ d(rule)`.
pub fn verify_rule(
    rule: &DiscreteMeasure,
    mu: &DiscreteMeasure,
    m: usize,
    norm_degree: Option<usize>,
) -> Result<ResidualReport> {
    if rule.dim() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: rule.dim(),
        });
    }
    let target = moments(mu, m).values;
    let scale = absolute_moments(mu, m);
    let got = moments(rule, m).values;
    let mass = mu.total_mass();
    let absolute: Vec<f64> = got.iter().zip(&target).map(|(a, b)| (a - b).abs()).collect();
    let relative: Vec<f64> = absolute
        .iter()
        .zip(&scale)
        .map(|(r, &s)| r / if s > 0.0 { s } else { mass })
        .collect();
    Ok(ResidualReport {
        degree: m,
        max_absolute: absolute.iter().cloned().fold(0.0, f64::max),
        max_relative: relative.iter().cloned().fold(0.0, f64::max),
        absolute,
        relative,
        norm_slack: norm_degree.map(|n| norm_moment(mu, n) - norm_moment(rule, n)),
    })
}

/// Degree-`m` quadrature rule for `mu` supported on a subset of its nodes, with at most
/// `N_{m,d;μ}` atoms.
pub fn compress(mu: &DiscreteMeasure, m: usize, tol: f64) -> Result<CompressionReport> {
    check_tol(tol)?;
    let a = normalized_vandermonde(mu, m);
    let red = reduce_extreme(mu.weights(), &a, DEFAULT_RANK_TOL)?;
    let support = red.support();
    let weights: Vec<f64> = support.iter().map(|&k| red.weights[k]).collect();

    let mut rule = mu.restrict(&support, weights.clone())?;
    let mut check = verify_rule(&rule, mu, m, None)?;
    if check.max_relative > tol {
        if let Some(w) = raw_polish(mu, &support, &weights, m, None) {
            let candidate = mu.restrict(&support, w)?;
            let c = verify_rule(&candidate, mu, m, None)?;
            if c.max_relative < check.max_relative {
                rule = candidate;
                check = c;
            }
        }
    }
    if check.max_relative > tol {
        return Err(Error::ResidualNotMet {
            best: check.max_relative,
            tol,
        });
    }
    Ok(CompressionReport {
        achieved_size: rule.len(),
        rule,
        bound: BoundKind::SupportDimension,
        size_bound: support_dimension(mu, m, DEFAULT_RANK_TOL),
        full_space_dim: num_monomials(mu.dim(), m),
        vertex_rank: red.rank,
        max_moment_residual: check.max_relative,
        norm_slack: None,
        eliminations: red.eliminations,
    })
}

/// Rule of degree `n − 1` whose degree-`n` norm moment does not exceed that of `mu`,
/// with at most `1 + N_{n−1,d;μ}` atoms.
///
/// The constraint system is the degree-`(n−1)` moments, the row `‖x_k‖ⁿ`, and a slack
/// column for the inequality `∫‖x‖ⁿ dν ≤ Γ`.
pub fn compress_constrained(mu: &DiscreteMeasure, n: usize, tol: f64) -> Result<CompressionReport> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::validation("norm degree must be at least 1"));
    }
    let m = n - 1;
    let poly = normalized_vandermonde(mu, m);
    let k = mu.len();
    let rows = poly.nrows() + 1;
    let mut a = DMatrix::zeros(rows, k + 1);
    a.view_mut((0, 0), (poly.nrows(), k)).copy_from(&poly);
    for (j, node) in mu.nodes().enumerate() {
        a[(rows - 1, j)] = norm_power(node, n);
    }
    let row_scale = a.row(rows - 1).amax();
    a[(rows - 1, k)] = if row_scale > 0.0 { row_scale } else { 1.0 };

    let mut w0 = mu.weights().to_vec();
    w0.push(0.0);
    let red = reduce_extreme(&w0, &a, DEFAULT_RANK_TOL)?;
    let support: Vec<usize> = red.support().into_iter().filter(|&j| j < k).collect();
    let weights: Vec<f64> = support.iter().map(|&j| red.weights[j]).collect();

    let gamma = norm_moment(mu, n);
    let mut rule = mu.restrict(&support, weights.clone())?;
    let mut check = verify_rule(&rule, mu, m, Some(n))?;
    let feasible = |c: &ResidualReport| {
        c.max_relative <= tol && c.norm_slack.unwrap_or(0.0) >= -tol * gamma.max(f64::MIN_POSITIVE)
    };
    if !feasible(&check) {
        if let Some(w) = raw_polish(mu, &support, &weights, m, Some(n)) {
            let candidate = mu.restrict(&support, w)?;
            let c = verify_rule(&candidate, mu, m, Some(n))?;
            if feasible(&c) || c.max_relative < check.max_relative {
                rule = candidate;
                check = c;
            }
        }
    }
    if !feasible(&check) {
        let slack_violation = (-check.norm_slack.unwrap_or(0.0) / gamma.max(f64::MIN_POSITIVE)).max(0.0);
        return Err(Error::ResidualNotMet {
            best: check.max_relative.max(slack_violation),
            tol,
        });
    }
    Ok(CompressionReport {
        achieved_size: rule.len(),
        rule,
        bound: BoundKind::NormConstrained,
        size_bound: 1 + support_dimension(mu, m, DEFAULT_RANK_TOL),
        full_space_dim: num_monomials(mu.dim(), m),
        vertex_rank: red.rank,
        max_moment_residual: check.max_relative,
        norm_slack: check.norm_slack,
        eliminations: red.eliminations,
    })
}

/// Represents the functional with moments `beta` as a positive combination of point
/// evaluations on `grid` (whose weights are ignored).
///
/// Returns [`Error::Infeasible`] when the nonnegative least-squares residual exceeds
/// `tol·(1 + ‖β‖)`, i.e. when the functional is not positive on the grid.
pub fn represent_on_grid(beta: &MomentVector, grid: &DiscreteMeasure, tol: f64) -> Result<CompressionReport> {
    check_tol(tol)?;
    let basis = &beta.basis;
    if basis.dim() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: grid.dim(),
        });
    }
    let m = basis.degree();
    let v = vandermonde(basis, grid.nodes())?;
    let b = DVector::from_column_slice(&beta.values);

    // Solve in coordinates mapped onto [-1, 1]^d, with row-max scaling on top.
    let unit = DiscreteMeasure::from_flat(grid.dim(), grid.coords().to_vec(), vec![1.0; grid.len()])?;
    let norm = AffineNormalization::of(&unit);
    let scaled = DiscreteMeasure::from_flat(grid.dim(), norm.apply(&unit), vec![1.0; grid.len()])?;
    let mut vs = vandermonde(basis, scaled.nodes())?;
    let mut bs = DVector::from_vec(norm.transform_moments(basis, &beta.values));
    for i in 0..vs.nrows() {
        let s = vs.row(i).amax();
        if s > 0.0 {
            vs.row_mut(i).scale_mut(1.0 / s);
            bs[i] /= s;
        }
    }
    let sol = nnls(&vs, &bs);
    let raw_residual = (&v * &sol.x - &b).norm();
    let beta_norm = b.norm();
    if raw_residual.is_nan() || raw_residual > tol * (1.0 + beta_norm) {
        return Err(Error::Infeasible(format!(
            "functional not positive on grid (nonnegative residual {raw_residual:.3e})"
        )));
    }

    let a = normalized_vandermonde(&unit, m);
    let red = reduce_extreme(sol.x.as_slice(), &a, DEFAULT_RANK_TOL)?;
    let support = red.support();
    if support.is_empty() {
        return Err(Error::Infeasible(
            "functional not positive on grid (zero functional)".into(),
        ));
    }
    let weights: Vec<f64> = support.iter().map(|&k| red.weights[k]).collect();
    let rule = grid.restrict(&support, weights)?;

    let got = moments(&rule, m).values;
    let scale = absolute_moments(&rule, m);
    let mass = rule.total_mass();
    let max_rel = got
        .iter()
        .zip(&beta.values)
        .zip(&scale)
        .map(|((g, t), &s)| (g - t).abs() / if s > 0.0 { s } else { mass })
        .fold(0.0, f64::max);
    Ok(CompressionReport {
        achieved_size: rule.len(),
        rule,
        bound: BoundKind::GridRepresentation,
        size_bound: support_dimension(&unit, m, DEFAULT_RANK_TOL),
        full_space_dim: basis.len(),
        vertex_rank: red.rank,
        max_moment_residual: max_rel,
        norm_slack: None,
        eliminations: red.eliminations,
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(format!("tolerance must be positive, got {tol}")))
    }
}

// Least squares on the support against the raw moments of `mu`, each row scaled by its
// absolute-moment magnitude. Adopted only if every weight stays positive.
fn raw_polish(
    mu: &DiscreteMeasure,
    support: &[usize],
    current: &[f64],
    m: usize,
    norm_degree: Option<usize>,
) -> Option<Vec<f64>> {
    let basis = enumerate_real(mu.dim(), m).ok()?;
    let nodes: Vec<&[f64]> = support.iter().map(|&k| mu.node(k)).collect();
    let mut a = vandermonde(&basis, nodes.iter().copied()).ok()?;
    let mut target = moments(mu, m).values;
    let mut scale = absolute_moments(mu, m);
    if let Some(n) = norm_degree {
        let extra: Vec<f64> = nodes.iter().map(|x| norm_power(x, n)).collect();
        let rows = a.nrows();
        a = a.insert_row(rows, 0.0);
        let last = a.nrows() - 1;
        for (j, v) in extra.iter().enumerate() {
            a[(last, j)] = *v;
        }
        let g = norm_moment(mu, n);
        // Pin the norm moment to its current value so the inequality cannot worsen.
        let mut s = CompensatedSum::new();
        for (v, w) in extra.iter().zip(current) {
            s.add(v * w);
        }
        target.push(s.value().min(g));
        scale.push(g);
    }
    let mass = mu.total_mass();
    for i in 0..a.nrows() {
        let s = if scale[i] > 0.0 { scale[i] } else { mass };
        a.row_mut(i).scale_mut(1.0 / s);
        target[i] /= s;
    }
    let b = DVector::from_vec(target);
    let x0 = DVector::from_column_slice(current);
    // Solve for a correction to keep the well-determined part of the weights.
    let rhs = &b - &a * &x0;
    let dx = crate::linalg::lstsq(&a, &rhs, 1e-14);
    let x = x0 + dx;
    let floor = ZERO_WEIGHT_FRACTION * mass;
    x.iter().all(|v| v.is_finite() && *v > floor).then(|| x.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64], weights: &[f64]) -> DiscreteMeasure {
        DiscreteMeasure::new(1, points.iter().map(|&x| vec![x]).collect(), weights.to_vec()).unwrap()
    }

    #[test]
    fn dirac_is_fixed() {
        let mu = DiscreteMeasure::dirac(vec![0.3, -1.0], 2.0).unwrap();
        let r = compress(&mu, 4, 1e-9).unwrap();
        assert_eq!(r.rule, mu);
        assert_eq!(r.eliminations, 0);
    }

    #[test]
    fn four_points_degree_one() {
        let mu = line(&[1.0, 2.0, 3.0, 4.0], &[0.25; 4]);
        let r = compress(&mu, 1, 1e-9).unwrap();
        assert_eq!(r.achieved_size, 2);
        let mean: f64 = r.rule.nodes().zip(r.rule.weights()).map(|(x, w)| x[0] * w).sum();
        assert!((r.rule.total_mass() - 1.0).abs() < 1e-14);
        assert!((mean - 2.5).abs() < 1e-14);
    }

    #[test]
    fn degree_zero_keeps_one_atom() {
        let mu = line(&[1.0, 2.0, 3.0], &[0.2, 0.3, 0.5]);
        let r = compress(&mu, 0, 1e-12).unwrap();
        assert_eq!(r.achieved_size, 1);
        assert!((r.rule.weights()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constrained_symmetric_four_points() {
        let mu = line(&[-2.0, -1.0, 1.0, 2.0], &[0.25; 4]);
        let r = compress_constrained(&mu, 2, 1e-9).unwrap();
        assert!(r.achieved_size <= 3);
        assert_eq!(r.size_bound, 3);
        let second: f64 = r.rule.nodes().zip(r.rule.weights()).map(|(x, w)| x[0] * x[0] * w).sum();
        assert!(second <= 2.5 * (1.0 + 1e-9));
    }

    #[test]
    fn grid_negative_mass_is_infeasible() {
        let basis = enumerate_real(1, 2).unwrap();
        let beta = MomentVector::new(basis, vec![-1.0, 0.0, 0.0], None).unwrap();
        let grid = line(&[0.0, 0.5, 1.0], &[1.0; 3]);
        assert!(matches!(represent_on_grid(&beta, &grid, 1e-9), Err(Error::Infeasible(_))));
    }

    #[test]
    fn verify_reports_missing_mass() {
        let mu = line(&[0.0, 1.0], &[0.5, 0.5]);
        let rule = line(&[0.0, 1.0], &[0.4, 0.5]);
        let r = verify_rule(&rule, &mu, 1, None).unwrap();
        assert!((r.absolute[0] - 0.1).abs() < 1e-15);
    }
}
