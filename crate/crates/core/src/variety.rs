//! Zeros of `p(z, z̄) = z^k − q(z, z̄)` with `deg q < k`.
//!
//! The search covers the square `[−R, R]²` around the disk `|z| ≤ R` that must contain
//! every zero. Cells are subdivided and discarded when a Taylor bound proves `p` has no
//! zero in them; the cells left undecided at the finest level seed a damped Newton
//! iteration on `(Re p, Im p)`. Undecided cells that end up without a nearby zero are
//! refined further and, failing that, reported in the coverage audit.

use serde::Serialize;

use crate::{Error, Result, C64};

/// Default residual tolerance for accepting a zero: `|p(z)| ≤ tol · max(1, |z|)^k`.
pub const DEFAULT_ROOT_TOL: f64 = 1e-9;

// Levels of extra subdivision applied to undecided cells that contain no zero.
const EXTRA_DEPTH: u32 = 10;
const MAX_CELLS: usize = 2_000_000;
const NEWTON_ITERS: usize = 80;

/// `p(z, z̄) = z^k − Σ c_ij z̄^i z^j` with every `i + j < k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticPoly {
    k: usize,
    /// `(i, j, c_ij)` terms of `q`, one per index pair.
    terms: Vec<(usize, usize, C64)>,
}

impl AnalyticPoly {
    /// Builds `z^k − q`; repeated `(i, j)` terms are summed.
    pub fn new(k: usize, terms: Vec<(usize, usize, C64)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::validation("leading degree k must be at least 1"));
        }
        let mut merged: Vec<(usize, usize, C64)> = Vec::new();
        for (i, j, c) in terms {
            if i + j >= k {
                return Err(Error::validation(format!(
                    "term z̄^{i} z^{j} has degree {} but q must have degree below k = {k}",
                    i + j
                )));
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::validation(format!("non-finite coefficient for ({i}, {j})")));
            }
            match merged.iter_mut().find(|t| t.0 == i && t.1 == j) {
                Some(t) => t.2 += c,
                None => merged.push((i, j, c)),
            }
        }
        merged.sort_by_key(|t| (t.0 + t.1, t.0));
        Ok(Self { k, terms: merged })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[(usize, usize, C64)] {
        &self.terms
    }

    pub fn eval(&self, z: C64) -> C64 {
        let zb = z.conj();
        let mut q = C64::new(0.0, 0.0);
        for &(i, j, c) in &self.terms {
            q += c * zb.powu(i as u32) * z.powu(j as u32);
        }
        z.powu(self.k as u32) - q
    }

    // Value with the Wirtinger derivatives ∂p/∂z and ∂p/∂z̄.
    fn eval_with_derivatives(&self, z: C64) -> (C64, C64, C64) {
        let zb = z.conj();
        let k = self.k as u32;
        let mut p = z.powu(k);
        let mut pz = z.powu(k - 1) * k as f64;
        let mut pzb = C64::new(0.0, 0.0);
        for &(i, j, c) in &self.terms {
            let (i, j) = (i as u32, j as u32);
            p -= c * zb.powu(i) * z.powu(j);
            if j > 0 {
                pz -= c * zb.powu(i) * z.powu(j - 1) * j as f64;
            }
            if i > 0 {
                pzb -= c * zb.powu(i - 1) * z.powu(j) * i as f64;
            }
        }
        (p, pz, pzb)
    }

    // Coefficients of p in the monomials z̄^i z^j, as a dense (k+1)×(k+1) table.
    fn dense(&self) -> Vec<Vec<C64>> {
        let k = self.k;
        let mut t = vec![vec![C64::new(0.0, 0.0); k + 1]; k + 1];
        t[0][k] = C64::new(1.0, 0.0);
        for &(i, j, c) in &self.terms {
            t[i][j] -= c;
        }
        t
    }
}

/// `k²`, the largest possible number of distinct zeros.
pub fn root_count_bound(k: usize) -> usize {
    k * k
}

/// `R = max(1, Σ |c_ij|) + 1`; every zero satisfies `|z| ≤ R`.
pub fn apriori_radius(p: &AnalyticPoly) -> f64 {
    let s: f64 = p.terms.iter().map(|t| t.2.norm()).sum();
    s.max(1.0) + 1.0
}

/// How much of the search square was decided by the exclusion test.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CoverageAudit {
    pub base_depth: u32,
    pub cells_examined: usize,
    pub excluded: usize,
    /// Finest-level cells the exclusion test could not discard.
    pub undecided: usize,
    /// Undecided cells, after extra refinement, with no reported zero nearby.
    pub unexplained: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSet {
    /// Distinct zeros sorted by real part, then imaginary part.
    pub roots: Vec<C64>,
    /// `|p(z)|` at each zero.
    pub residuals: Vec<f64>,
    pub box_radius: f64,
    pub audit: CoverageAudit,
    pub warnings: Vec<String>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

#[derive(Clone, Copy)]
struct Cell {
    center: C64,
    half: f64,
    depth: u32,
}

impl Cell {
    fn children(&self) -> [Cell; 4] {
        let h = self.half / 2.0;
        let d = self.depth + 1;
        [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)].map(|(sx, sy)| Cell {
            center: self.center + C64::new(sx * h, sy * h),
            half: h,
            depth: d,
        })
    }

    // Radius of the disk circumscribing the cell.
    fn radius(&self) -> f64 {
        self.half * std::f64::consts::SQRT_2
    }
}

// Binomial table up to n.
fn binomials(n: usize) -> Vec<Vec<f64>> {
    let mut b = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = 1.0;
        for j in 1..=i {
            b[i][j] = b[i - 1][j - 1] + b[i - 1][j];
        }
    }
    b
}

struct Excluder {
    k: usize,
    dense: Vec<Vec<C64>>,
    binom: Vec<Vec<f64>>,
}

impl Excluder {
    // True when |d_00| exceeds the bound on every other Taylor term over the cell's disk,
    // which rules out a zero anywhere in the cell.
    fn excludes(&self, cell: &Cell) -> bool {
        let k = self.k;
        let c = cell.center;
        let cb = c.conj();
        let mut cp = vec![C64::new(1.0, 0.0); k + 1];
        let mut cbp = vec![C64::new(1.0, 0.0); k + 1];
        for e in 1..=k {
            cp[e] = cp[e - 1] * c;
            cbp[e] = cbp[e - 1] * cb;
        }
        let r = cell.radius();
        let mut rp = vec![1.0; k + 1];
        for e in 1..=k {
            rp[e] = rp[e - 1] * r;
        }
        let mut d00 = 0.0;
        let mut tail = 0.0;
        for s in 0..=k {
            for t in 0..=(k - s) {
                let mut d = C64::new(0.0, 0.0);
                for i in s..=k {
                    for j in t..=(k - i) {
                        let a = self.dense[i][j];
                        if a.re == 0.0 && a.im == 0.0 {
                            continue;
                        }
                        d += a * cbp[i - s] * cp[j - t] * (self.binom[i][s] * self.binom[j][t]);
                    }
                }
                if s == 0 && t == 0 {
                    d00 = d.norm();
                } else {
                    tail += d.norm() * rp[s + t];
                }
            }
        }
        // A small margin absorbs rounding in the coefficient sums.
        d00 > tail * (1.0 + 1e-12) + 1e-300
    }
}

fn newton(p: &AnalyticPoly, start: C64, limit: f64) -> Option<C64> {
    let mut z = start;
    let (mut f, mut a, mut b) = p.eval_with_derivatives(z);
    for _ in 0..NEWTON_ITERS {
        let fnorm = f.norm();
        if fnorm == 0.0 {
            return Some(z);
        }
        // Real Jacobian of (Re p, Im p) in (x, y); determinant |a|² − |b|².
        let j11 = a.re + b.re;
        let j12 = -a.im + b.im;
        let j21 = a.im + b.im;
        let j22 = a.re - b.re;
        let det = j11 * j22 - j12 * j21;
        let scale = a.norm_sqr() + b.norm_sqr();
        if scale == 0.0 {
            return None;
        }
        let (dx, dy) = if det.abs() > 1e-10 * scale {
            ((-j22 * f.re + j12 * f.im) / det, (j21 * f.re - j11 * f.im) / det)
        } else {
            // Levenberg–Marquardt step near the critical curve.
            let lam = 1e-8 * scale;
            let (g1, g2) = (j11 * f.re + j21 * f.im, j12 * f.re + j22 * f.im);
            let (h11, h12, h22) = (
                j11 * j11 + j21 * j21 + lam,
                j11 * j12 + j21 * j22,
                j12 * j12 + j22 * j22 + lam,
            );
            let hd = h11 * h22 - h12 * h12;
            ((-h22 * g1 + h12 * g2) / hd, (h12 * g1 - h11 * g2) / hd)
        };
        let step = C64::new(dx, dy);
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = z + step * alpha;
            let (fc, ac, bc) = p.eval_with_derivatives(cand);
            if fc.norm() < fnorm {
                z = cand;
                f = fc;
                a = ac;
                b = bc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            break;
        }
        if step.norm() * alpha <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            break;
        }
        if z.norm() > 4.0 * limit {
            return None;
        }
    }
    Some(z)
}

/// Locates the distinct zeros of `p`.
///
/// Every returned zero satisfies `|p(z)| ≤ tol · max(1, |z|)^k`; points closer than
/// `1e-8 · R` are reported once.
pub fn find_roots(p: &AnalyticPoly, tol: f64) -> Result<RootSet> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::validation(format!("tolerance must be positive, got {tol}")));
    }
    let k = p.k;
    let radius = apriori_radius(p);
    let pitch = radius / (8.0 * (k * k) as f64);
    let base_depth = (2.0 * radius / pitch).log2().ceil() as u32;
    let excluder = Excluder {
        k,
        dense: p.dense(),
        binom: binomials(k),
    };
    let dedup = 1e-8 * radius;
    let mut audit = CoverageAudit {
        base_depth,
        ..Default::default()
    };
    let mut warnings = Vec::new();

    let root_cell = Cell {
        center: C64::new(0.0, 0.0),
        half: radius,
        depth: 0,
    };
    let leaves = subdivide(&excluder, root_cell, base_depth, &mut audit);
    audit.undecided = leaves.len();

    let mut found: Vec<(C64, f64)> = Vec::new();
    let accept = |z: C64| -> Option<f64> {
        let r = p.eval(z).norm();
        (z.norm() <= radius * (1.0 + 1e-9) && r <= tol * z.norm().max(1.0).powi(k as i32)).then_some(r)
    };
    let add = |found: &mut Vec<(C64, f64)>, z: C64, r: f64| {
        match found.iter_mut().find(|(w, _)| (w - z).norm() <= dedup) {
            Some(slot) => {
                if r < slot.1 {
                    *slot = (z, r);
                }
            }
            None => found.push((z, r)),
        }
    };
    for cell in &leaves {
        if let Some(z) = newton(p, cell.center, radius) {
            if let Some(r) = accept(z) {
                add(&mut found, z, r);
            }
        }
    }

    // Undecided cells with no zero in their disk get a closer look.
    let near_root = |found: &[(C64, f64)], cell: &Cell| {
        found
            .iter()
            .any(|(z, _)| (z - cell.center).norm() <= cell.radius() * 1.5 + dedup)
    };
    let suspects: Vec<Cell> = leaves.iter().filter(|c| !near_root(&found, c)).copied().collect();
    let mut unexplained = 0;
    for cell in suspects {
        if near_root(&found, &cell) {
            continue;
        }
        let deep = subdivide(&excluder, cell, base_depth + EXTRA_DEPTH, &mut audit);
        for d in &deep {
            if let Some(z) = newton(p, d.center, radius) {
                if let Some(r) = accept(z) {
                    add(&mut found, z, r);
                }
            }
        }
        unexplained += deep.iter().filter(|d| !near_root(&found, d)).count();
        if audit.cells_examined > MAX_CELLS {
            warnings.push(format!("cell budget of {MAX_CELLS} exhausted; coverage is incomplete"));
            break;
        }
    }
    audit.unexplained = unexplained;
    if unexplained > 0 {
        warnings.push(format!(
            "{unexplained} cells could neither be excluded nor matched to a zero; some zeros may be missing"
        ));
    }
    if found.len() > root_count_bound(k) {
        warnings.push(format!(
            "{} zeros found, more than the bound {}; the dedup radius is likely too small",
            found.len(),
            root_count_bound(k)
        ));
    }

    found.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(RootSet {
        roots: found.iter().map(|f| f.0).collect(),
        residuals: found.iter().map(|f| f.1).collect(),
        box_radius: radius,
        audit,
        warnings,
    })
}

fn subdivide(ex: &Excluder, start: Cell, max_depth: u32, audit: &mut CoverageAudit) -> Vec<Cell> {
    let mut stack = vec![start];
    let mut leaves = Vec::new();
    while let Some(cell) = stack.pop() {
        audit.cells_examined += 1;
        if ex.excludes(&cell) {
            audit.excluded += 1;
            continue;
        }
        if cell.depth >= max_depth {
            leaves.push(cell);
        } else {
            stack.extend(cell.children());
        }
    }
    leaves
}

/// Classical examples `z^k − q` meant to have `k²` zeros, for `k = 2, …, 5`.
///
/// `k = 2` is `z² − z̄`; `k = 3, 4, 5` are `q₃, q₄, q₅` in their usual quoted form.
/// As quoted, `q₄` has 8 distinct zeros rather than 16.
pub fn sharp_example(k: usize) -> Option<AnalyticPoly> {
    let c = |re: f64| C64::new(re, 0.0);
    let terms = match k {
        2 => vec![(1, 0, c(1.0))],
        3 => vec![(0, 2, c(-1.0)), (0, 1, c(-1.0)), (2, 0, c(2.0)), (1, 0, c(2.0))],
        4 => vec![(0, 2, c(-3.0)), (0, 1, c(1.0)), (3, 0, c(3.0)), (2, 0, c(3.0))],
        5 => vec![
            (0, 3, c(-5.0)),
            (0, 2, c(10.0)),
            (0, 1, c(-5.0)),
            (4, 0, c(-5.0)),
            (3, 0, c(5.0)),
        ],
        _ => return None,
    };
    Some(AnalyticPoly::new(k, terms).expect("preset terms are valid"))
}
