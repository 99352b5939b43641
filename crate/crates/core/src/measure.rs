//! Finitely atomic measures and their truncated moment data.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_complex, enumerate_real, num_monomials, pair_index, vandermonde, RealBasis};
use crate::linalg::{orthonormal_row_basis, CompensatedSum};
use crate::{Error, Result, C64};

/// Relative singular-value threshold used to decide the dimension of polynomial
/// spaces restricted to a support.
pub const DEFAULT_RANK_TOL: f64 = 1e-11;

/// A positive measure `Σ ρ_k δ_{x_k}` on `R^d` with distinct nodes.
///
/// Points of the complex plane are stored as `(re, im)` with `d = 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "MeasureRepr", try_from = "MeasureRepr")]
pub struct DiscreteMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

// Serialized form: one coordinate list per node, validated on the way in.
#[derive(Serialize, Deserialize)]
struct MeasureRepr {
    dim: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl From<DiscreteMeasure> for MeasureRepr {
    fn from(mu: DiscreteMeasure) -> Self {
        MeasureRepr {
            dim: mu.dim,
            nodes: mu.nodes().map(<[f64]>::to_vec).collect(),
            weights: mu.weights,
        }
    }
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;

    fn try_from(r: MeasureRepr) -> Result<Self> {
        DiscreteMeasure::new(r.dim, r.nodes, r.weights)
    }
}

impl DiscreteMeasure {
    /// Validates and builds a measure; nodes closer than the merge radius are combined.
    pub fn new(dim: usize, nodes: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut coords = Vec::with_capacity(nodes.len() * dim);
        for (row, node) in nodes.iter().enumerate() {
            if node.len() != dim {
                return Err(Error::validation(format!(
                    "node at row {} has dimension {}, expected {dim}",
                    row + 1,
                    node.len()
                )));
            }
            coords.extend_from_slice(node);
        }
        Self::from_flat(dim, coords, weights)
    }

    /// Builds from row-major coordinates (`len = n·dim`).
    pub fn from_flat(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        if coords.len() != weights.len() * dim {
            return Err(Error::validation(format!(
                "{} coordinates do not match {} atoms of dimension {dim}",
                coords.len(),
                weights.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::validation("measure has no atoms"));
        }
        for (k, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::validation(format!("non-finite weight at row {}", k + 1)));
            }
            if w <= 0.0 {
                return Err(Error::validation(format!("nonpositive weight at row {}", k + 1)));
            }
            if coords[k * dim..(k + 1) * dim].iter().any(|c| !c.is_finite()) {
                return Err(Error::validation(format!("non-finite coordinate at row {}", k + 1)));
            }
        }
        Ok(merge_duplicates(dim, coords, weights))
    }

    pub fn dirac(point: Vec<f64>, weight: f64) -> Result<Self> {
        let dim = point.len();
        Self::from_flat(dim, point, vec![weight])
    }

    /// Measure on the complex plane, stored with `d = 2`.
    pub fn from_complex(atoms: &[C64], weights: Vec<f64>) -> Result<Self> {
        let coords = atoms.iter().flat_map(|z| [z.re, z.im]).collect();
        Self::from_flat(2, coords, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of atoms (the cardinality of the support).
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        let mut s = CompensatedSum::new();
        self.weights.iter().for_each(|&w| s.add(w));
        s.value()
    }

    /// Node `k` read as a complex number; requires `d = 2`.
    pub fn complex_node(&self, k: usize) -> C64 {
        let p = self.node(k);
        C64::new(p[0], p[1])
    }

    pub fn complex_nodes(&self) -> Result<Vec<C64>> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim,
            });
        }
        Ok((0..self.len()).map(|k| self.complex_node(k)).collect())
    }

    /// Sub-measure on the given atoms with replacement weights; nodes are copied bitwise.
    pub(crate) fn restrict(&self, atoms: &[usize], weights: Vec<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(atoms.len() * self.dim);
        for &k in atoms {
            coords.extend_from_slice(self.node(k));
        }
        Self::from_flat(self.dim, coords, weights)
    }

    /// Largest absolute coordinate.
    pub fn max_abs_coordinate(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

// Atoms within 1e-12·(1 + max |coordinate|) of one another are folded into a single atom.
fn merge_duplicates(dim: usize, coords: Vec<f64>, weights: Vec<f64>) -> DiscreteMeasure {
    let n = weights.len();
    let scale = coords.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let radius = 1e-12 * (1.0 + scale);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| coords[a * dim].total_cmp(&coords[b * dim]).then(a.cmp(&b)));

    let mut target: Vec<usize> = (0..n).collect();
    for (pos, &a) in order.iter().enumerate() {
        if target[a] != a {
            continue;
        }
        for &b in &order[pos + 1..] {
            if coords[b * dim] - coords[a * dim] > radius {
                break;
            }
            if target[b] != b {
                continue;
            }
            let d2: f64 = (0..dim)
                .map(|c| (coords[a * dim + c] - coords[b * dim + c]).powi(2))
                .sum();
            if d2.sqrt() <= radius {
                target[b] = a;
            }
        }
    }
    if target.iter().enumerate().all(|(k, &t)| k == t) {
        return DiscreteMeasure {
            dim,
            coords,
            weights,
        };
    }
    let mut merged_w = vec![0.0; n];
    for k in 0..n {
        merged_w[target[k]] += weights[k];
    }
    let mut out_c = Vec::new();
    let mut out_w = Vec::new();
    for k in 0..n {
        if target[k] == k {
            out_c.extend_from_slice(&coords[k * dim..(k + 1) * dim]);
            out_w.push(merged_w[k]);
        }
    }
    DiscreteMeasure {
        dim,
        coords: out_c,
        weights: out_w,
    }
}

/// Degree-`n` norm moment `Γ = ∫ ‖x‖ⁿ dμ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormMoment {
    pub degree: usize,
    pub value: f64,
}

/// Real moments `β_i = ∫ t^i dμ` in graded-lex order.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentVector {
    pub basis: RealBasis,
    pub values: Vec<f64>,
    pub norm_moment: Option<NormMoment>,
}

impl MomentVector {
    pub fn new(basis: RealBasis, values: Vec<f64>, norm_moment: Option<NormMoment>) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::validation(format!(
                "moment vector has {} entries, basis of degree {} in {} variables needs {}",
                values.len(),
                basis.degree(),
                basis.dim(),
                basis.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("non-finite moment value"));
        }
        Ok(Self {
            basis,
            values,
            norm_moment,
        })
    }

    pub fn mass(&self) -> f64 {
        self.values[0]
    }
}

/// `β_i = Σ_k ρ_k x_k^i` for every monomial of degree ≤ `m`.
pub fn moments(mu: &DiscreteMeasure, m: usize) -> MomentVector {
    let basis = enumerate_real(mu.dim(), m).expect("measure dimension is positive");
    let values = weighted_monomial_sums(mu, &basis, false);
    MomentVector {
        basis,
        values,
        norm_moment: None,
    }
}

/// `Σ_k ρ_k |x_k^i|`, the natural scale for relative moment residuals.
pub fn absolute_moments(mu: &DiscreteMeasure, m: usize) -> Vec<f64> {
    let basis = enumerate_real(mu.dim(), m).expect("measure dimension is positive");
    weighted_monomial_sums(mu, &basis, true)
}

fn weighted_monomial_sums(mu: &DiscreteMeasure, basis: &RealBasis, absolute: bool) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::new(); basis.len()];
    let mut row = vec![0.0; basis.len()];
    for (node, &w) in mu.nodes().zip(mu.weights()) {
        basis.eval_into(node, &mut row);
        for (a, &v) in acc.iter_mut().zip(&row) {
            a.add(if absolute { w * v.abs() } else { w * v });
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// `‖x‖ⁿ` with the Euclidean norm.
pub fn norm_power(x: &[f64], n: usize) -> f64 {
    let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    r.powi(n as i32)
}

/// `Γ = Σ_k ρ_k ‖x_k‖ⁿ`.
pub fn norm_moment(mu: &DiscreteMeasure, n: usize) -> f64 {
    let mut s = CompensatedSum::new();
    for (node, &w) in mu.nodes().zip(mu.weights()) {
        s.add(w * norm_power(node, n));
    }
    s.value()
}

/// Per-coordinate affine map `u = (x − center) / half` taking the nodes onto `[-1, 1]^d`.
///
/// Polynomial spaces of bounded total degree are invariant under such maps, so ranks and
/// row spaces can be computed on the scaled nodes.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct AffineNormalization {
    pub center: Vec<f64>,
    pub half: Vec<f64>,
}

impl AffineNormalization {
    pub fn of(mu: &DiscreteMeasure) -> Self {
        let d = mu.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for node in mu.nodes() {
            for c in 0..d {
                lo[c] = lo[c].min(node[c]);
                hi[c] = hi[c].max(node[c]);
            }
        }
        let center = (0..d).map(|c| 0.5 * (lo[c] + hi[c])).collect();
        let half = (0..d)
            .map(|c| {
                let h = 0.5 * (hi[c] - lo[c]);
                if h > 0.0 {
                    h
                } else {
                    1.0
                }
            })
            .collect();
        Self { center, half }
    }

    pub fn apply(&self, mu: &DiscreteMeasure) -> Vec<f64> {
        let d = mu.dim();
        mu.nodes()
            .flat_map(|node| (0..d).map(|c| (node[c] - self.center[c]) / self.half[c]).collect::<Vec<_>>())
            .collect()
    }

    /// Moments in the normalized coordinates, `∫ u^a`, from raw moments `∫ x^b` by
    /// binomial expansion of each `((x − center) / half)^a`.
    pub fn transform_moments(&self, basis: &RealBasis, raw: &[f64]) -> Vec<f64> {
        let d = basis.dim();
        let m = basis.degree();
        let binom = binomial_table(m);
        let position: std::collections::HashMap<&[u32], usize> = basis
            .indices()
            .iter()
            .enumerate()
            .map(|(k, idx)| (idx.exponents(), k))
            .collect();
        let mut out = Vec::with_capacity(basis.len());
        let mut b = vec![0u32; d];
        for idx in basis.indices() {
            let a = idx.exponents();
            let mut acc = CompensatedSum::new();
            // Enumerate every b ≤ a componentwise.
            b.iter_mut().for_each(|v| *v = 0);
            loop {
                let mut coef = 1.0;
                for c in 0..d {
                    let (ac, bc) = (a[c] as usize, b[c] as usize);
                    coef *= binom[ac][bc] * (-self.center[c]).powi((ac - bc) as i32) / self.half[c].powi(ac as i32);
                }
                acc.add(coef * raw[position[b.as_slice()]]);
                let mut c = 0;
                while c < d && b[c] == a[c] {
                    b[c] = 0;
                    c += 1;
                }
                if c == d {
                    break;
                }
                b[c] += 1;
            }
            out.push(acc.value());
        }
        out
    }
}

fn binomial_table(n: usize) -> Vec<Vec<f64>> {
    let mut t = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        t[i][0] = 1.0;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
        }
    }
    t
}

/// Evaluation matrix of the degree-`m` basis on the normalized nodes of `mu`.
pub(crate) fn normalized_vandermonde(mu: &DiscreteMeasure, m: usize) -> DMatrix<f64> {
    let basis = enumerate_real(mu.dim(), m).expect("measure dimension is positive");
    let coords = AffineNormalization::of(mu).apply(mu);
    vandermonde(&basis, coords.chunks_exact(mu.dim())).expect("dimensions agree")
}

/// `N_{m,d;μ}`: dimension of degree-`m` polynomials restricted to the support of `mu`,
/// taken as the numerical rank of the evaluation matrix at relative tolerance `tol`.
pub fn support_dimension(mu: &DiscreteMeasure, m: usize, tol: f64) -> usize {
    let v = normalized_vandermonde(mu, m);
    let r = orthonormal_row_basis(&v, tol).nrows();
    r.min(num_monomials(mu.dim(), m)).min(mu.len())
}

/// Complex moments `γ_ij = ∫ z̄^i z^j dμ` for `i + j ≤ n_total`, stored in pair-basis order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMomentSequence {
    n_total: usize,
    gamma: Vec<C64>,
}

impl ComplexMomentSequence {
    /// Builds from explicit entries; each missing pair is filled from its conjugate partner.
    pub fn from_entries<I>(n_total: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let size = crate::basis::num_pairs(n_total);
        let mut slots: Vec<Option<C64>> = vec![None; size];
        for (i, j, v) in entries {
            if i + j > n_total {
                return Err(Error::validation(format!(
                    "gamma[{i},{j}] exceeds total degree {n_total}"
                )));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::validation(format!("non-finite gamma[{i},{j}]")));
            }
            let slot = &mut slots[pair_index(i, j)];
            if let Some(old) = slot {
                if (*old - v).norm() > 1e-12 * (1.0 + v.norm()) {
                    return Err(Error::validation(format!("conflicting values for gamma[{i},{j}]")));
                }
            }
            *slot = Some(v);
        }
        let mut gamma = Vec::with_capacity(size);
        for &(i, j) in enumerate_complex(n_total).pairs() {
            let own = slots[pair_index(i, j)];
            let mirror = slots[pair_index(j, i)].map(|c| c.conj());
            let v = match (own, mirror) {
                (Some(a), Some(b)) => {
                    if (a - b).norm() > 1e-10 * (1.0 + a.norm()) {
                        return Err(Error::validation(format!(
                            "gamma[{i},{j}] is not the conjugate of gamma[{j},{i}]"
                        )));
                    }
                    a
                }
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => return Err(Error::MissingMoment { i, j }),
            };
            gamma.push(v);
        }
        let g00 = gamma[0];
        if g00.re <= 0.0 || g00.im.abs() > 1e-12 * g00.re.abs().max(1.0) {
            return Err(Error::validation("gamma[0,0] must be real and positive"));
        }
        Ok(Self { n_total, gamma })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Order `n` of the moment matrix `M(n)` this sequence determines.
    pub fn order(&self) -> usize {
        self.n_total / 2
    }

    pub fn get(&self, i: usize, j: usize) -> Option<C64> {
        (i + j <= self.n_total).then(|| self.gamma[pair_index(i, j)])
    }

    /// Values in pair-basis order.
    pub fn values(&self) -> &[C64] {
        &self.gamma
    }

    /// Keeps moments of total degree ≤ `n_total`.
    pub fn truncate(&self, n_total: usize) -> Self {
        let n_total = n_total.min(self.n_total);
        Self {
            n_total,
            gamma: self.gamma[..crate::basis::num_pairs(n_total)].to_vec(),
        }
    }
}

/// `γ_ij = Σ_k ρ_k conj(z_k)^i z_k^j` for a measure on `C ≅ R²`.
pub fn complex_moments(mu: &DiscreteMeasure, n_total: usize) -> Result<ComplexMomentSequence> {
    let atoms = mu.complex_nodes()?;
    let pairs = enumerate_complex(n_total);
    let mut re = vec![CompensatedSum::new(); pairs.len()];
    let mut im = vec![CompensatedSum::new(); pairs.len()];
    let mut zpow = vec![C64::new(1.0, 0.0); n_total + 1];
    let mut zbpow = vec![C64::new(1.0, 0.0); n_total + 1];
    for (z, &w) in atoms.iter().zip(mu.weights()) {
        for p in 1..=n_total {
            zpow[p] = zpow[p - 1] * z;
            zbpow[p] = zbpow[p - 1] * z.conj();
        }
        for (k, &(i, j)) in pairs.pairs().iter().enumerate() {
            let v = zbpow[i] * zpow[j] * w;
            re[k].add(v.re);
            im[k].add(v.im);
        }
    }
    let mut gamma: Vec<C64> = re
        .iter()
        .zip(&im)
        .map(|(r, i)| C64::new(r.value(), i.value()))
        .collect();
    // Hermitian symmetry is exact by construction on the diagonal pairs.
    for &(i, j) in pairs.pairs() {
        if i == j {
            gamma[pair_index(i, j)].im = 0.0;
        }
    }
    Ok(ComplexMomentSequence { n_total, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

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
    fn norm_moments() {
        let origin = DiscreteMeasure::dirac(vec![0.0, 0.0], 2.0).unwrap();
        for n in 1..5 {
            assert_eq!(norm_moment(&origin, n), 0.0);
        }
        let mu = DiscreteMeasure::new(
            1,
            vec![vec![-2.0], vec![-1.0], vec![1.0], vec![2.0]],
            vec![0.25; 4],
        )
        .unwrap();
        assert!((norm_moment(&mu, 2) - 2.5).abs() < 1e-15);
        let mu = DiscreteMeasure::dirac(vec![3.0, 4.0], 1.0).unwrap();
        assert_eq!(norm_moment(&mu, 1), 5.0);
    }

    #[test]
    fn validation_errors() {
        let err = DiscreteMeasure::new(1, vec![vec![0.0]], vec![-1.0]).unwrap_err();
        assert_eq!(err.to_string(), "nonpositive weight at row 1");
        let err = DiscreteMeasure::new(1, vec![vec![0.0], vec![1.0]], vec![1.0, 0.0]).unwrap_err();
        assert_eq!(err.to_string(), "nonpositive weight at row 2");
        assert!(DiscreteMeasure::new(1, vec![vec![f64::NAN]], vec![1.0]).is_err());
        assert!(DiscreteMeasure::new(1, vec![vec![0.0]], vec![f64::INFINITY]).is_err());
        assert!(DiscreteMeasure::new(2, vec![vec![0.0]], vec![1.0]).is_err());
    }

    #[test]
    fn duplicates_merge() {
        let mu = DiscreteMeasure::new(2, vec![vec![1.0, 2.0], vec![1.0, 2.0]], vec![0.4, 0.6]).unwrap();
        assert_eq!(mu.len(), 1);
        assert!((mu.weights()[0] - 1.0).abs() < 1e-15);
        assert_eq!(mu.node(0), &[1.0, 2.0]);

        let mu = DiscreteMeasure::new(
            1,
            vec![vec![5.0], vec![1.0], vec![5.0 + 1e-14], vec![2.0]],
            vec![1.0, 1.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(mu.len(), 3);
        assert_eq!(mu.node(0), &[5.0]);
        assert_eq!(mu.weights(), &[2.0, 1.0, 1.0]);
    }

    #[test]
    fn support_dimensions() {
        let single = DiscreteMeasure::dirac(vec![0.3, -0.2], 1.0).unwrap();
        for m in 0..5 {
            assert_eq!(support_dimension(&single, m, DEFAULT_RANK_TOL), 1);
        }
        let line = DiscreteMeasure::new(
            2,
            vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![2.0, 2.0]],
            vec![1.0; 3],
        )
        .unwrap();
        assert_eq!(support_dimension(&line, 1, DEFAULT_RANK_TOL), 2);
        assert_eq!(support_dimension(&line, 2, DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn complex_moment_examples() {
        let mu = DiscreteMeasure::from_complex(&[C64::new(0.0, 0.0)], vec![2.5]).unwrap();
        let g = complex_moments(&mu, 4).unwrap();
        assert_eq!(g.get(0, 0), Some(C64::new(2.5, 0.0)));
        assert!(g.values()[1..].iter().all(|v| v.norm() == 0.0));

        let mu = DiscreteMeasure::from_complex(&[C64::new(1.0, 0.0)], vec![1.0]).unwrap();
        let g = complex_moments(&mu, 4).unwrap();
        assert!(g.values().iter().all(|v| *v == C64::new(1.0, 0.0)));

        let mu = DiscreteMeasure::from_complex(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)], vec![0.5, 0.5])
            .unwrap();
        let g = complex_moments(&mu, 4).unwrap();
        for &(i, j) in enumerate_complex(4).pairs() {
            let expect = (1.0 + (-1f64).powi((i + j) as i32)) / 2.0;
            assert_eq!(g.get(i, j).unwrap(), C64::new(expect, 0.0));
        }
    }

    #[test]
    fn complex_moments_need_plane() {
        let mu = DiscreteMeasure::dirac(vec![1.0], 1.0).unwrap();
        assert!(matches!(complex_moments(&mu, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn sequence_from_upper_entries() {
        let entries = vec![
            (0, 0, C64::new(1.0, 0.0)),
            (0, 1, C64::new(0.5, 0.25)),
            (0, 2, C64::new(0.1, 0.0)),
            (1, 1, C64::new(0.3, 0.0)),
        ];
        let g = ComplexMomentSequence::from_entries(2, entries.clone()).unwrap();
        assert_eq!(g.get(1, 0), Some(C64::new(0.5, -0.25)));
        assert_eq!(g.get(2, 0), Some(C64::new(0.1, 0.0)));
        let err = ComplexMomentSequence::from_entries(2, entries[..3].to_vec()).unwrap_err();
        assert!(matches!(err, Error::MissingMoment { i: 1, j: 1 }));
    }

    #[test]
    fn normalized_moments_match_direct_evaluation() {
        let mu = DiscreteMeasure::new(
            2,
            vec![vec![3.0, -1.0], vec![4.5, 0.25], vec![3.7, 2.0], vec![5.0, -0.5]],
            vec![0.3, 0.2, 0.4, 0.1],
        )
        .unwrap();
        let norm = AffineNormalization::of(&mu);
        let scaled = DiscreteMeasure::from_flat(2, norm.apply(&mu), mu.weights().to_vec()).unwrap();
        let raw = moments(&mu, 4);
        let got = norm.transform_moments(&raw.basis, &raw.values);
        let expect = moments(&scaled, 4).values;
        assert!(close(&got, &expect, 1e-12));
    }

    #[test]
    fn moment_linearity() {
        let a = DiscreteMeasure::new(2, vec![vec![0.1, 0.7], vec![-0.4, 0.2]], vec![0.3, 1.1]).unwrap();
        let b = DiscreteMeasure::new(2, vec![vec![0.9, -0.3]], vec![0.6]).unwrap();
        let ab = DiscreteMeasure::new(
            2,
            vec![vec![0.1, 0.7], vec![-0.4, 0.2], vec![0.9, -0.3]],
            vec![0.3, 1.1, 0.6],
        )
        .unwrap();
        let sum: Vec<f64> = moments(&a, 4)
            .values
            .iter()
            .zip(&moments(&b, 4).values)
            .map(|(x, y)| x + y)
            .collect();
        assert!(close(&sum, &moments(&ab, 4).values, 1e-15));
    }
}
