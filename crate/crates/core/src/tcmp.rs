//! Complex moment matrices `M(n)(γ)` in one complex variable.
//!
//! Rows and columns are labelled by the monomials `z̄^i z^j`, `i + j ≤ n`, in the order of
//! [`ComplexPairBasis`]. The entry in row `(k, l)` and column `(i, j)` is
//! `γ_{i+l, j+k} = ∫ (z̄^i z^j) · conj(z̄^k z^l) dμ`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::basis::{enumerate_complex, num_pairs, pair_index, ComplexPairBasis};
use crate::linalg::{complex_eigenvalues, hermitian_eigen, lstsq_complex, nnls};
use crate::measure::{complex_moments, ComplexMomentSequence, DiscreteMeasure};
use crate::variety::{find_roots, AnalyticPoly, DEFAULT_ROOT_TOL};
use crate::{BoundKind, Error, Result, C64};

/// Tolerances for moment-matrix analysis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Relative rank threshold; `None` selects `size · ε · σ_max`.
    pub rank: Option<f64>,
    /// Relative residual for column relations, PSD checks, and reproduction of `γ`.
    pub residual: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rank: None,
            residual: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn with_residual(residual: f64) -> Self {
        Self {
            residual,
            ..Self::default()
        }
    }

    fn rank_threshold(&self, size: usize, smax: f64) -> f64 {
        match self.rank {
            Some(r) => r * smax,
            None => size as f64 * f64::EPSILON * smax,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    n: usize,
    basis: ComplexPairBasis,
    entries: DMatrix<C64>,
}

/// Assembles `M(n)` from `γ^(2n)`; an odd `n_total` uses its even part.
pub fn build_moment_matrix(gamma: &ComplexMomentSequence) -> Result<MomentMatrix> {
    let n = gamma.order();
    let basis = enumerate_complex(n);
    let size = basis.len();
    let mut entries = DMatrix::zeros(size, size);
    for (r, &(k, l)) in basis.pairs().iter().enumerate() {
        for (c, &(i, j)) in basis.pairs().iter().enumerate() {
            let (a, b) = (i + l, j + k);
            entries[(r, c)] = gamma.get(a, b).ok_or(Error::MissingMoment { i: a, j: b })?;
        }
    }
    Ok(MomentMatrix { n, basis, entries })
}

impl MomentMatrix {
    /// Wraps an explicit matrix, checking its shape and Hermitian symmetry.
    pub fn from_entries(n: usize, entries: DMatrix<C64>) -> Result<Self> {
        let size = num_pairs(n);
        if entries.shape() != (size, size) {
            return Err(Error::DimensionMismatch {
                expected: size,
                found: entries.nrows(),
            });
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let asym = (&entries - entries.adjoint()).iter().fold(0.0f64, |m, v| m.max(v.norm()));
        if asym > 1e-13 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::validation("moment matrix is not Hermitian"));
        }
        Ok(Self {
            n,
            basis: enumerate_complex(n),
            entries,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &ComplexPairBasis {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// The leading block `M(m)` for `m ≤ n`.
    pub fn principal(&self, m: usize) -> DMatrix<C64> {
        let s = num_pairs(m.min(self.n));
        self.entries.view((0, 0), (s, s)).into_owned()
    }

    /// Column of the monomial `z̄^i z^j`.
    pub fn column(&self, i: usize, j: usize) -> Option<DVector<C64>> {
        self.basis.index_of(i, j).map(|c| self.entries.column(c).into_owned())
    }
}

/// Eigenvalue summary of a Hermitian matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub is_psd: bool,
    pub rank: usize,
    pub min_eigenvalue: f64,
    pub max_abs_eigenvalue: f64,
    /// Absolute rank threshold that was applied.
    pub rank_threshold: f64,
    /// Eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

/// PSD test and numerical rank of a Hermitian matrix.
pub fn spectrum(m: &DMatrix<C64>, tol: &Tolerance) -> Spectrum {
    let eig = hermitian_eigen(m);
    let smax = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    spectrum_with_threshold(eig.values, smax, tol.rank_threshold(m.nrows(), smax), tol)
}

fn spectrum_with_threshold(values: Vec<f64>, smax: f64, threshold: f64, tol: &Tolerance) -> Spectrum {
    let min = values.last().copied().unwrap_or(0.0);
    Spectrum {
        is_psd: min >= -tol.residual * smax,
        rank: values.iter().filter(|v| v.abs() > threshold).count(),
        min_eigenvalue: min,
        max_abs_eigenvalue: smax,
        rank_threshold: threshold,
        eigenvalues: values,
    }
}

pub fn psd_and_rank(m: &MomentMatrix, tol: &Tolerance) -> Spectrum {
    spectrum(&m.entries, tol)
}

/// Outcome of the recursiveness test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursiveCheck {
    pub holds: bool,
    /// Dimension of the space of column relations of degree ≤ n − 1.
    pub relations: usize,
    /// Largest `‖M · (z p)‖` or `‖M · (z̄ p)‖` over unit relations `p`.
    pub violation: f64,
    pub threshold: f64,
    /// A relation `p` (coefficients in pair order, degree ≤ n − 1) whose shift fails.
    pub witness: Option<Vec<C64>>,
}

/// Checks that every column relation `p(Z, Z̄) = 0` with `deg p ≤ n − 1` survives
/// multiplication by `z` and by `z̄`.
pub fn is_recursively_generated(m: &MomentMatrix, tol: &Tolerance) -> RecursiveCheck {
    let vacuous = RecursiveCheck {
        holds: true,
        relations: 0,
        violation: 0.0,
        threshold: 0.0,
        witness: None,
    };
    if m.n == 0 {
        return vacuous;
    }
    let size = m.size();
    let lo = num_pairs(m.n - 1);
    let slab = m.entries.columns(0, lo).into_owned();
    let smax = singular_values_c(&m.entries).first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return vacuous;
    }
    let tau = tol.rank_threshold(size, smax);

    let svd = slab.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let null: Vec<DVector<C64>> = (0..lo)
        .filter(|&k| k >= svd.singular_values.len() || svd.singular_values[k] <= tau)
        .map(|k| v_t.row(k).adjoint())
        .collect();
    if null.is_empty() {
        return RecursiveCheck {
            threshold: tau,
            ..vacuous
        };
    }

    let shift = |p: &DVector<C64>, dz: usize, dzb: usize| -> DVector<C64> {
        let mut out = DVector::zeros(size);
        for (c, &(i, j)) in m.basis.pairs()[..lo].iter().enumerate() {
            out[pair_index(i + dzb, j + dz)] += p[c];
        }
        out
    };
    // An exact relation is only known to within the rank threshold, so its shifts can
    // pick up errors of order sqrt(τ·σ_max).
    let threshold = (tol.residual * smax).max(100.0 * (tau * smax).sqrt());
    let mut worst = 0.0;
    let mut witness = None;
    for p in &null {
        for (dz, dzb) in [(1, 0), (0, 1)] {
            let v = (&m.entries * shift(p, dz, dzb)).norm();
            if v > worst {
                worst = v;
                witness = Some(p.iter().copied().collect::<Vec<_>>());
            }
        }
    }
    let holds = worst <= threshold;
    RecursiveCheck {
        holds,
        relations: null.len(),
        violation: worst,
        threshold,
        witness: if holds { None } else { witness },
    }
}

fn singular_values_c(m: &DMatrix<C64>) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Ranks of `M(n)` and `M(n − 1)` under a single threshold.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Flatness {
    pub psd: bool,
    pub rank: usize,
    pub lower_rank: usize,
    pub rank_threshold: f64,
}

impl Flatness {
    pub fn is_flat(&self) -> bool {
        self.psd && self.rank == self.lower_rank
    }
}

pub fn flatness(gamma: &ComplexMomentSequence, tol: &Tolerance) -> Result<Flatness> {
    let m = build_moment_matrix(gamma)?;
    if m.n == 0 {
        return Err(Error::validation("flatness needs moments of total degree at least 2"));
    }
    Ok(flatness_of(&m, tol))
}

fn flatness_of(m: &MomentMatrix, tol: &Tolerance) -> Flatness {
    let full = spectrum(&m.entries, tol);
    let lower_eig = hermitian_eigen(&m.principal(m.n - 1));
    let lower = spectrum_with_threshold(lower_eig.values, full.max_abs_eigenvalue, full.rank_threshold, tol);
    Flatness {
        psd: full.is_psd,
        rank: full.rank,
        lower_rank: lower.rank,
        rank_threshold: full.rank_threshold,
    }
}

pub fn is_flat(gamma: &ComplexMomentSequence, tol: &Tolerance) -> Result<bool> {
    Ok(flatness(gamma, tol)?.is_flat())
}

/// Recovers the unique `rank M(n)`-atomic representing measure of flat data.
///
/// `M(n) = W^* W` with `W` of full row rank `r`; the multiplication operator `X` with
/// `X W_p = W_{z p}` for every column `p` of degree ≤ n − 1 has the atoms as its
/// eigenvalues. Weights come from the degree-≤ n Vandermonde system.
pub fn extract_atoms_flat(gamma: &ComplexMomentSequence, tol: &Tolerance) -> Result<DiscreteMeasure> {
    let m = build_moment_matrix(gamma)?;
    if m.n == 0 {
        return Err(Error::validation("extraction needs moments of total degree at least 2"));
    }
    let flat = flatness_of(&m, tol);
    if !flat.is_flat() {
        return Err(Error::NotFlat {
            rank: flat.rank,
            lower_rank: flat.lower_rank,
            psd: flat.psd,
        });
    }
    let r = flat.rank;
    let eig = hermitian_eigen(&m.entries);
    let size = m.size();
    let mut w = DMatrix::<C64>::zeros(r, size);
    for t in 0..r {
        let s = eig.values[t].max(0.0).sqrt();
        for c in 0..size {
            w[(t, c)] = eig.vectors[(c, t)].conj() * s;
        }
    }

    let lo = num_pairs(m.n - 1);
    let shifted: Vec<usize> = m.basis.pairs()[..lo].iter().map(|&(i, j)| pair_index(i, j + 1)).collect();
    let w_lo = w.columns(0, lo).into_owned();
    let w_z = w.select_columns(&shifted);
    // X = W_z W_lo^+ through an SVD of W_lo.
    let svd = w_lo.svd(true, true);
    let cutoff = 1e-13 * svd.singular_values.max();
    let pinv = svd
        .pseudo_inverse(cutoff)
        .map_err(|e| Error::Conditioning(format!("pseudo-inverse failed: {e}")))?;
    let x = w_z * pinv;
    let raw = complex_eigenvalues(&x)?;

    let scale = raw.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let radius = 1e-8 * (1.0 + scale);
    let mut atoms: Vec<C64> = Vec::with_capacity(raw.len());
    for z in raw {
        if atoms.iter().all(|a| (a - z).norm() > radius) {
            atoms.push(z);
        }
    }
    atoms.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let weights = vandermonde_weights(gamma, m.n, &atoms);
    let g00 = gamma.get(0, 0).expect("gamma[0,0] exists").re;
    for (index, &weight) in weights.iter().enumerate() {
        if weight < 1e-10 * g00 {
            return Err(Error::NonPositiveWeight { index, weight });
        }
    }
    let mu = DiscreteMeasure::from_complex(&atoms, weights)?;
    let residual = gamma_residual(&mu, gamma)?;
    if residual > tol.residual {
        return Err(Error::ResidualNotMet {
            best: residual,
            tol: tol.residual,
        });
    }
    Ok(mu)
}

// Least squares Σ ρ_k z̄_k^i z_k^j = γ_ij over pairs i + j ≤ n; returns Re ρ.
fn vandermonde_weights(gamma: &ComplexMomentSequence, n: usize, atoms: &[C64]) -> Vec<f64> {
    let pairs = enumerate_complex(n);
    let mut v = DMatrix::<C64>::zeros(pairs.len(), atoms.len());
    for (r, &(i, j)) in pairs.pairs().iter().enumerate() {
        for (c, z) in atoms.iter().enumerate() {
            v[(r, c)] = z.conj().powu(i as u32) * z.powu(j as u32);
        }
    }
    let b = DVector::from_iterator(pairs.len(), pairs.pairs().iter().map(|&(i, j)| gamma.get(i, j).unwrap()));
    lstsq_complex(&v, &b, 1e-14).iter().map(|c| c.re).collect()
}

/// Largest `|Δγ_ij| / Σ_k ρ_k |z_k|^{i+j}` between the moments of `mu` and `gamma`.
pub fn gamma_residual(mu: &DiscreteMeasure, gamma: &ComplexMomentSequence) -> Result<f64> {
    let got = complex_moments(mu, gamma.n_total())?;
    let atoms = mu.complex_nodes()?;
    let mut worst = 0.0f64;
    for (&(i, j), (a, b)) in enumerate_complex(gamma.n_total())
        .pairs()
        .iter()
        .zip(got.values().iter().zip(gamma.values()))
    {
        let scale: f64 = atoms
            .iter()
            .zip(mu.weights())
            .map(|(z, w)| w * z.norm().powi((i + j) as i32))
            .sum();
        let scale = if scale > 0.0 { scale } else { mu.total_mass() };
        worst = worst.max((a - b).norm() / scale);
    }
    Ok(worst)
}

/// Column identity `Z^k = Σ_{i+j<k} a_ij Z̄^i Z^j` in the column space of `M(n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticRelation {
    pub k: usize,
    /// `a_ij` in pair order over `i + j < k`.
    #[serde(serialize_with = "serialize_coeffs")]
    pub coefficients: Vec<C64>,
    /// `‖Σ a_ij col(i,j) − col(0,k)‖ / ‖col(0,k)‖`.
    pub residual: f64,
}

fn serialize_coeffs<S: serde::Serializer>(c: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let pairs = enumerate_complex(c.len());
    let mut seq = s.serialize_seq(Some(c.len()))?;
    for (&(i, j), v) in pairs.pairs().iter().zip(c) {
        seq.serialize_element(&crate::io::GammaEntry {
            i,
            j,
            re: v.re,
            im: v.im,
        })?;
    }
    seq.end()
}

impl AnalyticRelation {
    /// The polynomial `z^k − Σ a_ij z̄^i z^j` whose zeros must carry any representing measure.
    pub fn polynomial(&self) -> Result<AnalyticPoly> {
        let pairs = enumerate_complex(self.k.saturating_sub(1));
        let terms = pairs
            .pairs()
            .iter()
            .zip(&self.coefficients)
            .map(|(&(i, j), &c)| (i, j, c))
            .collect();
        AnalyticPoly::new(self.k, terms)
    }
}

/// Smallest `k ≤ n` whose column `Z^k` lies in the span of the columns of lower degree.
pub fn find_analytic_relation(m: &MomentMatrix, tol: &Tolerance) -> Option<AnalyticRelation> {
    let smax = singular_values_c(&m.entries).first().copied().unwrap_or(0.0);
    let rel = tol.rank_threshold(m.size(), smax) / smax.max(f64::MIN_POSITIVE);
    for k in 1..=m.n {
        let target = m.entries.column(pair_index(0, k)).into_owned();
        let lower = m.entries.columns(0, num_pairs(k - 1)).into_owned();
        let a = lstsq_complex(&lower, &target, rel);
        let res = (&lower * &a - &target).norm();
        let norm = target.norm();
        if res <= tol.residual * norm {
            return Some(AnalyticRelation {
                k,
                coefficients: a.iter().copied().collect(),
                residual: if norm > 0.0 { res / norm } else { 0.0 },
            });
        }
    }
    None
}

/// Result of an attempt to produce the measure an analytic relation pins down.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Extraction {
    Succeeded { measure: DiscreteMeasure, residual: f64 },
    Failed { reason: String, residual: Option<f64> },
}

/// Outcome of the uniqueness analysis.
///
/// Uniqueness is asserted only conditionally: if some representing measure exists, it is
/// the one reported (flat data) or is supported on at most `k²` points (analytic relation).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    Flat {
        rank: usize,
        measure: DiscreteMeasure,
        residual: f64,
    },
    Analytic {
        relation: AnalyticRelation,
        atom_bound: usize,
        extraction: Extraction,
    },
    None {
        reason: String,
    },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Flat { .. } => "flat",
            Certificate::Analytic { .. } => "analytic",
            Certificate::None { .. } => "none",
        }
    }

    pub fn atom_bound(&self) -> Option<usize> {
        match self {
            Certificate::Flat { rank, .. } => Some(*rank),
            Certificate::Analytic { atom_bound, .. } => Some(*atom_bound),
            Certificate::None { .. } => None,
        }
    }

    pub fn bound(&self) -> Option<BoundKind> {
        match self {
            Certificate::Flat { .. } => Some(BoundKind::FlatRank),
            Certificate::Analytic { .. } => Some(BoundKind::AnalyticRelation),
            Certificate::None { .. } => None,
        }
    }

    pub fn measure(&self) -> Option<&DiscreteMeasure> {
        match self {
            Certificate::Flat { measure, .. } => Some(measure),
            Certificate::Analytic {
                extraction: Extraction::Succeeded { measure, .. },
                ..
            } => Some(measure),
            _ => None,
        }
    }
}

/// Flat data first, then the smallest analytic relation, otherwise no certificate.
pub fn uniqueness_certificate(gamma: &ComplexMomentSequence, tol: &Tolerance) -> Result<Certificate> {
    let m = build_moment_matrix(gamma)?;
    if m.n == 0 {
        return Err(Error::validation("certification needs moments of total degree at least 2"));
    }
    let flat = flatness_of(&m, tol);
    if flat.is_flat() {
        let measure = extract_atoms_flat(gamma, tol).map_err(|e| e.context("flat extraction"))?;
        let residual = gamma_residual(&measure, gamma)?;
        return Ok(Certificate::Flat {
            rank: flat.rank,
            measure,
            residual,
        });
    }
    let Some(relation) = find_analytic_relation(&m, tol) else {
        return Ok(Certificate::None {
            reason: format!(
                "not flat (rank M(n) = {}, rank M(n-1) = {}) and no analytic relation of degree ≤ {}",
                flat.rank, flat.lower_rank, m.n
            ),
        });
    };
    let atom_bound = relation.k * relation.k;
    let extraction = extract_on_variety(gamma, &relation, tol)?;
    Ok(Certificate::Analytic {
        relation,
        atom_bound,
        extraction,
    })
}

// Candidate atoms are the zeros of the relation polynomial; weights by a nonnegative
// solve against the full γ.
fn extract_on_variety(
    gamma: &ComplexMomentSequence,
    relation: &AnalyticRelation,
    tol: &Tolerance,
) -> Result<Extraction> {
    let poly = relation.polynomial()?;
    let roots = find_roots(&poly, DEFAULT_ROOT_TOL).map_err(|e| e.context("relation zeros"))?;
    if roots.roots.is_empty() {
        return Ok(Extraction::Failed {
            reason: "relation polynomial has no zeros".into(),
            residual: None,
        });
    }
    let pairs = enumerate_complex(gamma.n_total());
    let rows: Vec<(usize, usize)> = pairs.pairs().iter().copied().filter(|&(i, j)| i <= j).collect();
    let nr = rows.len();
    let mut a = DMatrix::<f64>::zeros(2 * nr, roots.roots.len());
    let mut b = DVector::<f64>::zeros(2 * nr);
    for (r, &(i, j)) in rows.iter().enumerate() {
        let g = gamma.get(i, j).unwrap();
        let s = 1.0 + g.norm();
        b[2 * r] = g.re / s;
        b[2 * r + 1] = g.im / s;
        for (c, z) in roots.roots.iter().enumerate() {
            let v = z.conj().powu(i as u32) * z.powu(j as u32);
            a[(2 * r, c)] = v.re / s;
            a[(2 * r + 1, c)] = v.im / s;
        }
    }
    let sol = nnls(&a, &b);
    let g00 = gamma.get(0, 0).unwrap().re;
    let keep: Vec<usize> = (0..roots.roots.len()).filter(|&c| sol.x[c] > 1e-12 * g00).collect();
    if keep.is_empty() {
        return Ok(Extraction::Failed {
            reason: "nonnegative solve returned the zero measure".into(),
            residual: None,
        });
    }
    let atoms: Vec<C64> = keep.iter().map(|&c| roots.roots[c]).collect();
    let weights: Vec<f64> = keep.iter().map(|&c| sol.x[c]).collect();
    let measure = DiscreteMeasure::from_complex(&atoms, weights)?;
    let residual = gamma_residual(&measure, gamma)?;
    Ok(if residual <= tol.residual {
        Extraction::Succeeded { measure, residual }
    } else {
        Extraction::Failed {
            reason: "no nonnegative combination of the relation zeros reproduces the moments".into(),
            residual: Some(residual),
        }
    })
}
