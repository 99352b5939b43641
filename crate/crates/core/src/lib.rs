//! Quadrature compression and truncated complex moment analysis.
//!
//! The crate is organised bottom-up:
//!
//! * [`basis`] enumerates graded monomial bases and builds evaluation matrices.
//! * [`measure`] holds finitely atomic measures and their real and complex moments.
//! * [`compress`] reduces a measure to a small quadrature rule supported on its own
//!   nodes, optionally under a norm-moment constraint, and represents moment
//!   functionals on a finite grid.
//! * [`tcmp`] builds complex moment matrices and certifies uniqueness of
//!   representing measures (flat data, analytic column relations).
//! * [`variety`] locates the zeros of `z^k - q(z, z̄)`.
//! * [`io`] reads and writes the CSV and JSON file formats; [`cli`] fronts everything
//!   as the `tchak` command.
//!
//! ```
//! use tchak_core::compress::compress;
//! use tchak_core::measure::{complex_moments, DiscreteMeasure};
//! use tchak_core::tcmp::{uniqueness_certificate, Tolerance};
//! use tchak_core::C64;
//!
//! let mu = DiscreteMeasure::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![0.3, 0.9]], vec![0.2, 0.5, 0.3])?;
//! let report = compress(&mu, 1, 1e-9)?;
//! assert!(report.achieved_size <= report.size_bound);
//!
//! let atoms = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
//! let gamma = complex_moments(&DiscreteMeasure::from_complex(&atoms, vec![0.5, 0.5])?, 4)?;
//! let cert = uniqueness_certificate(&gamma, &Tolerance::default())?;
//! assert_eq!(cert.kind(), "flat");
//! # Ok::<(), tchak_core::Error>(())
//! ```

pub mod basis;
pub mod cli;
pub mod compress;
mod error;
pub mod io;
pub mod linalg;
pub mod measure;
pub mod tcmp;
pub mod variety;

pub use error::{Error, Result};

pub use nalgebra::Complex;

/// Complex scalar used throughout.
pub type C64 = Complex<f64>;

/// Which size bound a report's claim rests on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Compact support: size at most the dimension of polynomials restricted to the support.
    SupportDimension,
    /// Norm-constrained rule of degree `n - 1`: size at most one plus that dimension.
    NormConstrained,
    /// Positive functional represented on a finite grid: size at most the grid Vandermonde rank.
    GridRepresentation,
    /// Flat moment data: exactly `rank M(n)` atoms.
    FlatRank,
    /// Analytic column relation of degree `k`: at most `k^2` atoms.
    AnalyticRelation,
    /// Zeros of `z^k - q`: at most `k^2` points.
    RootCount,
}
