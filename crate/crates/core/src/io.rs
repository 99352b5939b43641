//! File formats: measure CSV, moment JSON, and analytic-polynomial JSON.
//!
//! Measure CSV has a header `x1,…,xd,w` and one atom per row. Moment JSON is tagged by
//! `"kind"`:
//!
//! ```json
//! {"kind":"complex","n":2,"gamma":[{"i":0,"j":0,"re":1.0,"im":0.0}]}
//! {"kind":"real","d":1,"m":2,"beta":[1.0,0.0,1.0],"norm_degree":2,"gamma_norm":1.0}
//! ```
//!
//! For complex data `n` is the order of the moment matrix, so `gamma` lists every pair
//! `i ≤ j` with `i + j ≤ 2n`. Polynomials `z^k − q` are stored as
//! `{"k":2,"q":[{"i":1,"j":0,"re":1.0,"im":0.0}]}`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::basis::{enumerate_complex, enumerate_real};
use crate::measure::{ComplexMomentSequence, DiscreteMeasure, MomentVector, NormMoment};
use crate::variety::AnalyticPoly;
use crate::{Error, Result, C64};

/// One complex coefficient or moment, indexed by `(i, j)` for `z̄^i z^j`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Parses a measure from CSV text with header `x1,…,xd,w`.
pub fn read_measure_csv<R: Read>(reader: R) -> Result<DiscreteMeasure> {
    let (dim, coords, weights) = read_table(reader, true)?;
    DiscreteMeasure::from_flat(dim, coords, weights.expect("weights requested"))
}

/// Parses a node set for grid representation; a trailing `w` column is accepted and ignored.
pub fn read_nodes_csv<R: Read>(reader: R) -> Result<DiscreteMeasure> {
    let (dim, coords, _) = read_table(reader, false)?;
    let n = coords.len() / dim;
    DiscreteMeasure::from_flat(dim, coords, vec![1.0; n])
}

fn read_table<R: Read>(reader: R, need_weights: bool) -> Result<(usize, Vec<f64>, Option<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_ascii_lowercase).collect();
    let has_w = header.last().is_some_and(|h| h == "w");
    if need_weights && !has_w {
        return Err(Error::validation("measure CSV header must end with a `w` column"));
    }
    let dim = header.len() - usize::from(has_w);
    if dim == 0 {
        return Err(Error::validation("CSV header has no coordinate columns"));
    }
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = row + 1;
        if rec.len() != header.len() {
            return Err(Error::validation(format!(
                "row {row} has {} fields, expected {}",
                rec.len(),
                header.len()
            )));
        }
        for (col, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::validation(format!("row {row}, column {}: cannot parse {field:?}", col + 1)))?;
            if col < dim {
                coords.push(v);
            } else {
                weights.push(v);
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::validation("CSV contains no rows"));
    }
    Ok((dim, coords, has_w.then_some(weights)))
}

/// Writes `x1,…,xd,w` rows with shortest round-trip float formatting.
pub fn write_measure_csv<W: Write>(writer: W, mu: &DiscreteMeasure) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header: Vec<String> = (1..=mu.dim()).map(|c| format!("x{c}")).collect();
    header.push("w".into());
    w.write_record(&header)?;
    for (node, weight) in mu.nodes().zip(mu.weights()) {
        let mut rec: Vec<String> = node.iter().map(|v| format!("{v:?}")).collect();
        rec.push(format!("{weight:?}"));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_measure(path: &Path) -> Result<DiscreteMeasure> {
    read_measure_csv(BufReader::new(open(path)?)).map_err(|e| e.context(&path.display().to_string()))
}

pub fn read_nodes(path: &Path) -> Result<DiscreteMeasure> {
    read_nodes_csv(BufReader::new(open(path)?)).map_err(|e| e.context(&path.display().to_string()))
}

pub fn write_measure(path: &Path, mu: &DiscreteMeasure) -> Result<()> {
    write_measure_csv(BufWriter::new(File::create(path)?), mu)
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// On-disk moment data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MomentFile {
    Complex {
        n: usize,
        gamma: Vec<GammaEntry>,
    },
    Real {
        d: usize,
        m: usize,
        beta: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        norm_degree: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_norm: Option<f64>,
    },
}

/// Parsed moment data.
#[derive(Clone, Debug, PartialEq)]
pub enum Moments {
    Complex(ComplexMomentSequence),
    Real(MomentVector),
}

impl MomentFile {
    pub fn from_complex(gamma: &ComplexMomentSequence) -> Self {
        let entries = enumerate_complex(gamma.n_total())
            .pairs()
            .iter()
            .filter(|&&(i, j)| i <= j)
            .map(|&(i, j)| {
                let v = gamma.get(i, j).expect("pair within degree");
                GammaEntry { i, j, re: v.re, im: v.im }
            })
            .collect();
        MomentFile::Complex {
            n: gamma.order(),
            gamma: entries,
        }
    }

    pub fn from_real(beta: &MomentVector) -> Self {
        MomentFile::Real {
            d: beta.basis.dim(),
            m: beta.basis.degree(),
            beta: beta.values.clone(),
            norm_degree: beta.norm_moment.map(|g| g.degree),
            gamma_norm: beta.norm_moment.map(|g| g.value),
        }
    }

    pub fn into_moments(self) -> Result<Moments> {
        match self {
            MomentFile::Complex { n, gamma } => {
                let seq = ComplexMomentSequence::from_entries(
                    2 * n,
                    gamma.into_iter().map(|e| (e.i, e.j, C64::new(e.re, e.im))),
                )?;
                Ok(Moments::Complex(seq))
            }
            MomentFile::Real {
                d,
                m,
                beta,
                norm_degree,
                gamma_norm,
            } => {
                let norm_moment = match (norm_degree, gamma_norm) {
                    (Some(degree), Some(value)) => Some(NormMoment { degree, value }),
                    (None, None) => None,
                    _ => {
                        return Err(Error::validation(
                            "norm_degree and gamma_norm must be given together",
                        ))
                    }
                };
                let basis = enumerate_real(d, m)?;
                Ok(Moments::Real(MomentVector::new(basis, beta, norm_moment)?))
            }
        }
    }
}

pub fn read_moments(path: &Path) -> Result<Moments> {
    let file: MomentFile = serde_json::from_reader(BufReader::new(open(path)?))?;
    file.into_moments().map_err(|e| e.context(&path.display().to_string()))
}

/// On-disk form of `z^k − q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyFile {
    pub k: usize,
    #[serde(default)]
    pub q: Vec<GammaEntry>,
}

impl PolyFile {
    pub fn from_poly(p: &AnalyticPoly) -> Self {
        PolyFile {
            k: p.k(),
            q: p
                .terms()
                .iter()
                .map(|&(i, j, c)| GammaEntry { i, j, re: c.re, im: c.im })
                .collect(),
        }
    }

    pub fn into_poly(self) -> Result<AnalyticPoly> {
        AnalyticPoly::new(self.k, self.q.into_iter().map(|e| (e.i, e.j, C64::new(e.re, e.im))).collect())
    }
}

pub fn read_poly(path: &Path) -> Result<AnalyticPoly> {
    let file: PolyFile = serde_json::from_reader(BufReader::new(open(path)?))?;
    file.into_poly()
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}
