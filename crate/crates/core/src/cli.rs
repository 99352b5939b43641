//! The `tchak` command line.
//!
//! Each subcommand writes a JSON report (to stdout, or to `<stem>.json` when `--output`
//! is given, together with `<stem>.csv` for any measure it produces) and prints a
//! one-line summary to stderr.
//!
//! Exit codes: 0 success, 2 infeasible or no certificate, 3 invalid input, 4 numerical
//! failure.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::compress::{compress, compress_constrained, represent_on_grid, CompressionReport};
use crate::io::{self, MomentFile, Moments, PolyFile};
use crate::measure::{complex_moments, moments, ComplexMomentSequence, DiscreteMeasure};
use crate::tcmp::{
    build_moment_matrix, extract_atoms_flat, flatness, gamma_residual, is_recursively_generated, psd_and_rank,
    uniqueness_certificate, Certificate, Tolerance,
};
use crate::variety::{find_roots, root_count_bound};
use crate::{BoundKind, Error, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "tchak", version, about = "Quadrature compression and complex moment analysis")]
pub struct Cli {
    /// Moment-match tolerance.
    #[arg(long, global = true, env = "TCHAK_TOL", default_value_t = 1e-9)]
    pub tol: f64,

    /// Worker threads for commands that take several inputs.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a measure to a quadrature rule on its own nodes.
    Compress(CompressArgs),
    /// Compute real or complex moments of a measure.
    Moments(MomentsArgs),
    /// Represent a moment functional by positive weights on a grid.
    RepresentGrid(GridArgs),
    /// Analyze a complex moment matrix.
    #[command(subcommand)]
    Mm(MmCommand),
    /// Find the zeros of z^k - q(z, z̄).
    Roots(RootsArgs),
    /// Run a randomized compression and flat-extraction check.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    /// Rule degree m, or the norm degree n with --constrained.
    #[arg(long)]
    pub degree: usize,
    /// Bound the degree-n norm moment and match moments up to degree n - 1.
    #[arg(long)]
    pub constrained: bool,
    /// Measure CSV files.
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    /// Output stem (a directory when several inputs are given).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    /// Real degree m, or the moment-matrix order n with --complex.
    #[arg(long)]
    pub degree: usize,
    /// Complex moments γ_ij, i + j ≤ 2n, of a planar measure.
    #[arg(long)]
    pub complex: bool,
    #[arg(long, required = true)]
    pub input: Vec<PathBuf>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Real moment JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Node CSV; a weight column is ignored.
    #[arg(long)]
    pub grid: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum MmCommand {
    /// PSD, rank, recursiveness, flatness, and analytic relation.
    Analyze(MmArgs),
    /// Uniqueness certificate with the measure it determines.
    Certify(MmArgs),
    /// Atoms of flat data.
    Extract(MmArgs),
}

#[derive(Debug, Args)]
pub struct MmArgs {
    /// Complex moment JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Relative rank threshold (default: size · ε).
    #[arg(long)]
    pub rank_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RootsArgs {
    /// Polynomial JSON.
    #[arg(long)]
    pub poly: PathBuf,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub degree: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Parses `argv` and runs, writing reports to `out` and summaries to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        let _ = writeln!(err, "error: --tol must be positive");
        return EXIT_INVALID;
    }
    match dispatch(&cli) {
        Ok(outcome) => {
            for (report, output) in &outcome.reports {
                if let Err(e) = emit(report, output.as_deref(), out) {
                    let _ = writeln!(err, "error: {e}");
                    return exit_code(&e);
                }
            }
            let _ = writeln!(err, "{}", outcome.summary);
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::NotFlat { .. } => EXIT_NEGATIVE,
        Error::ResidualNotMet { .. } | Error::Conditioning(_) | Error::NonPositiveWeight { .. } => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

struct Outcome {
    reports: Vec<(Report, Option<PathBuf>)>,
    summary: String,
    code: i32,
}

struct Report {
    json: Value,
    measure: Option<DiscreteMeasure>,
}

fn single(json: Value, measure: Option<DiscreteMeasure>, output: Option<&Path>, summary: String, code: i32) -> Outcome {
    Outcome {
        reports: vec![(Report { json, measure }, output.map(Path::to_path_buf))],
        summary,
        code,
    }
}

fn emit(report: &Report, output: Option<&Path>, out: &mut dyn Write) -> crate::Result<()> {
    match output {
        Some(stem) => {
            io::write_json(&stem.with_extension("json"), &report.json)?;
            if let Some(mu) = &report.measure {
                io::write_measure(&stem.with_extension("csv"), mu)?;
            }
        }
        None => {
            serde_json::to_writer_pretty(&mut *out, &report.json)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> crate::Result<Outcome> {
    let tol = cli.tol;
    match &cli.command {
        Command::Compress(a) => run_compress(a, tol, cli.jobs),
        Command::Moments(a) => run_moments(a, cli.jobs),
        Command::RepresentGrid(a) => run_grid(a, tol),
        Command::Mm(MmCommand::Analyze(a)) => run_analyze(a, tol),
        Command::Mm(MmCommand::Certify(a)) => run_certify(a, tol),
        Command::Mm(MmCommand::Extract(a)) => run_extract(a, tol),
        Command::Roots(a) => run_roots(a, tol),
        Command::Selftest(a) => run_selftest(a, tol),
    }
}

// Output path for input `k` of `n`: the stem itself for one input, a file in the
// directory `stem` otherwise.
fn output_for(stem: Option<&Path>, input: &Path, n: usize) -> crate::Result<Option<PathBuf>> {
    let Some(stem) = stem else { return Ok(None) };
    if n == 1 {
        return Ok(Some(stem.to_path_buf()));
    }
    std::fs::create_dir_all(stem)?;
    let name = input.file_stem().map(|s| s.to_os_string()).unwrap_or_else(|| "out".into());
    Ok(Some(stem.join(name)))
}

// Runs `f` over inputs on up to `jobs` threads, keeping input order.
fn par_map<T: Send>(inputs: &[PathBuf], jobs: usize, f: impl Fn(&Path) -> T + Sync) -> Vec<T> {
    let jobs = jobs.clamp(1, inputs.len().max(1));
    if jobs == 1 {
        return inputs.iter().map(|p| f(p)).collect();
    }
    let chunk = inputs.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = inputs
            .chunks(chunk)
            .map(|part| s.spawn(|| part.iter().map(|p| f(p)).collect::<Vec<T>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn compression_json(command: &str, input: &Path, r: &CompressionReport, input_size: usize) -> Value {
    json!({
        "command": command,
        "input": input.display().to_string(),
        "bound": r.bound,
        "size_bound": r.size_bound,
        "full_space_dim": r.full_space_dim,
        "vertex_rank": r.vertex_rank,
        "input_size": input_size,
        "achieved_size": r.achieved_size,
        "max_residual": r.max_moment_residual,
        "norm_slack": r.norm_slack,
        "eliminations": r.eliminations,
        "rule": r.rule,
    })
}

fn run_compress(a: &CompressArgs, tol: f64, jobs: usize) -> crate::Result<Outcome> {
    let command = if a.constrained { "compress-constrained" } else { "compress" };
    let results = par_map(&a.input, jobs, |path| -> crate::Result<(Value, DiscreteMeasure, String)> {
        let mu = io::read_measure(path)?;
        let r = if a.constrained {
            compress_constrained(&mu, a.degree, tol)?
        } else {
            compress(&mu, a.degree, tol)?
        };
        let summary = format!(
            "{}: {} -> {} atoms (bound {}), max residual {:.3e}",
            path.display(),
            mu.len(),
            r.achieved_size,
            r.size_bound,
            r.max_moment_residual
        );
        Ok((compression_json(command, path, &r, mu.len()), r.rule, summary))
    });
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    for (path, res) in a.input.iter().zip(results) {
        let (json, rule, line) = res.map_err(|e| e.context(&path.display().to_string()))?;
        reports.push((
            Report {
                json,
                measure: Some(rule),
            },
            output_for(a.output.as_deref(), path, a.input.len())?,
        ));
        lines.push(line);
    }
    Ok(Outcome {
        reports,
        summary: format!("{command}: {}", lines.join("; ")),
        code: EXIT_OK,
    })
}

fn run_moments(a: &MomentsArgs, jobs: usize) -> crate::Result<Outcome> {
    let results = par_map(&a.input, jobs, |path| -> crate::Result<Value> {
        let mu = io::read_measure(path)?;
        let file = if a.complex {
            MomentFile::from_complex(&complex_moments(&mu, 2 * a.degree)?)
        } else {
            MomentFile::from_real(&moments(&mu, a.degree))
        };
        Ok(serde_json::to_value(file)?)
    });
    let mut reports = Vec::new();
    for (path, res) in a.input.iter().zip(results) {
        let json = res.map_err(|e| e.context(&path.display().to_string()))?;
        reports.push((
            Report { json, measure: None },
            output_for(a.output.as_deref(), path, a.input.len())?,
        ));
    }
    let kind = if a.complex { "complex" } else { "real" };
    Ok(Outcome {
        summary: format!("moments: {} {kind} moment file(s) of degree {}", reports.len(), a.degree),
        reports,
        code: EXIT_OK,
    })
}

fn run_grid(a: &GridArgs, tol: f64) -> crate::Result<Outcome> {
    let Moments::Real(beta) = io::read_moments(&a.input)? else {
        return Err(Error::validation("represent-grid needs real moments"));
    };
    let grid = io::read_nodes(&a.grid)?;
    let r = represent_on_grid(&beta, &grid, tol)?;
    let summary = format!(
        "represent-grid: {} grid nodes -> {} atoms (bound {}), max residual {:.3e}",
        grid.len(),
        r.achieved_size,
        r.size_bound,
        r.max_moment_residual
    );
    let json = compression_json("represent-grid", &a.input, &r, grid.len());
    let rule = r.rule.clone();
    Ok(single(json, Some(rule), a.output.as_deref(), summary, EXIT_OK))
}

fn tolerance(a: &MmArgs, tol: f64) -> Tolerance {
    Tolerance {
        rank: a.rank_tol,
        residual: tol,
    }
}

fn read_complex(path: &Path) -> crate::Result<ComplexMomentSequence> {
    match io::read_moments(path)? {
        Moments::Complex(g) => Ok(g),
        Moments::Real(_) => Err(Error::validation("expected complex moments (\"kind\": \"complex\")")),
    }
}

fn coeff_json(pairs: impl Iterator<Item = ((usize, usize), C64)>) -> Value {
    Value::Array(
        pairs
            .map(|((i, j), c)| json!({"i": i, "j": j, "re": c.re, "im": c.im}))
            .collect(),
    )
}

fn run_analyze(a: &MmArgs, tol: f64) -> crate::Result<Outcome> {
    let gamma = read_complex(&a.input)?;
    let t = tolerance(a, tol);
    let m = build_moment_matrix(&gamma)?;
    let spectrum = psd_and_rank(&m, &t);
    let rec = is_recursively_generated(&m, &t);
    let flat = flatness(&gamma, &t)?;
    let rel = crate::tcmp::find_analytic_relation(&m, &t);
    let relation = rel.as_ref().map(|r| {
        let pairs = crate::basis::enumerate_complex(r.k - 1);
        json!({
            "k": r.k,
            "atom_bound": r.k * r.k,
            "residual": r.residual,
            "coefficients": coeff_json(pairs.pairs().iter().copied().zip(r.coefficients.iter().copied())),
        })
    });
    let witness = rec.witness.as_ref().map(|w| {
        let pairs = crate::basis::enumerate_complex(m.n() - 1);
        coeff_json(pairs.pairs().iter().copied().zip(w.iter().copied()))
    });
    let json = json!({
        "command": "mm-analyze",
        "input": a.input.display().to_string(),
        "n": m.n(),
        "size": m.size(),
        "psd": spectrum.is_psd,
        "rank": spectrum.rank,
        "lower_rank": flat.lower_rank,
        "flat": flat.is_flat(),
        "min_eigenvalue": spectrum.min_eigenvalue,
        "max_abs_eigenvalue": spectrum.max_abs_eigenvalue,
        "rank_threshold": spectrum.rank_threshold,
        "eigenvalues": spectrum.eigenvalues,
        "recursively_generated": rec.holds,
        "recursive_relations": rec.relations,
        "recursive_violation": rec.violation,
        "recursive_threshold": rec.threshold,
        "recursive_witness": witness,
        "analytic_relation": relation,
    });
    let summary = format!(
        "mm analyze: n={} psd={} rank={} lower_rank={} flat={} recursive={} relation={}",
        m.n(),
        spectrum.is_psd,
        spectrum.rank,
        flat.lower_rank,
        flat.is_flat(),
        rec.holds,
        rel.map(|r| format!("k={}", r.k)).unwrap_or_else(|| "none".into())
    );
    Ok(single(json, None, a.output.as_deref(), summary, EXIT_OK))
}

fn run_certify(a: &MmArgs, tol: f64) -> crate::Result<Outcome> {
    let gamma = read_complex(&a.input)?;
    let t = tolerance(a, tol);
    let cert = uniqueness_certificate(&gamma, &t)?;
    let measure = cert.measure().cloned();
    let achieved = measure.as_ref().map(DiscreteMeasure::len);
    let max_residual = match &cert {
        Certificate::Flat { residual, .. } => Some(*residual),
        Certificate::Analytic { extraction, .. } => match extraction {
            crate::tcmp::Extraction::Succeeded { residual, .. } => Some(*residual),
            crate::tcmp::Extraction::Failed { residual, .. } => *residual,
        },
        Certificate::None { .. } => None,
    };
    let json = json!({
        "command": "mm-certify",
        "input": a.input.display().to_string(),
        "kind": cert.kind(),
        "bound": cert.bound(),
        "size_bound": cert.atom_bound(),
        "achieved_size": achieved,
        "max_residual": max_residual,
        "uniqueness": "conditional on the existence of a representing measure",
        "certificate": cert,
    });
    let code = if matches!(cert, Certificate::None { .. }) {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };
    let summary = format!(
        "mm certify: {} (atom bound {}, extracted {})",
        cert.kind(),
        cert.atom_bound().map_or("-".into(), |b| b.to_string()),
        achieved.map_or("none".into(), |n| format!("{n} atoms"))
    );
    Ok(single(json, measure, a.output.as_deref(), summary, code))
}

fn run_extract(a: &MmArgs, tol: f64) -> crate::Result<Outcome> {
    let gamma = read_complex(&a.input)?;
    let t = tolerance(a, tol);
    let mu = extract_atoms_flat(&gamma, &t)?;
    let residual = gamma_residual(&mu, &gamma)?;
    let json = json!({
        "command": "mm-extract",
        "input": a.input.display().to_string(),
        "bound": BoundKind::FlatRank,
        "size_bound": mu.len(),
        "achieved_size": mu.len(),
        "max_residual": residual,
        "measure": mu,
    });
    let summary = format!("mm extract: {} atoms, max residual {residual:.3e}", mu.len());
    Ok(single(json, Some(mu), a.output.as_deref(), summary, EXIT_OK))
}

fn run_roots(a: &RootsArgs, tol: f64) -> crate::Result<Outcome> {
    let p = io::read_poly(&a.poly)?;
    let roots = find_roots(&p, tol)?;
    let max_residual = roots.residuals.iter().cloned().fold(0.0, f64::max);
    let json = json!({
        "command": "roots",
        "input": a.poly.display().to_string(),
        "poly": PolyFile::from_poly(&p),
        "bound": BoundKind::RootCount,
        "size_bound": root_count_bound(p.k()),
        "achieved_size": roots.len(),
        "max_residual": max_residual,
        "roots": roots.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "residuals": roots.residuals,
        "box_radius": roots.box_radius,
        "audit": roots.audit,
        "warnings": roots.warnings,
    });
    let summary = format!(
        "roots: {} zeros (bound {}), max residual {max_residual:.3e}{}",
        roots.len(),
        root_count_bound(p.k()),
        if roots.warnings.is_empty() { "" } else { ", with coverage warnings" }
    );
    Ok(single(json, None, a.output.as_deref(), summary, EXIT_OK))
}

fn run_selftest(a: &SelftestArgs, tol: f64) -> crate::Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let n_atoms = rng.gen_range(50..500);
    let nodes: Vec<Vec<f64>> = (0..n_atoms).map(|_| vec![rng.gen(), rng.gen()]).collect();
    let weights: Vec<f64> = (0..n_atoms).map(|_| rng.gen_range(0.1..1.0)).collect();
    let mu = DiscreteMeasure::new(2, nodes, weights)?;
    let rule = compress(&mu, a.degree, tol)?;

    let r = rng.gen_range(1..=5);
    let atoms: Vec<C64> = (0..r)
        .map(|_| C64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let w: Vec<f64> = (0..r).map(|_| rng.gen_range(0.1..1.0)).collect();
    let nu = DiscreteMeasure::from_complex(&atoms, w)?;
    let gamma = complex_moments(&nu, 2 * r)?;
    let extracted = extract_atoms_flat(&gamma, &Tolerance::with_residual(tol))?;
    let flat_residual = gamma_residual(&extracted, &gamma)?;

    let json = json!({
        "command": "selftest",
        "seed": a.seed,
        "compress": {
            "input_size": mu.len(),
            "bound": rule.bound,
            "size_bound": rule.size_bound,
            "achieved_size": rule.achieved_size,
            "max_residual": rule.max_moment_residual,
        },
        "flat": {
            "atoms": r,
            "bound": BoundKind::FlatRank,
            "size_bound": r,
            "achieved_size": extracted.len(),
            "max_residual": flat_residual,
        },
    });
    let ok = rule.achieved_size <= rule.size_bound && extracted.len() == r && flat_residual <= tol;
    let summary = format!(
        "selftest seed {}: compress {} -> {} (bound {}), flat {} of {} atoms: {}",
        a.seed,
        mu.len(),
        rule.achieved_size,
        rule.size_bound,
        extracted.len(),
        r,
        if ok { "ok" } else { "FAILED" }
    );
    Ok(single(json, None, a.output.as_deref(), summary, if ok { EXIT_OK } else { EXIT_NUMERICAL }))
}
