//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain numbers or a JSON string and returns a JSON string, so the page
//! needs no generated type definitions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tchak_core::compress::{compress, compress_constrained};
use tchak_core::measure::{complex_moments, DiscreteMeasure};
use tchak_core::tcmp::{flatness, gamma_residual, uniqueness_certificate, Certificate, Extraction, Tolerance};
use tchak_core::variety::{apriori_radius, find_roots, root_count_bound, sharp_example, AnalyticPoly};
use tchak_core::{Error, C64};

const TOL: f64 = 1e-9;

fn to_js(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn points(mu: &DiscreteMeasure) -> Value {
    Value::Array(
        mu.nodes()
            .zip(mu.weights())
            .map(|(x, w)| json!([x[0], x[1], w]))
            .collect(),
    )
}

/// Compresses `n` random points in the unit square (uniform, or a ring when `ring` is set).
pub fn compress_cloud_json(n: usize, degree: usize, seed: u64, constrained: bool, ring: bool) -> Result<String, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes: Vec<Vec<f64>> = (0..n.max(1))
        .map(|_| {
            if ring {
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                let r = rng.gen_range(0.7..1.0);
                vec![r * t.cos(), r * t.sin()]
            } else {
                vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
            }
        })
        .collect();
    let weights: Vec<f64> = (0..nodes.len()).map(|_| rng.gen_range(0.2..1.0)).collect();
    let mu = DiscreteMeasure::new(2, nodes, weights)?;
    let r = if constrained {
        compress_constrained(&mu, degree, TOL)?
    } else {
        compress(&mu, degree, TOL)?
    };
    Ok(json!({
        "input": points(&mu),
        "rule": points(&r.rule),
        "bound": r.bound,
        "size_bound": r.size_bound,
        "full_space_dim": r.full_space_dim,
        "achieved_size": r.achieved_size,
        "max_residual": r.max_moment_residual,
        "norm_slack": r.norm_slack,
        "eliminations": r.eliminations,
    })
    .to_string())
}

/// Zeros of `z^k − q` plus `log10 |p|` sampled on a `res × res` grid over the search square.
///
/// `q_json` is a list of `[i, j, re, im]` terms for `z̄^i z^j`; an empty string selects the
/// built-in example of degree `k`.
pub fn roots_json(k: usize, q_json: &str, res: usize) -> Result<String, Error> {
    let p = if q_json.trim().is_empty() {
        sharp_example(k).ok_or_else(|| Error::Validation(format!("no built-in example for k = {k}")))?
    } else {
        let raw: Vec<(usize, usize, f64, f64)> = serde_json::from_str(q_json)?;
        AnalyticPoly::new(k, raw.into_iter().map(|(i, j, re, im)| (i, j, C64::new(re, im))).collect())?
    };
    let set = find_roots(&p, TOL)?;
    let view = set
        .roots
        .iter()
        .fold(1.0f64, |m, z| m.max(z.re.abs()).max(z.im.abs()))
        * 1.25;
    let res = res.clamp(8, 400);
    let mut field = Vec::with_capacity(res * res);
    for row in 0..res {
        let y = view - 2.0 * view * (row as f64 + 0.5) / res as f64;
        for col in 0..res {
            let x = -view + 2.0 * view * (col as f64 + 0.5) / res as f64;
            field.push(p.eval(C64::new(x, y)).norm().max(1e-300).log10());
        }
    }
    Ok(json!({
        "k": p.k(),
        "terms": p.terms().iter().map(|&(i, j, c)| json!([i, j, c.re, c.im])).collect::<Vec<_>>(),
        "roots": set.roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "residuals": set.residuals,
        "bound": root_count_bound(p.k()),
        "box_radius": apriori_radius(&p),
        "warnings": set.warnings,
        "view": view,
        "res": res,
        "field": field,
    })
    .to_string())
}

/// Certificate for the moments `γ^(2n)` of the atoms `[[re, im, w], ...]`.
pub fn certify_atoms_json(atoms_json: &str, n: usize) -> Result<String, Error> {
    let raw: Vec<[f64; 3]> = serde_json::from_str(atoms_json)?;
    let z: Vec<C64> = raw.iter().map(|a| C64::new(a[0], a[1])).collect();
    let w: Vec<f64> = raw.iter().map(|a| a[2]).collect();
    let mu = DiscreteMeasure::from_complex(&z, w)?;
    let gamma = complex_moments(&mu, 2 * n.max(1))?;
    let tol = Tolerance::with_residual(TOL);
    let flat = flatness(&gamma, &tol)?;
    let cert = uniqueness_certificate(&gamma, &tol)?;
    let recovered = cert.measure().map(points);
    let residual = match cert.measure() {
        Some(m) => Some(gamma_residual(m, &gamma)?),
        None => None,
    };
    let (k, extraction) = match &cert {
        Certificate::Analytic {
            relation, extraction, ..
        } => (
            Some(relation.k),
            Some(match extraction {
                Extraction::Succeeded { .. } => "succeeded".to_string(),
                Extraction::Failed { reason, .. } => reason.clone(),
            }),
        ),
        _ => (None, None),
    };
    Ok(json!({
        "input": points(&mu),
        "n": n.max(1),
        "psd": flat.psd,
        "rank": flat.rank,
        "lower_rank": flat.lower_rank,
        "kind": cert.kind(),
        "atom_bound": cert.atom_bound(),
        "k": k,
        "extraction": extraction,
        "recovered": recovered,
        "residual": residual,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn compress_cloud(n: usize, degree: usize, seed: u32, constrained: bool, ring: bool) -> Result<String, JsValue> {
    compress_cloud_json(n, degree, u64::from(seed), constrained, ring).map_err(to_js)
}

#[wasm_bindgen]
pub fn harmonic_roots(k: usize, q_json: &str, res: usize) -> Result<String, JsValue> {
    roots_json(k, q_json, res).map_err(to_js)
}

#[wasm_bindgen]
pub fn certify_atoms(atoms_json: &str, n: usize) -> Result<String, JsValue> {
    certify_atoms_json(atoms_json, n).map_err(to_js)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn cloud_respects_bound() {
        let v = parse(&compress_cloud_json(300, 4, 1, false, false).unwrap());
        assert!(v["achieved_size"].as_u64() <= v["size_bound"].as_u64());
        assert_eq!(v["input"].as_array().unwrap().len(), 300);
        let v = parse(&compress_cloud_json(300, 3, 1, true, true).unwrap());
        assert!(v["achieved_size"].as_u64() <= v["size_bound"].as_u64());
    }

    #[test]
    fn builtin_and_custom_roots() {
        let v = parse(&roots_json(2, "", 16).unwrap());
        assert_eq!(v["roots"].as_array().unwrap().len(), 4);
        assert_eq!(v["field"].as_array().unwrap().len(), 256);
        let v = parse(&roots_json(1, "[[0, 0, 0.5, -0.5]]", 8).unwrap());
        assert_eq!(v["roots"].as_array().unwrap().len(), 1);
        assert!(roots_json(7, "", 8).is_err());
    }

    #[test]
    fn certifies_flat_and_analytic_data() {
        let v = parse(&certify_atoms_json("[[0,0,0.5],[1,0,0.5]]", 2).unwrap());
        assert_eq!(v["kind"], "flat");
        assert_eq!(v["recovered"].as_array().unwrap().len(), 2);

        let h = 3f64.sqrt() / 2.0;
        let atoms = format!("[[0,0,0.25],[1,0,0.25],[-0.5,{h},0.25],[-0.5,{},0.25]]", -h);
        let v = parse(&certify_atoms_json(&atoms, 2).unwrap());
        assert_eq!(v["kind"], "analytic");
        assert_eq!(v["k"], 2);
        assert_eq!(v["atom_bound"], 4);
    }
}
