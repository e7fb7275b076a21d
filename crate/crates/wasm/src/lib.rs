//! wasm-bindgen surface for the demo page in `www/`.
//!
//! Every export takes plain numbers and distribution strings and returns a
//! JSON document; errors surface as JavaScript exceptions.

use ecc_gof::distributions::{sample, DistributionSpec};
use ecc_gof::ecc::rescale_cloud;
use ecc_gof::geometry::ComplexKind;
use ecc_gof::gof::{self, PrepareConfig};
use ecc_gof::Result;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn complex(name: &str, dim: usize) -> Result<ComplexKind> {
    match name {
        "" | "default" => Ok(ComplexKind::default_for(dim)),
        "alpha" => Ok(ComplexKind::Alpha),
        "cech" => Ok(ComplexKind::Cech),
        "rips" => Ok(ComplexKind::Rips { maxdim: dim + 1 }),
        _ => Err(ecc_gof::Error::InvalidConfig(format!("unknown complex {name:?}"))),
    }
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

/// Points drawn from `spec` (rescaled by `n^(1/d)`) and their ECC.
pub fn sample_ecc_json(spec: &str, n: usize, seed: u64, complex_name: &str) -> Result<String> {
    let spec: DistributionSpec = spec.parse()?;
    let cloud = rescale_cloud(&sample(&spec, n, seed)?);
    let kind = complex(complex_name, cloud.dim())?;
    let curve = ecc_gof::ecc::euler_curve(&kind.build(&cloud)?);
    let points: Vec<&[f64]> = cloud.iter().collect();
    Ok(json!({ "dim": cloud.dim(), "complex": kind.to_string(), "points": points, "curve": curve }).to_string())
}

/// Prepares a model for `null` and tests a sample drawn from `alt`.
#[allow(clippy::too_many_arguments)]
pub fn one_sample_json(
    null: &str,
    alt: &str,
    n: usize,
    mean_samples: usize,
    calibration_samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<String> {
    let null: DistributionSpec = null.parse()?;
    let alt: DistributionSpec = alt.parse()?;
    let model = gof::prepare_reference_with(&PrepareConfig::new(null, n, mean_samples, calibration_samples, alpha, seed))?;
    let x = sample(&alt, n, seed.wrapping_add(1))?;
    let report = gof::one_sample_test(&x, &model, alpha)?;
    let curve = model.pipeline.curve(&x)?;
    Ok(json!({ "report": report, "mean_curve": model.mean_ecc, "sample_curve": curve, "null_stats": model.null_stats })
        .to_string())
}

/// Permutation test between samples of `x_spec` (size `n`) and `y_spec`
/// (size `m`).
pub fn two_sample_json(
    x_spec: &str,
    y_spec: &str,
    n: usize,
    m: usize,
    permutations: usize,
    alpha: f64,
    seed: u64,
) -> Result<String> {
    let xs: DistributionSpec = x_spec.parse()?;
    let ys: DistributionSpec = y_spec.parse()?;
    let x = sample(&xs, n, seed)?;
    let y = sample(&ys, m, seed.wrapping_add(1))?;
    let report = gof::two_sample_test(&x, &y, permutations, alpha, seed)?;
    Ok(json!({ "report": report }).to_string())
}

#[wasm_bindgen(js_name = sampleEcc)]
pub fn sample_ecc(spec: &str, n: usize, seed: u32, complex: &str) -> std::result::Result<String, JsError> {
    js(sample_ecc_json(spec, n, seed.into(), complex))
}

#[wasm_bindgen(js_name = oneSampleTest)]
pub fn one_sample_test(
    null: &str,
    alt: &str,
    n: usize,
    mean_samples: usize,
    calibration_samples: usize,
    alpha: f64,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(one_sample_json(null, alt, n, mean_samples, calibration_samples, alpha, seed.into()))
}

#[wasm_bindgen(js_name = twoSampleTest)]
pub fn two_sample_test(
    x_spec: &str,
    y_spec: &str,
    n: usize,
    m: usize,
    permutations: usize,
    alpha: f64,
    seed: u32,
) -> std::result::Result<String, JsError> {
    js(two_sample_json(x_spec, y_spec, n, m, permutations, alpha, seed.into()))
}
