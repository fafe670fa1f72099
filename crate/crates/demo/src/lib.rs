//! Browser bindings: amoeba raster, logarithmic zeta curves and quantum walk
//! measures. Each export wraps a plain function that the native tests call.

use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;
use walkzeta::closed_forms::{qw_log_zeta_closed, rw_log_zeta_closed};
use walkzeta::geometry::amoeba::{amoeba_complement_components, BoxSpec, RasterOptions};
use walkzeta::quadrature::QuadratureSpec;
use walkzeta::ronkin::{p_rw, WalkFamily};
use walkzeta::simulator::{evolve, measure, Domain, WalkState, STEP_CAP};
use walkzeta::walk::{qw_coin, ShiftType};
use walkzeta::zeta::log_zeta;

const MAX_RASTER: usize = 800;
const MAX_CURVE_POINTS: usize = 400;

fn family(model: &str, xi: f64) -> Result<WalkFamily, String> {
    match model {
        "rw1" => Ok(WalkFamily::Rw { d: 1 }),
        "rw2" => Ok(WalkFamily::Rw { d: 2 }),
        "qw-m" => Ok(WalkFamily::QwM { xi }),
        "qw-f" => Ok(WalkFamily::QwF { xi }),
        _ => Err(format!("unknown model {model:?}")),
    }
}

/// Labelled complement of the amoeba of `1 - (u/4)(z + 1/z + w + 1/w)` on
/// `[-half, half]^2`, as the library's raster JSON.
pub fn amoeba_json(u: f64, half: f64, n: usize) -> Result<String, String> {
    if !(2..=MAX_RASTER).contains(&n) {
        return Err(format!("resolution must be in 2..={MAX_RASTER}"));
    }
    if !(half.is_finite() && half > 0.0) {
        return Err("half-width must be positive".into());
    }
    let p = p_rw(2, u).map_err(|e| e.to_string())?;
    let r = amoeba_complement_components(&p, BoxSpec::square(half), n, n, &RasterOptions::default())
        .map_err(|e| e.to_string())?;
    Ok(r.to_json())
}

/// `{u, quadrature, closed_form}` rows over `count` evenly spaced `u`;
/// points where a value is undefined carry `null`.
pub fn log_zeta_curve_json(model: &str, xi: f64, u_min: f64, u_max: f64, count: usize) -> Result<String, String> {
    if !(2..=MAX_CURVE_POINTS).contains(&count) {
        return Err(format!("count must be in 2..={MAX_CURVE_POINTS}"));
    }
    let fam = family(model, xi)?;
    let coin = fam.coin().map_err(|e| e.to_string())?;
    let quad = QuadratureSpec::new(16, 1e-10).map_err(|e| e.to_string())?;
    let rows: Vec<_> = (0..count)
        .map(|i| {
            let u = u_min + (u_max - u_min) * i as f64 / (count - 1) as f64;
            let q = log_zeta(&coin, u, &quad).ok().map(|r| r.value.re);
            let cf = match fam {
                WalkFamily::Rw { d } => rw_log_zeta_closed(d, u, 200).ok().map(|r| r.value),
                WalkFamily::QwM { xi } => qw_log_zeta_closed(xi, u, ShiftType::M).ok(),
                WalkFamily::QwF { xi } => qw_log_zeta_closed(xi, u, ShiftType::F).ok(),
            };
            json!({"u": u, "quadrature": q, "closed_form": cf})
        })
        .collect();
    Ok(serde_json::Value::from(rows).to_string())
}

/// `|Ψ_n(x)|²` on sites `-n..=n` of the two-state quantum walk started at
/// the origin in `(a, i·b)` (normalised).
pub fn qw_measure_values(xi: f64, flip_flop: bool, steps: usize, a: f64, b: f64) -> Result<Vec<f64>, String> {
    if steps > STEP_CAP {
        return Err(format!("at most {STEP_CAP} steps"));
    }
    let norm = (a * a + b * b).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err("initial state must be non-zero".into());
    }
    let shift = if flip_flop { ShiftType::F } else { ShiftType::M };
    let coin = qw_coin(xi, shift);
    let psi0 = [Complex64::new(a / norm, 0.0), Complex64::new(0.0, b / norm)];
    let mut s = WalkState::delta(Domain::Lattice { d: 1, radius: 0 }, &psi0).map_err(|e| e.to_string())?;
    for _ in 0..steps {
        s = evolve(&s, &coin).map_err(|e| e.to_string())?;
    }
    measure(&s, 2).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn amoeba_raster(u: f64, half: f64, n: usize) -> Result<String, JsError> {
    amoeba_json(u, half, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn log_zeta_curve(model: &str, xi: f64, u_min: f64, u_max: f64, count: usize) -> Result<String, JsError> {
    log_zeta_curve_json(model, xi, u_min, u_max, count).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn qw_measure(xi: f64, flip_flop: bool, steps: usize, a: f64, b: f64) -> Result<Vec<f64>, JsError> {
    qw_measure_values(xi, flip_flop, steps, a, b).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raster_has_five_components() {
        let v: serde_json::Value = serde_json::from_str(&amoeba_json(0.9, 3.0, 120).unwrap()).unwrap();
        assert_eq!(v["components"].as_array().unwrap().len(), 5);
        assert!(amoeba_json(0.9, 3.0, 1).is_err());
    }

    #[test]
    fn curve_matches_closed_form() {
        let v: serde_json::Value =
            serde_json::from_str(&log_zeta_curve_json("rw1", 0.0, -0.9, 0.9, 7).unwrap()).unwrap();
        for row in v.as_array().unwrap() {
            let q = row["quadrature"].as_f64().unwrap();
            let c = row["closed_form"].as_f64().unwrap();
            assert!((q - c).abs() < 1e-8);
        }
        let v: serde_json::Value =
            serde_json::from_str(&log_zeta_curve_json("qw-m", 0.7, -0.4, 0.2, 4).unwrap()).unwrap();
        assert!(v[3]["quadrature"].is_null());
        assert!(log_zeta_curve_json("nope", 0.0, 0.0, 1.0, 3).is_err());
    }

    #[test]
    fn measure_sums_to_one() {
        let mu = qw_measure_values(std::f64::consts::FRAC_PI_4, false, 12, 1.0, 1.0).unwrap();
        assert_eq!(mu.len(), 25);
        assert!((mu.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        // symmetric start gives a symmetric distribution
        assert!((mu[0] - mu[24]).abs() < 1e-12);
        assert!(qw_measure_values(0.5, true, 21, 1.0, 0.0).is_err());
    }
}
