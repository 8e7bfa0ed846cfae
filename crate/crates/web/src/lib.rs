//! WebAssembly bindings behind the static page in `www/`.
//!
//! Every export returns a JSON string so the page needs no generated glue
//! beyond what `wasm-bindgen` emits.

use ffkr::kakeya;
use ffkr::restriction::{self, PowerConfig};
use ffkr::varieties::{self, SurfaceFunction, SurfaceId, SurfaceKind};
use ffkr::{Exponent, FieldSpec};
use num_complex::Complex64;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_PLANE_ORDER: u32 = 61;

fn prime_field(p: u32) -> Result<FieldSpec, String> {
    if p > MAX_PLANE_ORDER {
        return Err(format!("choose a prime up to {MAX_PLANE_ORDER}"));
    }
    FieldSpec::prime(p).map_err(|e| e.to_string())
}

/// The planar Besicovitch set over `F_p` as a row-major `p x p` 0/1 mask
/// (row = t, column = x) together with its size and one line per direction.
pub fn besicovitch_json(p: u32) -> Result<String, String> {
    let field = prime_field(p)?;
    let w = kakeya::besicovitch_2d(&field).map_err(|e| e.to_string())?;
    let q = field.order() as usize;
    let mut mask = vec![0u8; q * q];
    for &i in &w.set {
        let (x, t) = (i % q, i / q);
        mask[t * q + x] = 1;
    }
    let lines: Vec<Vec<usize>> = w
        .lines(&field)
        .iter()
        .map(|l| l.point_indices(&field))
        .collect();
    Ok(json!({ "p": p, "size": w.set.len(), "expected": (q * q + q) / 2, "mask": mask, "lines": lines }).to_string())
}

/// `|(d sigma)^v(x)|` for the parabola over `F_p`, row-major with row = x_2.
pub fn kernel_json(p: u32) -> Result<String, String> {
    let field = prime_field(p)?;
    let s = varieties::SurfaceMeasure::paraboloid(&field, 2).map_err(|e| e.to_string())?;
    let k = varieties::extension(&SurfaceFunction::constant(&s, Complex64::new(1.0, 0.0)))
        .map_err(|e| e.to_string())?;
    let values: Vec<f64> = k.values().iter().map(|z| z.norm()).collect();
    Ok(json!({ "p": p, "values": values }).to_string())
}

fn surface_kind(name: &str) -> Result<(SurfaceKind, usize), String> {
    match name {
        "parabola" => Ok((SurfaceKind::Paraboloid, 2)),
        "paraboloid" => Ok((SurfaceKind::Paraboloid, 3)),
        "cone" => Ok((SurfaceKind::Cone, 3)),
        "moment-curve" => Ok((SurfaceKind::MomentCurve, 3)),
        _ => Err(format!("unknown surface `{name}`")),
    }
}

/// Closed-form, counting and power-iteration certificates for `R*(p -> q)`.
pub fn estimate_json(
    prime: u32,
    surface: &str,
    p: &str,
    q: &str,
    seed: u64,
) -> Result<String, String> {
    let field = prime_field(prime)?;
    let (kind, n) = surface_kind(surface)?;
    if n == 3 && prime > 13 {
        return Err("surfaces in dimension 3 are limited to p <= 13 here".into());
    }
    let s = SurfaceId {
        kind,
        n,
        include_origin: false,
    }
    .build(&field)
    .map_err(|e| e.to_string())?;
    let p: Exponent = p.parse().map_err(|e: ffkr::Error| e.to_string())?;
    let q: Exponent = q.parse().map_err(|e: ffkr::Error| e.to_string())?;
    let mut certs = Vec::new();
    if let Ok(c) = restriction::rstar_exact_closed(p, q, &s) {
        certs.push(c);
    }
    if let Some(e) = q.is_even_integer().filter(|_| p == Exponent::int(2)) {
        let c = restriction::rstar_upper_even(&s, e as usize / 2, varieties::DEFAULT_BUDGET)
            .map_err(|e| e.to_string())?;
        certs.push(c);
    }
    let cfg = PowerConfig {
        restarts: 8,
        max_iters: 200,
        seed,
        ..PowerConfig::default()
    };
    certs.push(restriction::rstar_lower_power(p, q, &s, &cfg).map_err(|e| e.to_string())?);
    let rows: Vec<_> = certs
        .iter()
        .map(|c| json!({ "kind": format!("{:?}", c.kind), "method": format!("{:?}", c.method), "value": c.value }))
        .collect();
    let consistent = restriction::consistency_check(&certs).is_ok();
    Ok(json!({ "surface": s.label(), "points": s.len(), "certificates": rows, "consistent": consistent }).to_string())
}

#[wasm_bindgen]
pub fn besicovitch(p: u32) -> Result<String, JsValue> {
    besicovitch_json(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn kernel(p: u32) -> Result<String, JsValue> {
    kernel_json(p).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn estimate(prime: u32, surface: &str, p: &str, q: &str, seed: u32) -> Result<String, JsValue> {
    estimate_json(prime, surface, p, q, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn besicovitch_mask_matches_size() {
        let v = parse(&besicovitch_json(7).unwrap());
        assert_eq!(v["size"], 28);
        let ones = v["mask"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|b| b.as_u64() == Some(1))
            .count();
        assert_eq!(ones, 28);
        assert_eq!(v["lines"].as_array().unwrap().len(), 7);
    }

    #[test]
    fn kernel_has_unit_origin() {
        let v = parse(&kernel_json(5).unwrap());
        assert!((v["values"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn estimate_reports_consistent_bounds() {
        let v = parse(&estimate_json(5, "parabola", "2", "4", 0).unwrap());
        assert_eq!(v["consistent"], true);
        assert!(estimate_json(5, "sphere", "2", "4", 0).is_err());
        assert!(estimate_json(97, "parabola", "2", "4", 0).is_err());
    }
}
