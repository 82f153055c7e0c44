//! Browser bindings: polygon image, Schwarz-equation boundary trace and the
//! Beltrami heatmap. Results cross the boundary as JSON strings or flat
//! `Float64Array`s.

use serde_json::json;
use wasm_bindgen::prelude::*;

use berslab::beltrami::{ahlfors_weill_field, field_grid};
use berslab::norms::{half_plane_norms, SupBudget};
use berslab::polygon::{critical_radius, validate_polygon, PolygonSpec, ScMap};
use berslab::rational::log_derivative_from_polygon;
use berslab::schwarz::{trace_boundary, ProbeSubject, TraceOptions, Variant};
use berslab::C64;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

fn polygon(alphas: &[f64], prevertices: &[f64]) -> Result<PolygonSpec, JsError> {
    validate_polygon(alphas, prevertices, C64::new(0.0, 0.0), C64::new(1.0, 0.0)).map_err(js_err)
}

fn pairs(points: &[C64]) -> Vec<[f64; 2]> {
    points.iter().map(|p| [p.re, p.im]).collect()
}

fn subject(spec: &PolygonSpec) -> Result<ProbeSubject, JsError> {
    ProbeSubject::new(log_derivative_from_polygon(spec), critical_radius(spec).r0).map_err(js_err)
}

/// Image polygon and critical radius:
/// `{"points", "vertices", "r0", "quad"}`.
#[wasm_bindgen]
pub fn polygon_image(alphas: &[f64], prevertices: &[f64], samples_per_edge: usize) -> Result<String, JsError> {
    let spec = polygon(alphas, prevertices)?;
    let map = ScMap::new(&spec).map_err(js_err)?;
    let poly = map.image_polygon(samples_per_edge.max(2)).map_err(js_err)?;
    let cr = critical_radius(&spec);
    Ok(json!({
        "points": pairs(&poly.points),
        "vertices": pairs(map.vertices()),
        "r0": cr.r0,
        "quad": [cr.quad_coeffs.0, cr.quad_coeffs.1, cr.quad_coeffs.2],
    })
    .to_string())
}

/// Boundary trace of `w` with `S_w` on the chosen ray at parameter `t`:
/// `{"points", "simple", "indeterminate", "min_gap", "hp1", "hp4"}`.
#[wasm_bindgen]
pub fn schwarz_trace(alphas: &[f64], prevertices: &[f64], t: f64, variant: &str, samples: usize) -> Result<String, JsError> {
    let spec = polygon(alphas, prevertices)?;
    let phi = subject(&spec)?.schwarzian(Variant::parse(variant).map_err(js_err)?, t).map_err(js_err)?;
    let need = 8 * spec.len();
    let tr = trace_boundary(&phi, samples.max(need), &TraceOptions { vertex_images: false, ..TraceOptions::default() }).map_err(js_err)?;
    let (hp1, hp4) = half_plane_norms(&phi, &SupBudget::default().with_levels(1));
    Ok(json!({
        "points": pairs(&tr.points),
        "simple": tr.simple,
        "indeterminate": tr.indeterminate,
        "min_gap": tr.min_gap,
        "hp1": hp1.value,
        "hp4": hp4.value,
    })
    .to_string())
}

/// `|nu|` on an `nx` by `ny` grid over `[x0, x1] x [-y1, -y0]`, row by row
/// from `y = -y0` downward. Conjugate poles come back as NaN.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn beltrami_heatmap(
    alphas: &[f64],
    prevertices: &[f64],
    t: f64,
    variant: &str,
    scale: f64,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsError> {
    let spec = polygon(alphas, prevertices)?;
    let phi = subject(&spec)?.schwarzian(Variant::parse(variant).map_err(js_err)?, t).map_err(js_err)?;
    let field = ahlfors_weill_field(&phi, scale).map_err(js_err)?;
    let rows = field_grid(&field, (x0, x1), (y0, y1), nx, ny).map_err(js_err)?;
    Ok(rows.into_iter().map(|(_, _, v)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_outputs_parse() {
        let a = [0.5; 4];
        let p = [0.0, 1.0, 2.0, 4.0];
        let img: serde_json::Value = serde_json::from_str(&polygon_image(&a, &p, 8).unwrap()).unwrap();
        assert!((img["r0"].as_f64().unwrap() - 0.696663).abs() < 1e-6);
        let tr: serde_json::Value = serde_json::from_str(&schwarz_trace(&a, &p, 0.5, "homotopy", 64).unwrap()).unwrap();
        assert_eq!(tr["simple"], true);
        let heat = beltrami_heatmap(&a, &p, 0.5, "scaled", 0.5, -1.0, 5.0, 0.01, 2.0, 6, 5).unwrap();
        assert_eq!(heat.len(), 30);
    }
}
