//! WebAssembly bindings behind `www/index.html`: geodesic fans, filtered
//! backprojection, and fan-beam X-ray data on a chosen metric.

use geoxray::field::Grid2;
use geoxray::geodesic::{trace_geodesic_with, PhaseState, TraceOptions};
use geoxray::phantoms::{Analytic, Bump};
use geoxray::radon::{fbp_invert, radon_forward};
use geoxray::xray::{xray_forward, FanGeometry};
use geoxray::ConformalMetric;
use wasm_bindgen::prelude::*;

const T_MAX: f64 = 30.0;

fn js(e: geoxray::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn metric(spec: &str) -> Result<ConformalMetric, JsError> {
    if spec.trim_start().starts_with("grid") {
        return Err(JsError::new("gridded metrics need a file and are not available here"));
    }
    ConformalMetric::parse(spec).map_err(js)
}

/// Geodesics entering at boundary angle `beta`, `n` directions spread across
/// the inward half plane. Returns `x, y` pairs, one polyline per ray,
/// separated by `NaN, NaN`.
#[wasm_bindgen]
pub fn geodesic_fan(metric_spec: &str, beta: f64, n: usize, step: f64) -> Result<Vec<f64>, JsError> {
    let m = metric(metric_spec)?;
    let n = n.clamp(1, 256);
    let mut out = Vec::new();
    for j in 0..n {
        let alpha = -std::f64::consts::FRAC_PI_2 + (j as f64 + 0.5) * std::f64::consts::PI / n as f64;
        let path = trace_geodesic_with(&m, PhaseState::inward(beta, alpha), TraceOptions::with_step(step, T_MAX))
            .map_err(js)?;
        for s in &path.samples {
            out.extend_from_slice(&s.state.x);
        }
        out.extend_from_slice(&[f64::NAN, f64::NAN]);
    }
    Ok(out)
}

/// Row-major image, row 0 at the bottom (smallest y or first angle).
#[wasm_bindgen]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

#[wasm_bindgen]
impl Image {
    #[wasm_bindgen(getter)]
    pub fn width(&self) -> usize {
        self.width
    }

    #[wasm_bindgen(getter)]
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> Vec<f64> {
        self.data.clone()
    }
}

#[wasm_bindgen]
pub struct FbpResult {
    phantom: Image,
    sinogram: Image,
    recon: Image,
    rel_error: f64,
}

#[wasm_bindgen]
impl FbpResult {
    pub fn phantom(&self) -> Image {
        Image { data: self.phantom.data.clone(), ..self.phantom }
    }

    pub fn sinogram(&self) -> Image {
        Image { data: self.sinogram.data.clone(), ..self.sinogram }
    }

    pub fn recon(&self) -> Image {
        Image { data: self.recon.data.clone(), ..self.recon }
    }

    #[wasm_bindgen(getter)]
    pub fn rel_error(&self) -> f64 {
        self.rel_error
    }
}

fn two_bumps() -> Analytic {
    Analytic::Bumps(vec![
        Bump { center: [0.3, 0.1], radius: 0.35, amplitude: 1.0 },
        Bump { center: [-0.35, -0.2], radius: 0.3, amplitude: 0.7 },
    ])
}

/// Radon transform and filtered backprojection of a two-bump phantom on an
/// `n × n` grid with `angles` directions.
#[wasm_bindgen]
pub fn fbp_demo(n: usize, angles: usize) -> Result<FbpResult, JsError> {
    let grid = Grid2::square(n.clamp(32, 256), 1.0).map_err(js)?;
    let f = two_bumps().rasterize(grid);
    let sino = radon_forward(&f, 2 * grid.nx, angles.clamp(8, 1024), 0.5 * grid.dx()).map_err(js)?;
    let rec = fbp_invert(&sino, grid).map_err(js)?;
    let rel_error = rec.relative_error(&f, |_| true).map_err(js)?;
    Ok(FbpResult {
        phantom: Image { width: grid.nx, height: grid.ny, data: f.values },
        sinogram: Image { width: sino.ns, height: sino.n_omega, data: sino.values },
        recon: Image { width: grid.nx, height: grid.ny, data: rec.values },
        rel_error,
    })
}

/// Fan-beam data `If(β, α)` of the two-bump phantom: width `n_alpha`,
/// height `n_beta`; trapped rays are `NaN`.
#[wasm_bindgen]
pub fn xray_fan(metric_spec: &str, n_beta: usize, n_alpha: usize, step: f64) -> Result<Image, JsError> {
    let m = metric(metric_spec)?;
    let g = FanGeometry::new(n_beta.clamp(4, 360), n_alpha.clamp(4, 360)).map_err(js)?;
    let d = xray_forward(&m, &two_bumps(), g, TraceOptions::with_step(step, T_MAX)).map_err(js)?;
    let data = d
        .values
        .iter()
        .zip(&d.status)
        .map(|(v, s)| if *s == geoxray::xray::RayStatus::Ok { *v } else { f64::NAN })
        .collect();
    Ok(Image { width: g.n_alpha, height: g.n_beta, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fan_polylines_are_separated() {
        let pts = geodesic_fan("sphere-cap:0.5", 0.0, 3, 0.05).unwrap_or_else(|_| panic!());
        assert_eq!(pts.iter().filter(|v| v.is_nan()).count(), 6);
        assert!(pts.chunks(2).filter(|p| !p[0].is_nan()).all(|p| p[0].hypot(p[1]) <= 1.0 + 1e-9));
    }

    #[test]
    fn fbp_demo_reconstructs() {
        let r = fbp_demo(64, 96).unwrap_or_else(|_| panic!());
        assert!(r.rel_error() < 0.05, "{}", r.rel_error());
        assert_eq!(r.sinogram().data().len(), 128 * 96);
    }

    #[test]
    fn flat_fan_has_no_trapped_rays() {
        let img = xray_fan("euclidean", 8, 8, 0.02).unwrap_or_else(|_| panic!());
        assert!(img.data().iter().all(|v| v.is_finite()));
    }
}
