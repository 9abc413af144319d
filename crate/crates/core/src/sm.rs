//! Finite-difference calculus on the unit sphere bundle `SM` of a conformal
//! disk, in coordinates `(x₁, x₂, θ)`.
//!
//! The frame is
//!
//! ```text
//! X  = e^{−λ}( cos θ ∂₁ + sin θ ∂₂ + (−∂₁λ sin θ + ∂₂λ cos θ) ∂_θ)
//! X⊥ = −e^{−λ}(−sin θ ∂₁ + cos θ ∂₂ − ( ∂₁λ cos θ + ∂₂λ sin θ) ∂_θ)
//! V  = ∂_θ
//! ```
//!
//! discretized with fourth-order central differences in x (zero extension
//! beyond the grid) and periodic fourth-order differences in θ. Operators are
//! evaluated at nodes with `|x| < 1 − h` and return 0 elsewhere; integrals use
//! the Liouville density `e^{2λ} dx dθ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid2, PlaneFunction};
use crate::geodesic::{integrate_along, PhaseState, TraceOptions};
use crate::metric::{ConformalMetric, LambdaJet};
use crate::parallel::map_indexed;
use crate::xray::{xray_forward, FanGeometry, RayStatus};
use crate::Point;

/// Minimum samples per axis for the fourth-order stencils.
pub const MIN_SAMPLES: usize = 32;
/// Width of the boundary collar, in cells, on which compact fields vanish.
pub const COLLAR_CELLS: f64 = 3.0;
const EPS: f64 = 1e-14;

/// Samples of a function on `SM` at (pixel center) × `θ_m`, with
/// `θ_m = −π + (m + 1)·2π/n_θ` so the angles cover `(−π, π]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SMField {
    pub grid: Grid2,
    pub ntheta: usize,
    /// `values[p * ntheta + m]`, θ innermost.
    pub values: Vec<f64>,
    /// Declared to vanish on the boundary collar (checked by [`SMField::compact`]).
    pub compact: bool,
}

impl SMField {
    pub fn zeros(grid: Grid2, ntheta: usize) -> Result<Self> {
        check_resolution(grid, ntheta)?;
        Ok(Self { grid, ntheta, values: vec![0.0; grid.len() * ntheta], compact: false })
    }

    pub fn from_fn(grid: Grid2, ntheta: usize, f: impl Fn(Point, f64) -> f64 + Sync) -> Result<Self> {
        check_resolution(grid, ntheta)?;
        let rows = map_indexed(grid.len(), |p| {
            let x = grid.center_of(p);
            (0..ntheta).map(|m| f(x, theta(m, ntheta))).collect::<Vec<_>>()
        });
        Ok(Self { grid, ntheta, values: rows.concat(), compact: false })
    }

    /// Marks the field compactly supported after checking that it vanishes on
    /// every node with `|x| ≥ 1 − 3h`.
    pub fn compact(mut self) -> Result<Self> {
        self.compact = true;
        self.check_collar()?;
        Ok(self)
    }

    pub fn theta(&self, m: usize) -> f64 {
        theta(m, self.ntheta)
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.ntheta as f64
    }

    pub fn h(&self) -> f64 {
        self.grid.dx().max(self.grid.dy())
    }

    pub fn at(&self, p: usize, m: usize) -> f64 {
        self.values[p * self.ntheta + m]
    }

    pub fn fiber(&self, p: usize) -> &[f64] {
        &self.values[p * self.ntheta..(p + 1) * self.ntheta]
    }

    /// Bilinear in x, linear (periodic) in θ; zero off the grid.
    pub fn sample(&self, x: Point, th: f64) -> f64 {
        let (st, n) = self.grid.bilinear(x);
        let u = (th + PI) / self.dtheta() - 1.0;
        let u = u.rem_euclid(self.ntheta as f64);
        let m0 = (u.floor() as usize) % self.ntheta;
        let a = u - u.floor();
        let m1 = (m0 + 1) % self.ntheta;
        st[..n].iter().map(|(p, w)| w * ((1.0 - a) * self.at(*p, m0) + a * self.at(*p, m1))).sum()
    }

    fn check_collar(&self) -> Result<()> {
        let limit = 1.0 - COLLAR_CELLS * self.h();
        let mut nonzero = 0;
        for p in 0..self.grid.len() {
            let x = self.grid.center_of(p);
            if x[0].hypot(x[1]) >= limit && self.fiber(p).iter().any(|v| *v != 0.0) {
                nonzero += 1;
            }
        }
        if nonzero > 0 {
            return Err(Error::Support { nonzero });
        }
        Ok(())
    }

    fn same_shape(&self, other: &SMField) -> Result<()> {
        if self.grid != other.grid || self.ntheta != other.ntheta {
            return Err(Error::GridMismatch("SM fields on different grids".into()));
        }
        Ok(())
    }

    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { grid: self.grid, ntheta: self.ntheta, values, compact: false }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.with_values(self.values.iter().map(|v| a * v).collect())
    }

    pub fn sub(&self, other: &SMField) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect()))
    }

    pub fn add(&self, other: &SMField) -> Result<Self> {
        self.same_shape(other)?;
        Ok(self.with_values(self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect()))
    }
}

fn theta(m: usize, n: usize) -> f64 {
    -PI + (m + 1) as f64 * 2.0 * PI / n as f64
}

fn check_resolution(grid: Grid2, ntheta: usize) -> Result<()> {
    if grid.nx < MIN_SAMPLES || grid.ny < MIN_SAMPLES || ntheta < MIN_SAMPLES {
        return Err(Error::param(format!(
            "SM grids need at least {MIN_SAMPLES} samples per axis, got {}x{}x{ntheta}",
            grid.nx, grid.ny
        )));
    }
    if grid.xmin > -1.0 || grid.xmax < 1.0 || grid.ymin > -1.0 || grid.ymax < 1.0 {
        return Err(Error::param("the SM grid must cover the closed unit disk"));
    }
    Ok(())
}

/// Fourth-order central difference weights for offsets ±1, ±2.
const D1: [f64; 2] = [8.0 / 12.0, -1.0 / 12.0];

/// Precomputed metric data for one grid.
struct Frame {
    grid: Grid2,
    ntheta: usize,
    /// Jet at each node with `|x| < 1 − h`.
    jets: Vec<Option<LambdaJet>>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Frame {
    fn new(metric: &ConformalMetric, grid: Grid2, ntheta: usize) -> Result<Self> {
        let h = grid.dx().max(grid.dy());
        let mut jets = Vec::with_capacity(grid.len());
        for p in 0..grid.len() {
            let x = grid.center_of(p);
            jets.push(if x[0].hypot(x[1]) < 1.0 - h { Some(metric.jet(x)?) } else { None });
        }
        let cos = (0..ntheta).map(|m| theta(m, ntheta).cos()).collect();
        let sin = (0..ntheta).map(|m| theta(m, ntheta).sin()).collect();
        Ok(Self { grid, ntheta, jets, cos, sin })
    }

    fn for_field(metric: &ConformalMetric, u: &SMField) -> Result<Self> {
        if u.compact {
            u.check_collar()?;
        }
        Self::new(metric, u.grid, u.ntheta)
    }

    /// ∂/∂x_axis at node p, all θ, into `out`.
    fn dx(&self, u: &[f64], p: usize, axis: usize, out: &mut [f64]) {
        let (i, j) = (p % self.grid.nx, p / self.grid.nx);
        let (pos, n, stride, h) = if axis == 0 {
            (i, self.grid.nx, self.ntheta, self.grid.dx())
        } else {
            (j, self.grid.ny, self.grid.nx * self.ntheta, self.grid.dy())
        };
        let base = p * self.ntheta;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, c) in D1.iter().enumerate() {
            let d = k + 1;
            let c = c / h;
            if pos + d < n {
                let off = base + d * stride;
                for (o, v) in out.iter_mut().zip(&u[off..off + self.ntheta]) {
                    *o += c * v;
                }
            }
            if pos >= d {
                let off = base - d * stride;
                for (o, v) in out.iter_mut().zip(&u[off..off + self.ntheta]) {
                    *o -= c * v;
                }
            }
        }
    }

    fn dtheta(&self, fiber: &[f64], out: &mut [f64]) {
        let n = self.ntheta;
        let h = 2.0 * PI / n as f64;
        for m in 0..n {
            let at = |d: isize| fiber[(m as isize + d).rem_euclid(n as isize) as usize];
            out[m] = (D1[0] * (at(1) - at(-1)) + D1[1] * (at(2) - at(-2))) / h;
        }
    }

    fn apply(&self, u: &SMField, kind: Op) -> SMField {
        let n = self.ntheta;
        let rows = map_indexed(self.grid.len(), |p| {
            let mut out = vec![0.0; n];
            if kind == Op::V {
                self.dtheta(u.fiber(p), &mut out);
                return out;
            }
            let Some(jet) = self.jets[p] else { return out };
            let (mut d1, mut d2, mut dt) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
            self.dx(&u.values, p, 0, &mut d1);
            self.dx(&u.values, p, 1, &mut d2);
            self.dtheta(u.fiber(p), &mut dt);
            let e = (-jet.value).exp();
            let [g1, g2] = jet.grad;
            for m in 0..n {
                let (c, s) = (self.cos[m], self.sin[m]);
                out[m] = match kind {
                    Op::X => e * (c * d1[m] + s * d2[m] + (-g1 * s + g2 * c) * dt[m]),
                    Op::XPerp => -e * (-s * d1[m] + c * d2[m] - (g1 * c + g2 * s) * dt[m]),
                    Op::V => unreachable!(),
                };
            }
            out
        });
        u.with_values(rows.concat())
    }

    fn density(&self, metric: &ConformalMetric) -> Vec<f64> {
        (0..self.grid.len())
            .map(|p| {
                let x = self.grid.center_of(p);
                if x[0].hypot(x[1]) < 1.0 {
                    metric.density(x).unwrap_or(0.0)
                } else {
                    0.0
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    X,
    XPerp,
    V,
}

pub fn apply_x(metric: &ConformalMetric, u: &SMField) -> Result<SMField> {
    Ok(Frame::for_field(metric, u)?.apply(u, Op::X))
}

pub fn apply_xperp(metric: &ConformalMetric, u: &SMField) -> Result<SMField> {
    Ok(Frame::for_field(metric, u)?.apply(u, Op::XPerp))
}

pub fn apply_v(metric: &ConformalMetric, u: &SMField) -> Result<SMField> {
    Ok(Frame::for_field(metric, u)?.apply(u, Op::V))
}

/// `(u, w) = ∫∫ u w e^{2λ} dθ dx` over nodes inside the disk, summed in a
/// fixed order.
pub fn inner_product(metric: &ConformalMetric, u: &SMField, w: &SMField) -> Result<f64> {
    u.same_shape(w)?;
    let frame = Frame::new(metric, u.grid, u.ntheta)?;
    Ok(weighted_inner(&frame.density(metric), u, w))
}

fn weighted_inner(density: &[f64], u: &SMField, w: &SMField) -> f64 {
    let n = u.ntheta;
    let per_node = map_indexed(u.grid.len(), |p| {
        if density[p] == 0.0 {
            return 0.0;
        }
        let s: f64 = u.fiber(p).iter().zip(w.fiber(p)).map(|(a, b)| a * b).sum();
        s * density[p]
    });
    crate::parallel::pairwise_sum(&per_node) * u.grid.cell_area() * 2.0 * PI / n as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    /// `[X, V] = X⊥`
    pub r1: f64,
    /// `[V, X⊥] = X`
    pub r2: f64,
    /// `[X, X⊥] = −KV`
    pub r3: f64,
}

impl CommutatorReport {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }
}

/// Each residual is `‖lhs − rhs‖` divided by the sum of the norms of the
/// three terms involved (floored at 1e−14), in the Liouville L² norm.
pub fn commutator_residuals(metric: &ConformalMetric, u: &SMField) -> Result<CommutatorReport> {
    let fr = Frame::for_field(metric, u)?;
    let dens = fr.density(metric);
    let norm = |f: &SMField| weighted_inner(&dens, f, f).sqrt();
    let rel = |a: &SMField, b: &SMField, c: &SMField| -> Result<f64> {
        let d = a.sub(b)?.sub(c)?;
        Ok(norm(&d) / (norm(a) + norm(b) + norm(c)).max(EPS))
    };
    let xu = fr.apply(u, Op::X);
    let vu = fr.apply(u, Op::V);
    let pu = fr.apply(u, Op::XPerp);
    let xvu = fr.apply(&vu, Op::X);
    let vxu = fr.apply(&xu, Op::V);
    let r1 = rel(&xvu, &vxu, &pu)?;
    let vpu = fr.apply(&pu, Op::V);
    let pvu = fr.apply(&vu, Op::XPerp);
    let r2 = rel(&vpu, &pvu, &xu)?;
    let xpu = fr.apply(&pu, Op::X);
    let pxu = fr.apply(&xu, Op::XPerp);
    let kvu = curvature_times(metric, &fr, &vu)?.scaled(-1.0);
    let r3 = rel(&xpu, &pxu, &kvu)?;
    Ok(CommutatorReport { r1, r2, r3 })
}

fn curvature_times(metric: &ConformalMetric, fr: &Frame, u: &SMField) -> Result<SMField> {
    let mut out = u.values.clone();
    for p in 0..fr.grid.len() {
        let k = match fr.jets[p] {
            Some(j) => j.curvature(),
            None => 0.0,
        };
        let _ = metric;
        out[p * fr.ntheta..(p + 1) * fr.ntheta].iter_mut().for_each(|v| *v *= k);
    }
    Ok(u.with_values(out))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkewReport {
    /// `|(Xu, w) + (u, Xw)| / (‖u‖‖w‖)`
    pub x: f64,
    /// Same for V.
    pub v: f64,
}

pub fn skew_adjointness(metric: &ConformalMetric, u: &SMField, w: &SMField) -> Result<SkewReport> {
    u.same_shape(w)?;
    let fr = Frame::for_field(metric, u)?;
    if w.compact {
        w.check_collar()?;
    }
    let dens = fr.density(metric);
    let ip = |a: &SMField, b: &SMField| weighted_inner(&dens, a, b);
    let scale = (ip(u, u) * ip(w, w)).sqrt().max(EPS);
    let (xu, xw) = (fr.apply(u, Op::X), fr.apply(w, Op::X));
    let (vu, vw) = (fr.apply(u, Op::V), fr.apply(w, Op::V));
    Ok(SkewReport { x: (ip(&xu, w) + ip(u, &xw)).abs() / scale, v: (ip(&vu, w) + ip(u, &vw)).abs() / scale })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PestovReport {
    /// `‖VXu‖²`
    pub lhs: f64,
    /// `‖XVu‖² − (KVu, Vu) + ‖Xu‖²`
    pub rhs: f64,
    /// The curvature term `−(KVu, Vu)`.
    pub curvature_term: f64,
    pub rel_residual: f64,
}

pub fn pestov_residual(metric: &ConformalMetric, u: &SMField) -> Result<PestovReport> {
    let fr = Frame::for_field(metric, u)?;
    let dens = fr.density(metric);
    let ip = |a: &SMField, b: &SMField| weighted_inner(&dens, a, b);
    let xu = fr.apply(u, Op::X);
    let vu = fr.apply(u, Op::V);
    let vxu = fr.apply(&xu, Op::V);
    let xvu = fr.apply(&vu, Op::X);
    let kvu = curvature_times(metric, &fr, &vu)?;
    let lhs = ip(&vxu, &vxu);
    let curvature_term = -ip(&kvu, &vu);
    let rhs = ip(&xvu, &xvu) + curvature_term + ip(&xu, &xu);
    let rel_residual = (lhs - rhs).abs() / lhs.max(rhs).max(EPS);
    Ok(PestovReport { lhs, rhs, curvature_term, rel_residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SantaloReport {
    pub volume_side: f64,
    pub fan_side: f64,
    pub rel_residual: f64,
}

/// `∫_{SM} w dΣ` by grid quadrature against `∫_{∂₊SM} ∫₀^τ w(φ_t) dt μ` by
/// tracing the fan, with `w` interpolated off-grid.
pub fn santalo_residual(
    metric: &ConformalMetric,
    w: &SMField,
    geometry: FanGeometry,
    trace: TraceOptions,
) -> Result<SantaloReport> {
    let fr = Frame::new(metric, w.grid, w.ntheta)?;
    let dens = fr.density(metric);
    let ones = w.with_values(vec![1.0; w.values.len()]);
    let volume_side = weighted_inner(&dens, w, &ones);
    let weights = geometry.weights(metric)?;
    let rays =
        map_indexed(geometry.len(), |r| integrate_along(metric, geometry.state(r), trace, |x, t| w.sample(x, t)));
    let mut per_ray = Vec::with_capacity(rays.len());
    for (r, v) in rays.into_iter().enumerate() {
        match v? {
            Some(v) => per_ray.push(weights[r] * v),
            None => {
                return Err(Error::Integration(format!("fan ray {r} is trapped; the boundary integral is undefined")))
            }
        }
    }
    let fan_side = crate::parallel::pairwise_sum(&per_ray);
    let rel_residual = (volume_side - fan_side).abs() / volume_side.abs().max(fan_side.abs()).max(EPS);
    Ok(SantaloReport { volume_side, fan_side, rel_residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    /// `‖Xu^f + f‖ / ‖f‖` on nodes with `|x| < 1 − 3h`.
    pub residual: f64,
    /// Largest `|u^f − If|` over the boundary fan, relative to `max|If|`.
    pub boundary_mismatch: f64,
    pub trapped: usize,
}

/// Builds `u^f(x, θ) = ∫₀^τ f(φ_t(x, θ)) dt` on the grid by forward tracing.
/// Nodes outside the disk and trapped fibers hold 0; the second value counts
/// trapped fibers.
pub fn primitive(
    metric: &ConformalMetric,
    f: &impl PlaneFunction,
    grid: Grid2,
    ntheta: usize,
    trace: TraceOptions,
) -> Result<(SMField, usize)> {
    check_resolution(grid, ntheta)?;
    let rows = map_indexed(grid.len(), |p| {
        let x = grid.center_of(p);
        let mut out = vec![0.0; ntheta];
        let mut trapped = 0;
        if x[0].hypot(x[1]) >= 1.0 {
            return (out, trapped);
        }
        for (m, o) in out.iter_mut().enumerate() {
            match integrate_along(metric, PhaseState::new(x, theta(m, ntheta)), trace, |y, _| f.value(y)) {
                Ok(Some(v)) => *o = v,
                _ => trapped += 1,
            }
        }
        (out, trapped)
    });
    let trapped = rows.iter().map(|r| r.1).sum();
    let values = rows.into_iter().flat_map(|r| r.0).collect();
    Ok((SMField { grid, ntheta, values, compact: false }, trapped))
}

/// Checks `Xu^f = −f` in the interior and `u^f|_{∂₊SM} = If` on `geometry`.
pub fn primitive_and_transport_check(
    metric: &ConformalMetric,
    f: &impl PlaneFunction,
    grid: Grid2,
    ntheta: usize,
    geometry: FanGeometry,
    trace: TraceOptions,
) -> Result<TransportReport> {
    let (u, trapped) = primitive(metric, f, grid, ntheta, trace)?;
    let fr = Frame::new(metric, grid, ntheta)?;
    let xu = fr.apply(&u, Op::X);
    let limit = 1.0 - COLLAR_CELLS * u.h();
    let dens = fr.density(metric);
    let (mut num, mut den) = (Vec::new(), Vec::new());
    for p in 0..grid.len() {
        let x = grid.center_of(p);
        if x[0].hypot(x[1]) >= limit {
            continue;
        }
        let fx = f.value(x);
        let r: f64 = xu.fiber(p).iter().map(|v| (v + fx).powi(2)).sum();
        num.push(r * dens[p]);
        den.push(fx * fx * ntheta as f64 * dens[p]);
    }
    let (num, den) = (crate::parallel::pairwise_sum(&num), crate::parallel::pairwise_sum(&den));
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };

    // The fan transform with a halved step is an independent evaluation of If.
    let fine = TraceOptions::with_step(0.5 * trace.step, trace.t_max);
    let data = xray_forward(metric, f, geometry, fine)?;
    let direct = map_indexed(geometry.len(), |r| {
        integrate_along(metric, geometry.state(r), trace, |y, _| f.value(y)).ok().flatten()
    });
    let scale = data.max_abs().max(EPS);
    let mut mismatch: f64 = 0.0;
    for (r, v) in direct.iter().enumerate() {
        if let (Some(v), RayStatus::Ok) = (v, data.status[r]) {
            mismatch = mismatch.max((v - data.values[r]).abs() / scale);
        }
    }
    Ok(TransportReport { residual, boundary_mismatch: mismatch, trapped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid2 {
        Grid2::square(n, 1.0).unwrap()
    }

    fn bump(x: Point) -> f64 {
        crate::phantoms::smooth_bump(x[0].hypot(x[1]) / 0.6)
    }

    #[test]
    fn v_of_sine_is_cosine() {
        let u = SMField::from_fn(grid(32), 64, |_, t| t.sin()).unwrap();
        let vu = apply_v(&ConformalMetric::euclidean(), &u).unwrap();
        for m in 0..64 {
            assert!((vu.at(100, m) - u.theta(m).cos()).abs() < 5e-5);
        }
    }

    #[test]
    fn v_kills_theta_independent_fields() {
        let u = SMField::from_fn(grid(32), 32, |x, _| x[0] * x[1]).unwrap();
        let vu = apply_v(&ConformalMetric::euclidean(), &u).unwrap();
        assert!(vu.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn flat_x_of_coordinate_is_cosine() {
        let u = SMField::from_fn(grid(40), 32, |x, _| x[0]).unwrap();
        let xu = apply_x(&ConformalMetric::euclidean(), &u).unwrap();
        let g = u.grid;
        for p in 0..g.len() {
            let x = g.center_of(p);
            if x[0].hypot(x[1]) < 0.8 {
                for m in 0..32 {
                    assert!((xu.at(p, m) - u.theta(m).cos()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn collar_is_enforced() {
        let u = SMField::from_fn(grid(32), 32, |_, _| 1.0).unwrap();
        assert!(matches!(u.compact(), Err(Error::Support { .. })));
        let ok = SMField::from_fn(grid(32), 32, |x, _| bump(x)).unwrap();
        assert!(ok.compact().is_ok());
    }

    #[test]
    fn too_coarse_rejected() {
        assert!(SMField::zeros(grid(16), 64).is_err());
    }

    #[test]
    fn constant_inner_product_is_liouville_volume() {
        let g = grid(128);
        let one = SMField::from_fn(g, 32, |_, _| 1.0).unwrap();
        let v = inner_product(&ConformalMetric::euclidean(), &one, &one).unwrap();
        assert!((v - 2.0 * PI * PI).abs() / (2.0 * PI * PI) < 0.01, "{v}");
    }

    #[test]
    fn zero_field_has_zero_residuals() {
        let u = SMField::zeros(grid(32), 32).unwrap().compact().unwrap();
        let m = ConformalMetric::sphere_cap(0.5).unwrap();
        let c = commutator_residuals(&m, &u).unwrap();
        assert_eq!(c.max(), 0.0);
        let p = pestov_residual(&m, &u).unwrap();
        assert_eq!((p.lhs, p.rhs, p.rel_residual), (0.0, 0.0, 0.0));
    }

    #[test]
    fn x_matches_flow_difference_quotient() {
        let m = ConformalMetric::sphere_cap(0.6).unwrap();
        let sm = crate::phantoms::SmoothSM::random(7, 3, 0.5, 0.6, 0.2);
        let u = sm.sample(grid(192), 64).unwrap();
        let xu = apply_x(&m, &u).unwrap();
        let g = u.grid;
        let dt = 1e-4;
        let mut worst: f64 = 0.0;
        for p in (0..g.len()).step_by(397) {
            let x = g.center_of(p);
            if x[0].hypot(x[1]) > 0.6 {
                continue;
            }
            for mm in (0..64).step_by(5) {
                let s = crate::geodesic::PhaseState::new(x, u.theta(mm));
                let fwd = crate::geodesic::flow_for(&m, s, dt, dt / 4.0).unwrap();
                let bwd = crate::geodesic::flow_for(&m, s, -dt, dt / 4.0).unwrap();
                let fd = (sm.value(fwd.x, fwd.theta) - sm.value(bwd.x, bwd.theta)) / (2.0 * dt);
                worst = worst.max((fd - xu.at(p, mm)).abs());
            }
        }
        assert!(worst < 2e-3, "{worst}");
    }

    #[test]
    fn x_and_v_are_skew() {
        let m = ConformalMetric::gaussian_bump(0.2, [0.0, 0.0], 0.4).unwrap();
        let u = crate::phantoms::SmoothSM::random(1, 3, 0.2, 0.35, 0.3).sample(grid(64), 64).unwrap();
        let w = crate::phantoms::SmoothSM::random(2, 3, 0.2, 0.35, 0.3).sample(grid(64), 64).unwrap();
        let r = skew_adjointness(&m, &u, &w).unwrap();
        assert!(r.x < 1e-3 && r.v < 1e-3, "{r:?}");
    }
}
