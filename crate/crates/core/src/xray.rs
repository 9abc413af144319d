//! The geodesic X-ray transform on a conformal disk in fan-beam coordinates.
//!
//! A fan sample `(β, α)` is the inward boundary state at `(cos β, sin β)`
//! rotated by `α` from the inner normal, so `μ = −⟨v, ν⟩_g = cos α`. Data on
//! `∂₊SM` are paired with the measure `μ · e^{λ(β)} dβ · dα`, functions on
//! the disk with `e^{2λ} dx`; under these pairings the fiber backprojection
//! `I*h(x) = ∫_{S_x} h♯ dθ` is the adjoint of `I`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid2, PlaneFunction, ScalarField};
use crate::geodesic::{
    integrate_along, trace_quadrature, verify_simplicity, wrap_angle, PhaseState, SimplicityOptions, TraceOptions,
};
use crate::metric::ConformalMetric;
use crate::parallel::map_indexed;
use crate::phantoms::AntipodalPair;
use crate::sparse::Csr;
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanGeometry {
    pub n_beta: usize,
    pub n_alpha: usize,
}

impl FanGeometry {
    pub fn new(n_beta: usize, n_alpha: usize) -> Result<Self> {
        if n_beta < 4 || n_alpha < 4 {
            return Err(Error::param(format!("fan {n_beta}x{n_alpha} is too coarse")));
        }
        Ok(Self { n_beta, n_alpha })
    }

    /// Parses `"BxA"`, e.g. `"90x90"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (b, a) = spec
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("fan must look like 90x90, got {spec:?}")))?;
        let p = |s: &str| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("fan {spec:?}: {e}")));
        Self::new(p(b)?, p(a)?)
    }

    pub fn len(&self) -> usize {
        self.n_beta * self.n_alpha
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn d_beta(&self) -> f64 {
        2.0 * PI / self.n_beta as f64
    }

    pub fn d_alpha(&self) -> f64 {
        PI / self.n_alpha as f64
    }

    pub fn beta(&self, i: usize) -> f64 {
        i as f64 * self.d_beta()
    }

    pub fn alpha(&self, j: usize) -> f64 {
        -PI / 2.0 + (j as f64 + 0.5) * self.d_alpha()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_alpha + j
    }

    pub fn beta_alpha(&self, idx: usize) -> (f64, f64) {
        (self.beta(idx / self.n_alpha), self.alpha(idx % self.n_alpha))
    }

    pub fn state(&self, idx: usize) -> PhaseState {
        let (b, a) = self.beta_alpha(idx);
        PhaseState::inward(b, a)
    }

    /// Bilinear stencil at `(β, α)`: periodic in β, clamped to the outermost
    /// samples in α.
    pub fn stencil(&self, beta: f64, alpha: f64) -> [(usize, f64); 4] {
        let u = (beta / self.d_beta()).rem_euclid(self.n_beta as f64);
        let i0 = (u.floor() as usize).min(self.n_beta - 1);
        let a = u - i0 as f64;
        let i1 = (i0 + 1) % self.n_beta;
        let v = ((alpha + PI / 2.0) / self.d_alpha() - 0.5).clamp(0.0, (self.n_alpha - 1) as f64);
        let j0 = (v.floor() as usize).min(self.n_alpha - 2);
        let b = v - j0 as f64;
        [
            (self.index(i0, j0), (1.0 - a) * (1.0 - b)),
            (self.index(i1, j0), a * (1.0 - b)),
            (self.index(i0, j0 + 1), (1.0 - a) * b),
            (self.index(i1, j0 + 1), a * b),
        ]
    }

    /// Quadrature weights `μ e^{λ(β)} Δβ Δα` of the `∂₊SM` measure.
    pub fn weights(&self, metric: &ConformalMetric) -> Result<Vec<f64>> {
        let cell = self.d_beta() * self.d_alpha();
        let mut w = Vec::with_capacity(self.len());
        for i in 0..self.n_beta {
            let b = self.beta(i);
            let e = metric.lambda([b.cos(), b.sin()])?.exp();
            for j in 0..self.n_alpha {
                w.push(self.alpha(j).cos() * e * cell);
            }
        }
        Ok(w)
    }

    /// Parallel-beam coordinates `(s, φ)` of a fan sample when λ = 0: the
    /// line `sω⊥ + tω` with `ω = (cos φ, sin φ)`.
    pub fn euclidean_line(&self, idx: usize) -> (f64, f64) {
        let (b, a) = self.beta_alpha(idx);
        (a.sin(), b + a + PI)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayStatus {
    Ok,
    Trapped,
    Failed,
}

/// Values on the sampled `∂₊SM`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanBeamData {
    pub geometry: FanGeometry,
    /// `values[i * n_alpha + j]` at `(β_i, α_j)`.
    pub values: Vec<f64>,
    pub status: Vec<RayStatus>,
    /// `μ e^{λ(β)} Δβ Δα` per sample.
    pub weights: Vec<f64>,
}

impl FanBeamData {
    pub fn zeros(geometry: FanGeometry, metric: &ConformalMetric) -> Result<Self> {
        Ok(Self {
            geometry,
            values: vec![0.0; geometry.len()],
            status: vec![RayStatus::Ok; geometry.len()],
            weights: geometry.weights(metric)?,
        })
    }

    /// Fills every sample from `h(β, α)`.
    pub fn from_fn(geometry: FanGeometry, metric: &ConformalMetric, h: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut d = Self::zeros(geometry, metric)?;
        for (idx, v) in d.values.iter_mut().enumerate() {
            let (b, a) = geometry.beta_alpha(idx);
            *v = h(b, a);
        }
        Ok(d)
    }

    pub fn mu(&self, idx: usize) -> f64 {
        self.geometry.beta_alpha(idx).1.cos()
    }

    pub fn trapped_count(&self) -> usize {
        self.status.iter().filter(|s| **s == RayStatus::Trapped).count()
    }

    pub fn failed_count(&self) -> usize {
        self.status.iter().filter(|s| **s == RayStatus::Failed).count()
    }

    /// `Σ μ e^{λ} ΔβΔα · u h` over samples valid in both.
    pub fn inner(&self, other: &FanBeamData) -> Result<f64> {
        if self.geometry != other.geometry {
            return Err(Error::GridMismatch("fan data on different geometries".into()));
        }
        let mut acc = 0.0;
        for k in 0..self.values.len() {
            if self.status[k] == RayStatus::Ok && other.status[k] == RayStatus::Ok {
                acc += self.weights[k] * self.values[k] * other.values[k];
            }
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).unwrap_or(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().zip(&self.status).filter(|(_, s)| **s == RayStatus::Ok).fold(0.0, |m, (v, _)| m.max(v.abs()))
    }

    /// Bilinear lookup at an arbitrary `(β, α)`.
    pub fn lookup(&self, beta: f64, alpha: f64) -> f64 {
        self.geometry.stencil(beta, alpha).iter().map(|(k, w)| w * self.values[*k]).sum()
    }
}

/// `If` on the fan by tracing each inward geodesic and integrating `f` with
/// the integrator's fourth-order quadrature. Trapped rays and integration
/// failures are marked in `status` and carry 0.
pub fn xray_forward(
    metric: &ConformalMetric,
    f: &impl PlaneFunction,
    geometry: FanGeometry,
    opts: TraceOptions,
) -> Result<FanBeamData> {
    let mut data = FanBeamData::zeros(geometry, metric)?;
    let out = map_indexed(geometry.len(), |idx| {
        match integrate_along(metric, geometry.state(idx), opts, |x, _| f.value(x)) {
            Ok(Some(v)) => (v, RayStatus::Ok),
            Ok(None) => (0.0, RayStatus::Trapped),
            Err(_) => (0.0, RayStatus::Failed),
        }
    });
    for (k, (v, s)) in out.into_iter().enumerate() {
        data.values[k] = v;
        data.status[k] = s;
    }
    Ok(data)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XrayOptions {
    pub trace: TraceOptions,
    /// Directions per point in fiber integrals.
    pub n_dir: usize,
}

impl Default for XrayOptions {
    fn default() -> Self {
        Self { trace: TraceOptions::with_step(0.01, crate::geodesic::DEFAULT_T_MAX), n_dir: 128 }
    }
}

fn fiber_direction(m: usize, n_dir: usize) -> f64 {
    2.0 * PI * (m as f64 + 0.5) / n_dir as f64
}

/// Where the geodesic through `(x, θ)` entered the disk, as fan coordinates.
fn entry_point(metric: &ConformalMetric, x: Point, theta: f64, trace: TraceOptions) -> Result<Option<(f64, f64)>> {
    let back = trace_quadrature(metric, PhaseState::new(x, theta + PI), trace, |_| {})?;
    if back.trapped {
        return Ok(None);
    }
    let y = back.state.x;
    let beta = y[1].atan2(y[0]);
    let alpha = wrap_angle(back.state.theta - beta);
    Ok(Some((beta, alpha)))
}

/// Rows of the traced backprojection: pixel → `(fan index, weight)`.
fn backprojection_rows(
    metric: &ConformalMetric,
    geometry: FanGeometry,
    grid: Grid2,
    opts: XrayOptions,
) -> (Vec<Vec<(usize, f64)>>, usize) {
    let dtheta = 2.0 * PI / opts.n_dir as f64;
    let rows = map_indexed(grid.len(), |p| {
        let x = grid.center_of(p);
        let mut row = Vec::new();
        let mut skipped = 0;
        if x[0].hypot(x[1]) >= 1.0 {
            return (row, skipped);
        }
        for m in 0..opts.n_dir {
            match entry_point(metric, x, fiber_direction(m, opts.n_dir), opts.trace) {
                Ok(Some((b, a))) => {
                    row.extend(geometry.stencil(b, a).iter().map(|(k, w)| (*k, w * dtheta)));
                }
                _ => skipped += 1,
            }
        }
        (row, skipped)
    });
    let skipped = rows.iter().map(|r| r.1).sum();
    (rows.into_iter().map(|r| r.0).collect(), skipped)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Backprojection {
    pub field: ScalarField,
    /// Fiber directions whose backward trace was trapped or failed.
    pub skipped: usize,
}

/// `I*h(x) = ∫_{S_x} h♯ dθ` at every grid point inside the disk, with `h♯`
/// read off by tracing each direction backward to `∂₊SM`.
pub fn xray_backproject(
    metric: &ConformalMetric,
    data: &FanBeamData,
    grid: Grid2,
    opts: XrayOptions,
) -> Result<Backprojection> {
    let (rows, skipped) = backprojection_rows(metric, data.geometry, grid, opts);
    let values = rows.iter().map(|r| r.iter().map(|(k, w)| w * data.values[*k]).sum()).collect();
    Ok(Backprojection { field: ScalarField { grid, values, support_radius: None }, skipped })
}

/// `I` and `I*` precomputed as sparse matrices for one metric, fan and grid.
pub struct XrayOperator {
    pub geometry: FanGeometry,
    pub grid: Grid2,
    pub opts: XrayOptions,
    pub status: Vec<RayStatus>,
    /// Fan measure per sample (0 on trapped or failed rays).
    pub ray_weights: Vec<f64>,
    /// `e^{2λ} dx dy` for pixels inside the disk, 0 outside.
    pub pixel_weights: Vec<f64>,
    pub skipped_fibers: usize,
    forward: Csr,
    forward_t: Csr,
    back: Csr,
}

impl XrayOperator {
    pub fn build(metric: &ConformalMetric, geometry: FanGeometry, grid: Grid2, opts: XrayOptions) -> Result<Self> {
        let rows = map_indexed(geometry.len(), |idx| {
            let mut row = Vec::new();
            let end = trace_quadrature(metric, geometry.state(idx), opts.trace, |n| {
                let (st, k) = grid.bilinear(n.x);
                row.extend(st[..k].iter().map(|(p, w)| (*p, w * n.weight)));
            });
            match end {
                Ok(e) if !e.trapped => (row, RayStatus::Ok),
                Ok(_) => (Vec::new(), RayStatus::Trapped),
                Err(_) => (Vec::new(), RayStatus::Failed),
            }
        });
        let status: Vec<RayStatus> = rows.iter().map(|r| r.1).collect();
        let forward = Csr::from_rows(grid.len(), rows.into_iter().map(|r| r.0).collect());
        let mut ray_weights = geometry.weights(metric)?;
        for (w, s) in ray_weights.iter_mut().zip(&status) {
            if *s != RayStatus::Ok {
                *w = 0.0;
            }
        }
        let mut pixel_weights = vec![0.0; grid.len()];
        for (p, w) in pixel_weights.iter_mut().enumerate() {
            let x = grid.center_of(p);
            if x[0].hypot(x[1]) < 1.0 {
                *w = metric.density(x)? * grid.cell_area();
            }
        }
        let (back_rows, skipped_fibers) = backprojection_rows(metric, geometry, grid, opts);
        let back = Csr::from_rows(geometry.len(), back_rows);
        let forward_t = forward.transpose();
        Ok(Self { geometry, grid, opts, status, ray_weights, pixel_weights, skipped_fibers, forward, forward_t, back })
    }

    pub fn forward(&self, f: &ScalarField) -> Result<Vec<f64>> {
        self.check_grid(f)?;
        Ok(self.forward.matvec(&f.values))
    }

    pub fn forward_data(&self, f: &ScalarField, metric: &ConformalMetric) -> Result<FanBeamData> {
        let mut d = FanBeamData::zeros(self.geometry, metric)?;
        d.values = self.forward(f)?;
        d.status = self.status.clone();
        Ok(d)
    }

    /// Traced fiber backprojection.
    pub fn backproject(&self, h: &[f64]) -> ScalarField {
        ScalarField { grid: self.grid, values: self.back.matvec(h), support_radius: None }
    }

    /// Exact adjoint of the discrete forward map for the weighted pairings:
    /// `V⁻¹ Aᵀ W h` on pixels inside the disk.
    pub fn adjoint(&self, h: &[f64]) -> ScalarField {
        let wh: Vec<f64> = h.iter().zip(&self.ray_weights).map(|(a, b)| a * b).collect();
        let mut values = self.forward_t.matvec(&wh);
        for (v, w) in values.iter_mut().zip(&self.pixel_weights) {
            *v = if *w > 0.0 { *v / w } else { 0.0 };
        }
        ScalarField { grid: self.grid, values, support_radius: None }
    }

    /// Composition-mode normal operator `I*(If)` with the traced backprojection.
    pub fn normal(&self, f: &ScalarField) -> Result<ScalarField> {
        Ok(self.backproject(&self.forward(f)?))
    }

    /// `⟨u, v⟩` with the `e^{2λ}dx` weights of this operator.
    pub fn pixel_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.pixel_weights).map(|((a, b), w)| a * b * w).sum()
    }

    fn check_grid(&self, f: &ScalarField) -> Result<()> {
        if f.grid != self.grid {
            return Err(Error::GridMismatch("field grid differs from the operator grid".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalMode {
    Composition,
    Polar,
}

/// Sampling used to certify simplicity before polar-mode evaluation or
/// inversion.
pub fn coarse_simplicity() -> SimplicityOptions {
    SimplicityOptions { n_boundary: 16, n_angles: 16, n_radii: 3, ..Default::default() }
}

fn require_simple(metric: &ConformalMetric) -> Result<()> {
    let report = verify_simplicity(metric, coarse_simplicity())?;
    if report.is_simple() {
        return Ok(());
    }
    let w = report.witnesses.first();
    Err(Error::NotSimple(match w {
        Some(w) => format!(
            "{metric} is not simple: {:?} at x = ({:.4}, {:.4}), θ = {:.4} (value {:.4})",
            w.failure_kind, w.x[0], w.x[1], w.theta, w.value
        ),
        None => format!("{metric} is not simple"),
    }))
}

/// `I*If` on `f`'s grid.
///
/// `Composition` applies the traced backprojection to the fan data of `f`.
/// `Polar` integrates in geodesic polar coordinates at each point,
/// `2 ∫_{S_x} ∫₀^τ f(γ_{x,θ}(t)) dt dθ`, and refuses metrics that fail the
/// simplicity check.
pub fn normal_operator(
    metric: &ConformalMetric,
    f: &ScalarField,
    mode: NormalMode,
    geometry: FanGeometry,
    opts: XrayOptions,
) -> Result<ScalarField> {
    match mode {
        NormalMode::Composition => {
            let data = xray_forward(metric, f, geometry, opts.trace)?;
            Ok(xray_backproject(metric, &data, f.grid, opts)?.field)
        }
        NormalMode::Polar => {
            require_simple(metric)?;
            let grid = f.grid;
            let dtheta = 2.0 * PI / opts.n_dir as f64;
            let values = map_indexed(grid.len(), |p| {
                let x = grid.center_of(p);
                if x[0].hypot(x[1]) >= 1.0 {
                    return 0.0;
                }
                let mut acc = 0.0;
                for m in 0..opts.n_dir {
                    let s = PhaseState::new(x, fiber_direction(m, opts.n_dir));
                    if let Ok(Some(v)) = integrate_along(metric, s, opts.trace, |y, _| f.value(y)) {
                        acc += v;
                    }
                }
                2.0 * dtheta * acc
            });
            Ok(ScalarField { grid, values, support_radius: None })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgOptions {
    pub max_iter: usize,
    /// Stop once `‖r‖ ≤ tol · ‖b‖`.
    pub tol: f64,
    /// Run the coarse simplicity check first and refuse non-simple metrics.
    pub require_simple: bool,
    pub xray: XrayOptions,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self { max_iter: 80, tol: 1e-6, require_simple: true, xray: XrayOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CgResult {
    pub field: ScalarField,
    /// `(iteration, ‖r‖/‖b‖)`, nonincreasing.
    pub log: Vec<(usize, f64)>,
    pub converged: bool,
    /// The residual stopped decreasing before `tol` was reached; `field` is
    /// the best iterate.
    pub stagnated: bool,
}

/// Solves `I*I f = I*d` by conjugate residuals on pixels inside the disk.
///
/// The discrete operator is `A^†A` with `A^† = V⁻¹AᵀW` (`W` the fan
/// measure, `V` the `e^{2λ}dx` pixel measure), which is self-adjoint and
/// nonnegative for `⟨·,·⟩_V`; conjugate residuals then make `‖r‖_V`
/// nonincreasing.
pub fn invert_normal_cg(
    metric: &ConformalMetric,
    data: &FanBeamData,
    grid: Grid2,
    opts: CgOptions,
) -> Result<CgResult> {
    if opts.require_simple {
        require_simple(metric)?;
    }
    let op = XrayOperator::build(metric, data.geometry, grid, opts.xray)?;
    let mut d = data.values.clone();
    for (v, s) in d.iter_mut().zip(&data.status) {
        if *s != RayStatus::Ok {
            *v = 0.0;
        }
    }
    let apply = |x: &[f64]| -> Vec<f64> { op.adjoint(&op.forward.matvec(x)).values };
    let b = op.adjoint(&d).values;
    let dot = |u: &[f64], v: &[f64]| op.pixel_inner(u, v);
    let b_norm = dot(&b, &b).sqrt();
    let mut x = vec![0.0; grid.len()];
    let mut log = vec![(0, if b_norm > 0.0 { 1.0 } else { 0.0 })];
    let field = |x: Vec<f64>| ScalarField { grid, values: x, support_radius: None };
    if b_norm == 0.0 {
        return Ok(CgResult { field: field(x), log, converged: true, stagnated: false });
    }
    let mut r = b.clone();
    let mut ar = apply(&r);
    let mut p = r.clone();
    let mut ap = ar.clone();
    let mut rar = dot(&r, &ar);
    let mut best = 1.0;
    let (mut converged, mut stagnated) = (false, false);
    for it in 1..=opts.max_iter {
        let apap = dot(&ap, &ap);
        if !(apap > 0.0) || !(rar > 0.0) {
            stagnated = true;
            break;
        }
        let alpha = rar / apap;
        let x_new: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
        let r_new: Vec<f64> = r.iter().zip(&ap).map(|(a, b)| a - alpha * b).collect();
        let rel = dot(&r_new, &r_new).sqrt() / b_norm;
        if !(rel <= best) {
            stagnated = true;
            break;
        }
        best = rel;
        x = x_new;
        r = r_new;
        log.push((it, rel));
        if rel <= opts.tol {
            converged = true;
            break;
        }
        ar = apply(&r);
        let rar_new = dot(&r, &ar);
        let beta = rar_new / rar;
        rar = rar_new;
        for k in 0..p.len() {
            p[k] = r[k] + beta * p[k];
            ap[k] = ar[k] + beta * ap[k];
        }
    }
    Ok(CgResult { field: field(x), log, converged, stagnated })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    /// `∫|f| dx`.
    pub norm_f: f64,
    pub max_if: f64,
    /// `max I|f|` over the same rays.
    pub max_abs_if: f64,
    /// `max|If| / max I|f|`.
    pub ratio: f64,
    pub trapped: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleDemo {
    pub cap: CounterexampleReport,
    pub euclidean: CounterexampleReport,
}

/// Transform of `f` and `|f|` on the untrapped fan, summarized.
pub fn cancellation_ratio(
    metric: &ConformalMetric,
    f: &impl PlaneFunction,
    geometry: FanGeometry,
    trace: TraceOptions,
) -> Result<CounterexampleReport> {
    let data = xray_forward(metric, f, geometry, trace)?;
    let abs = xray_forward(metric, &|x: Point| f.value(x).abs(), geometry, trace)?;
    let max_if = data.max_abs();
    let max_abs_if = abs.max_abs();
    let n = 512;
    let h = 2.0 / n as f64;
    let norm_f = (0..n * n)
        .map(|k| f.value([-1.0 + ((k % n) as f64 + 0.5) * h, -1.0 + ((k / n) as f64 + 0.5) * h]).abs())
        .sum::<f64>()
        * h
        * h;
    let ratio = if max_abs_if > 0.0 { max_if / max_abs_if } else { 0.0 };
    Ok(CounterexampleReport { norm_f, max_if, max_abs_if, ratio, trapped: data.trapped_count() })
}

/// Odd bump pair on the equator of the cap with aperture `k > 1`, compared
/// with the same function on the flat disk.
pub fn counterexample_demo(
    k: f64,
    width: f64,
    geometry: FanGeometry,
    trace: TraceOptions,
) -> Result<CounterexampleDemo> {
    if !(k > 1.0) {
        return Err(Error::param(format!("the cap must exceed a hemisphere (k > 1), got k = {k}")));
    }
    let pair = AntipodalPair::on_equator(k, width)?;
    let cap = ConformalMetric::sphere_cap(k)?;
    Ok(CounterexampleDemo {
        cap: cancellation_ratio(&cap, &pair, geometry, trace)?,
        euclidean: cancellation_ratio(&ConformalMetric::euclidean(), &pair, geometry, trace)?,
    })
}
