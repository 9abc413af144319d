//! Geodesic flow on the unit sphere bundle of a conformal disk.
//!
//! Geodesics are integrated in coordinates as the first-order system
//! `ẋ = v`, `v̇^l = −Γ^l_{jk} v^j v^k` with classical fourth-order
//! Runge–Kutta at a fixed arc-length step. Exits through the unit circle are
//! located by root refinement of `|x|² − 1` inside the crossing step, using
//! the same Runge–Kutta map with a shortened step so the refined point stays
//! on the discrete trajectory.

mod jacobi;
mod riccati;
mod simplicity;

pub use jacobi::{conjugate_scan, conjugate_scan_with};
pub use riccati::{riccati_solve, riccati_solve_simplified, RiccatiProblem, RiccatiSolution};
pub use simplicity::{verify_simplicity, FailureKind, SimplicityOptions, SimplicityReport, Witness};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::ConformalMetric;
use crate::Point;

/// Trapping threshold used when none is given.
pub const DEFAULT_T_MAX: f64 = 100.0;
/// Tolerance behind [`exit_time`] and [`conjugate_scan`].
pub const DEFAULT_TOL: f64 = 1e-10;

/// Roots inside a step are refined to this width in arc length.
const ROOT_TOL: f64 = 1e-12;

/// A point of the unit sphere bundle in isothermal coordinates:
/// `v = e^{−λ(x)}(cos θ, sin θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: Point,
    pub theta: f64,
}

impl PhaseState {
    pub fn new(x: Point, theta: f64) -> Self {
        Self { x, theta: wrap_angle(theta) }
    }

    /// Inward boundary state at angle `beta`, rotated by `alpha` from the
    /// inner normal (|α| < π/2).
    pub fn inward(beta: f64, alpha: f64) -> Self {
        Self::new([beta.cos(), beta.sin()], beta + std::f64::consts::PI + alpha)
    }

    /// Same point, opposite direction.
    pub fn reversed(&self) -> Self {
        Self::new(self.x, self.theta + std::f64::consts::PI)
    }

    fn coordinate_velocity(&self, metric: &ConformalMetric) -> Result<[f64; 2]> {
        let s = (-metric.lambda(self.x)?).exp();
        Ok([s * self.theta.cos(), s * self.theta.sin()])
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Fixed arc-length step.
    pub step: f64,
    /// Geodesics still inside at this time are reported as trapped.
    pub t_max: f64,
}

impl TraceOptions {
    /// Step chosen so that the global fourth-order error is of order `tol`.
    pub fn from_tol(tol: f64, t_max: f64) -> Self {
        let step = (0.5 * tol.abs().powf(0.25)).clamp(1e-3, 0.05);
        Self { step, t_max }
    }

    pub fn with_step(step: f64, t_max: f64) -> Self {
        Self { step, t_max }
    }

    fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::param(format!("trace step must be positive, got {}", self.step)));
        }
        if !(self.t_max > 0.0) {
            return Err(Error::param(format!("t_max must be positive, got {}", self.t_max)));
        }
        if self.step < 1e-9 {
            return Err(Error::Integration(format!("step {} underflows", self.step)));
        }
        Ok(())
    }
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self::from_tol(DEFAULT_TOL, DEFAULT_T_MAX)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub state: PhaseState,
    /// `|γ̇|_g`, 1 up to integration error.
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepStats {
    pub step: f64,
    pub steps: usize,
    pub max_speed_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    /// Exit time τ, or the time reached when trapped.
    pub exit_time: f64,
    pub trapped: bool,
    pub step_stats: StepStats,
}

impl GeodesicPath {
    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("a path always has its start sample")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExitTime {
    Exited(f64),
    Trapped,
}

impl ExitTime {
    pub fn time(self) -> Option<f64> {
        match self {
            ExitTime::Exited(t) => Some(t),
            ExitTime::Trapped => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Generic fixed-step RK4 with a crossing event.

pub(crate) struct Rk4Step<const N: usize> {
    pub stages: [[f64; N]; 4],
    pub end: [f64; N],
}

pub(crate) const RK4_WEIGHTS: [f64; 4] = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
pub(crate) const RK4_NODES: [f64; 4] = [0.0, 0.5, 0.5, 1.0];

fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for (o, ki) in out.iter_mut().zip(k) {
        *o += a * ki;
    }
    out
}

pub(crate) fn rk4_step<const N: usize, F>(rhs: &mut F, y: &[f64; N], h: f64) -> Result<Rk4Step<N>>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
{
    let s1 = *y;
    let k1 = rhs(&s1)?;
    let s2 = axpy(y, 0.5 * h, &k1);
    let k2 = rhs(&s2)?;
    let s3 = axpy(y, 0.5 * h, &k2);
    let k3 = rhs(&s3)?;
    let s4 = axpy(y, h, &k3);
    let k4 = rhs(&s4)?;
    let mut end = *y;
    for i in 0..N {
        end[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if end.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration("non-finite state".into()));
    }
    Ok(Rk4Step { stages: [s1, s2, s3, s4], end })
}

pub(crate) struct FlowEnd<const N: usize> {
    pub time: f64,
    pub state: [f64; N],
    /// The event fired (as opposed to reaching `t_max`).
    pub event: bool,
}

/// Integrates until `event(y)` crosses from `≤ 0` to `> 0` or `t_max` is
/// reached. `on_step(t0, h, step)` sees every accepted step, the final one
/// shortened to end on the event.
pub(crate) fn flow<const N: usize, F, E, S>(
    rhs: &mut F,
    y0: [f64; N],
    opts: TraceOptions,
    event: E,
    mut on_step: S,
) -> Result<FlowEnd<N>>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
    E: Fn(&[f64; N]) -> f64,
    S: FnMut(f64, f64, &Rk4Step<N>),
{
    opts.validate()?;
    let mut t = 0.0;
    let mut y = y0;
    let mut g_prev = event(&y);
    loop {
        let h = opts.step.min(opts.t_max - t);
        if h <= 0.0 {
            return Ok(FlowEnd { time: t, state: y, event: false });
        }
        let step = rk4_step(rhs, &y, h)?;
        let g_next = event(&step.end);
        if g_prev <= 0.0 && g_next > 0.0 {
            let s = refine_root(rhs, &y, h, g_prev, g_next, &event)?;
            let last = rk4_step(rhs, &y, s)?;
            on_step(t, s, &last);
            return Ok(FlowEnd { time: t + s, state: last.end, event: true });
        }
        on_step(t, h, &step);
        t += h;
        y = step.end;
        g_prev = g_next;
    }
}

/// Illinois false position on `s ↦ event(rk4(y, s))` over `(0, h]`.
fn refine_root<const N: usize, F, E>(rhs: &mut F, y: &[f64; N], h: f64, g_lo: f64, g_hi: f64, event: &E) -> Result<f64>
where
    F: FnMut(&[f64; N]) -> Result<[f64; N]>,
    E: Fn(&[f64; N]) -> f64,
{
    let (mut a, mut fa) = (0.0, g_lo);
    let (mut b, mut fb) = (h, g_hi);
    let mut side = 0i8;
    for _ in 0..200 {
        if b - a <= ROOT_TOL {
            break;
        }
        let mut c = if fb != fa { b - fb * (b - a) / (fb - fa) } else { 0.5 * (a + b) };
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let fc = event(&rk4_step(rhs, y, c)?.end);
        if fc > 0.0 {
            b = c;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        } else {
            a = c;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        }
        if fc == 0.0 {
            // Exactly on the crossing; the event requires > 0 so step past it.
            b = c;
            break;
        }
    }
    Ok(b)
}

// ---------------------------------------------------------------------------
// Geodesic-specific layer.

pub(crate) fn geodesic_rhs(metric: &ConformalMetric) -> impl FnMut(&[f64; 4]) -> Result<[f64; 4]> + '_ {
    move |y: &[f64; 4]| {
        let g = metric.jet([y[0], y[1]])?.grad;
        let (v1, v2) = (y[2], y[3]);
        let gv = g[0] * v1 + g[1] * v2;
        let vv = v1 * v1 + v2 * v2;
        Ok([v1, v2, -(2.0 * v1 * gv - vv * g[0]), -(2.0 * v2 * gv - vv * g[1])])
    }
}

fn exit_event(y: &[f64; 4]) -> f64 {
    y[0] * y[0] + y[1] * y[1] - 1.0
}

pub(crate) fn initial_state(metric: &ConformalMetric, start: &PhaseState) -> Result<[f64; 4]> {
    let r2 = start.x[0] * start.x[0] + start.x[1] * start.x[1];
    if !(r2 <= 1.0 + 1e-9) {
        return Err(Error::param(format!(
            "start point ({}, {}) is outside the closed unit disk",
            start.x[0], start.x[1]
        )));
    }
    let v = start.coordinate_velocity(metric)?;
    Ok([start.x[0], start.x[1], v[0], v[1]])
}

/// A boundary start that points outward (or along the boundary) exits at once.
pub(crate) fn exits_immediately(y: &[f64; 4]) -> bool {
    let r2 = y[0] * y[0] + y[1] * y[1];
    r2 >= 1.0 - 1e-12 && y[0] * y[2] + y[1] * y[3] >= 0.0
}

pub(crate) fn state_to_phase(y: &[f64; 4]) -> PhaseState {
    PhaseState::new([y[0], y[1]], y[3].atan2(y[2]))
}

/// One node of the fourth-order quadrature rule that the integrator induces
/// along a geodesic: `∫₀^τ w(φ_t) dt ≈ Σ weight · w(x, θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadNode {
    pub t: f64,
    pub x: Point,
    pub theta: f64,
    pub weight: f64,
}

/// How a traced geodesic ended.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceEnd {
    pub time: f64,
    pub state: PhaseState,
    pub trapped: bool,
}

/// Traces from `start` and hands every quadrature node to `visit`.
///
/// The nodes are the Runge–Kutta stage points with weights `h·(1,2,2,1)/6`,
/// so `Σ weight · f(x)` is exactly the fourth-order integral of `f` along the
/// discrete geodesic.
pub fn trace_quadrature(
    metric: &ConformalMetric,
    start: PhaseState,
    opts: TraceOptions,
    mut visit: impl FnMut(QuadNode),
) -> Result<TraceEnd> {
    let y0 = initial_state(metric, &start)?;
    if exits_immediately(&y0) {
        return Ok(TraceEnd { time: 0.0, state: start, trapped: false });
    }
    let mut rhs = geodesic_rhs(metric);
    let end = flow(&mut rhs, y0, opts, exit_event, |t0, h, step| {
        for ((stage, c), w) in step.stages.iter().zip(RK4_NODES).zip(RK4_WEIGHTS) {
            visit(QuadNode { t: t0 + c * h, x: [stage[0], stage[1]], theta: stage[3].atan2(stage[2]), weight: w * h });
        }
    })?;
    Ok(TraceEnd { time: end.time, state: state_to_phase(&end.state), trapped: !end.event })
}

/// Integrates a function of `(x, θ)` along the geodesic from `start` up to the
/// exit time. Returns `None` for trapped geodesics.
pub fn integrate_along(
    metric: &ConformalMetric,
    start: PhaseState,
    opts: TraceOptions,
    mut w: impl FnMut(Point, f64) -> f64,
) -> Result<Option<f64>> {
    let mut acc = 0.0;
    let end = trace_quadrature(metric, start, opts, |n| acc += n.weight * w(n.x, n.theta))?;
    Ok(if end.trapped { None } else { Some(acc) })
}

/// Traces a unit-speed geodesic until it leaves the unit disk or `t_max`
/// passes, recording every step.
pub fn trace_geodesic_with(metric: &ConformalMetric, start: PhaseState, opts: TraceOptions) -> Result<GeodesicPath> {
    let y0 = initial_state(metric, &start)?;
    let speed = |y: &[f64; 4]| -> Result<f64> { Ok(metric.lambda([y[0], y[1]])?.exp() * y[2].hypot(y[3])) };
    let s0 = speed(&y0)?;
    let mut samples = vec![PathSample { t: 0.0, state: start, speed: s0 }];
    let mut stats = StepStats { step: opts.step, steps: 0, max_speed_drift: (s0 - 1.0).abs() };
    if exits_immediately(&y0) {
        return Ok(GeodesicPath { samples, exit_time: 0.0, trapped: false, step_stats: stats });
    }
    let mut rhs = geodesic_rhs(metric);
    let mut ends = Vec::new();
    let end = flow(&mut rhs, y0, opts, exit_event, |t0, h, step| ends.push((t0 + h, step.end)))?;
    for (t, y) in ends {
        let s = speed(&y)?;
        stats.steps += 1;
        stats.max_speed_drift = stats.max_speed_drift.max((s - 1.0).abs());
        samples.push(PathSample { t, state: state_to_phase(&y), speed: s });
    }
    Ok(GeodesicPath { samples, exit_time: end.time, trapped: !end.event, step_stats: stats })
}

/// [`trace_geodesic_with`] with the step derived from `tol`.
pub fn trace_geodesic(metric: &ConformalMetric, start: PhaseState, t_max: f64, tol: f64) -> Result<GeodesicPath> {
    trace_geodesic_with(metric, start, TraceOptions::from_tol(tol, t_max))
}

/// Exit time τ(x, v), or `Trapped` if the geodesic is still inside at `t_max`.
pub fn exit_time(metric: &ConformalMetric, start: PhaseState, t_max: f64) -> Result<ExitTime> {
    exit_time_with(metric, start, TraceOptions::from_tol(DEFAULT_TOL, t_max))
}

pub fn exit_time_with(metric: &ConformalMetric, start: PhaseState, opts: TraceOptions) -> Result<ExitTime> {
    let end = trace_quadrature(metric, start, opts, |_| {})?;
    Ok(if end.trapped { ExitTime::Trapped } else { ExitTime::Exited(end.time) })
}

/// Flows for time `t` (no exit check), returning the final state.
pub fn flow_for(metric: &ConformalMetric, start: PhaseState, t: f64, step: f64) -> Result<PhaseState> {
    let v = start.coordinate_velocity(metric)?;
    let y0 = [start.x[0], start.x[1], v[0], v[1]];
    if t == 0.0 {
        return Ok(start);
    }
    let sign = t.signum();
    let y0 = if sign < 0.0 { [y0[0], y0[1], -y0[2], -y0[3]] } else { y0 };
    let n = (t.abs() / step).ceil().max(1.0) as usize;
    let h = t.abs() / n as f64;
    let mut rhs = geodesic_rhs(metric);
    let mut y = y0;
    for _ in 0..n {
        y = rk4_step(&mut rhs, &y, h)?.end;
    }
    if sign < 0.0 {
        y[2] = -y[2];
        y[3] = -y[3];
    }
    Ok(state_to_phase(&y))
}

/// Euclidean chord exit time `τ = −x·v + √((x·v)² + 1 − |x|²)`.
pub fn euclidean_exit_time(start: &PhaseState) -> f64 {
    let v = [start.theta.cos(), start.theta.sin()];
    let xv = start.x[0] * v[0] + start.x[1] * v[1];
    let r2 = start.x[0] * start.x[0] + start.x[1] * start.x[1];
    -xv + (xv * xv + 1.0 - r2).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn euclidean_exit_examples() {
        let m = ConformalMetric::euclidean();
        let p = trace_geodesic(&m, PhaseState::new([0.0, 0.0], 0.0), 100.0, 1e-10).unwrap();
        assert!(!p.trapped);
        assert_abs_diff_eq!(p.exit_time, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(p.end().state.x[0], 1.0, epsilon = 1e-10);
        let p = trace_geodesic(&m, PhaseState::new([0.5, 0.0], PI), 100.0, 1e-10).unwrap();
        assert_abs_diff_eq!(p.exit_time, 1.5, epsilon = 1e-10);
        assert_abs_diff_eq!(p.end().state.x[0], -1.0, epsilon = 1e-10);
        assert!(p.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert_eq!(p.samples[0].t, 0.0);
    }

    #[test]
    fn outward_boundary_start_exits_at_zero() {
        let m = ConformalMetric::sphere_cap(0.5).unwrap();
        let s = PhaseState::new([0.6, 0.8], 0.3f64.atan2(0.4) + 0.1);
        assert_eq!(exit_time(&m, s, 100.0).unwrap(), ExitTime::Exited(0.0));
    }

    #[test]
    fn start_outside_disk_is_rejected() {
        let m = ConformalMetric::euclidean();
        assert!(trace_geodesic(&m, PhaseState::new([1.2, 0.0], PI), 10.0, 1e-8).is_err());
    }

    #[test]
    fn cap_equator_is_trapped() {
        let k = 1.5;
        let m = ConformalMetric::sphere_cap(k).unwrap();
        let start = PhaseState::new([1.0 / k, 0.0], PI / 2.0);
        assert_eq!(exit_time(&m, start, 100.0).unwrap(), ExitTime::Trapped);
        let p = trace_geodesic(&m, start, 100.0, 1e-10).unwrap();
        assert!(p.trapped);
        let worst = p.samples.iter().map(|s| (s.state.x[0].hypot(s.state.x[1]) - 1.0 / k).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-3, "drift from the equator {worst}");
    }

    #[test]
    fn unit_speed_is_preserved() {
        let metrics = [
            ConformalMetric::sphere_cap(0.5).unwrap(),
            ConformalMetric::hyperbolic(0.9).unwrap(),
            ConformalMetric::gaussian_bump(0.2, [0.1, -0.1], 0.4).unwrap(),
        ];
        for m in &metrics {
            let p = trace_geodesic(m, PhaseState::inward(0.3, 0.4), 100.0, 1e-10).unwrap();
            assert!(!p.trapped);
            assert!(p.step_stats.max_speed_drift <= 1e-8, "{m}: {}", p.step_stats.max_speed_drift);
        }
    }

    #[test]
    fn quadrature_of_one_is_exit_time() {
        let m = ConformalMetric::gaussian_bump(0.3, [0.0, 0.0], 0.5).unwrap();
        let s = PhaseState::new([0.2, 0.1], 1.0);
        let len = integrate_along(&m, s, TraceOptions::default(), |_, _| 1.0).unwrap().unwrap();
        let tau = exit_time(&m, s, 100.0).unwrap().time().unwrap();
        assert_abs_diff_eq!(len, tau, epsilon = 1e-12);
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
    }
}
