//! Numerical certificate for the three conditions defining a simple disk.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{conjugate_scan_with, exit_time_with, ExitTime, PhaseState, TraceOptions};
use crate::error::{Error, Result};
use crate::metric::ConformalMetric;
use crate::parallel::map_indexed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    NotConvex,
    Trapped,
    ConjugatePoint,
    IntegrationFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: [f64; 2],
    pub theta: f64,
    pub failure_kind: FailureKind,
    /// Second fundamental form value, trapping time, or conjugate time.
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicityOptions {
    pub n_boundary: usize,
    pub n_angles: usize,
    /// Rings of interior base points used for the trapping test.
    pub n_radii: usize,
    pub t_max: f64,
    pub step: f64,
    /// Cap on the number of witnesses kept per criterion.
    pub max_witnesses: usize,
}

impl Default for SimplicityOptions {
    fn default() -> Self {
        Self { n_boundary: 32, n_angles: 32, n_radii: 4, t_max: super::DEFAULT_T_MAX, step: 0.01, max_witnesses: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub strictly_convex: bool,
    pub nontrapping: bool,
    pub no_conjugate_points: bool,
    pub min_second_fundamental_form: f64,
    pub states_tested: usize,
    pub trapped_count: usize,
    pub conjugate_count: usize,
    pub failure_count: usize,
    pub witnesses: Vec<Witness>,
}

impl SimplicityReport {
    pub fn is_simple(&self) -> bool {
        self.strictly_convex && self.nontrapping && self.no_conjugate_points
    }
}

/// Samples the boundary for convexity, a fan of inward boundary states for
/// trapping and conjugate points, and rings of interior states for trapping
/// (geodesics trapped in the interior never meet the boundary).
pub fn verify_simplicity(metric: &ConformalMetric, opts: SimplicityOptions) -> Result<SimplicityReport> {
    if opts.n_boundary < 8 || opts.n_angles < 8 {
        return Err(Error::param("simplicity sampling needs at least 8 boundary points and 8 angles"));
    }
    let trace = TraceOptions::with_step(opts.step, opts.t_max);
    let mut witnesses = Vec::new();

    let mut min_ii = f64::INFINITY;
    let mut convex_witnesses = Vec::new();
    for i in 0..opts.n_boundary {
        let beta = 2.0 * PI * i as f64 / opts.n_boundary as f64;
        let ii = metric.boundary_convexity(beta)?;
        min_ii = min_ii.min(ii);
        if !(ii > 0.0) {
            convex_witnesses.push(Witness {
                x: [beta.cos(), beta.sin()],
                theta: beta + PI / 2.0,
                failure_kind: FailureKind::NotConvex,
                value: ii,
            });
        }
    }
    let strictly_convex = convex_witnesses.is_empty();
    witnesses.extend(convex_witnesses.into_iter().take(opts.max_witnesses));

    let fan: Vec<PhaseState> = (0..opts.n_boundary * opts.n_angles)
        .map(|idx| {
            let (i, j) = (idx / opts.n_angles, idx % opts.n_angles);
            let beta = 2.0 * PI * i as f64 / opts.n_boundary as f64;
            let alpha = -PI / 2.0 + (j as f64 + 0.5) * PI / opts.n_angles as f64;
            PhaseState::inward(beta, alpha)
        })
        .collect();
    let interior: Vec<PhaseState> = (0..opts.n_radii * opts.n_boundary * opts.n_angles)
        .map(|idx| {
            let m = idx / (opts.n_boundary * opts.n_angles);
            let rest = idx % (opts.n_boundary * opts.n_angles);
            let (i, j) = (rest / opts.n_angles, rest % opts.n_angles);
            let r = (m as f64 + 0.5) / opts.n_radii as f64;
            let phi = 2.0 * PI * (i as f64 + 0.5 * (m % 2) as f64) / opts.n_boundary as f64;
            let theta = 2.0 * PI * (j as f64 + 0.5) / opts.n_angles as f64;
            PhaseState::new([r * phi.cos(), r * phi.sin()], theta)
        })
        .collect();

    #[derive(Clone, Copy)]
    enum Outcome {
        Ok,
        Trapped,
        Conjugate(f64),
        Failed,
    }

    let fan_results = map_indexed(fan.len(), |k| {
        let s = fan[k];
        match exit_time_with(metric, s, trace) {
            Ok(ExitTime::Trapped) => Outcome::Trapped,
            Ok(ExitTime::Exited(_)) => match conjugate_scan_with(metric, s, trace) {
                Ok(Some(t)) => Outcome::Conjugate(t),
                Ok(None) => Outcome::Ok,
                Err(_) => Outcome::Failed,
            },
            Err(_) => Outcome::Failed,
        }
    });
    let interior_results = map_indexed(interior.len(), |k| match exit_time_with(metric, interior[k], trace) {
        Ok(ExitTime::Trapped) => Outcome::Trapped,
        Ok(ExitTime::Exited(_)) => Outcome::Ok,
        Err(_) => Outcome::Failed,
    });

    let (mut trapped, mut conjugate, mut failed) = (Vec::new(), Vec::new(), Vec::new());
    for (s, o) in fan.iter().chain(&interior).zip(fan_results.iter().chain(&interior_results)) {
        let w = |kind, value| Witness { x: s.x, theta: s.theta, failure_kind: kind, value };
        match *o {
            Outcome::Ok => {}
            Outcome::Trapped => trapped.push(w(FailureKind::Trapped, opts.t_max)),
            Outcome::Conjugate(t) => conjugate.push(w(FailureKind::ConjugatePoint, t)),
            Outcome::Failed => failed.push(w(FailureKind::IntegrationFailure, f64::NAN)),
        }
    }
    let report = SimplicityReport {
        strictly_convex,
        nontrapping: trapped.is_empty(),
        no_conjugate_points: conjugate.is_empty(),
        min_second_fundamental_form: min_ii,
        states_tested: fan.len() + interior.len(),
        trapped_count: trapped.len(),
        conjugate_count: conjugate.len(),
        failure_count: failed.len(),
        witnesses: witnesses
            .into_iter()
            .chain(trapped.into_iter().take(opts.max_witnesses))
            .chain(conjugate.into_iter().take(opts.max_witnesses))
            .chain(failed.into_iter().take(opts.max_witnesses))
            .collect(),
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SimplicityOptions {
        SimplicityOptions { n_boundary: 16, n_angles: 16, n_radii: 3, ..Default::default() }
    }

    #[test]
    fn euclidean_is_simple() {
        let r = verify_simplicity(&ConformalMetric::euclidean(), quick()).unwrap();
        assert!(r.is_simple(), "{r:?}");
        assert!(r.witnesses.is_empty());
    }

    #[test]
    fn small_cap_is_simple() {
        let r = verify_simplicity(&ConformalMetric::sphere_cap(0.5).unwrap(), quick()).unwrap();
        assert!(r.is_simple(), "{r:?}");
    }

    #[test]
    fn large_cap_fails() {
        let r = verify_simplicity(&ConformalMetric::sphere_cap(1.5).unwrap(), quick()).unwrap();
        assert!(!r.strictly_convex);
        assert!(!r.nontrapping);
        assert!(r.min_second_fundamental_form < 0.0);
        assert!(r.witnesses.iter().any(|w| w.failure_kind == FailureKind::Trapped));
        assert!(r.witnesses.iter().any(|w| w.failure_kind == FailureKind::NotConvex));
    }

    #[test]
    fn too_few_samples_rejected() {
        let o = SimplicityOptions { n_boundary: 4, ..quick() };
        assert!(verify_simplicity(&ConformalMetric::euclidean(), o).is_err());
    }
}
