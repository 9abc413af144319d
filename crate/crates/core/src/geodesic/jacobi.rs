//! Scalar Jacobi equation `J̈ + K(γ(t)) J = 0` along geodesics.
//!
//! In two dimensions a normal Jacobi field is `J(t) γ̇(t)^⊥`, so conjugate
//! points along γ are the zeros of the scalar solution with `J(0) = 0`,
//! `J̇(0) = 1`.

use super::{exits_immediately, flow, geodesic_rhs, initial_state, PhaseState, TraceOptions, DEFAULT_TOL};
use crate::error::Result;
use crate::metric::ConformalMetric;

/// First `t ∈ (0, min(τ, t_max)]` with `J(t) = 0`, or `None`.
pub fn conjugate_scan(metric: &ConformalMetric, start: PhaseState, t_max: f64) -> Result<Option<f64>> {
    conjugate_scan_with(metric, start, TraceOptions::from_tol(DEFAULT_TOL, t_max))
}

pub fn conjugate_scan_with(metric: &ConformalMetric, start: PhaseState, opts: TraceOptions) -> Result<Option<f64>> {
    let g0 = initial_state(metric, &start)?;
    if exits_immediately(&g0) {
        return Ok(None);
    }
    let y0 = [g0[0], g0[1], g0[2], g0[3], 0.0, 1.0];
    let mut geo = geodesic_rhs(metric);
    let mut rhs = |y: &[f64; 6]| -> Result<[f64; 6]> {
        let d = geo(&[y[0], y[1], y[2], y[3]])?;
        let k = metric.gaussian_curvature([y[0], y[1]])?;
        Ok([d[0], d[1], d[2], d[3], y[5], -k * y[4]])
    };
    // Fires on whichever comes first: leaving the disk or J turning negative.
    let event = |y: &[f64; 6]| (y[0] * y[0] + y[1] * y[1] - 1.0).max(-y[4]);
    let end = flow(&mut rhs, y0, opts, event, |_, _, _| {})?;
    if !end.event {
        return Ok(None);
    }
    let y = end.state;
    let outside = y[0] * y[0] + y[1] * y[1] - 1.0;
    Ok(if -y[4] >= outside { Some(end.time) } else { None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn flat_has_no_conjugate_points() {
        let m = ConformalMetric::euclidean();
        assert_eq!(conjugate_scan(&m, PhaseState::inward(0.0, 0.2), 100.0).unwrap(), None);
    }

    #[test]
    fn unit_sphere_conjugate_at_pi() {
        // Chords through the center have length 4·atan(1.5) > π.
        let m = ConformalMetric::sphere_cap(1.5).unwrap();
        for (beta, alpha) in [(0.0, 0.0), (1.3, 0.1), (-2.0, -0.15)] {
            let t = conjugate_scan(&m, PhaseState::inward(beta, alpha), 100.0).unwrap().unwrap();
            assert_abs_diff_eq!(t, PI, epsilon = 1e-6);
        }
    }

    #[test]
    fn negative_curvature_none() {
        let m = ConformalMetric::hyperbolic(0.9).unwrap();
        assert_eq!(conjugate_scan(&m, PhaseState::inward(0.5, 0.0), 100.0).unwrap(), None);
    }

    #[test]
    fn short_chords_on_small_cap_none() {
        let m = ConformalMetric::sphere_cap(0.5).unwrap();
        assert_eq!(conjugate_scan(&m, PhaseState::inward(0.5, 0.0), 100.0).unwrap(), None);
    }
}
