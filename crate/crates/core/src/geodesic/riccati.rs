//! Matrix Riccati equation `Ḣ + BH + HBᵗ + HCH + F = 0` via its
//! linearization.
//!
//! With `H = Z Y⁻¹`, the pair `Ẏ = BᵗY + CZ`, `Ż = −BZ − FY`,
//! `Y(0) = I`, `Z(0) = H₀` is linear and solvable on any interval. `Y*Z − Z*Y`
//! is conserved along solutions, which is what keeps `Y` invertible and
//! `Im H = Y^{-*} (Im H₀) Y⁻¹` positive definite whenever `Im H₀` is.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

type CMat = DMatrix<Complex64>;
type Coefficient = Box<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;

/// Time-dependent real coefficients `B(t)`, `C(t)`, `F(t)` (C and F symmetric).
pub struct RiccatiProblem {
    pub dim: usize,
    pub b: Coefficient,
    pub c: Coefficient,
    pub f: Coefficient,
}

impl RiccatiProblem {
    pub fn new(
        dim: usize,
        b: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
        c: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
        f: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        Self { dim, b: Box::new(b), c: Box::new(c), f: Box::new(f) }
    }

    /// `Ḣ + H² = F`, i.e. `B = 0`, `C = I` and the forcing term negated, so
    /// the linear pair reads `ż = F y`, `ẏ = z`.
    pub fn simplified(dim: usize, f: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Self::new(dim, move |_| DMatrix::zeros(dim, dim), move |_| DMatrix::identity(dim, dim), move |t| -f(t))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RiccatiSolution {
    pub times: Vec<f64>,
    #[serde(skip)]
    pub h: Vec<CMat>,
    /// `Y` stayed invertible on every sample of `[0, T]`.
    pub y_nonvanishing: bool,
    /// First zero of `det Y` (real data only).
    pub blowup_time: Option<f64>,
    /// Smallest eigenvalue of `Im H` over all samples.
    pub min_im_eigenvalue: f64,
    /// Largest `‖H − Hᵗ‖ / max(1, ‖H‖)` over all samples.
    pub symmetry_defect: f64,
    /// Largest drift of the conserved `Y*Z − Z*Y`, relative to its size.
    pub conservation_defect: f64,
}

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|v| Complex64::new(v, 0.0))
}

fn rhs(p: &RiccatiProblem, t: f64, y: &CMat, z: &CMat) -> (CMat, CMat) {
    let b = to_complex(&(p.b)(t));
    let c = to_complex(&(p.c)(t));
    let f = to_complex(&(p.f)(t));
    let dy = b.transpose() * y + &c * z;
    let dz = -(&b * z) - f * y;
    (dy, dz)
}

fn rk4(p: &RiccatiProblem, t: f64, y: &CMat, z: &CMat, h: f64) -> (CMat, CMat) {
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let (k1y, k1z) = rhs(p, t, y, z);
    let (k2y, k2z) = rhs(p, t + 0.5 * h, &(y + &k1y * half), &(z + &k1z * half));
    let (k3y, k3z) = rhs(p, t + 0.5 * h, &(y + &k2y * half), &(z + &k2z * half));
    let (k4y, k4z) = rhs(p, t + h, &(y + &k3y * full), &(z + &k3z * full));
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let ny = y + (k1y + &k2y * two + &k3y * two + k4y) * sixth;
    let nz = z + (k1z + &k2z * two + &k3z * two + k4z) * sixth;
    (ny, nz)
}

fn im_part(m: &CMat) -> DMatrix<f64> {
    m.map(|v| v.im)
}

fn min_sym_eigen(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn frob(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn conserved(y: &CMat, z: &CMat) -> CMat {
    y.adjoint() * z - z.adjoint() * y
}

/// Solves the simplified model `Ḣ + H² = F` (scalar or matrix).
pub fn riccati_solve_simplified(
    dim: usize,
    f: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static,
    h0: &CMat,
    t_end: f64,
    steps: usize,
) -> Result<RiccatiSolution> {
    riccati_solve(&RiccatiProblem::simplified(dim, f), h0, t_end, steps)
}

/// Integrates the linearized pair with `steps` RK4 steps on `[0, t_end]`.
///
/// Real `H₀` may reach a zero of `det Y`; it is refined and returned as
/// `blowup_time` and the solution stops there. With `Im H₀ ≻ 0` a singular
/// `Y` is impossible and is reported as an internal-consistency error.
pub fn riccati_solve(problem: &RiccatiProblem, h0: &CMat, t_end: f64, steps: usize) -> Result<RiccatiSolution> {
    let n = problem.dim;
    if h0.nrows() != n || h0.ncols() != n {
        return Err(Error::param(format!("H0 must be {n}x{n}")));
    }
    if frob(&(h0 - h0.transpose())) > 1e-12 * frob(h0).max(1.0) {
        return Err(Error::param("H0 must be symmetric"));
    }
    if !(t_end > 0.0) || steps == 0 {
        return Err(Error::param("need t_end > 0 and at least one step"));
    }
    let im0 = im_part(h0);
    let real_data = im0.iter().all(|v| *v == 0.0);
    let im_positive = !real_data && min_sym_eigen(&im0) > 0.0;

    let dt = t_end / steps as f64;
    let mut y = CMat::identity(n, n);
    let mut z = h0.clone();
    let w0 = conserved(&y, &z);

    let mut sol = RiccatiSolution {
        times: vec![0.0],
        h: vec![h0.clone()],
        y_nonvanishing: true,
        blowup_time: None,
        min_im_eigenvalue: if real_data { 0.0 } else { min_sym_eigen(&im0) },
        symmetry_defect: 0.0,
        conservation_defect: 0.0,
    };

    let det_re = |y: &CMat| y.clone().determinant().re;
    for k in 0..steps {
        let t = k as f64 * dt;
        let (ny, nz) = rk4(problem, t, &y, &z, dt);
        if real_data {
            let (d0, d1) = (det_re(&y), det_re(&ny));
            if d1 == 0.0 || d0.signum() != d1.signum() {
                // Bisect the sub-step length so the root lies on the discrete flow.
                let (mut a, mut b) = (0.0, dt);
                while b - a > 1e-15 {
                    let c = 0.5 * (a + b);
                    let dc = det_re(&rk4(problem, t, &y, &z, c).0);
                    if dc == 0.0 || dc.signum() != d0.signum() {
                        b = c;
                    } else {
                        a = c;
                    }
                }
                sol.blowup_time = Some(t + 0.5 * (a + b));
                sol.y_nonvanishing = false;
                return Ok(sol);
            }
        }
        y = ny;
        z = nz;
        let yinv = match y.clone().try_inverse() {
            Some(inv) if frob(&inv).is_finite() => inv,
            _ => {
                if im_positive {
                    return Err(Error::Consistency(format!(
                        "Y became singular at t = {} although Im H0 is positive definite",
                        t + dt
                    )));
                }
                sol.y_nonvanishing = false;
                sol.blowup_time = Some(t + dt);
                return Ok(sol);
            }
        };
        let h = &z * yinv;
        let scale = frob(&h).max(1.0);
        sol.symmetry_defect = sol.symmetry_defect.max(frob(&(&h - h.transpose())) / scale);
        let drift = frob(&(conserved(&y, &z) - &w0)) / (frob(&y) * frob(&z)).max(1e-300);
        sol.conservation_defect = sol.conservation_defect.max(drift);
        if !real_data {
            let m = min_sym_eigen(&im_part(&h));
            sol.min_im_eigenvalue = sol.min_im_eigenvalue.min(m);
            if im_positive && !(m > 0.0) {
                return Err(Error::Consistency(format!("Im H lost positivity at t = {}", t + dt)));
            }
        }
        sol.times.push(t + dt);
        sol.h.push(h);
    }
    Ok(sol)
}
