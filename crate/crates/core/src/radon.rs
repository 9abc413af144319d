//! The Euclidean Radon transform `Rf(s, ω) = ∫ f(sω⊥ + tω) dt` in the plane,
//! its backprojection, filtered backprojection and the Fourier identities it
//! satisfies. With λ = 0 this is also the reference the geodesic transform
//! is checked against.
//!
//! Angles are `φ_k = 2πk/n_ω` with `ω = (cos φ, sin φ)` and
//! `ω⊥ = (−sin φ, cos φ)`; offsets are the midpoints
//! `s_j = −S + (j + ½)·2S/n_s`. Both grids are built so that
//! `(s, ω) ↦ (−s, −ω)` maps samples onto samples bit-exactly.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{inside, Grid2, PlaneFunction, ScalarField};
use crate::fourier::{self, RampFilter};
use crate::parallel::map_indexed;
use crate::Point;

/// Parallel-beam data, one row of `ns` offsets per angle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sinogram {
    pub ns: usize,
    pub n_omega: usize,
    pub s_max: f64,
    /// `values[k * ns + j] = Rf(s_j, ω_k)`.
    pub values: Vec<f64>,
}

impl Sinogram {
    pub fn zeros(ns: usize, n_omega: usize, s_max: f64) -> Result<Self> {
        if ns < 2 || n_omega < 2 || !(s_max > 0.0) {
            return Err(Error::param(format!("degenerate sinogram {ns}x{n_omega}, S = {s_max}")));
        }
        Ok(Self { ns, n_omega, s_max, values: vec![0.0; ns * n_omega] })
    }

    pub fn ds(&self) -> f64 {
        2.0 * self.s_max / self.ns as f64
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * PI / self.n_omega as f64
    }

    pub fn s(&self, j: usize) -> f64 {
        offset(j, self.ns, self.s_max)
    }

    pub fn phi(&self, k: usize) -> f64 {
        2.0 * PI * k as f64 / self.n_omega as f64
    }

    /// `(cos φ_k, sin φ_k)`, exactly negated across half turns.
    pub fn omega(&self, k: usize) -> [f64; 2] {
        direction(k, self.n_omega)
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[k * self.ns + j]
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.ns..(k + 1) * self.ns]
    }

    /// Linear interpolation in `s` on row `k`, zero for `|s| > S`.
    pub fn sample(&self, s: f64, k: usize) -> f64 {
        if !(s.abs() <= self.s_max) {
            return 0.0;
        }
        let u = ((s + self.s_max) / self.ds() - 0.5).clamp(0.0, (self.ns - 1) as f64);
        let j = (u.floor() as usize).min(self.ns - 2);
        let a = u - j as f64;
        let row = self.row(k);
        (1.0 - a) * row[j] + a * row[j + 1]
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.ds() * self.d_omega()).sqrt()
    }

    pub fn inner(&self, other: &Sinogram) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.ds() * self.d_omega())
    }

    fn check_same(&self, other: &Sinogram) -> Result<()> {
        if self.ns != other.ns || self.n_omega != other.n_omega || self.s_max != other.s_max {
            return Err(Error::GridMismatch("sinograms have different sampling".into()));
        }
        Ok(())
    }
}

fn offset(j: usize, n: usize, s_max: f64) -> f64 {
    let ds = 2.0 * s_max / n as f64;
    if 2 * j + 1 > n {
        -offset(n - 1 - j, n, s_max)
    } else if 2 * j + 1 == n {
        0.0
    } else {
        -s_max + (j as f64 + 0.5) * ds
    }
}

fn direction(k: usize, n: usize) -> [f64; 2] {
    if n.is_multiple_of(2) && 2 * k >= n {
        let [c, s] = direction(k - n / 2, n);
        [-c, -s]
    } else {
        let phi = 2.0 * PI * k as f64 / n as f64;
        [phi.cos(), phi.sin()]
    }
}

/// Sum of `v_0 … v_{m−1}` that is invariant under reversing the sequence.
fn symmetric_sum(v: &[f64]) -> f64 {
    let m = v.len();
    let mut acc = if m % 2 == 1 { v[m / 2] } else { 0.0 };
    for i in 0..m / 2 {
        acc += v[i] + v[m - 1 - i];
    }
    acc
}

/// Midpoint-rule integral of `f` along the line `{sω⊥ + tω}` restricted to the
/// disk of radius `radius`; exactly 0 when the line misses that disk.
pub fn radon_line(f: &impl PlaneFunction, s: f64, omega: [f64; 2], radius: f64, step: f64) -> f64 {
    if !(s.abs() < radius) {
        return 0.0;
    }
    let half = (radius * radius - s * s).sqrt();
    let m = ((2.0 * half / step).ceil() as usize).max(2);
    let dt = 2.0 * half / m as f64;
    let perp = [-omega[1], omega[0]];
    let base = [s * perp[0], s * perp[1]];
    let vals: Vec<f64> = (0..m)
        .map(|i| {
            let t = offset(i, m, half);
            f.value([base[0] + t * omega[0], base[1] + t * omega[1]])
        })
        .collect();
    symmetric_sum(&vals) * dt
}

/// Radon transform of any plane function supported in the disk of radius
/// `radius`, sampled on `ns × n_omega` with `|s| ≤ s_max`.
pub fn radon_forward_fn(
    f: &impl PlaneFunction,
    radius: f64,
    ns: usize,
    n_omega: usize,
    s_max: f64,
    step: f64,
) -> Result<Sinogram> {
    if !(step > 0.0) {
        return Err(Error::param(format!("quadrature step must be positive, got {step}")));
    }
    let mut sino = Sinogram::zeros(ns, n_omega, s_max)?;
    let rows = map_indexed(n_omega, |k| {
        let w = direction(k, n_omega);
        (0..ns).map(|j| radon_line(f, offset(j, ns, s_max), w, radius, step)).collect::<Vec<_>>()
    });
    for (k, row) in rows.into_iter().enumerate() {
        sino.values[k * ns..(k + 1) * ns].copy_from_slice(&row);
    }
    Ok(sino)
}

/// Radon transform of a sampled field (bilinear interpolation off-grid).
/// The offset range is `[−S, S]` with `S = max(1, effective support radius)`.
pub fn radon_forward(f: &ScalarField, ns: usize, n_omega: usize, step: f64) -> Result<Sinogram> {
    let radius = f.effective_radius();
    radon_forward_fn(f, radius, ns, n_omega, radius.max(1.0), step)
}

/// `R*h(y) = ∫_{S¹} h(y·ω⊥, ω) dω`, trapezoidal in ω, linear in s.
pub fn backproject(sino: &Sinogram, grid: Grid2) -> ScalarField {
    let dirs: Vec<[f64; 2]> = (0..sino.n_omega).map(|k| sino.omega(k)).collect();
    let dw = sino.d_omega();
    let values = map_indexed(grid.len(), |idx| {
        let y = grid.center_of(idx);
        let mut acc = 0.0;
        for (k, w) in dirs.iter().enumerate() {
            acc += sino.sample(-y[0] * w[1] + y[1] * w[0], k);
        }
        acc * dw
    });
    ScalarField { grid, values, support_radius: None }
}

/// Filtered backprojection `f = (1/4π) R* |D_s| Rf`.
pub fn fbp_invert(sino: &Sinogram, grid: Grid2) -> Result<ScalarField> {
    if sino.ns < 32 {
        return Err(Error::param(format!("filtered backprojection needs at least 32 offsets, got {}", sino.ns)));
    }
    // Filtered rows do not vanish outside the support, so the offsets must
    // reach every pixel; raw data beyond s_max is zero and can be padded.
    let ds = sino.ds();
    let pad = ((grid.outer_radius() - sino.s_max) / ds).ceil().max(0.0) as usize;
    let ns = sino.ns + 2 * pad;
    let filter = RampFilter::new(ns, ds);
    let rows = map_indexed(sino.n_omega, |k| {
        let mut row = vec![0.0; ns];
        row[pad..pad + sino.ns].copy_from_slice(sino.row(k));
        filter.apply(&row)
    });
    let filtered = Sinogram { ns, s_max: sino.s_max + pad as f64 * ds, values: rows.concat(), ..sino.clone() };
    Ok(backproject(&filtered, grid).scaled(1.0 / (4.0 * PI)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceReport {
    pub max_abs: f64,
    pub rel_l2: f64,
    pub samples: usize,
}

/// Compares `∫ e^{−isσ} Rf(s, ω) ds` with `f̂(σω⊥)` on `n_sigma` frequencies
/// in `[−σ_max, σ_max]` (half the Nyquist frequency of the coarser of the two
/// samplings) and up to `n_angles` evenly spread angles.
pub fn fourier_slice_residual(
    f: &ScalarField,
    sino: &Sinogram,
    n_sigma: usize,
    n_angles: usize,
) -> Result<SliceReport> {
    let g = f.grid;
    if sino.s_max + 1e-12 < f.effective_radius().min(g.outer_radius()) && f.max_abs() > 0.0 {
        return Err(Error::param("sinogram does not cover the support of the field"));
    }
    if n_sigma < 2 || n_angles == 0 {
        return Err(Error::param("need at least 2 frequencies and 1 angle"));
    }
    let h = sino.ds().max(g.dx()).max(g.dy());
    let sigma_max = 0.5 * PI / h;
    let step_k = (sino.n_omega / n_angles).max(1);
    let mut pairs = Vec::new();
    for k in (0..sino.n_omega).step_by(step_k).take(n_angles) {
        for i in 0..n_sigma {
            pairs.push((k, -sigma_max + 2.0 * sigma_max * i as f64 / (n_sigma - 1) as f64));
        }
    }
    let origin = g.center(0, 0);
    let diffs = map_indexed(pairs.len(), |p| {
        let (k, sigma) = pairs[p];
        let lhs = fourier::direct_transform(sino.row(k), sino.s(0), sino.ds(), sigma);
        let w = sino.omega(k);
        let xi = [-sigma * w[1], sigma * w[0]];
        let rhs = pixel_transform(f, origin, xi);
        ((lhs - rhs).norm(), rhs.norm())
    });
    let max_abs = diffs.iter().fold(0.0f64, |m, d| m.max(d.0));
    let num: f64 = diffs.iter().map(|d| d.0 * d.0).sum();
    let den: f64 = diffs.iter().map(|d| d.1 * d.1).sum();
    let rel_l2 = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(SliceReport { max_abs, rel_l2, samples: pairs.len() })
}

/// `dx·dy·Σ f_ij e^{−i x_ij·ξ}`, evaluated with separable phase tables.
fn pixel_transform(f: &ScalarField, origin: Point, xi: [f64; 2]) -> Complex64 {
    let g = f.grid;
    let ex: Vec<Complex64> =
        (0..g.nx).map(|i| Complex64::from_polar(1.0, -xi[0] * (origin[0] + i as f64 * g.dx()))).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..g.ny {
        let row = &f.values[j * g.nx..(j + 1) * g.nx];
        let inner: Complex64 = row.iter().zip(&ex).map(|(v, e)| e * *v).sum();
        acc += inner * Complex64::from_polar(1.0, -xi[1] * (origin[1] + j as f64 * g.dy()));
    }
    acc * g.cell_area()
}

/// `4π|D|^{−1} f` computed as an FFT convolution with the multiplier's
/// spatial kernel `2/|x|`, zero-padded so the convolution is linear rather
/// than circular. The kernel's singular cell holds its cell average.
pub fn inverse_d_oracle(f: &ScalarField) -> ScalarField {
    let g = f.grid;
    let (px, py) = ((2 * g.nx).next_power_of_two(), (2 * g.ny).next_power_of_two());
    let (dx, dy) = (g.dx(), g.dy());
    let mut data = vec![Complex64::new(0.0, 0.0); px * py];
    for j in 0..g.ny {
        for i in 0..g.nx {
            data[j * px + i].re = f.at(i, j);
        }
    }
    let mut kernel = vec![Complex64::new(0.0, 0.0); px * py];
    for ky in 0..py {
        let y = fourier::signed_index(ky, py) as f64 * dy;
        for kx in 0..px {
            let x = fourier::signed_index(kx, px) as f64 * dx;
            kernel[ky * px + kx].re =
                if kx == 0 && ky == 0 { 2.0 * cell_average_inverse_norm(dx, dy) } else { 2.0 / x.hypot(y) };
        }
    }
    fourier::fft2(&mut data, px, py, false);
    fourier::fft2(&mut kernel, px, py, false);
    for (d, k) in data.iter_mut().zip(&kernel) {
        *d *= k;
    }
    fourier::fft2(&mut data, px, py, true);
    let scale = dx * dy / (px * py) as f64;
    let values = (0..g.len()).map(|idx| data[(idx / g.nx) * px + idx % g.nx].re * scale).collect();
    ScalarField { grid: g, values, support_radius: None }
}

/// Mean of `1/|x|` over the rectangle `[−a/2, a/2] × [−b/2, b/2]`.
fn cell_average_inverse_norm(a: f64, b: f64) -> f64 {
    let (x, y) = (a / 2.0, b / 2.0);
    // ∫∫ 1/|x| over [0,x]×[0,y] = x·asinh(y/x) + y·asinh(x/y)
    let quarter = x * (y / x).asinh() + y * (x / y).asinh();
    4.0 * quarter / (a * b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalReport {
    pub rel_mismatch: f64,
    pub interior_radius: f64,
    pub normal: ScalarField,
    pub oracle: ScalarField,
}

/// Compares `R*Rf` (line quadrature, then backprojection on `f`'s grid)
/// with `4π|D|^{−1}f` from [`inverse_d_oracle`] on the disk `|x| ≤ interior_radius`.
pub fn normal_operator_residual(
    f: &ScalarField,
    ns: usize,
    n_omega: usize,
    interior_radius: f64,
) -> Result<NormalReport> {
    let step = 0.5 * f.grid.dx().min(f.grid.dy());
    let sino = radon_forward(f, ns, n_omega, step)?;
    let normal = backproject(&sino, f.grid);
    let oracle = inverse_d_oracle(f);
    let rel_mismatch = normal.relative_error(&oracle, |x: Point| x[0].hypot(x[1]) <= interior_radius)?;
    Ok(NormalReport { rel_mismatch, interior_radius, normal, oracle })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// `lhs / rhs`; the bound asks for at most 1.01.
    pub ratio: f64,
}

/// Evaluates `‖f‖_{L²}` against `(1/√2)‖(1+σ²)^{1/4} (Rf)~‖_{L²(ℝ×S¹)}`.
pub fn stability_residual(f: &ScalarField, ns: usize, n_omega: usize) -> Result<StabilityReport> {
    let lhs = f.l2_norm();
    let step = 0.5 * f.grid.dx().min(f.grid.dy());
    let sino = radon_forward(f, ns, n_omega, step)?;
    let n = fourier::padded_len(ns);
    let ds = sino.ds();
    let dsigma = 2.0 * PI / (n as f64 * ds);
    let rows = map_indexed(n_omega, |k| {
        let hat = fourier::continuum_fft(sino.row(k), sino.s(0), ds, n);
        hat.iter()
            .enumerate()
            .map(|(b, c)| {
                let s = fourier::bin_frequency(b, n, ds);
                (1.0 + s * s).sqrt() * c.norm_sqr()
            })
            .sum::<f64>()
    });
    let rhs = (rows.iter().sum::<f64>() * dsigma * sino.d_omega()).sqrt() / 2f64.sqrt();
    let holds = lhs <= rhs * 1.01;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(StabilityReport { lhs, rhs, holds, ratio })
}

/// Relative reconstruction error of FBP on the disk of radius `r`.
pub fn fbp_error(f: &ScalarField, recon: &ScalarField, r: f64) -> Result<f64> {
    recon.relative_error(f, inside(r))
}
