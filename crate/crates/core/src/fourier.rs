//! FFT helpers with the transform convention `f̂(ξ) = ∫ e^{−ix·ξ} f(x) dx`.
//!
//! A sample vector `p_j = p(x₀ + j·d)` of length `n` is mapped to
//! `p̂(σ_k) ≈ d · Σ_j p_j e^{−iσ_k (x₀ + j d)}` on the frequency grid
//! `σ_k = 2π k / (n d)` with `k` taken in `[−n/2, n/2)`. Every routine that
//! compares against a continuum transform goes through [`continuum_fft`],
//! so the `2π` bookkeeping lives only here.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Signed frequency index of FFT bin `k` out of `n`.
pub fn signed_index(k: usize, n: usize) -> isize {
    if k < n.div_ceil(2) {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Angular frequency `σ` of FFT bin `k` for sample spacing `d`.
pub fn bin_frequency(k: usize, n: usize, d: f64) -> f64 {
    2.0 * PI * signed_index(k, n) as f64 / (n as f64 * d)
}

pub fn fft(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_forward(buf.len()).process(buf);
}

/// Unnormalized inverse; divide by `n` to invert [`fft`].
pub fn ifft(buf: &mut [Complex64]) {
    FftPlanner::new().plan_fft_inverse(buf.len()).process(buf);
}

/// Continuum-normalized transform of samples `p` taken at `x₀ + j·d`,
/// zero-padded to `n ≥ p.len()`. Returns values in FFT bin order.
pub fn continuum_fft(p: &[f64], x0: f64, d: f64, n: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); n.max(p.len())];
    for (b, v) in buf.iter_mut().zip(p) {
        b.re = *v;
    }
    fft(&mut buf);
    let n = buf.len();
    for (k, b) in buf.iter_mut().enumerate() {
        let s = bin_frequency(k, n, d);
        *b *= Complex64::from_polar(d, -s * x0);
    }
    buf
}

/// Direct (non-FFT) continuum transform at an arbitrary frequency.
pub fn direct_transform(p: &[f64], x0: f64, d: f64, sigma: f64) -> Complex64 {
    p.iter().enumerate().map(|(j, v)| Complex64::from_polar(*v * d, -sigma * (x0 + j as f64 * d))).sum()
}

/// Samples of the band-limited ramp filter kernel at spacing `d`:
/// `1/(4d²)` at 0, `−1/(n²π²d²)` at odd `n`, 0 at even `n ≠ 0`.
pub fn ramlak_kernel(n: isize, d: f64) -> f64 {
    if n == 0 {
        1.0 / (4.0 * d * d)
    } else if n % 2 != 0 {
        -1.0 / ((n * n) as f64 * PI * PI * d * d)
    } else {
        0.0
    }
}

/// Length used for linear (non-circular) convolution of `n` samples.
pub fn padded_len(n: usize) -> usize {
    (2 * n).next_power_of_two()
}

/// Applies `|D_s|` (Fourier multiplier `|σ|`) to each row of samples with
/// spacing `d`, as a linear convolution with the ramp kernel computed in the
/// frequency domain.
pub struct RampFilter {
    n: usize,
    len: usize,
    kernel_hat: Vec<Complex64>,
    fwd: std::sync::Arc<dyn rustfft::Fft<f64>>,
    inv: std::sync::Arc<dyn rustfft::Fft<f64>>,
}

impl RampFilter {
    pub fn new(n: usize, d: f64) -> Self {
        let len = padded_len(n);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); len];
        for (k, v) in kernel_hat.iter_mut().enumerate() {
            // 2π·d·h realizes |σ| on the sample lattice.
            v.re = 2.0 * PI * d * ramlak_kernel(signed_index(k, len), d);
        }
        fwd.process(&mut kernel_hat);
        Self { n, len, kernel_hat, fwd, inv }
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        assert_eq!(row.len(), self.n);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        for (b, v) in buf.iter_mut().zip(row) {
            b.re = *v;
        }
        self.fwd.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf[..self.n].iter().map(|c| c.re * scale).collect()
    }
}

/// 2D continuum transform of a row-major `nx × ny` array on a grid with
/// spacings `(dx, dy)` and first sample at `origin`, zero-padded to
/// `(px, py)`. Output is in FFT bin order, row-major.
pub fn continuum_fft2(
    values: &[f64],
    (nx, ny): (usize, usize),
    origin: [f64; 2],
    (dx, dy): (f64, f64),
    (px, py): (usize, usize),
) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); px * py];
    for j in 0..ny {
        for i in 0..nx {
            buf[j * px + i].re = values[j * nx + i];
        }
    }
    fft2(&mut buf, px, py, false);
    for ky in 0..py {
        let sy = bin_frequency(ky, py, dy);
        for kx in 0..px {
            let sx = bin_frequency(kx, px, dx);
            buf[ky * px + kx] *= Complex64::from_polar(dx * dy, -(sx * origin[0] + sy * origin[1]));
        }
    }
    buf
}

/// In-place 2D FFT of a row-major `px × py` buffer (unnormalized).
pub fn fft2(buf: &mut [Complex64], px: usize, py: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let (rows, cols) = if inverse {
        (planner.plan_fft_inverse(px), planner.plan_fft_inverse(py))
    } else {
        (planner.plan_fft_forward(px), planner.plan_fft_forward(py))
    };
    for r in buf.chunks_mut(px) {
        rows.process(r);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); py];
    for i in 0..px {
        for j in 0..py {
            col[j] = buf[j * px + i];
        }
        cols.process(&mut col);
        for j in 0..py {
            buf[j * px + i] = col[j];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_transform_matches_closed_form() {
        // exp(−x²) ↦ √π exp(−σ²/4)
        let d = 0.02;
        let x0 = -8.0;
        let p: Vec<f64> = (0..800).map(|j| (-(x0 + j as f64 * d).powi(2)).exp()).collect();
        let hat = continuum_fft(&p, x0, d, 1024);
        for k in [0usize, 3, 17, 1020] {
            let s = bin_frequency(k, 1024, d);
            let exact = PI.sqrt() * (-s * s / 4.0).exp();
            assert!((hat[k] - exact).norm() < 1e-12, "k={k}");
            assert!((direct_transform(&p, x0, d, s) - exact).norm() < 1e-12);
        }
    }

    #[test]
    fn ramp_filter_of_gaussian() {
        // |D| exp(−s²) has transform √π|σ|e^{−σ²/4}; at s = 0 its value is
        // (1/2π)∫√π|σ|e^{−σ²/4}dσ = 2/√π.
        let d = 0.01;
        let n = 1201;
        let p: Vec<f64> = (0..n).map(|j| (-((j as f64 - 600.0) * d).powi(2)).exp()).collect();
        let q = RampFilter::new(n, d).apply(&p);
        assert!((q[600] - 2.0 / PI.sqrt()).abs() < 1e-4, "{}", q[600]);
    }
}
