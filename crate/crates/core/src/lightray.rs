//! Light-ray transform of time-dependent potentials on `ℝ_t × M`:
//! `Lq(γ, σ) = ∫₀^ℓ q(γ(t), t + σ) dt` along the lifts `t ↦ (γ(t), t + σ)` of
//! the fan geodesics, with the delay σ sampled on a uniform grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid2, PlaneFunction, ScalarField};
use crate::geodesic::{trace_quadrature, TraceOptions};
use crate::metric::ConformalMetric;
use crate::parallel::map_indexed;
use crate::phantoms::{taper, Analytic, TAPER_END};
use crate::xray::{FanGeometry, RayStatus};
use crate::Point;

/// Temporal factor `ψ(t)` of a separable potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    /// `exp(−(t − c)²/w²)`, unchanged for `|t − c| ≤ 3w` and smoothly cut
    /// off by `5w`.
    Gaussian { center: f64, width: f64 },
    /// Indicator of `[start, end]`.
    Window { start: f64, end: f64 },
    /// `cos(ρ₀ (t − c))` times the Gaussian profile.
    Modulated { center: f64, width: f64, rho: f64 },
}

impl TimeProfile {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Gaussian { width, .. } | Self::Modulated { width, .. } => width > 0.0,
            Self::Window { start, end } => end > start,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("degenerate time profile {self:?}")))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Self::Gaussian { center, width } => gaussian(t, center, width),
            Self::Window { start, end } => {
                if (start..=end).contains(&t) {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Modulated { center, width, rho } => (rho * (t - center)).cos() * gaussian(t, center, width),
        }
    }

    /// Closed interval outside of which `ψ` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Gaussian { center, width } | Self::Modulated { center, width, .. } => {
                (center - TAPER_END * width, center + TAPER_END * width)
            }
            Self::Window { start, end } => (start, end),
        }
    }

    /// `ψ(· − a)`.
    pub fn shifted(&self, a: f64) -> Self {
        match *self {
            Self::Gaussian { center, width } => Self::Gaussian { center: center + a, width },
            Self::Window { start, end } => Self::Window { start: start + a, end: end + a },
            Self::Modulated { center, width, rho } => Self::Modulated { center: center + a, width, rho },
        }
    }

    /// `∫ ψ dt`, by composite Simpson on the support.
    pub fn integral(&self) -> f64 {
        match *self {
            Self::Window { start, end } => end - start,
            _ => {
                let (a, b) = self.support();
                simpson(|t| self.value(t), a, b, 4000)
            }
        }
    }
}

fn gaussian(t: f64, c: f64, w: f64) -> f64 {
    let u = (t - c) / w;
    (-u * u).exp() * taper(u.abs())
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// `q(x, t)` on the disk times a compact time interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SpacetimePotential {
    Separable {
        spatial: Analytic,
        time: TimeProfile,
    },
    /// Samples at pixel centers × `t_k = t0 + k·dt`; bilinear in x, linear in
    /// t, zero outside `[t0, t0 + (nt − 1)dt]`.
    Gridded {
        grid: Grid2,
        t0: f64,
        dt: f64,
        nt: usize,
        values: Vec<f64>,
    },
}

impl SpacetimePotential {
    pub fn separable(spatial: Analytic, time: TimeProfile) -> Self {
        Self::Separable { spatial, time }
    }

    pub fn gridded(grid: Grid2, t0: f64, dt: f64, nt: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * nt || nt < 2 || !(dt > 0.0) {
            return Err(Error::GridMismatch(format!(
                "{} samples for a {}-pixel grid and {nt} times",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self::Gridded { grid, t0, dt, nt, values })
    }

    /// Samples `q` on `grid × {t0 + k·dt}`.
    pub fn sample(&self, grid: Grid2, t0: f64, dt: f64, nt: usize) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * nt);
        for k in 0..nt {
            let t = t0 + k as f64 * dt;
            values.extend((0..grid.len()).map(|p| self.value(grid.center_of(p), t)));
        }
        Self::gridded(grid, t0, dt, nt, values)
    }

    pub fn value(&self, x: Point, t: f64) -> f64 {
        match self {
            Self::Separable { spatial, time } => {
                let psi = time.value(t);
                if psi == 0.0 {
                    0.0
                } else {
                    spatial.value(x) * psi
                }
            }
            Self::Gridded { grid, t0, dt, nt, values } => {
                let u = (t - t0) / dt;
                if !(u >= 0.0 && u <= (*nt - 1) as f64) {
                    return 0.0;
                }
                let k = (u.floor() as usize).min(nt - 2);
                let a = u - k as f64;
                let (st, n) = grid.bilinear(x);
                let slab = |k: usize| -> f64 { st[..n].iter().map(|(p, w)| w * values[k * grid.len() + p]).sum() };
                (1.0 - a) * slab(k) + a * slab(k + 1)
            }
        }
    }

    pub fn t_support(&self) -> (f64, f64) {
        match self {
            Self::Separable { time, .. } => time.support(),
            Self::Gridded { t0, dt, nt, .. } => (*t0, t0 + (*nt - 1) as f64 * dt),
        }
    }

    /// `q(x, t − a)`.
    pub fn shifted(&self, a: f64) -> Self {
        match self {
            Self::Separable { spatial, time } => Self::Separable { spatial: spatial.clone(), time: time.shifted(a) },
            Self::Gridded { grid, t0, dt, nt, values } => {
                Self::Gridded { grid: *grid, t0: t0 + a, dt: *dt, nt: *nt, values: values.clone() }
            }
        }
    }

    /// `Q(x) = ∫ q(x, t) dt` on `grid` (trapezoidal in t for gridded data).
    pub fn time_integral(&self, grid: Grid2) -> ScalarField {
        match self {
            Self::Separable { spatial, time } => {
                let m = time.integral();
                ScalarField::from_fn(grid, spatial).scaled(m)
            }
            Self::Gridded { .. } => ScalarField::from_fn(grid, &self.time_integrated()),
        }
    }

    /// `Q(x) = ∫ q(x, t) dt` as a plane function.
    pub fn time_integrated(&self) -> impl PlaneFunction + '_ {
        let mass = match self {
            Self::Separable { time, .. } => time.integral(),
            Self::Gridded { .. } => 0.0,
        };
        TimeIntegral(self, mass)
    }
}

struct TimeIntegral<'a>(&'a SpacetimePotential, f64);

impl PlaneFunction for TimeIntegral<'_> {
    fn value(&self, x: Point) -> f64 {
        match self.0 {
            SpacetimePotential::Separable { spatial, .. } => spatial.value(x) * self.1,
            SpacetimePotential::Gridded { t0, dt, nt, .. } => {
                let mut acc = 0.0;
                for k in 0..*nt {
                    let w = if k == 0 || k + 1 == *nt { 0.5 } else { 1.0 };
                    acc += w * self.0.value(x, t0 + k as f64 * dt);
                }
                acc * dt
            }
        }
    }
}

/// Uniform delays `σ_k = min + k·(max − min)/(n − 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaGrid {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl SigmaGrid {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 || !(max > min) {
            return Err(Error::param(format!("bad σ grid [{min}, {max}] with {n} samples")));
        }
        Ok(Self { min, max, n })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn at(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step()
    }

    /// Trapezoid weights.
    fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n {
            0.5 * self.step()
        } else {
            self.step()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LightRayData {
    pub geometry: FanGeometry,
    pub sigma: SigmaGrid,
    /// `values[ray * sigma.n + k]`.
    pub values: Vec<f64>,
    pub status: Vec<RayStatus>,
    /// Geodesic length ℓ per ray.
    pub lengths: Vec<f64>,
}

impl LightRayData {
    pub fn row(&self, ray: usize) -> &[f64] {
        &self.values[ray * self.sigma.n..(ray + 1) * self.sigma.n]
    }

    pub fn max_length(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Linear interpolation in σ, zero outside the grid.
    pub fn sample(&self, ray: usize, sigma: f64) -> f64 {
        let u = (sigma - self.sigma.min) / self.sigma.step();
        if !(u >= 0.0 && u <= (self.sigma.n - 1) as f64) {
            return 0.0;
        }
        let k = (u.floor() as usize).min(self.sigma.n - 2);
        let a = u - k as f64;
        let row = self.row(ray);
        (1.0 - a) * row[k] + a * row[k + 1]
    }
}

/// `Lq(γ, σ)` for every fan geodesic and every σ on the grid.
pub fn lightray_forward(
    metric: &ConformalMetric,
    q: &SpacetimePotential,
    geometry: FanGeometry,
    sigma: SigmaGrid,
    trace: TraceOptions,
) -> Result<LightRayData> {
    let rows = map_indexed(geometry.len(), |ray| {
        let mut nodes = Vec::new();
        let end = trace_quadrature(metric, geometry.state(ray), trace, |n| nodes.push((n.t, n.x, n.weight)));
        let end = match end {
            Ok(e) if !e.trapped => e,
            Ok(_) => return (vec![0.0; sigma.n], RayStatus::Trapped, f64::NAN),
            Err(_) => return (vec![0.0; sigma.n], RayStatus::Failed, f64::NAN),
        };
        let row = match q {
            SpacetimePotential::Separable { spatial, time } => {
                let q0: Vec<f64> = nodes.iter().map(|(_, x, w)| w * spatial.value(*x)).collect();
                (0..sigma.n)
                    .map(|k| {
                        let s = sigma.at(k);
                        nodes.iter().zip(&q0).map(|((t, _, _), a)| a * time.value(t + s)).sum()
                    })
                    .collect()
            }
            SpacetimePotential::Gridded { .. } => (0..sigma.n)
                .map(|k| {
                    let s = sigma.at(k);
                    nodes.iter().map(|(t, x, w)| w * q.value(*x, t + s)).sum()
                })
                .collect(),
        };
        (row, RayStatus::Ok, end.time)
    });
    let mut data = LightRayData {
        geometry,
        sigma,
        values: Vec::with_capacity(geometry.len() * sigma.n),
        status: Vec::with_capacity(geometry.len()),
        lengths: Vec::with_capacity(geometry.len()),
    };
    for (row, st, len) in rows {
        data.values.extend(row);
        data.status.push(st);
        data.lengths.push(len);
    }
    Ok(data)
}

/// σ-range `[t_min − ℓ_max, t_max]` outside of which `Lq` vanishes.
pub fn required_sigma_range(q: &SpacetimePotential, max_length: f64) -> (f64, f64) {
    let (a, b) = q.t_support();
    (a - max_length, b)
}

fn check_sigma_cover(q: &SpacetimePotential, data: &LightRayData) -> Result<()> {
    let (need_min, need_max) = required_sigma_range(q, data.max_length());
    if data.sigma.min > need_min || data.sigma.max < need_max {
        return Err(Error::SigmaGrid { need_min, need_max, have_min: data.sigma.min, have_max: data.sigma.max });
    }
    Ok(())
}

/// `∫ e^{−iρσ} Lq(γ, σ) dσ` per ray, trapezoidal on the σ grid.
pub fn sigma_transform(data: &LightRayData, rho: f64) -> Vec<Complex64> {
    (0..data.status.len())
        .map(|ray| {
            data.row(ray)
                .iter()
                .enumerate()
                .map(|(k, v)| Complex64::from_polar(data.sigma.weight(k) * v, -rho * data.sigma.at(k)))
                .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FubiniReport {
    /// `∫ Lq dσ` per ray.
    pub moment: Vec<f64>,
    /// `I[∫ q dt]` per ray.
    pub static_transform: Vec<f64>,
    pub rel_residual: f64,
    pub sigma_range_needed: (f64, f64),
}

/// Checks `∫ Lq(γ, σ) dσ = I[Q](γ)` with `Q = ∫ q dt` over the fan. The σ
/// grid must cover `[t_min − ℓ_max, t_max]`.
pub fn sigma_fubini_check(
    metric: &ConformalMetric,
    q: &SpacetimePotential,
    geometry: FanGeometry,
    sigma: SigmaGrid,
    trace: TraceOptions,
) -> Result<FubiniReport> {
    let data = lightray_forward(metric, q, geometry, sigma, trace)?;
    check_sigma_cover(q, &data)?;
    let moment: Vec<f64> = sigma_transform(&data, 0.0).iter().map(|c| c.re).collect();
    let stat = crate::xray::xray_forward(metric, &q.time_integrated(), geometry, trace)?;
    let (mut num, mut den) = (0.0, 0.0);
    for ray in 0..geometry.len() {
        if data.status[ray] == RayStatus::Ok && stat.status[ray] == RayStatus::Ok {
            num += (moment[ray] - stat.values[ray]).powi(2);
            den += stat.values[ray].powi(2);
        }
    }
    let rel_residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(FubiniReport {
        moment,
        static_transform: stat.values,
        rel_residual,
        sigma_range_needed: required_sigma_range(q, data.max_length()),
    })
}

/// The σ-Fourier transform of `Lq` at frequency `ρ`, per ray. At `ρ = 0`
/// this is the σ-moment of [`sigma_fubini_check`], summed identically.
pub fn sigma_fourier_slice(
    metric: &ConformalMetric,
    q: &SpacetimePotential,
    geometry: FanGeometry,
    sigma: SigmaGrid,
    rho: f64,
    trace: TraceOptions,
) -> Result<Vec<Complex64>> {
    let data = lightray_forward(metric, q, geometry, sigma, trace)?;
    check_sigma_cover(q, &data)?;
    Ok(sigma_transform(&data, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantoms::{PhantomSpec, Shape};

    fn potential() -> SpacetimePotential {
        let spatial = PhantomSpec::new(Shape::GaussianBump { center: [0.1, 0.0], width: 0.2, amplitude: 1.0 })
            .analytic()
            .unwrap();
        SpacetimePotential::separable(spatial, TimeProfile::Gaussian { center: 1.0, width: 0.3 })
    }

    #[test]
    fn zero_potential_gives_zero() {
        let q = SpacetimePotential::separable(Analytic::Bumps(vec![]), TimeProfile::Window { start: 0.0, end: 1.0 });
        let d = lightray_forward(
            &ConformalMetric::euclidean(),
            &q,
            FanGeometry::new(8, 8).unwrap(),
            SigmaGrid::new(-3.0, 2.0, 11).unwrap(),
            TraceOptions::with_step(0.05, 10.0),
        )
        .unwrap();
        assert!(d.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn short_sigma_grid_refused() {
        let e = sigma_fubini_check(
            &ConformalMetric::euclidean(),
            &potential(),
            FanGeometry::new(8, 8).unwrap(),
            SigmaGrid::new(-1.0, 2.0, 50).unwrap(),
            TraceOptions::with_step(0.05, 10.0),
        );
        assert!(matches!(e, Err(Error::SigmaGrid { .. })));
    }

    #[test]
    fn gaussian_profile_integral() {
        let p = TimeProfile::Gaussian { center: 0.0, width: 0.5 };
        // The taper only touches the tail beyond three widths.
        assert!((p.integral() - 0.5 * std::f64::consts::PI.sqrt()).abs() < 1e-4);
    }
}
