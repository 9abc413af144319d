//! Seeded test fields: smooth bumps, bump mixtures, disk indicators, odd
//! antipodal pairs and separable spacetime potentials.
//!
//! A [`PhantomSpec`] is plain JSON; [`PhantomSpec::analytic`] gives the exact
//! function and [`PhantomSpec::generate`] its samples on the target grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid2, PlaneFunction, ScalarField};
use crate::lightray::{SpacetimePotential, TimeProfile};
use crate::Point;

/// `exp(1 − 1/(1 − ρ²))` on `ρ < 1`, 0 outside: smooth, compactly
/// supported, equal to 1 at the origin.
pub fn smooth_bump(rho: f64) -> f64 {
    let q = 1.0 - rho * rho;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// Flat-topped cutoff `exp(1 − 1/(1 − ρ⁴))`, used to truncate Gaussians.
pub fn window(rho: f64) -> f64 {
    let q = 1.0 - rho.powi(4);
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

pub const TAPER_START: f64 = 3.0;
pub const TAPER_END: f64 = 5.0;

/// 1 on `[0, 3]`, 0 beyond 5, C^∞ in between.
pub fn taper(u: f64) -> f64 {
    if u <= TAPER_START {
        return 1.0;
    }
    if u >= TAPER_END {
        return 0.0;
    }
    let t = (TAPER_END - u) / (TAPER_END - TAPER_START);
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

/// `e^{−ρ²}` cut off by [`taper`]; vanishes for `ρ ≥ 5`.
pub fn tapered_gaussian(rho: f64) -> f64 {
    (-rho * rho).exp() * taper(rho.abs())
}

/// Gaussian `exp(−|x − c|²/w²)` truncated smoothly at radius `3w`.
pub fn windowed_gaussian(x: Point, center: Point, width: f64) -> f64 {
    let r = (x[0] - center[0]).hypot(x[1] - center[1]);
    (-(r / width).powi(2)).exp() * window(r / (3.0 * width))
}

fn default_amplitude() -> f64 {
    1.0
}
fn default_count() -> usize {
    4
}
fn default_min_width() -> f64 {
    0.15
}
fn default_max_width() -> f64 {
    0.3
}
fn default_margin() -> f64 {
    0.1
}
fn default_center() -> Point {
    [0.0, 0.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Windowed Gaussian, support radius `3·width`.
    GaussianBump {
        #[serde(default = "default_center")]
        center: Point,
        width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// `count` compact bumps with seeded centers, radii in
    /// `[min_width, max_width]` and amplitudes in `[−amplitude, amplitude]`.
    BumpMixture {
        #[serde(default = "default_count")]
        count: usize,
        seed: u64,
        #[serde(default = "default_min_width")]
        min_width: f64,
        #[serde(default = "default_max_width")]
        max_width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    DiskIndicator {
        #[serde(default = "default_center")]
        center: Point,
        radius: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// `φ(x) − φ(A x)` for a compact bump `φ` of radius `width` at `center`,
    /// with `A` the antipodal map of the cap of aperture `cap_k`
    /// (`x ↦ −x` when absent).
    OddAntipodalPair {
        center: Point,
        width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
        #[serde(default)]
        cap_k: Option<f64>,
    },
    /// `q(x, t) = q₀(x) ψ(t)`.
    SeparableSpacetime { spatial: Box<Shape>, time: TimeProfile },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default = "default_extent")]
    pub extent: f64,
}

fn default_extent() -> f64 {
    1.0
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n: 128, extent: 1.0 }
    }
}

impl GridSpec {
    pub fn grid(&self) -> Result<Grid2> {
        if self.n < 16 {
            return Err(Error::param(format!("grids need at least 16 pixels per side, got {}", self.n)));
        }
        if self.extent < 1.0 {
            return Err(Error::param("the grid must cover the unit disk"));
        }
        Grid2::square(self.n, self.extent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhantomSpec {
    #[serde(flatten)]
    pub shape: Shape,
    /// Supports must stay inside the disk of radius `1 − margin`.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default)]
    pub grid: GridSpec,
}

pub enum Phantom {
    Field(ScalarField),
    Spacetime(SpacetimePotential),
}

impl PhantomSpec {
    pub fn new(shape: Shape) -> Self {
        Self { shape, margin: default_margin(), grid: GridSpec::default() }
    }

    pub fn with_grid(mut self, n: usize) -> Self {
        self.grid.n = n;
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("phantom specs always serialize")
    }

    /// The exact spatial function (for spacetime specs, `q₀`).
    pub fn analytic(&self) -> Result<Analytic> {
        let limit = 1.0 - self.margin;
        let a = Analytic::build(&self.shape, limit)?;
        if a.support_radius() > limit + 1e-12 {
            return Err(Error::param(format!(
                "phantom support reaches radius {:.4}, beyond the allowed {:.4}",
                a.support_radius(),
                limit
            )));
        }
        Ok(a)
    }

    pub fn generate(&self) -> Result<Phantom> {
        let a = self.analytic()?;
        let grid = self.grid.grid()?;
        match &self.shape {
            Shape::SeparableSpacetime { time, .. } => {
                time.validate()?;
                Ok(Phantom::Spacetime(SpacetimePotential::separable(a, *time)))
            }
            _ => Ok(Phantom::Field(a.rasterize(grid))),
        }
    }

    /// [`generate`](Self::generate) for specs that describe a plain field.
    pub fn field(&self) -> Result<ScalarField> {
        match self.generate()? {
            Phantom::Field(f) => Ok(f),
            Phantom::Spacetime(_) => Err(Error::param("spacetime phantom where a field was expected")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
}

/// A phantom ready for evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Analytic {
    Gaussian { center: Point, width: f64, amplitude: f64 },
    Bumps(Vec<Bump>),
    Disk { center: Point, radius: f64, amplitude: f64 },
    Pair(AntipodalPair),
}

impl Analytic {
    fn build(shape: &Shape, limit: f64) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(format!("{name} must be positive, got {v}")))
            }
        };
        Ok(match shape {
            Shape::GaussianBump { center, width, amplitude } => {
                positive("width", *width)?;
                Self::Gaussian { center: *center, width: *width, amplitude: *amplitude }
            }
            Shape::BumpMixture { count, seed, min_width, max_width, amplitude } => {
                positive("min_width", *min_width)?;
                if !(max_width >= min_width) || *max_width >= limit {
                    return Err(Error::param(format!("need min_width ≤ max_width < {limit}")));
                }
                Self::Bumps(bump_mixture(*count, *seed, *min_width, *max_width, *amplitude, limit))
            }
            Shape::DiskIndicator { center, radius, amplitude } => {
                positive("radius", *radius)?;
                Self::Disk { center: *center, radius: *radius, amplitude: *amplitude }
            }
            Shape::OddAntipodalPair { center, width, amplitude, cap_k } => {
                Self::Pair(AntipodalPair::new(*center, *width, *amplitude, *cap_k)?)
            }
            Shape::SeparableSpacetime { spatial, .. } => {
                if matches!(**spatial, Shape::SeparableSpacetime { .. }) {
                    return Err(Error::param("nested spacetime phantom"));
                }
                Self::build(spatial, limit)?
            }
        })
    }

    /// Radius of a centered disk containing the support.
    pub fn support_radius(&self) -> f64 {
        let norm = |c: Point| c[0].hypot(c[1]);
        match self {
            Self::Gaussian { center, width, .. } => norm(*center) + 3.0 * width,
            Self::Bumps(b) => b.iter().fold(0.0, |m, b| m.max(norm(b.center) + b.radius)),
            Self::Disk { center, radius, .. } => norm(*center) + radius,
            Self::Pair(p) => p.support_radius(),
        }
    }

    pub fn rasterize(&self, grid: Grid2) -> ScalarField {
        let mut f = ScalarField::from_fn(grid, self);
        f.support_radius = Some(self.support_radius());
        f
    }
}

impl PlaneFunction for Analytic {
    fn value(&self, x: Point) -> f64 {
        match self {
            Self::Gaussian { center, width, amplitude } => amplitude * windowed_gaussian(x, *center, *width),
            Self::Bumps(bumps) => bumps
                .iter()
                .map(|b| b.amplitude * smooth_bump((x[0] - b.center[0]).hypot(x[1] - b.center[1]) / b.radius))
                .sum(),
            Self::Disk { center, radius, amplitude } => {
                if (x[0] - center[0]).hypot(x[1] - center[1]) <= *radius {
                    *amplitude
                } else {
                    0.0
                }
            }
            Self::Pair(p) => p.value(x),
        }
    }
}

fn bump_mixture(count: usize, seed: u64, min_w: f64, max_w: f64, amp: f64, limit: f64) -> Vec<Bump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let radius = if max_w > min_w { rng.gen_range(min_w..max_w) } else { min_w };
            let reach = (limit - radius).max(0.0);
            let r = reach * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let amplitude = if amp != 0.0 { rng.gen_range(-amp..amp) } else { 0.0 };
            Bump { center: [r * phi.cos(), r * phi.sin()], radius, amplitude }
        })
        .collect()
}

/// Seeded smooth field with `count` compact bumps inside radius `limit`;
/// the source of every "random smooth function" in the test suites.
pub fn random_smooth(seed: u64, count: usize, limit: f64) -> Analytic {
    Analytic::Bumps(bump_mixture(count, seed, 0.15, 0.3, 1.0, limit))
}

/// Smooth function on `SM`: a sum of bumps in x, each times a random
/// trigonometric polynomial of degree 2 in θ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothSM {
    pub terms: Vec<(Bump, [f64; 5])>,
}

impl SmoothSM {
    pub fn random(seed: u64, count: usize, min_width: f64, max_width: f64, limit: f64) -> Self {
        let bumps = bump_mixture(count, seed, min_width, max_width, 1.0, limit);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
        let terms = bumps.into_iter().map(|b| (b, std::array::from_fn(|_| rng.gen_range(-1.0..1.0)))).collect();
        Self { terms }
    }

    pub fn value(&self, x: Point, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(b, c)| {
                let r = (x[0] - b.center[0]).hypot(x[1] - b.center[1]) / b.radius;
                if r >= 1.0 {
                    return 0.0;
                }
                let r = TAPER_END * r;
                let trig = c[0]
                    + c[1] * theta.cos()
                    + c[2] * theta.sin()
                    + c[3] * (2.0 * theta).cos()
                    + c[4] * (2.0 * theta).sin();
                b.amplitude * tapered_gaussian(r) * trig
            })
            .sum()
    }

    pub fn support_radius(&self) -> f64 {
        self.terms.iter().fold(0.0, |m, (b, _)| m.max(b.center[0].hypot(b.center[1]) + b.radius))
    }

    pub fn sample(&self, grid: Grid2, ntheta: usize) -> Result<crate::sm::SMField> {
        crate::sm::SMField::from_fn(grid, ntheta, |x, t| self.value(x, t))?.compact()
    }
}

/// Odd pair `φ − φ∘A` under the antipodal map `A` of a sphere cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntipodalPair {
    pub center: Point,
    pub width: f64,
    pub amplitude: f64,
    pub cap_k: Option<f64>,
}

impl AntipodalPair {
    pub fn new(center: Point, width: f64, amplitude: f64, cap_k: Option<f64>) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::param("pair width must be positive"));
        }
        if let Some(k) = cap_k {
            if !(k > 0.0) {
                return Err(Error::param("cap aperture must be positive"));
            }
        }
        if center[0].hypot(center[1]) <= width {
            return Err(Error::param("bump must not contain the origin"));
        }
        Ok(Self { center, width, amplitude, cap_k })
    }

    /// Pair centered on the equator `|x| = 1/k` of the cap.
    pub fn on_equator(k: f64, width: f64) -> Result<Self> {
        let p = Self::new([1.0 / k, 0.0], width, 1.0, Some(k))?;
        if p.support_radius() >= 1.0 {
            return Err(Error::param("equator bumps do not fit inside the disk"));
        }
        Ok(p)
    }

    /// Stereographic antipode: `−x/(k²|x|²)` on the cap, `−x` without one.
    pub fn antipode(&self, x: Point) -> Point {
        match self.cap_k {
            Some(k) => {
                let s = -1.0 / (k * k * (x[0] * x[0] + x[1] * x[1]));
                [s * x[0], s * x[1]]
            }
            None => [-x[0], -x[1]],
        }
    }

    fn bump(&self, x: Point) -> f64 {
        self.amplitude * smooth_bump((x[0] - self.center[0]).hypot(x[1] - self.center[1]) / self.width)
    }

    pub fn support_radius(&self) -> f64 {
        let c = self.center[0].hypot(self.center[1]);
        match self.cap_k {
            // A maps the disk |x − c| ≤ w into |x| ≤ 1/(k²(c − w)).
            Some(k) => (c + self.width).max(1.0 / (k * k * (c - self.width))),
            None => c + self.width,
        }
    }
}

impl PlaneFunction for AntipodalPair {
    fn value(&self, x: Point) -> f64 {
        if x[0] == 0.0 && x[1] == 0.0 {
            return 0.0;
        }
        self.bump(x) - self.bump(self.antipode(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peak_is_amplitude() {
        let s = PhantomSpec::new(Shape::GaussianBump { center: [0.0, 0.0], width: 0.3, amplitude: 1.0 }).with_grid(33);
        let f = s.field().unwrap();
        assert_eq!(f.at(16, 16), 1.0);
    }

    #[test]
    fn mixture_is_seed_deterministic() {
        let spec = |seed| {
            PhantomSpec::new(Shape::BumpMixture { count: 5, seed, min_width: 0.1, max_width: 0.3, amplitude: 1.0 })
        };
        let a = spec(7).field().unwrap();
        let b = spec(7).field().unwrap();
        assert!(a.values.iter().zip(&b.values).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_ne!(a, spec(8).field().unwrap());
    }

    #[test]
    fn odd_pair_sums_to_zero() {
        let s =
            PhantomSpec::new(Shape::OddAntipodalPair { center: [0.5, 0.2], width: 0.2, amplitude: 1.0, cap_k: None });
        let f = s.field().unwrap();
        assert!(f.max_abs() > 0.5);
        assert!(f.values.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn cap_antipode_is_an_involution_fixing_equator_setwise() {
        let p = AntipodalPair::on_equator(1.2, 0.05).unwrap();
        let x = [0.3, -0.4];
        let y = p.antipode(p.antipode(x));
        assert!((x[0] - y[0]).abs() < 1e-15 && (x[1] - y[1]).abs() < 1e-15);
        let e = p.antipode([1.0 / 1.2, 0.0]);
        assert!((e[0] + 1.0 / 1.2).abs() < 1e-15);
    }

    #[test]
    fn margin_enforced() {
        let s = PhantomSpec::new(Shape::GaussianBump { center: [0.5, 0.0], width: 0.2, amplitude: 1.0 });
        assert!(s.analytic().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let s = PhantomSpec::new(Shape::DiskIndicator { center: [0.1, 0.0], radius: 0.5, amplitude: 2.0 });
        let back = PhantomSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        let parsed = PhantomSpec::from_json(r#"{"kind":"gaussian_bump","width":0.25}"#).unwrap();
        assert_eq!(parsed.margin, 0.1);
    }
}
