//! Conformal metrics `g = e^{2λ} δ` on the closed unit disk.
//!
//! A metric is represented by its log conformal factor λ, either as a named
//! analytic builtin with closed-form derivatives or as a sampled grid with
//! fourth-order finite differences and bicubic interpolation.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Point;

/// λ together with its first and second partial derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaJet {
    pub value: f64,
    pub grad: [f64; 2],
    /// `[∂₁₁λ, ∂₁₂λ, ∂₂₂λ]`
    pub hess: [f64; 3],
}

impl LambdaJet {
    pub const FLAT: LambdaJet = LambdaJet { value: 0.0, grad: [0.0; 2], hess: [0.0; 3] };

    pub fn laplacian(&self) -> f64 {
        self.hess[0] + self.hess[2]
    }

    pub fn curvature(&self) -> f64 {
        -(-2.0 * self.value).exp() * self.laplacian()
    }

    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite()) && self.hess.iter().all(|h| h.is_finite())
    }
}

/// Coordinate components `(v¹, v²)` of a tangent vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangentVector(pub [f64; 2]);

/// Named analytic conformal factors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Builtin {
    /// λ = 0.
    Euclidean,
    /// λ = ln(2k / (1 + k²|x|²)): the stereographic image of a round cap of
    /// curvature 1. The equator sits at |x| = 1/k, so k < 1 is smaller than a
    /// hemisphere and k > 1 is larger.
    SphereCap { k: f64 },
    /// λ = ln(2a / (1 − a²|x|²)): the Poincaré disk scaled so that the unit
    /// disk is the hyperbolic disk of Euclidean radius a. a = 1 is the full
    /// Poincaré disk and is singular on the unit circle.
    Hyperbolic { scale: f64 },
    /// λ = A exp(−|x − c|² / w²).
    GaussianBump { amplitude: f64, center: [f64; 2], width: f64 },
}

impl Builtin {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Builtin::Euclidean => Ok(()),
            Builtin::SphereCap { k } if k > 0.0 && k.is_finite() => Ok(()),
            Builtin::SphereCap { k } => Err(Error::param(format!("sphere-cap needs k > 0, got {k}"))),
            Builtin::Hyperbolic { scale } if scale > 0.0 && scale <= 1.0 => Ok(()),
            Builtin::Hyperbolic { scale } => {
                Err(Error::param(format!("hyperbolic scale must lie in (0, 1], got {scale}")))
            }
            Builtin::GaussianBump { width, amplitude, center } => {
                if width > 0.0 && amplitude.is_finite() && center.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::param("gaussian-bump needs a finite amplitude and width > 0"))
                }
            }
        }
    }

    fn jet(&self, x: Point) -> Option<LambdaJet> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        match *self {
            Builtin::Euclidean => Some(LambdaJet::FLAT),
            Builtin::SphereCap { k } => {
                let k2 = k * k;
                let d = 1.0 + k2 * r2;
                let c = -2.0 * k2 / d;
                let q = 4.0 * k2 * k2 / (d * d);
                Some(LambdaJet {
                    value: (2.0 * k / d).ln(),
                    grad: [c * x[0], c * x[1]],
                    hess: [c + q * x[0] * x[0], q * x[0] * x[1], c + q * x[1] * x[1]],
                })
            }
            Builtin::Hyperbolic { scale: a } => {
                let a2 = a * a;
                let d = 1.0 - a2 * r2;
                if d <= 0.0 {
                    return None;
                }
                let c = 2.0 * a2 / d;
                let q = 4.0 * a2 * a2 / (d * d);
                Some(LambdaJet {
                    value: (2.0 * a / d).ln(),
                    grad: [c * x[0], c * x[1]],
                    hess: [c + q * x[0] * x[0], q * x[0] * x[1], c + q * x[1] * x[1]],
                })
            }
            Builtin::GaussianBump { amplitude, center, width } => {
                let w2 = width * width;
                let d = [x[0] - center[0], x[1] - center[1]];
                let v = amplitude * (-(d[0] * d[0] + d[1] * d[1]) / w2).exp();
                let g = -2.0 / w2;
                Some(LambdaJet {
                    value: v,
                    grad: [v * g * d[0], v * g * d[1]],
                    hess: [v * (g + g * g * d[0] * d[0]), v * g * g * d[0] * d[1], v * (g + g * g * d[1] * d[1])],
                })
            }
        }
    }
}

/// λ sampled on a uniform node grid `x_i = xmin + i·hx`, `y_j = ymin + j·hy`,
/// stored row-major with y outer.
#[derive(Clone, Debug, PartialEq)]
pub struct GriddedLambda {
    pub nx: usize,
    pub ny: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub values: Vec<f64>,
}

/// Nodes on either side of a query cell that the bicubic stencil of
/// fourth-order differences touches.
const GRID_LOW: usize = 3;
const GRID_HIGH: usize = 4;

impl GriddedLambda {
    pub fn new(
        nx: usize,
        ny: usize,
        (xmin, xmax): (f64, f64),
        (ymin, ymax): (f64, f64),
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != nx * ny {
            return Err(Error::param(format!("gridded lambda expects {} values, got {}", nx * ny, values.len())));
        }
        if !(xmax > xmin && ymax > ymin) || nx < 2 * (GRID_LOW + GRID_HIGH) || ny < 2 * (GRID_LOW + GRID_HIGH) {
            return Err(Error::param("gridded lambda needs a non-degenerate grid of at least 14 nodes per axis"));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("gridded lambda value #{bad} is not finite")));
        }
        let grid = GriddedLambda { nx, ny, xmin, xmax, ymin, ymax, values };
        // Every point of the closed unit disk must be queryable with interior stencils.
        for corner in [[-1.0, -1.0], [1.0, 1.0]] {
            if grid.cell(corner).is_none() {
                return Err(Error::param(
                    "gridded lambda must contain the unit disk with a margin of at least 4 cells",
                ));
            }
        }
        Ok(grid)
    }

    /// Samples `lambda` on the given node grid.
    pub fn from_fn(
        nx: usize,
        ny: usize,
        xr: (f64, f64),
        yr: (f64, f64),
        lambda: impl Fn(Point) -> f64,
    ) -> Result<Self> {
        let hx = (xr.1 - xr.0) / (nx - 1) as f64;
        let hy = (yr.1 - yr.0) / (ny - 1) as f64;
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(lambda([xr.0 + i as f64 * hx, yr.0 + j as f64 * hy]));
            }
        }
        Self::new(nx, ny, xr, yr, values)
    }

    pub fn spacing(&self) -> (f64, f64) {
        ((self.xmax - self.xmin) / (self.nx - 1) as f64, (self.ymax - self.ymin) / (self.ny - 1) as f64)
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    /// Lower-left cell index and fractional offsets, if the full stencil fits.
    fn cell(&self, x: Point) -> Option<(usize, usize, f64, f64)> {
        let (hx, hy) = self.spacing();
        let u = (x[0] - self.xmin) / hx;
        let v = (x[1] - self.ymin) / hy;
        if !(u.is_finite() && v.is_finite()) {
            return None;
        }
        let (i, j) = (u.floor(), v.floor());
        if i < GRID_LOW as f64 || j < GRID_LOW as f64 {
            return None;
        }
        let (i, j) = (i as usize, j as usize);
        if i + GRID_HIGH >= self.nx || j + GRID_HIGH >= self.ny {
            return None;
        }
        Some((i, j, u - i as f64, v - j as f64))
    }

    /// `[λ, ∂₁λ, ∂₂λ, ∂₁₁λ, ∂₁₂λ, ∂₂₂λ]` at node (i, j) by fourth-order central differences.
    fn node_derivatives(&self, i: usize, j: usize) -> [f64; 6] {
        let (hx, hy) = self.spacing();
        let d1 = |f: &dyn Fn(isize) -> f64, h: f64| (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h);
        let d2 = |f: &dyn Fn(isize) -> f64, h: f64| {
            (-f(-2) + 16.0 * f(-1) - 30.0 * f(0) + 16.0 * f(1) - f(2)) / (12.0 * h * h)
        };
        let fx = |di: isize| self.at((i as isize + di) as usize, j);
        let fy = |dj: isize| self.at(i, (j as isize + dj) as usize);
        let dy_at = |di: isize| {
            let ii = (i as isize + di) as usize;
            d1(&|dj: isize| self.at(ii, (j as isize + dj) as usize), hy)
        };
        [self.at(i, j), d1(&fx, hx), d1(&fy, hy), d2(&fx, hx), d1(&dy_at, hx), d2(&fy, hy)]
    }

    fn jet(&self, x: Point) -> Option<LambdaJet> {
        let (i, j, tx, ty) = self.cell(x)?;
        let wx = cubic_weights(tx);
        let wy = cubic_weights(ty);
        let mut acc = [0.0; 6];
        for (b, wyb) in wy.iter().enumerate() {
            for (a, wxa) in wx.iter().enumerate() {
                let node = self.node_derivatives(i + a - 1, j + b - 1);
                let w = wxa * wyb;
                for (s, n) in acc.iter_mut().zip(node) {
                    *s += w * n;
                }
            }
        }
        Some(LambdaJet { value: acc[0], grad: [acc[1], acc[2]], hess: [acc[3], acc[4], acc[5]] })
    }

    /// Parses the text format: header `nx ny xmin xmax ymin ymax`, then
    /// `nx·ny` values, y outer and x inner.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next =
            |what: &str| tokens.next().ok_or_else(|| Error::Parse(format!("gridded lambda: missing {what}")));
        let nx: usize = parse_token(next("nx")?)?;
        let ny: usize = parse_token(next("ny")?)?;
        let xmin: f64 = parse_token(next("xmin")?)?;
        let xmax: f64 = parse_token(next("xmax")?)?;
        let ymin: f64 = parse_token(next("ymin")?)?;
        let ymax: f64 = parse_token(next("ymax")?)?;
        let mut values = Vec::with_capacity(nx * ny);
        for k in 0..nx * ny {
            values.push(parse_token(next(&format!("value #{k}"))?)?);
        }
        if tokens.next().is_some() {
            return Err(Error::Parse("gridded lambda: trailing data after values".into()));
        }
        Self::new(nx, ny, (xmin, xmax), (ymin, ymax), values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out =
            format!("{} {} {:?} {:?} {:?} {:?}\n", self.nx, self.ny, self.xmin, self.xmax, self.ymin, self.ymax);
        for row in self.values.chunks(self.nx) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn parse_token<T: std::str::FromStr>(tok: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse(format!("cannot parse {tok:?}")))
}

/// Cubic Lagrange weights for nodes at offsets -1, 0, 1, 2.
fn cubic_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

#[derive(Clone, Debug)]
pub enum MetricKind {
    Analytic(Builtin),
    Gridded { source: String, lambda: Arc<GriddedLambda> },
}

/// `g_{jk} = e^{2λ} δ_{jk}`; immutable and cheap to clone.
#[derive(Clone, Debug)]
pub struct ConformalMetric {
    kind: MetricKind,
}

impl ConformalMetric {
    pub fn euclidean() -> Self {
        Self { kind: MetricKind::Analytic(Builtin::Euclidean) }
    }

    pub fn sphere_cap(k: f64) -> Result<Self> {
        Self::builtin(Builtin::SphereCap { k })
    }

    pub fn hyperbolic(scale: f64) -> Result<Self> {
        Self::builtin(Builtin::Hyperbolic { scale })
    }

    pub fn gaussian_bump(amplitude: f64, center: [f64; 2], width: f64) -> Result<Self> {
        Self::builtin(Builtin::GaussianBump { amplitude, center, width })
    }

    pub fn builtin(b: Builtin) -> Result<Self> {
        b.validate()?;
        Ok(Self { kind: MetricKind::Analytic(b) })
    }

    pub fn gridded(lambda: GriddedLambda, source: impl Into<String>) -> Self {
        Self { kind: MetricKind::Gridded { source: source.into(), lambda: Arc::new(lambda) } }
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    /// True when λ ≡ 0.
    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, MetricKind::Analytic(Builtin::Euclidean))
    }

    /// Parses `name[:p1,p2,...]`:
    /// `euclidean`, `sphere-cap:k`, `hyperbolic[:scale]`,
    /// `gaussian-bump:A,w[,cx,cy]`, `grid:path`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, params) = match spec.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (spec.trim(), ""),
        };
        if name == "grid" {
            let lambda = GriddedLambda::load(Path::new(params))?;
            return Ok(Self::gridded(lambda, params));
        }
        let nums: Vec<f64> = if params.is_empty() {
            Vec::new()
        } else {
            params.split(',').map(|p| parse_token(p.trim())).collect::<Result<_>>()?
        };
        let arity = |lo: usize, hi: usize| {
            if nums.len() < lo || nums.len() > hi {
                Err(Error::param(format!("metric {name:?} takes {lo}..={hi} parameters, got {}", nums.len())))
            } else {
                Ok(())
            }
        };
        let b = match name {
            "euclidean" | "flat" => {
                arity(0, 0)?;
                Builtin::Euclidean
            }
            "sphere-cap" | "cap" => {
                arity(1, 1)?;
                Builtin::SphereCap { k: nums[0] }
            }
            "hyperbolic" => {
                arity(0, 1)?;
                Builtin::Hyperbolic { scale: nums.first().copied().unwrap_or(1.0) }
            }
            "gaussian-bump" | "bump" => {
                if nums.len() != 2 && nums.len() != 4 {
                    return Err(Error::param("gaussian-bump takes A,w or A,w,cx,cy"));
                }
                Builtin::GaussianBump {
                    amplitude: nums[0],
                    width: nums[1],
                    center: if nums.len() == 4 { [nums[2], nums[3]] } else { [0.0, 0.0] },
                }
            }
            other => return Err(Error::param(format!("unknown metric {other:?}"))),
        };
        Self::builtin(b)
    }

    /// λ and its derivatives; fails outside the domain of definition.
    pub fn jet(&self, x: Point) -> Result<LambdaJet> {
        let jet = match &self.kind {
            MetricKind::Analytic(b) => b.jet(x),
            MetricKind::Gridded { lambda, .. } => lambda.jet(x),
        };
        match jet {
            Some(j) if j.is_finite() => Ok(j),
            _ => Err(Error::OutsideDomain(x)),
        }
    }

    pub fn lambda(&self, x: Point) -> Result<f64> {
        Ok(self.jet(x)?.value)
    }

    /// `e^{2λ(x)}`, the area density of the metric.
    pub fn density(&self, x: Point) -> Result<f64> {
        Ok((2.0 * self.lambda(x)?).exp())
    }

    pub fn norm(&self, x: Point, v: TangentVector) -> Result<f64> {
        let l = self.lambda(x)?;
        Ok(l.exp() * v.0[0].hypot(v.0[1]))
    }

    pub fn inner(&self, x: Point, v: TangentVector, w: TangentVector) -> Result<f64> {
        Ok(self.density(x)? * (v.0[0] * w.0[0] + v.0[1] * w.0[1]))
    }

    /// `Γ[l][j][k] = Γ^l_{jk} = δ_{lj}∂_kλ + δ_{lk}∂_jλ − δ_{jk}∂_lλ`.
    pub fn christoffel(&self, x: Point) -> Result<[[[f64; 2]; 2]; 2]> {
        Ok(christoffel_from_grad(self.jet(x)?.grad))
    }

    /// `K = −e^{−2λ} Δλ`.
    pub fn gaussian_curvature(&self, x: Point) -> Result<f64> {
        Ok(self.jet(x)?.curvature())
    }

    /// Geodesic curvature sign function of the unit circle: for a conformal
    /// metric the second fundamental form of |x| = 1 with respect to the
    /// inward normal is `e^{-λ}(1 + ∂_r λ)`; this returns `1 + ∂_r λ`.
    pub fn boundary_convexity(&self, beta: f64) -> Result<f64> {
        let x = [beta.cos(), beta.sin()];
        let g = self.jet(x)?.grad;
        Ok(1.0 + g[0] * x[0] + g[1] * x[1])
    }
}

pub(crate) fn christoffel_from_grad(g: [f64; 2]) -> [[[f64; 2]; 2]; 2] {
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for (l, gl) in gamma.iter_mut().enumerate() {
        for (j, glj) in gl.iter_mut().enumerate() {
            for (k, out) in glj.iter_mut().enumerate() {
                let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                *out = d(l, j) * g[k] + d(l, k) * g[j] - d(j, k) * g[l];
            }
        }
    }
    gamma
}

impl fmt::Display for ConformalMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MetricKind::Analytic(Builtin::Euclidean) => write!(f, "euclidean"),
            MetricKind::Analytic(Builtin::SphereCap { k }) => write!(f, "sphere-cap:{k}"),
            MetricKind::Analytic(Builtin::Hyperbolic { scale }) => write!(f, "hyperbolic:{scale}"),
            MetricKind::Analytic(Builtin::GaussianBump { amplitude, center, width }) => {
                write!(f, "gaussian-bump:{amplitude},{width},{},{}", center[0], center[1])
            }
            MetricKind::Gridded { source, .. } => write!(f, "grid:{source}"),
        }
    }
}
