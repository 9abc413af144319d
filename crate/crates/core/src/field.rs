//! Functions on the plane: uniform pixel grids and the `PlaneFunction` trait
//! that lets transforms consume either sampled or analytic inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Point;

/// Anything that can be evaluated at a point of the plane.
pub trait PlaneFunction: Sync {
    fn value(&self, x: Point) -> f64;
}

impl<F: Fn(Point) -> f64 + Sync> PlaneFunction for F {
    fn value(&self, x: Point) -> f64 {
        self(x)
    }
}

/// Uniform cell-centered grid: pixel (i, j) has center
/// `(xmin + (i + ½)·dx, ymin + (j + ½)·dy)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize, (xmin, xmax): (f64, f64), (ymin, ymax): (f64, f64)) -> Result<Self> {
        if nx < 2 || ny < 2 || !(xmax > xmin) || !(ymax > ymin) {
            return Err(Error::param(format!("degenerate grid {nx}x{ny}")));
        }
        Ok(Self { nx, ny, xmin, xmax, ymin, ymax })
    }

    /// `n × n` pixels covering `[−a, a]²`.
    pub fn square(n: usize, half_extent: f64) -> Result<Self> {
        Self::new(n, n, (-half_extent, half_extent), (-half_extent, half_extent))
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        (self.ymax - self.ymin) / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Centers of grids symmetric about 0 are computed so that mirrored
    /// pixels have exactly negated coordinates.
    pub fn center(&self, i: usize, j: usize) -> Point {
        [axis(i, self.nx, self.xmin, self.xmax), axis(j, self.ny, self.ymin, self.ymax)]
    }

    pub fn center_of(&self, idx: usize) -> Point {
        self.center(idx % self.nx, idx / self.nx)
    }

    /// Largest distance from the origin to a point of the grid rectangle.
    pub fn outer_radius(&self) -> f64 {
        let x = self.xmin.abs().max(self.xmax.abs());
        let y = self.ymin.abs().max(self.ymax.abs());
        x.hypot(y)
    }

    /// Bilinear interpolation stencil at `x` with zero extension beyond the
    /// outermost pixel centers. Returns up to four `(index, weight)` pairs.
    pub fn bilinear(&self, x: Point) -> ([(usize, f64); 4], usize) {
        let mut out = [(0, 0.0); 4];
        let u = (x[0] - self.xmin) / self.dx() - 0.5;
        let v = (x[1] - self.ymin) / self.dy() - 0.5;
        if !(u > -1.0 && v > -1.0 && u < self.nx as f64 && v < self.ny as f64) {
            return (out, 0);
        }
        let (i0, j0) = (u.floor(), v.floor());
        let (fu, fv) = (u - i0, v - j0);
        let (i0, j0) = (i0 as isize, j0 as isize);
        let mut n = 0;
        for (dj, wy) in [(0, 1.0 - fv), (1, fv)] {
            for (di, wx) in [(0, 1.0 - fu), (1, fu)] {
                let (i, j) = (i0 + di, j0 + dj);
                let w = wx * wy;
                if i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny && w != 0.0 {
                    out[n] = (j as usize * self.nx + i as usize, w);
                    n += 1;
                }
            }
        }
        (out, n)
    }
}

fn axis(i: usize, n: usize, lo: f64, hi: f64) -> f64 {
    if lo == -hi && 2 * i + 1 > n {
        -axis(n - 1 - i, n, lo, hi)
    } else if lo == -hi && 2 * i + 1 == n {
        0.0
    } else {
        lo + (i as f64 + 0.5) * (hi - lo) / n as f64
    }
}

/// A real function sampled at the pixel centers of a [`Grid2`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: Grid2,
    /// Row-major, y outer.
    pub values: Vec<f64>,
    /// Radius of a centered disk outside of which the field is known to vanish.
    pub support_radius: Option<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid2) -> Self {
        Self { grid, values: vec![0.0; grid.len()], support_radius: None }
    }

    pub fn from_values(grid: Grid2, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "grid has {} pixels but {} values were given",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values, support_radius: None })
    }

    pub fn from_fn(grid: Grid2, f: &impl PlaneFunction) -> Self {
        let values = (0..grid.len()).map(|k| f.value(grid.center_of(k))).collect();
        Self { grid, values, support_radius: None }
    }

    /// Zeroes every pixel whose center lies outside radius `r` and records
    /// the support bound.
    pub fn with_disk_support(mut self, r: f64) -> Self {
        for k in 0..self.values.len() {
            let c = self.grid.center_of(k);
            if c[0].hypot(c[1]) > r {
                self.values[k] = 0.0;
            }
        }
        self.support_radius = Some(r);
        self
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    /// Radius beyond which the bilinear interpolant vanishes.
    pub fn effective_radius(&self) -> f64 {
        let pad = self.grid.dx().hypot(self.grid.dy());
        match self.support_radius {
            Some(r) => (r + pad).min(self.grid.outer_radius()),
            None => self.grid.outer_radius(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_area()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Relative L² distance `‖self − reference‖ / ‖reference‖` over the
    /// pixels selected by `mask`.
    pub fn relative_error(&self, reference: &ScalarField, mask: impl Fn(Point) -> bool) -> Result<f64> {
        if self.grid != reference.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..self.values.len() {
            if mask(self.grid.center_of(k)) {
                let d = self.values[k] - reference.values[k];
                num += d * d;
                den += reference.values[k] * reference.values[k];
            }
        }
        Ok(if den > 0.0 { (num / den).sqrt() } else { num.sqrt() })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| f(*v)).collect(),
            support_radius: self.support_radius,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }
}

impl PlaneFunction for ScalarField {
    fn value(&self, x: Point) -> f64 {
        let (st, n) = self.grid.bilinear(x);
        st[..n].iter().map(|(k, w)| w * self.values[*k]).sum()
    }
}

/// Mask of the open disk of radius `r`.
pub fn inside(r: f64) -> impl Fn(Point) -> bool {
    move |x: Point| x[0].hypot(x[1]) < r
}
