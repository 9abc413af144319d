//! Numerical toolkit for geodesic X-ray tomography on conformal disks.
//!
//! The unit disk carries a metric `g = e^{2λ}δ`. On top of that the crate
//! provides:
//!
//! - [`metric`]: conformal factors, Christoffel symbols, Gaussian curvature;
//! - [`geodesic`]: the geodesic flow, exit times, Jacobi fields, the matrix
//!   Riccati equation and a simplicity certificate;
//! - [`radon`]: the Euclidean Radon transform, backprojection and filtered
//!   backprojection, used as ground truth when λ = 0;
//! - [`xray`]: the geodesic X-ray transform in fan-beam coordinates, its
//!   backprojection, the normal operator and iterative inversion;
//! - [`sm`]: finite-difference calculus on the unit sphere bundle (the
//!   frame X, X⊥, V) and the identities it satisfies;
//! - [`lightray`]: integrals of time-dependent potentials along light rays;
//! - [`phantoms`]: seeded test fields;
//! - [`io`]: the text, image and table formats used by the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod field;
pub mod fourier;
pub mod geodesic;
pub mod io;
pub mod lightray;
pub mod metric;
pub mod parallel;
pub mod phantoms;
pub mod radon;
pub mod sm;
pub mod sparse;
pub mod xray;

/// A point of the plane in isothermal coordinates.
pub type Point = [f64; 2];

pub use error::{Error, Result};
pub use field::{Grid2, PlaneFunction, ScalarField};
pub use geodesic::{GeodesicPath, PhaseState, TraceOptions};
pub use metric::{Builtin, ConformalMetric, TangentVector};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
