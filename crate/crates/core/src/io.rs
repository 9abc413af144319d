//! Plain-text, PGM and CSV formats.
//!
//! Every text format is a header line followed by whitespace-separated
//! numbers. Floats are written with Rust's shortest round-trip formatting, so
//! reading a file back reproduces the data bit for bit.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::field::{Grid2, ScalarField};
use crate::lightray::{LightRayData, SigmaGrid};
use crate::metric::ConformalMetric;
use crate::radon::Sinogram;
use crate::sm::SMField;
use crate::xray::{FanBeamData, FanGeometry, RayStatus};

struct Tokens {
    items: Vec<String>,
    pos: usize,
}

impl Tokens {
    fn read(r: impl BufRead) -> Result<Self> {
        let mut items = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.split('#').next().unwrap_or("");
            items.extend(line.split_whitespace().map(str::to_owned));
        }
        Ok(Self { items, pos: 0 })
    }

    fn next_str(&mut self, what: &str) -> Result<&str> {
        let t =
            self.items.get(self.pos).ok_or_else(|| Error::Parse(format!("unexpected end of file reading {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let t = self.next_str(what)?;
        t.parse().map_err(|_| Error::Parse(format!("bad number {t:?} for {what}")))
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let t = self.next_str(what)?;
        t.parse().map_err(|_| Error::Parse(format!("bad count {t:?} for {what}")))
    }

    fn floats(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        (0..n).map(|_| self.f64(what)).collect()
    }

    fn finish(&self) -> Result<()> {
        if self.pos != self.items.len() {
            return Err(Error::Parse(format!("{} trailing tokens", self.items.len() - self.pos)));
        }
        Ok(())
    }
}

fn rows(out: &mut String, values: &[f64], width: usize) {
    for row in values.chunks(width.max(1)) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
}

/// Header `ns nomega S`, then one row of `ns` values per angle.
pub fn write_sinogram(mut w: impl Write, s: &Sinogram) -> Result<()> {
    let mut out = format!("{} {} {}\n", s.ns, s.n_omega, s.s_max);
    rows(&mut out, &s.values, s.ns);
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_sinogram(r: impl BufRead) -> Result<Sinogram> {
    let mut t = Tokens::read(r)?;
    let ns = t.usize("ns")?;
    let n_omega = t.usize("nomega")?;
    let s_max = t.f64("S")?;
    let mut s = Sinogram::zeros(ns, n_omega, s_max)?;
    s.values = t.floats(ns * n_omega, "sinogram")?;
    t.finish()?;
    Ok(s)
}

/// Header `nx ny xmin xmax ymin ymax`, then rows of pixel values.
pub fn write_field(mut w: impl Write, f: &ScalarField) -> Result<()> {
    let g = f.grid;
    let mut out = format!("{} {} {} {} {} {}\n", g.nx, g.ny, g.xmin, g.xmax, g.ymin, g.ymax);
    rows(&mut out, &f.values, g.nx);
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_field(r: impl BufRead) -> Result<ScalarField> {
    let mut t = Tokens::read(r)?;
    let (nx, ny) = (t.usize("nx")?, t.usize("ny")?);
    let (x0, x1, y0, y1) = (t.f64("xmin")?, t.f64("xmax")?, t.f64("ymin")?, t.f64("ymax")?);
    let grid = Grid2::new(nx, ny, (x0, x1), (y0, y1))?;
    let values = t.floats(grid.len(), "field")?;
    t.finish()?;
    ScalarField::from_values(grid, values)
}

/// Binary PGM, 8 or 16 bit, linearly mapping `[min, max]` to the gray range.
/// Row 0 of the image is the top (largest y).
pub fn write_pgm(mut w: impl Write, f: &ScalarField, bits: u8) -> Result<()> {
    let maxval: u32 = match bits {
        8 => 255,
        16 => 65535,
        _ => return Err(Error::param(format!("PGM depth must be 8 or 16, got {bits}"))),
    };
    let (lo, hi) = f.values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let g = f.grid;
    let mut out = format!("P5\n{} {}\n{}\n", g.nx, g.ny, maxval).into_bytes();
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            let q = (((f.at(i, j) - lo) / span) * maxval as f64).round().clamp(0.0, maxval as f64) as u32;
            if bits == 8 {
                out.push(q as u8);
            } else {
                out.extend_from_slice(&(q as u16).to_be_bytes());
            }
        }
    }
    w.write_all(&out)?;
    Ok(())
}

/// `x,y,value` per pixel.
pub fn write_csv(mut w: impl Write, f: &ScalarField) -> Result<()> {
    let mut out = String::from("x,y,value\n");
    for k in 0..f.values.len() {
        let c = f.grid.center_of(k);
        let _ = writeln!(out, "{},{},{}", c[0], c[1], f.values[k]);
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

fn status_code(s: RayStatus) -> f64 {
    match s {
        RayStatus::Ok => 1.0,
        RayStatus::Trapped => 0.0,
        RayStatus::Failed => -1.0,
    }
}

fn status_from(v: f64) -> Result<RayStatus> {
    match v {
        1.0 => Ok(RayStatus::Ok),
        0.0 => Ok(RayStatus::Trapped),
        -1.0 => Ok(RayStatus::Failed),
        x => Err(Error::Parse(format!("bad ray mask value {x}"))),
    }
}

/// Header `nbeta nalpha`, then `nbeta` rows of values, then `nbeta` rows of
/// the validity mask (1 valid, 0 trapped, −1 failed).
pub fn write_fan(mut w: impl Write, d: &FanBeamData) -> Result<()> {
    let g = d.geometry;
    let mut out = format!("{} {}\n", g.n_beta, g.n_alpha);
    rows(&mut out, &d.values, g.n_alpha);
    let mask: Vec<f64> = d.status.iter().map(|s| status_code(*s)).collect();
    rows(&mut out, &mask, g.n_alpha);
    w.write_all(out.as_bytes())?;
    Ok(())
}

/// The quadrature weights are recomputed from `metric`.
pub fn read_fan(r: impl BufRead, metric: &ConformalMetric) -> Result<FanBeamData> {
    let mut t = Tokens::read(r)?;
    let g = FanGeometry::new(t.usize("nbeta")?, t.usize("nalpha")?)?;
    let mut d = FanBeamData::zeros(g, metric)?;
    d.values = t.floats(g.len(), "fan values")?;
    d.status = t.floats(g.len(), "fan mask")?.into_iter().map(status_from).collect::<Result<_>>()?;
    t.finish()?;
    Ok(d)
}

/// Header `iter residual`, then one pair per line.
pub fn write_log(mut w: impl Write, log: &[(usize, f64)]) -> Result<()> {
    let mut out = String::from("iter residual\n");
    for (k, r) in log {
        let _ = writeln!(out, "{k} {r}");
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_log(r: impl BufRead) -> Result<Vec<(usize, f64)>> {
    let mut t = Tokens::read(r)?;
    if t.next_str("header")? != "iter" || t.next_str("header")? != "residual" {
        return Err(Error::Parse("convergence log must start with `iter residual`".into()));
    }
    let mut log = Vec::new();
    while t.pos < t.items.len() {
        log.push((t.usize("iter")?, t.f64("residual")?));
    }
    Ok(log)
}

/// Header `nx ny ntheta extent` for a field on `[−extent, extent]²`, then
/// one row of `ntheta` values per pixel.
pub fn write_sm(mut w: impl Write, u: &SMField) -> Result<()> {
    let g = u.grid;
    if g.nx != g.ny || g.xmin != -g.xmax || g.ymin != g.xmin || g.ymax != g.xmax {
        return Err(Error::param("the SM file format needs a square grid centered at 0"));
    }
    let mut out = format!("{} {} {} {}\n", g.nx, g.ny, u.ntheta, g.xmax);
    rows(&mut out, &u.values, u.ntheta);
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_sm(r: impl BufRead) -> Result<SMField> {
    let mut t = Tokens::read(r)?;
    let (nx, ny, nt) = (t.usize("nx")?, t.usize("ny")?, t.usize("ntheta")?);
    let a = t.f64("extent")?;
    let grid = Grid2::new(nx, ny, (-a, a), (-a, a))?;
    let mut u = SMField::zeros(grid, nt)?;
    u.values = t.floats(grid.len() * nt, "SM values")?;
    t.finish()?;
    Ok(u)
}

/// Header `nrays nsigma sigma_min sigma_max`, a line `nbeta nalpha`, then per
/// ray a line `mask length v_0 … v_{nsigma−1}`.
pub fn write_lightray(mut w: impl Write, d: &LightRayData) -> Result<()> {
    let g = d.geometry;
    let mut out = format!("{} {} {} {}\n{} {}\n", g.len(), d.sigma.n, d.sigma.min, d.sigma.max, g.n_beta, g.n_alpha);
    for r in 0..g.len() {
        let mut line = vec![status_code(d.status[r]), d.lengths[r]];
        line.extend_from_slice(d.row(r));
        rows(&mut out, &line, line.len());
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn read_lightray(r: impl BufRead) -> Result<LightRayData> {
    let mut t = Tokens::read(r)?;
    let nrays = t.usize("nrays")?;
    let n = t.usize("nsigma")?;
    let sigma = SigmaGrid::new(t.f64("sigma_min")?, t.f64("sigma_max")?, n)?;
    let geometry = FanGeometry::new(t.usize("nbeta")?, t.usize("nalpha")?)?;
    if geometry.len() != nrays {
        return Err(Error::Parse(format!("{nrays} rays but the fan has {}", geometry.len())));
    }
    let (mut values, mut status, mut lengths) = (Vec::with_capacity(nrays * n), Vec::new(), Vec::new());
    for _ in 0..nrays {
        status.push(status_from(t.f64("mask")?)?);
        lengths.push(t.f64("length")?);
        values.extend(t.floats(n, "light-ray values")?);
    }
    t.finish()?;
    Ok(LightRayData { geometry, sigma, values, status, lengths })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinogram_roundtrip() {
        let mut s = Sinogram::zeros(4, 3, 1.25).unwrap();
        for (k, v) in s.values.iter_mut().enumerate() {
            *v = (k as f64).sqrt() / 3.0;
        }
        let mut buf = Vec::new();
        write_sinogram(&mut buf, &s).unwrap();
        assert_eq!(read_sinogram(&buf[..]).unwrap(), s);
    }

    #[test]
    fn fan_roundtrip_keeps_mask() {
        let m = ConformalMetric::euclidean();
        let mut d = FanBeamData::from_fn(FanGeometry::new(4, 5).unwrap(), &m, |b, a| b.sin() * a).unwrap();
        d.status[3] = RayStatus::Trapped;
        let mut buf = Vec::new();
        write_fan(&mut buf, &d).unwrap();
        assert_eq!(read_fan(&buf[..], &m).unwrap(), d);
    }

    #[test]
    fn log_roundtrip() {
        let log = vec![(0, 1.0), (1, 0.125), (2, 1e-7)];
        let mut buf = Vec::new();
        write_log(&mut buf, &log).unwrap();
        assert_eq!(read_log(&buf[..]).unwrap(), log);
    }

    #[test]
    fn pgm_header_and_size() {
        let g = Grid2::square(3, 1.0).unwrap();
        let f = ScalarField::from_fn(g, &|x: crate::Point| x[0]);
        for (bits, bytes) in [(8, 9), (16, 18)] {
            let mut buf = Vec::new();
            write_pgm(&mut buf, &f, bits).unwrap();
            let header = b"P5\n3 3\n";
            assert!(buf.starts_with(header));
            let body = buf.len() - buf.iter().enumerate().filter(|(_, b)| **b == b'\n').nth(2).unwrap().0 - 1;
            assert_eq!(body, bytes);
        }
        assert!(write_pgm(Vec::new(), &f, 12).is_err());
    }

    #[test]
    fn truncated_input_is_an_error() {
        assert!(matches!(read_sinogram(&b"4 3 1.0\n1 2 3"[..]), Err(Error::Parse(_))));
    }
}
