//! Run configuration: command-line flags over a TOML file over the built-in
//! defaults.
//!
//! | command          | metric         | phantom / field | grid | ntheta | fan   | step        | tol   |
//! |------------------|----------------|-----------------|------|--------|-------|-------------|-------|
//! | `radon`          | euclidean      | gaussian:0.25   | 128  |        |       | grid dx / 2 | 1e-2  |
//! | `xray`           | euclidean      | gaussian:0.25   | 128  |        | 90x90 | 0.01        |       |
//! | `invert`         | euclidean      | gaussian:0.25   | 64   |        | 90x90 | 0.005       | 0.1   |
//! | `verify-sm`      | euclidean      | random          | 64   | 128    |       |             | 1e-3  |
//! | `verify-santalo` | euclidean      | random          | 96   | 64     | 90x90 | 0.01        | 2e-2  |
//! | `verify-pestov`  | euclidean      | random          | 128  | 256    |       |             | 1e-3  |
//! | `simplicity`     | euclidean      |                 |      |        | 32x32 | 0.01        |       |
//! | `demo-cap`       | sphere-cap:1.2 |                 | 128  |        | 90x90 | 0.0025      | 0.05  |
//! | `lightray`       | euclidean      | gaussian:0.2    |      |        | 32x32 | 0.01        | 1e-3  |
//! | `convergence`    | sphere-cap:0.5 | gaussian:0.25, random | 32 | 64 | 16x16 | 0.1      |       |
//!
//! For `convergence`, `grid`, `ntheta` and `step` describe the coarsest
//! level. Blank cells are unused. Other keys: `sigma = 200` (light-ray
//! offsets), `iterations = 80` (CG cap), `levels = 3`, `study = "exit"`.
//!
//! Shared by every command: `seed = 0`, `out = "geoxray-out"`, `threads`
//! unset (all cores), `require_simple = false`, `expect_order` unset.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use geoxray::metric::ConformalMetric;
use geoxray::phantoms::{PhantomSpec, Shape};
use geoxray::xray::FanGeometry;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Radon,
    Xray,
    Invert,
    VerifySm,
    VerifySantalo,
    VerifyPestov,
    Simplicity,
    DemoCap,
    Lightray,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Radon => "radon",
            Self::Xray => "xray",
            Self::Invert => "invert",
            Self::VerifySm => "verify-sm",
            Self::VerifySantalo => "verify-santalo",
            Self::VerifyPestov => "verify-pestov",
            Self::Simplicity => "simplicity",
            Self::DemoCap => "demo-cap",
            Self::Lightray => "lightray",
            Self::Convergence => "convergence",
        }
    }
}

/// Test field for the SM-calculus commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// Seeded sum of tapered Gaussians times degree-2 trigonometric polynomials in θ.
    Random,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Study {
    /// Geodesic exit points against a fine-step reference (closed form on λ = 0).
    Exit,
    /// Largest SM commutator residual.
    Commutator,
    /// Filtered backprojection error.
    Radon,
}

/// Every key optional; one layer of the precedence chain.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub metric: Option<String>,
    pub phantom: Option<String>,
    pub field: Option<FieldKind>,
    pub grid: Option<usize>,
    pub ntheta: Option<usize>,
    pub fan: Option<String>,
    pub step: Option<f64>,
    pub tol: Option<f64>,
    pub sigma: Option<usize>,
    pub iterations: Option<usize>,
    pub levels: Option<usize>,
    pub study: Option<Study>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
    pub require_simple: Option<bool>,
    pub expect_order: Option<f64>,
}

impl Layer {
    fn or(self, lower: Layer) -> Layer {
        Layer {
            metric: self.metric.or(lower.metric),
            phantom: self.phantom.or(lower.phantom),
            field: self.field.or(lower.field),
            grid: self.grid.or(lower.grid),
            ntheta: self.ntheta.or(lower.ntheta),
            fan: self.fan.or(lower.fan),
            step: self.step.or(lower.step),
            tol: self.tol.or(lower.tol),
            sigma: self.sigma.or(lower.sigma),
            iterations: self.iterations.or(lower.iterations),
            levels: self.levels.or(lower.levels),
            study: self.study.or(lower.study),
            out: self.out.or(lower.out),
            threads: self.threads.or(lower.threads),
            seed: self.seed.or(lower.seed),
            require_simple: self.require_simple.or(lower.require_simple),
            expect_order: self.expect_order.or(lower.expect_order),
        }
    }

    pub fn load(path: &Path) -> Result<Layer, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// The defaults table above, as code.
pub fn defaults(cmd: Command) -> Layer {
    use Command::*;
    let pick = |v: &[(Command, &str)]| v.iter().find(|(c, _)| *c == cmd).map(|(_, s)| s.to_string());
    Layer {
        metric: Some(match cmd {
            DemoCap => "sphere-cap:1.2".into(),
            Convergence => "sphere-cap:0.5".into(),
            _ => "euclidean".into(),
        }),
        phantom: Some(if cmd == Lightray { "gaussian:0.2" } else { "gaussian:0.25" }.into()),
        field: Some(FieldKind::Random),
        grid: Some(match cmd {
            Invert | VerifySm | Lightray => 64,
            VerifySantalo => 96,
            Convergence => 32,
            _ => 128,
        }),
        ntheta: Some(match cmd {
            VerifySantalo | Convergence => 64,
            VerifyPestov => 256,
            _ => 128,
        }),
        fan: pick(&[(Simplicity, "32x32"), (Lightray, "32x32"), (Convergence, "16x16")]).or(Some("90x90".into())),
        step: match cmd {
            Radon => None,
            Invert => Some(0.005),
            DemoCap => Some(0.0025),
            Convergence => Some(0.1),
            _ => Some(0.01),
        },
        tol: match cmd {
            Radon => Some(1e-2),
            Invert => Some(0.1),
            VerifySm | VerifyPestov | Lightray => Some(1e-3),
            VerifySantalo => Some(2e-2),
            DemoCap => Some(0.05),
            _ => None,
        },
        sigma: Some(200),
        iterations: Some(80),
        levels: Some(3),
        study: Some(Study::Exit),
        out: Some(PathBuf::from("geoxray-out")),
        threads: None,
        seed: Some(0),
        require_simple: Some(false),
        expect_order: None,
    }
}

pub const GRID_RANGE: (usize, usize) = (16, 1024);
pub const NTHETA_RANGE: (usize, usize) = (32, 1024);
pub const FAN_RANGE: (usize, usize) = (4, 2048);
pub const LEVELS_RANGE: (usize, usize) = (3, 6);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub metric: String,
    pub phantom: String,
    pub field: FieldKind,
    pub grid: usize,
    pub ntheta: usize,
    pub fan: [usize; 2],
    pub step: Option<f64>,
    pub tol: Option<f64>,
    pub sigma: usize,
    pub iterations: usize,
    pub levels: usize,
    pub study: Study,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
    pub require_simple: bool,
    pub expect_order: Option<f64>,
}

fn in_range(name: &str, v: usize, (lo, hi): (usize, usize)) -> Result<usize, String> {
    if (lo..=hi).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{name} = {v} is outside {lo}..={hi}"))
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, String> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(format!("{name} must be positive, got {x}")),
        _ => Ok(v),
    }
}

impl RunConfig {
    /// Merges `flags > file > defaults` and validates the result.
    pub fn resolve(command: Command, flags: Layer, file: Option<Layer>) -> Result<Self, String> {
        let l = flags.or(file.unwrap_or_default()).or(defaults(command));
        let fan = FanGeometry::parse(l.fan.as_deref().unwrap_or_default()).map_err(|e| format!("--fan: {e}"))?;
        let cfg = RunConfig {
            command,
            metric: l.metric.unwrap_or_default(),
            phantom: l.phantom.unwrap_or_default(),
            field: l.field.unwrap_or(FieldKind::Random),
            grid: in_range("grid", l.grid.unwrap_or_default(), GRID_RANGE)?,
            ntheta: in_range("ntheta", l.ntheta.unwrap_or_default(), NTHETA_RANGE)?,
            fan: [
                in_range("fan beta count", fan.n_beta, FAN_RANGE)?,
                in_range("fan alpha count", fan.n_alpha, FAN_RANGE)?,
            ],
            step: positive("step", l.step)?,
            tol: positive("tol", l.tol)?,
            sigma: in_range("sigma", l.sigma.unwrap_or_default(), (8, 1 << 16))?,
            iterations: in_range("iterations", l.iterations.unwrap_or_default(), (1, 100_000))?,
            levels: in_range("levels", l.levels.unwrap_or_default(), LEVELS_RANGE)?,
            study: l.study.unwrap_or(Study::Exit),
            out: l.out.unwrap_or_default(),
            threads: l.threads.map(|t| in_range("threads", t, (1, 1024))).transpose()?,
            seed: l.seed.unwrap_or_default(),
            require_simple: l.require_simple.unwrap_or_default(),
            expect_order: positive("expect_order", l.expect_order)?,
        };
        cfg.metric()?;
        cfg.phantom_spec()?.analytic().map_err(|e| format!("--phantom: {e}"))?;
        cfg.prepare_out()?;
        Ok(cfg)
    }

    pub fn metric(&self) -> Result<ConformalMetric, String> {
        ConformalMetric::parse(&self.metric).map_err(|e| format!("--metric {:?}: {e}", self.metric))
    }

    pub fn fan_geometry(&self) -> FanGeometry {
        FanGeometry::new(self.fan[0], self.fan[1]).expect("validated in resolve")
    }

    /// Phantom at the configured grid size.
    pub fn phantom_spec(&self) -> Result<PhantomSpec, String> {
        parse_phantom(&self.phantom)
            .map(|p| p.with_grid(self.grid))
            .map_err(|e| format!("--phantom {:?}: {e}", self.phantom))
    }

    fn prepare_out(&self) -> Result<(), String> {
        std::fs::create_dir_all(&self.out).map_err(|e| format!("cannot create {}: {e}", self.out.display()))?;
        let probe = self.out.join(".geoxray-write-test");
        std::fs::write(&probe, b"")
            .map_err(|e| format!("output directory {} is not writable: {e}", self.out.display()))?;
        let _ = std::fs::remove_file(probe);
        Ok(())
    }
}

/// Phantom shorthand:
/// `gaussian[:w[,cx,cy]]`, `bumps:seed[,count]`, `disk:r[,cx,cy]`, `zero`,
/// inline JSON (`{...}`) or `@file.json`.
pub fn parse_phantom(spec: &str) -> Result<PhantomSpec, String> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}"))?;
        return PhantomSpec::from_json(&text).map_err(|e| e.to_string());
    }
    if spec.starts_with('{') {
        return PhantomSpec::from_json(spec).map_err(|e| e.to_string());
    }
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<f64> = if params.trim().is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| format!("not a number: {p:?}")))
            .collect::<Result<_, _>>()?
    };
    let center = |at: usize| {
        if nums.len() == at + 2 {
            Ok([nums[at], nums[at + 1]])
        } else if nums.len() <= at {
            Ok([0.0, 0.0])
        } else {
            Err("center needs two coordinates".to_string())
        }
    };
    let shape = match name.trim() {
        "gaussian" => {
            Shape::GaussianBump { center: center(1)?, width: nums.first().copied().unwrap_or(0.25), amplitude: 1.0 }
        }
        "zero" => {
            if !nums.is_empty() {
                return Err("zero takes no parameters".into());
            }
            Shape::GaussianBump { center: [0.0, 0.0], width: 0.25, amplitude: 0.0 }
        }
        "disk" => {
            Shape::DiskIndicator { center: center(1)?, radius: nums.first().copied().unwrap_or(0.5), amplitude: 1.0 }
        }
        "bumps" => {
            if nums.is_empty() || nums.len() > 2 || nums.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
                return Err("bumps takes seed[,count] as nonnegative integers".into());
            }
            Shape::BumpMixture {
                count: nums.get(1).map(|c| *c as usize).unwrap_or(3),
                seed: nums[0] as u64,
                min_width: 0.15,
                max_width: 0.35,
                amplitude: 1.0,
            }
        }
        other => return Err(format!("unknown phantom {other:?}")),
    };
    Ok(PhantomSpec::new(shape))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = std::env::temp_dir().join("geoxray-config-test");
        let file = Layer { grid: Some(48), seed: Some(9), out: Some(dir.clone()), ..Layer::default() };
        let flags = Layer { grid: Some(40), ..Layer::default() };
        let c = RunConfig::resolve(Command::Radon, flags, Some(file)).unwrap();
        assert_eq!((c.grid, c.seed, c.tol), (40, 9, Some(1e-2)));
        assert_eq!(c.out, dir);
    }

    #[test]
    fn bounds_are_enforced() {
        let l = Layer { grid: Some(8), ..Layer::default() };
        assert!(RunConfig::resolve(Command::Radon, l, None).unwrap_err().contains("grid"));
        let l = Layer { fan: Some("3x90".into()), ..Layer::default() };
        assert!(RunConfig::resolve(Command::Xray, l, None).is_err());
    }

    #[test]
    fn phantom_shorthands() {
        assert!(
            matches!(parse_phantom("zero").unwrap().shape, Shape::GaussianBump { amplitude, .. } if amplitude == 0.0)
        );
        assert!(matches!(parse_phantom("bumps:4,2").unwrap().shape, Shape::BumpMixture { seed: 4, count: 2, .. }));
        assert!(
            matches!(parse_phantom("disk:0.3,0.1,0.2").unwrap().shape, Shape::DiskIndicator { radius, center, .. } if radius == 0.3 && center == [0.1, 0.2])
        );
        assert!(parse_phantom("gaussian:0.2,0.1").is_err());
        assert!(parse_phantom("triangle").is_err());
    }
}
