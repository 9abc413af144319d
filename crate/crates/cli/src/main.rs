use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use geoxray_cli::config::{Command, FieldKind, Layer, RunConfig, Study};
use geoxray_cli::{execute, EXIT_CONFIG};

/// Geodesic X-ray tomography experiments.
///
/// Settings come from flags, then the `--config` TOML file, then built-in
/// defaults. Exit status: 0 all checks passed, 1 a check failed (named in
/// manifest.json), 2 invalid configuration.
#[derive(Parser, Debug)]
#[command(name = "geoxray", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML file with any of the keys below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `euclidean`, `sphere-cap:k`, `hyperbolic[:a]`, `gaussian-bump:A,w[,cx,cy]` or `grid:path`.
    #[arg(long)]
    metric: Option<String>,
    /// `gaussian[:w[,cx,cy]]`, `bumps:seed[,count]`, `disk:r[,cx,cy]`, `zero`, inline JSON or `@file.json`.
    #[arg(long)]
    phantom: Option<String>,
    /// Test field for the SM checks.
    #[arg(long, value_enum)]
    field: Option<FieldKind>,
    /// Pixels per side.
    #[arg(long)]
    grid: Option<usize>,
    /// Fiber samples for SM fields.
    #[arg(long)]
    ntheta: Option<usize>,
    /// Fan size `BxA` (boundary points x angles).
    #[arg(long)]
    fan: Option<String>,
    /// Integration step.
    #[arg(long)]
    step: Option<f64>,
    /// Threshold for the command's main check.
    #[arg(long)]
    tol: Option<f64>,
    /// Samples of the light-ray time offset.
    #[arg(long)]
    sigma: Option<usize>,
    /// CG iteration cap.
    #[arg(long)]
    iterations: Option<usize>,
    /// Refinement levels for `convergence`.
    #[arg(long)]
    levels: Option<usize>,
    /// Quantity refined by `convergence`.
    #[arg(long, value_enum)]
    study: Option<Study>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Make `simplicity` fail on a non-simple metric.
    #[arg(long)]
    require_simple: bool,
    /// Make `convergence` fail unless the last observed order is within 0.5 of this.
    #[arg(long)]
    expect_order: Option<f64>,
}

impl Cli {
    fn layer(&self) -> Layer {
        Layer {
            metric: self.metric.clone(),
            phantom: self.phantom.clone(),
            field: self.field,
            grid: self.grid,
            ntheta: self.ntheta,
            fan: self.fan.clone(),
            step: self.step,
            tol: self.tol,
            sigma: self.sigma,
            iterations: self.iterations,
            levels: self.levels,
            study: self.study,
            out: self.out.clone(),
            threads: self.threads,
            seed: self.seed,
            require_simple: self.require_simple.then_some(true),
            expect_order: self.expect_order,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(Layer::load).transpose() {
        Ok(f) => f,
        Err(e) => return fail(&e),
    };
    let cfg = match RunConfig::resolve(cli.command, cli.layer(), file) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(k) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            return fail(&format!("cannot start {k} threads: {e}"));
        }
    }
    match execute(&cfg) {
        Ok(m) => {
            for a in &m.assertions {
                let verdict = if a.passed { "ok  " } else { "FAIL" };
                println!("{verdict} {} = {:e} ({} {:e})", a.metric, a.value, a.relation, a.threshold);
            }
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(e) = &m.error {
                eprintln!("error: {e}");
            }
            println!("manifest: {}", cfg.out.join("manifest.json").display());
            ExitCode::from(m.status as u8)
        }
        Err(e) => {
            eprintln!("error: cannot write results to {}: {e}", cfg.out.display());
            ExitCode::from(1)
        }
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_CONFIG as u8)
}
