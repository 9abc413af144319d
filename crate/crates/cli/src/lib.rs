//! Reproducible experiments on top of `geoxray`: every run writes its data
//! files, grayscale images and a JSON manifest into one output directory.

mod commands;
pub mod config;
pub mod manifest;

use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use commands::RunError;
use config::RunConfig;
use manifest::{Manifest, Report, SCHEMA};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Runs the configured command and writes `manifest.json`. Returns the
/// manifest; its `status` is the process exit code.
pub fn execute(cfg: &RunConfig) -> std::io::Result<Manifest> {
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64());
    let clock = Instant::now();
    let mut rep = Report::new(cfg.out.clone());
    let outcome = commands::dispatch(cfg, &mut rep);
    let failed = rep.failed();
    let (status, error) = match outcome {
        Ok(()) if failed.is_empty() => (EXIT_OK, None),
        Ok(()) => (EXIT_ASSERTION, None),
        Err(RunError::Config(e)) => (EXIT_CONFIG, Some(e)),
        Err(RunError::Runtime(e)) => (EXIT_ASSERTION, Some(e)),
    };
    let mut failed = failed;
    if error.is_some() && status == EXIT_ASSERTION {
        failed.push("error".to_string());
    }
    let versions = BTreeMap::from([
        ("geoxray".to_string(), geoxray::VERSION.to_string()),
        ("geoxray-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ]);
    let manifest = Manifest {
        schema: SCHEMA.to_string(),
        command: cfg.command.name().to_string(),
        config: serde_json::to_value(cfg).map_err(std::io::Error::other)?,
        versions,
        seed: cfg.seed,
        threads: rayon::current_num_threads(),
        started_unix_s: started,
        wall_time_s: clock.elapsed().as_secs_f64(),
        metrics: rep.metrics,
        assertions: rep.assertions,
        failed,
        warnings: rep.warnings,
        artifacts: rep.artifacts,
        error,
        status,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
    std::fs::write(cfg.out.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}
