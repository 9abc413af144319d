use std::path::Path;
use std::process::Command;

use geoxray::io;
use geoxray_cli::manifest::Manifest;
use serde_json::Value;

fn run(args: &[&str], out: &Path) -> (i32, Option<Manifest>) {
    let status =
        Command::new(env!("CARGO_BIN_EXE_geoxray")).args(args).arg("--out").arg(out).output().expect("binary runs");
    let m = Manifest::load(&out.join("manifest.json")).ok();
    (status.status.code().unwrap_or(-1), m)
}

fn metric(m: &Manifest, name: &str) -> Value {
    m.metrics.get(name).cloned().unwrap_or_else(|| panic!("manifest lacks {name}: {:?}", m.metrics))
}

#[test]
fn radon_defaults_pass_and_error_is_recomputable() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["radon"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 0);
    assert_eq!(m.schema, "geoxray-manifest/1");
    let err = metric(&m, "fbp_rel_error").as_f64().unwrap();
    assert!(err <= 0.01, "{err}");
    for a in ["phantom.txt", "phantom.pgm", "sinogram.txt", "sinogram.pgm", "recon.txt", "recon.pgm"] {
        assert!(m.artifacts.iter().any(|x| x == a), "{a}");
    }
    let read = |name: &str| {
        io::read_field(std::io::BufReader::new(std::fs::File::open(dir.path().join(name)).unwrap())).unwrap()
    };
    let again = read("recon.txt").relative_error(&read("phantom.txt"), |_| true).unwrap();
    assert_eq!(again, err);
    let pgm = std::fs::read(dir.path().join("recon.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n128 128\n65535\n"));
}

#[test]
fn simplicity_reports_trapping_on_large_cap() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["simplicity", "--metric", "sphere-cap:1.5"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 0);
    assert_eq!(metric(&m, "nontrapping"), Value::Bool(false));
    assert!(!metric(&m, "witnesses").as_array().unwrap().is_empty());
    let csv = std::fs::read_to_string(dir.path().join("witnesses.csv")).unwrap();
    assert!(csv.lines().any(|l| l.ends_with(|c: char| c.is_ascii_digit()) && l.contains("trapped")));

    let (code, m) = run(&["simplicity", "--metric", "sphere-cap:1.5", "--require-simple"], dir.path());
    assert_eq!(code, 1);
    assert_eq!(m.unwrap().failed, vec!["simple".to_string()]);
}

#[test]
fn pestov_on_zero_field_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["verify-pestov", "--field", "zero", "--grid", "48", "--ntheta", "64"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(metric(&m.unwrap(), "pestov_rel_residual").as_f64(), Some(0.0));
}

#[test]
fn invalid_configuration_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["radon", "--grid", "8"],
        vec!["radon", "--metric", "torus:1"],
        vec!["radon", "--phantom", "gaussian:0.6"],
        vec!["xray", "--fan", "90by90"],
        vec!["radon", "--config", "/nonexistent/geoxray.toml"],
        vec!["convergence", "--levels", "2"],
        vec!["teleport"],
    ] {
        let (code, _) = run(&args, dir.path());
        assert_eq!(code, 2, "{args:?}");
    }
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "gird = 64\n").unwrap();
    let (code, _) = run(&["radon", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 2);
}

#[test]
fn failed_assertion_exits_1_and_names_the_metric() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["radon", "--grid", "64", "--tol", "1e-9"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 1);
    assert_eq!(m.status, 1);
    assert_eq!(m.failed, vec!["fbp_rel_error".to_string()]);
}

#[test]
fn flags_override_file_override_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "grid = 48\nseed = 11\nphantom = \"bumps:3,2\"\ntol = 0.05\n").unwrap();
    let (code, m) = run(&["radon", "--config", cfg.to_str().unwrap(), "--grid", "40"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 0, "{:?}", m.metrics);
    assert_eq!(m.config["grid"], 40);
    assert_eq!(m.config["seed"], 11);
    assert_eq!(m.config["phantom"], "bumps:3,2");
    assert_eq!(m.config["tol"], 0.05);
    assert_eq!(m.config["ntheta"], 128);
}

#[test]
fn same_config_gives_identical_manifest_modulo_time() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify-sm", "--grid", "48", "--ntheta", "64", "--seed", "5", "--threads", "1"];
    let strip = |mut m: Manifest| {
        m.started_unix_s = 0.0;
        m.wall_time_s = 0.0;
        serde_json::to_string(&m).unwrap()
    };
    let (c1, a) = run(&args, dir.path());
    let field1 = std::fs::read(dir.path().join("field.json")).unwrap();
    let (c2, b) = run(&args, dir.path());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(strip(a.unwrap()), strip(b.unwrap()));
    assert_eq!(field1, std::fs::read(dir.path().join("field.json")).unwrap());
}

fn table(m: &Manifest) -> Vec<(f64, Option<f64>)> {
    metric(m, "table")
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["error"].as_f64().unwrap(), r["observed_order"].as_f64()))
        .collect()
}

#[test]
fn convergence_of_zero_phantom_has_no_order() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["convergence", "--study", "radon", "--phantom", "zero"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 0);
    let t = table(&m);
    assert_eq!(t.len(), 3);
    assert!(t.iter().all(|(e, o)| *e == 0.0 && o.is_none()));
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("h,error,observed_order"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",0e0,n/a")));
}

#[test]
fn convergence_orders_match_the_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["convergence", "--study", "exit", "--expect-order", "4"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 0, "{:?}", m.metrics);
    assert_eq!(metric(&m, "non_monotone"), Value::Bool(false));
    assert!(table(&m).iter().skip(1).all(|(_, o)| (o.unwrap() - 4.0).abs() <= 0.5));

    let (code, m) = run(&["convergence", "--study", "commutator", "--expect-order", "4"], dir.path());
    assert_eq!(code, 0, "{:?}", m.unwrap().metrics);
}

#[test]
fn lightray_fubini_holds() {
    let dir = tempfile::tempdir().unwrap();
    let (code, m) = run(&["lightray", "--metric", "gaussian-bump:0.2,0.4", "--fan", "16x16"], dir.path());
    let m = m.unwrap();
    assert_eq!(code, 0);
    assert!(metric(&m, "fubini_rel_residual").as_f64().unwrap() <= 1e-3);
    let data =
        io::read_lightray(std::io::BufReader::new(std::fs::File::open(dir.path().join("lightray.txt")).unwrap()))
            .unwrap();
    assert_eq!(data.sigma.n, 200);
}
