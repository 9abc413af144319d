use std::io::Write;

use geoxray::field::{Grid2, ScalarField};
use geoxray::geodesic::{
    euclidean_exit_time, trace_geodesic_with, verify_simplicity, SimplicityOptions, DEFAULT_T_MAX,
};
use geoxray::io;
use geoxray::lightray::{lightray_forward, sigma_fubini_check, SigmaGrid, SpacetimePotential, TimeProfile};
use geoxray::metric::{Builtin, ConformalMetric, MetricKind};
use geoxray::phantoms::{AntipodalPair, Phantom, SmoothSM};
use geoxray::radon::{fbp_invert, radon_forward, Sinogram};
use geoxray::sm::{commutator_residuals, pestov_residual, santalo_residual, skew_adjointness, SMField};
use geoxray::xray::{invert_normal_cg, xray_forward, CgOptions, FanBeamData};
use geoxray::{Error, PhaseState, PlaneFunction, TraceOptions};

use crate::config::{Command, FieldKind, RunConfig, Study};
use crate::manifest::Report;

pub enum RunError {
    /// Rejected before or while setting up: exit status 2.
    Config(String),
    Runtime(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parameter(_)
            | Error::NotSimple(_)
            | Error::SigmaGrid { .. }
            | Error::Support { .. }
            | Error::Parse(_) => RunError::Config(e.to_string()),
            _ => RunError::Runtime(e.to_string()),
        }
    }
}

impl From<String> for RunError {
    fn from(e: String) -> Self {
        RunError::Config(e)
    }
}

type Res = Result<(), RunError>;

pub fn dispatch(cfg: &RunConfig, rep: &mut Report) -> Res {
    match cfg.command {
        Command::Radon => radon(cfg, rep),
        Command::Xray => xray(cfg, rep),
        Command::Invert => invert(cfg, rep),
        Command::VerifySm => verify_sm(cfg, rep),
        Command::VerifySantalo => verify_santalo(cfg, rep),
        Command::VerifyPestov => verify_pestov(cfg, rep),
        Command::Simplicity => simplicity(cfg, rep),
        Command::DemoCap => demo_cap(cfg, rep),
        Command::Lightray => lightray(cfg, rep),
        Command::Convergence => convergence(cfg, rep),
    }
}

fn trace(cfg: &RunConfig) -> TraceOptions {
    TraceOptions::with_step(cfg.step.unwrap_or(0.01), DEFAULT_T_MAX)
}

fn tol(cfg: &RunConfig) -> f64 {
    cfg.tol.unwrap_or(f64::INFINITY)
}

fn save_field(rep: &mut Report, stem: &str, f: &ScalarField) -> Res {
    rep.write(&format!("{stem}.txt"), |w| io::write_field(w, f))?;
    rep.write(&format!("{stem}.pgm"), |w| io::write_pgm(w, f, 16))?;
    Ok(())
}

fn sinogram_image(s: &Sinogram) -> Result<ScalarField, Error> {
    let g = Grid2::new(s.ns, s.n_omega, (-s.s_max, s.s_max), (0.0, std::f64::consts::PI))?;
    ScalarField::from_values(g, s.values.clone())
}

fn fan_image(d: &FanBeamData) -> Result<ScalarField, Error> {
    let g = d.geometry;
    let grid = Grid2::new(g.n_alpha, g.n_beta, (-1.0, 1.0), (0.0, 2.0 * std::f64::consts::PI))?;
    ScalarField::from_values(grid, d.values.clone())
}

fn save_fan(rep: &mut Report, stem: &str, d: &FanBeamData) -> Res {
    rep.write(&format!("{stem}.txt"), |w| io::write_fan(w, d))?;
    let img = fan_image(d)?;
    rep.write(&format!("{stem}.pgm"), |w| io::write_pgm(w, &img, 16))?;
    Ok(())
}

/// `‖a − b‖/‖b‖`, or `‖a‖` when `b` vanishes.
fn rel_or_abs(a: &ScalarField, b: &ScalarField) -> Result<f64, Error> {
    if b.l2_norm() > 0.0 {
        a.relative_error(b, |_| true)
    } else {
        Ok(a.l2_norm())
    }
}

fn fbp_run(f: &ScalarField, step: Option<f64>) -> Result<(Sinogram, ScalarField, f64), Error> {
    let g = f.grid;
    let sino = radon_forward(f, 2 * g.nx, 3 * g.nx, step.unwrap_or(0.5 * g.dx()))?;
    let rec = fbp_invert(&sino, g)?;
    let err = rel_or_abs(&rec, f)?;
    Ok((sino, rec, err))
}

fn radon(cfg: &RunConfig, rep: &mut Report) -> Res {
    let f = cfg.phantom_spec()?.field()?;
    let (sino, rec, err) = fbp_run(&f, cfg.step)?;
    save_field(rep, "phantom", &f)?;
    rep.write("sinogram.txt", |w| io::write_sinogram(w, &sino))?;
    let img = sinogram_image(&sino)?;
    rep.write("sinogram.pgm", |w| io::write_pgm(w, &img, 16))?;
    save_field(rep, "recon", &rec)?;
    rep.metric("sinogram_shape", [sino.ns, sino.n_omega]);
    rep.check_le("fbp_rel_error", err, tol(cfg));
    Ok(())
}

fn xray(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let spec = cfg.phantom_spec()?;
    let a = spec.analytic()?;
    let data = xray_forward(&m, &a, cfg.fan_geometry(), trace(cfg))?;
    save_field(rep, "phantom", &a.rasterize(spec.grid.grid()?))?;
    save_fan(rep, "fan", &data)?;
    rep.metric("rays", data.geometry.len());
    rep.metric("trapped_rays", data.trapped_count());
    rep.metric("max_abs", data.max_abs());
    rep.metric("l2_norm", data.norm());
    rep.check_le("failed_rays", data.failed_count() as f64, 0.0);
    Ok(())
}

fn invert(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let spec = cfg.phantom_spec()?;
    let a = spec.analytic()?;
    let grid = spec.grid.grid()?;
    let data = xray_forward(&m, &a, cfg.fan_geometry(), trace(cfg))?;
    let opts = CgOptions { max_iter: cfg.iterations, ..CgOptions::default() };
    let r = invert_normal_cg(&m, &data, grid, opts)?;
    let truth = a.rasterize(grid);
    save_field(rep, "phantom", &truth)?;
    save_fan(rep, "fan", &data)?;
    save_field(rep, "recon", &r.field)?;
    rep.write("cg_log.txt", |w| io::write_log(w, &r.log))?;
    let monotone = r.log.windows(2).all(|w| w[1].1 <= w[0].1);
    rep.metric("iterations", r.log.last().map_or(0, |l| l.0));
    rep.metric("final_residual", r.log.last().map_or(0.0, |l| l.1));
    rep.metric("converged", r.converged);
    rep.metric("stagnated", r.stagnated);
    rep.metric("residual_monotone", monotone);
    if !monotone {
        rep.warn("CG residual increased between iterations");
    }
    rep.check_le("recon_rel_error", rel_or_abs(&r.field, &truth)?, tol(cfg));
    Ok(())
}

fn sm_generator(cfg: &RunConfig, widths: (f64, f64), count: usize, seed: u64) -> Option<SmoothSM> {
    sm_generator_within(cfg, widths, count, seed, 0.85)
}

/// Supports stay inside radius `limit`.
fn sm_generator_within(cfg: &RunConfig, widths: (f64, f64), count: usize, seed: u64, limit: f64) -> Option<SmoothSM> {
    match cfg.field {
        FieldKind::Zero => None,
        FieldKind::Random => Some(SmoothSM::random(seed, count, widths.0, widths.1, limit)),
    }
}

/// Samples the configured test field and records its exact description.
fn sm_field(
    cfg: &RunConfig,
    rep: &mut Report,
    name: &str,
    gen: Option<&SmoothSM>,
    grid: usize,
    ntheta: usize,
) -> Result<SMField, RunError> {
    let g = Grid2::square(grid, 1.0)?;
    let u = match gen {
        Some(s) => s.sample(g, ntheta)?,
        None => SMField::zeros(g, ntheta)?.compact()?,
    };
    let desc = serde_json::json!({ "kind": cfg.field, "grid": grid, "ntheta": ntheta, "terms": gen.map(|s| &s.terms) });
    rep.write(name, |w| Ok(serde_json::to_writer_pretty(w, &desc)?))?;
    Ok(u)
}

fn verify_sm(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let gu = sm_generator(cfg, (0.6, 0.8), 6, cfg.seed);
    let gw = sm_generator(cfg, (0.6, 0.8), 6, cfg.seed.wrapping_add(1));
    let u = sm_field(cfg, rep, "field.json", gu.as_ref(), cfg.grid, cfg.ntheta)?;
    let w = sm_field(cfg, rep, "field2.json", gw.as_ref(), cfg.grid, cfg.ntheta)?;
    let c = commutator_residuals(&m, &u)?;
    let s = skew_adjointness(&m, &u, &w)?;
    rep.metric("commutator_r1", c.r1);
    rep.metric("commutator_r2", c.r2);
    rep.metric("commutator_r3", c.r3);
    rep.metric("skew_x", s.x);
    rep.metric("skew_v", s.v);
    rep.check_le("commutator_max", c.max(), tol(cfg));
    Ok(())
}

fn verify_santalo(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let gen = sm_generator(cfg, (0.4, 0.7), 5, cfg.seed);
    let w = sm_field(cfg, rep, "field.json", gen.as_ref(), cfg.grid, cfg.ntheta)?;
    let r = santalo_residual(&m, &w, cfg.fan_geometry(), trace(cfg))?;
    rep.metric("volume_side", r.volume_side);
    rep.metric("fan_side", r.fan_side);
    rep.check_le("santalo_rel_residual", r.rel_residual, tol(cfg));
    Ok(())
}

fn verify_pestov(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let gen = sm_generator(cfg, (0.5, 0.8), 5, cfg.seed);
    let u = sm_field(cfg, rep, "field.json", gen.as_ref(), cfg.grid, cfg.ntheta)?;
    let p = pestov_residual(&m, &u)?;
    rep.metric("lhs", p.lhs);
    rep.metric("rhs", p.rhs);
    rep.metric("curvature_term", p.curvature_term);
    rep.check_le("pestov_rel_residual", p.rel_residual, tol(cfg));
    Ok(())
}

fn simplicity(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let opts = SimplicityOptions {
        n_boundary: cfg.fan[0],
        n_angles: cfg.fan[1],
        step: cfg.step.unwrap_or(0.01),
        ..SimplicityOptions::default()
    };
    let r = verify_simplicity(&m, opts)?;
    rep.write("witnesses.csv", |w| {
        writeln!(w, "x,y,theta,failure_kind,value")?;
        for wit in &r.witnesses {
            let kind = serde_json::to_value(wit.failure_kind)?;
            writeln!(w, "{},{},{},{},{}", wit.x[0], wit.x[1], wit.theta, kind.as_str().unwrap_or("?"), wit.value)?;
        }
        Ok(())
    })?;
    rep.metric("strictly_convex", r.strictly_convex);
    rep.metric("nontrapping", r.nontrapping);
    rep.metric("no_conjugate_points", r.no_conjugate_points);
    rep.metric("simple", r.is_simple());
    rep.metric("min_second_fundamental_form", r.min_second_fundamental_form);
    rep.metric("states_tested", r.states_tested);
    rep.metric("trapped_count", r.trapped_count);
    rep.metric("conjugate_count", r.conjugate_count);
    rep.metric("failure_count", r.failure_count);
    rep.metric("witnesses", &r.witnesses);
    if cfg.require_simple {
        rep.check_ge("simple", if r.is_simple() { 1.0 } else { 0.0 }, 1.0);
    }
    Ok(())
}

fn demo_cap(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let k = match m.kind() {
        MetricKind::Analytic(Builtin::SphereCap { k }) if *k > 1.0 => *k,
        _ => {
            return Err(RunError::Config(format!(
                "demo-cap needs --metric sphere-cap:k with k > 1, got {:?}",
                cfg.metric
            )))
        }
    };
    let pair = AntipodalPair::on_equator(k, 0.1)?;
    let abs = |x: geoxray::Point| pair.value(x).abs();
    save_field(rep, "phantom", &ScalarField::from_fn(Grid2::square(cfg.grid, 1.0)?, &pair))?;
    let fan = cfg.fan_geometry();
    let mut ratios = Vec::new();
    for (name, metric) in [("cap", m.clone()), ("euclidean", ConformalMetric::euclidean())] {
        let d = xray_forward(&metric, &pair, fan, trace(cfg))?;
        let da = xray_forward(&metric, &abs, fan, trace(cfg))?;
        save_fan(rep, &format!("{name}_If"), &d)?;
        save_fan(rep, &format!("{name}_I_abs_f"), &da)?;
        let ratio = if da.max_abs() > 0.0 { d.max_abs() / da.max_abs() } else { 0.0 };
        rep.metric(&format!("{name}_max_If"), d.max_abs());
        rep.metric(&format!("{name}_max_I_abs_f"), da.max_abs());
        rep.metric(&format!("{name}_trapped_rays"), d.trapped_count());
        ratios.push(ratio);
    }
    rep.metric("k", k);
    rep.check_le("cap_cancellation_ratio", ratios[0], tol(cfg));
    rep.check_ge("euclidean_cancellation_ratio", ratios[1], 0.5);
    Ok(())
}

fn lightray(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let spec = cfg.phantom_spec()?;
    let q = match spec.generate()? {
        Phantom::Spacetime(q) => q,
        Phantom::Field(_) => {
            SpacetimePotential::separable(spec.analytic()?, TimeProfile::Gaussian { center: 1.0, width: 0.3 })
        }
    };
    let fan = cfg.fan_geometry();
    let tr = trace(cfg);
    let (lo, hi) = q.t_support();
    let probe = lightray_forward(&m, &q, fan, SigmaGrid::new(lo, hi, 2)?, tr)?;
    let sigma = SigmaGrid::new(lo - probe.max_length(), hi, cfg.sigma)?;
    let data = lightray_forward(&m, &q, fan, sigma, tr)?;
    let fub = sigma_fubini_check(&m, &q, fan, sigma, tr)?;
    rep.write("lightray.txt", |w| io::write_lightray(w, &data))?;
    rep.write("fubini.csv", |w| {
        writeln!(w, "ray,sigma_moment,static_transform")?;
        for (r, (a, b)) in fub.moment.iter().zip(&fub.static_transform).enumerate() {
            writeln!(w, "{r},{a},{b}")?;
        }
        Ok(())
    })?;
    rep.metric("sigma_range", [sigma.min, sigma.max]);
    rep.metric("max_length", data.max_length());
    rep.metric("trapped_rays", data.status.iter().filter(|s| **s != geoxray::xray::RayStatus::Ok).count());
    rep.check_le("fubini_rel_residual", fub.rel_residual, tol(cfg));
    Ok(())
}

/// One refinement level: `(h, error)`.
fn study_level(cfg: &RunConfig, level: usize, m: &ConformalMetric) -> Result<(f64, f64), RunError> {
    let scale = 1usize << level;
    match cfg.study {
        Study::Exit => {
            let h = cfg.step.unwrap_or(0.1) / scale as f64;
            let fan = cfg.fan_geometry();
            let reference_step = cfg.step.unwrap_or(0.1) / (16 << cfg.levels) as f64;
            let mut err: f64 = 0.0;
            for idx in 0..fan.len() {
                let start = fan.state(idx);
                let p = trace_geodesic_with(m, start, TraceOptions::with_step(h, DEFAULT_T_MAX))?;
                if p.trapped {
                    continue;
                }
                let exact = exit_reference(m, start, reference_step)?;
                let x = p.end().state.x;
                err = err.max((x[0] - exact[0]).hypot(x[1] - exact[1]));
            }
            Ok((h, err))
        }
        Study::Commutator => {
            // Must clear the collar of the coarsest level.
            let limit = 1.0 - 3.0 * 2.0 / cfg.grid as f64 - 0.01;
            let gen = sm_generator_within(cfg, (0.5, 0.7), 6, cfg.seed, limit.min(0.85));
            let g = Grid2::square(cfg.grid * scale, 1.0)?;
            let u = match &gen {
                Some(s) => s.sample(g, cfg.ntheta * scale)?,
                None => SMField::zeros(g, cfg.ntheta * scale)?.compact()?,
            };
            Ok((g.dx(), commutator_residuals(m, &u)?.max()))
        }
        Study::Radon => {
            let f = cfg.phantom_spec()?.with_grid(cfg.grid * scale).field()?;
            let (_, _, err) = fbp_run(&f, None)?;
            Ok((f.grid.dx(), err))
        }
    }
}

fn exit_reference(m: &ConformalMetric, start: PhaseState, step: f64) -> Result<[f64; 2], RunError> {
    if m.is_euclidean() {
        let t = euclidean_exit_time(&start);
        return Ok([start.x[0] + t * start.theta.cos(), start.x[1] + t * start.theta.sin()]);
    }
    Ok(trace_geodesic_with(m, start, TraceOptions::with_step(step, DEFAULT_T_MAX))?.end().state.x)
}

/// Errors below this are treated as exact: no order is reported.
const ROUNDOFF_FLOOR: f64 = 1e-12;

fn convergence(cfg: &RunConfig, rep: &mut Report) -> Res {
    let m = cfg.metric()?;
    let mut rows: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for level in 0..cfg.levels {
        let (h, e) = study_level(cfg, level, &m)?;
        let order = rows
            .last()
            .and_then(|&(_, prev, _)| (prev > ROUNDOFF_FLOOR && e > ROUNDOFF_FLOOR).then(|| (prev / e).log2()));
        rows.push((h, e, order));
    }
    rep.write("convergence.csv", |w| {
        writeln!(w, "h,error,observed_order")?;
        for (h, e, o) in &rows {
            match o {
                Some(o) => writeln!(w, "{h:e},{e:e},{o}")?,
                None => writeln!(w, "{h:e},{e:e},n/a")?,
            }
        }
        Ok(())
    })?;
    let non_monotone = rows.windows(2).any(|w| w[1].1 > w[0].1 && w[1].1 > ROUNDOFF_FLOOR);
    if non_monotone {
        rep.warn("errors do not decrease monotonically under refinement");
    }
    let table: Vec<_> =
        rows.iter().map(|(h, e, o)| serde_json::json!({ "h": h, "error": e, "observed_order": o })).collect();
    rep.metric("study", cfg.study);
    rep.metric("table", table);
    rep.metric("non_monotone", non_monotone);
    let last = rows.last().and_then(|r| r.2);
    rep.metric("last_observed_order", last);
    if let Some(expect) = cfg.expect_order {
        rep.check_le("order_deviation", last.map_or(f64::NAN, |o| (o - expect).abs()), 0.5);
    }
    Ok(())
}
