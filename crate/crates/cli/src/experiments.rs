//! The named experiments.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};
use rayon::prelude::*;
use riemflow::diagnostics::{classify_local, okubo_weiss, pressure_hessian_steady, strain_acceleration};
use riemflow::geometry::{metric_at, Chart, FrameVector, Point};
use riemflow::io::{FieldFile, SeriesFile};
use riemflow::lagrangian::{ftle, hyperbolicity_times, seed_grid, HypVariant};
use riemflow::pdisk::{disk_flow_checks, disk_stream_function, disk_velocity, streamline};
use riemflow::spectral_bounds::{
    check_ratio_bound, coeffs_by_fft, coeffs_by_series, printed_ratio_bound, proven_ratio_bound, verify_bound,
    CoeffTarget,
};
use riemflow::sphere_flows::{jet_line_acceleration, JetFlow, JetLineSpec, JetParams, Quadrupole};
use riemflow::torus::{
    initial_condition, simulate, GridField, TorusParams, TorusRun, TorusRunConfig, TorusSolver,
};
use riemflow::{classify_steady, velocity_gradient, ClassifyOptions, Error, VelocitySampler};

use crate::config::{Experiment, RunConfig};
use crate::output::{Manifest, Outputs};

fn field(name: &str, nx: usize, ny: usize, t: f64, chart: &Chart, values: Vec<f64>) -> FieldFile {
    FieldFile { name: name.into(), nx, ny, t, chart: chart.name().into(), alpha: chart.alpha(), values }
}

fn grid_field(name: &str, t: f64, chart: &Chart, g: GridField) -> FieldFile {
    field(name, g.nx, g.ny, t, chart, g.values)
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Runs one experiment and writes its manifest. On a failed run the outputs
/// written so far stay listed and the error is returned.
pub fn run(cfg: &RunConfig, log: &mut dyn FnMut(&str)) -> Result<Manifest> {
    let mut out = Outputs::create(&cfg.output_dir)?;
    let result = match cfg.kind() {
        Experiment::JetVerify => jet_verify(cfg, &mut out, log),
        Experiment::SphereHypb => sphere_hypb(cfg, &mut out, log),
        Experiment::SphereFtle => sphere_ftle(cfg, &mut out, log),
        Experiment::SphereHypbTime => sphere_hypb_time(cfg, &mut out, log),
        Experiment::TorusSim => torus(cfg, &mut out, log, false),
        Experiment::TorusLines => torus(cfg, &mut out, log, true),
        Experiment::Pdisk => pdisk(cfg, &mut out, log),
        Experiment::MetricSpectrum => metric_spectrum(cfg, &mut out, log),
    };
    match result {
        Ok(()) => out.finish(cfg, "ok"),
        Err(e) => {
            out.finish(cfg, &format!("error: {e:#}"))?;
            Err(e)
        }
    }
}

fn jet_verify(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str)) -> Result<()> {
    let dq = cfg.real("delta-q")?;
    let (dmu, tau) = (cfg.real("line-dmu")?, cfg.real("tau")?);
    let mut s = SeriesFile::new(&["mu0", "z0", "closed_form", "tensor_value", "line_value", "rel_err", "line_rel_err"]);
    let mut worst: f64 = 0.0;
    for mu0 in cfg.list("mu0-values")? {
        let jp = JetParams::new(mu0, dq)?;
        for z0 in cfg.list("z0-values")? {
            let p = Point::new(0.0, z0);
            let closed = jp.meridional_acceleration(z0);
            let hess = pressure_hessian_steady(&JetFlow(jp), p)?;
            let m = strain_acceleration(&Chart::sphere(), p, &JetFlow(jp), &hess)?;
            let tensor = m.quad(FrameVector::new(0.0, 1.0));
            let spec = JetLineSpec { z0, delta_mu: if z0 >= mu0 { dmu } else { -dmu } };
            let line = jet_line_acceleration(&jp, &spec, 1.0, tau)?;
            let (e1, e2) = ((tensor - closed).abs() / closed.abs(), (line - closed).abs() / closed.abs());
            worst = worst.max(e1).max(e2);
            s.push(vec![mu0, z0, closed, tensor, line, e1, e2])?;
        }
    }
    out.series("jet_verify.csv", &s)?;
    log(&format!("jet-verify: {} cases, max relative error {worst:.3e}", s.rows.len()));
    Ok(())
}

fn sphere_grid(cfg: &RunConfig) -> Result<(usize, usize, Vec<Point>)> {
    let (nx, ny) = (cfg.count("n-lambda")?, cfg.count("n-mu")?);
    if nx == 0 || ny == 0 {
        bail!("grid sizes must be positive");
    }
    Ok((nx, ny, seed_grid(nx, ny, (0.0, TAU), (-1.0, 1.0))))
}

fn sphere_hypb(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str)) -> Result<()> {
    let (nx, ny, seeds) = sphere_grid(cfg)?;
    let chart = Chart::sphere();
    let (with, without) = (ClassifyOptions::default(), ClassifyOptions::without_curvature());
    let rows: Vec<[f64; 5]> = seeds
        .par_iter()
        .map(|&p| -> riemflow::Result<[f64; 5]> {
            let a = classify_steady(&Quadrupole, p, &with)?.class;
            let b = classify_steady(&Quadrupole, p, &without)?.class;
            let g = velocity_gradient(&Quadrupole, p)?;
            Ok([
                flag(a.is_hyperbolic()),
                flag(b.is_hyperbolic()),
                flag(a == riemflow::HyperbolicClass::StrongHyperbolic),
                Quadrupole::vorticity(p),
                okubo_weiss(&g),
            ])
        })
        .collect::<riemflow::Result<_>>()?;
    let names = ["hyperbolic_with_curvature", "hyperbolic_without_curvature", "strong_with_curvature", "vorticity", "okubo_weiss"];
    for (c, name) in names.iter().enumerate() {
        out.field(&format!("{name}.mfe"), &field(name, nx, ny, 0.0, &chart, rows.iter().map(|r| r[c]).collect()))?;
    }
    let viol = rows.iter().filter(|r| r[0] > r[1]).count();
    let diff = rows.iter().filter(|r| r[0] < r[1]).count();
    log(&format!("sphere-hypb: {nx}x{ny}, hyperbolic only without curvature at {diff} points, inclusion violations {viol}"));
    Ok(())
}

fn sphere_ftle(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str)) -> Result<()> {
    let (nx, ny, seeds) = sphere_grid(cfg)?;
    let (t, dt) = (cfg.real("t-final")?, cfg.real("dt")?);
    let vals: Vec<f64> = seeds.par_iter().map(|&p| ftle(&Quadrupole, p, t, dt)).collect::<riemflow::Result<_>>()?;
    let max = vals.iter().cloned().fold(f64::MIN, f64::max);
    out.field("ftle.mfe", &field("ftle", nx, ny, t, &Chart::sphere(), vals))?;
    log(&format!("sphere-ftle: {nx}x{ny}, T={t}, max FTLE {max:.4}"));
    Ok(())
}

fn sphere_hypb_time(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str)) -> Result<()> {
    let (nx, ny, seeds) = sphere_grid(cfg)?;
    let (t, dt) = (cfg.real("t-final")?, cfg.real("dt")?);
    let variants = [
        HypVariant { opts: ClassifyOptions::default(), strong: false },
        HypVariant { opts: ClassifyOptions::default(), strong: true },
        HypVariant { opts: ClassifyOptions::without_curvature(), strong: false },
    ];
    let rows: Vec<Vec<f64>> = seeds
        .par_iter()
        .map(|&p| hyperbolicity_times(&Quadrupole, p, t, dt, &variants))
        .collect::<riemflow::Result<_>>()?;
    let chart = Chart::sphere();
    for (c, name) in ["hyperbolicity_time", "strong_hyperbolicity_time", "hyperbolicity_time_without_curvature"]
        .iter()
        .enumerate()
    {
        out.field(&format!("{name}.mfe"), &field(name, nx, ny, t, &chart, rows.iter().map(|r| r[c]).collect()))?;
    }
    log(&format!("sphere-hypb-time: {nx}x{ny}, T={t}, dt={dt}"));
    Ok(())
}

fn torus_params(cfg: &RunConfig) -> Result<TorusParams> {
    let nx = cfg.count("nx")?;
    Ok(TorusParams {
        alpha: cfg.real("alpha")?,
        nu: cfg.real("nu")?,
        dt: cfg.real("dt")?,
        k_max: cfg.count("k-max")?,
        nx,
        ny: nx,
    })
}

fn time_tag(t: f64) -> String {
    format!("{t:.3}")
}

/// Grid fields at the initial state: metric, curvature, pressure and the
/// hyperbolic masks with and without the curvature term.
fn torus_initial_fields(solver: &mut TorusSolver, run_init: &riemflow::torus::SolverState, out: &mut Outputs) -> Result<()> {
    let chart = solver.params().chart();
    let flow = solver.grid_flow(run_init)?;
    let pr = solver.pressure_from_flow(&flow);
    let (nx, ny) = (flow.value[0].nx, flow.value[0].ny);
    let mut masks = [Vec::with_capacity(nx * ny), Vec::with_capacity(nx * ny)];
    let mut curv = Vec::with_capacity(nx * ny);
    for m in 0..nx * ny {
        let (x, y) = flow.value[0].coords(m % nx, m / nx);
        let p = Point::new(x, y);
        let u = flow.velocity(p)?;
        let g = velocity_gradient(&flow, p)?;
        let r = metric_at(&chart, p)?.r1221;
        curv.push(r);
        for (k, o) in [ClassifyOptions::default(), ClassifyOptions::without_curvature()].iter().enumerate() {
            masks[k].push(flag(classify_local(u, &g, &pr.hessian[m], r, false, o).class.is_hyperbolic()));
        }
    }
    out.field("metric.mfe", &grid_field("metric", 0.0, &chart, solver.metric_grid()))?;
    out.field("curvature.mfe", &field("curvature", nx, ny, 0.0, &chart, curv))?;
    out.field("pressure_t0.000.mfe", &grid_field("pressure", run_init.t, &chart, pr.grid))?;
    let [with, without] = masks;
    out.field("hyperbolic_with_curvature_t0.000.mfe", &field("hyperbolic_with_curvature", nx, ny, 0.0, &chart, with))?;
    out.field(
        "hyperbolic_without_curvature_t0.000.mfe",
        &field("hyperbolic_without_curvature", nx, ny, 0.0, &chart, without),
    )?;
    Ok(())
}

fn write_torus_run(run: &TorusRun, chart: &Chart, out: &mut Outputs) -> Result<()> {
    let mut b = SeriesFile::new(&["t", "energy", "enstrophy", "palinstrophy", "dissipated", "g_mean"]);
    for r in &run.budget {
        b.push(vec![r.t, r.energy, r.enstrophy, r.palinstrophy, r.dissipated, r.g_mean])?;
    }
    out.series("budget.csv", &b)?;
    for (t, g) in &run.snapshots {
        out.field(&format!("vorticity_t{}.mfe", time_tag(*t)), &grid_field("vorticity", *t, chart, g.clone()))?;
    }
    if !run.line_energy.is_empty() {
        let n = run.line_energy[0].energies.len();
        let mut cols = vec!["t".to_string()];
        cols.extend((0..n).map(|i| format!("energy_{i}")));
        cols.extend((0..n).map(|i| format!("normalized_{i}")));
        let cols: Vec<&str> = cols.iter().map(|s| s.as_str()).collect();
        let mut s = SeriesFile::new(&cols);
        let e0 = &run.line_energy[0].energies;
        for r in &run.line_energy {
            let mut row = vec![r.t];
            row.extend(&r.energies);
            row.extend(r.energies.iter().zip(e0).map(|(e, e0)| e / e0));
            s.push(row)?;
        }
        out.series("line_energy.csv", &s)?;
        for (t, lines) in &run.line_snapshots {
            let mut s = SeriesFile::new(&["line", "node", "x", "y"]);
            for (i, l) in lines.iter().enumerate() {
                for (j, p) in l.nodes.iter().enumerate() {
                    s.push(vec![i as f64, j as f64, p.x, p.y])?;
                }
            }
            out.series(&format!("lines_t{}.csv", time_tag(*t)), &s)?;
        }
    }
    Ok(())
}

fn torus(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str), lines: bool) -> Result<()> {
    let params = torus_params(cfg)?;
    let mut solver = TorusSolver::new(params)?;
    let init = initial_condition(&mut solver)?;
    let chart = params.chart();
    let mut rc = TorusRunConfig {
        t_end: cfg.real("t-end")?,
        record_every: cfg.count("record-every")?,
        snapshot_times: cfg.list("snapshot-times")?,
        blowup_q: cfg.real("blowup-q")?,
        ..TorusRunConfig::default()
    };
    if lines {
        let y = cfg.real("seed-y")?;
        rc.line_seeds = cfg.list("seed-x")?.into_iter().map(|x| Point::new(x * TAU, y * TAU)).collect();
        rc.line_s0 = cfg.real("line-s0")?;
        let nodes = cfg.count("line-nodes")?;
        if nodes < 2 {
            bail!("line-nodes must be at least 2");
        }
        rc.line_segments = nodes - 1;
        rc.line_t_end = rc.t_end;
    } else {
        torus_initial_fields(&mut solver, &init, out)?;
    }
    log(&format!(
        "{}: {}x{} K={} nu={} dt={} to t={}",
        cfg.experiment, params.nx, params.ny, params.k_max, params.nu, params.dt, rc.t_end
    ));
    let mut next_report = 0.0;
    let run = simulate(&mut solver, init, &rc, |t| {
        if t >= next_report {
            eprintln!("  t = {t:.3}");
            next_report = t + 0.5;
        }
    })?;
    write_torus_run(&run, &chart, out)?;
    if let Some(e) = &run.failure {
        let q = solver.vorticity_grid(&run.last_good);
        out.field("vorticity_last_good.mfe", &grid_field("vorticity", run.last_good.t, &chart, q))?;
        return Err(anyhow!("run stopped: {e}"));
    }
    if let (Some(a), Some(b)) = (run.budget.first(), run.budget.last()) {
        log(&format!(
            "energy change {:.3e}%, enstrophy change {:.3e}%, viscous sink {:.4e}",
            100.0 * (b.energy - a.energy) / a.energy,
            100.0 * (b.enstrophy - a.enstrophy) / a.enstrophy,
            b.dissipated
        ));
    }
    Ok(())
}

fn pdisk(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str)) -> Result<()> {
    let n = cfg.count("n")?;
    if n == 0 {
        bail!("n must be positive");
    }
    let chart = Chart::disk();
    let h = 2.0 / n as f64;
    let (mut psi, mut speed) = (Vec::with_capacity(n * n), Vec::with_capacity(n * n));
    for j in 0..n {
        for i in 0..n {
            let p = Point::new(-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
            match (disk_stream_function(p), disk_velocity(p)) {
                (Ok(s), Ok(u)) => {
                    psi.push(s);
                    speed.push(u.norm());
                }
                (Err(Error::Domain { .. }), _) | (_, Err(Error::Domain { .. })) => {
                    psi.push(f64::NAN);
                    speed.push(f64::NAN);
                }
                (Err(e), _) | (_, Err(e)) => return Err(e.into()),
            }
        }
    }
    out.field("stream_function.mfe", &field("stream_function", n, n, 0.0, &chart, psi))?;
    out.field("speed.mfe", &field("speed", n, n, 0.0, &chart, speed))?;
    let rep = disk_flow_checks(n)?;
    let mut r = SeriesFile::new(&["points", "cauchy_riemann", "divergence", "vorticity", "stream_round_trip"]);
    r.push(vec![rep.points as f64, rep.cauchy_riemann, rep.divergence, rep.vorticity, rep.stream_round_trip])?;
    out.series("residuals.csv", &r)?;
    let count = cfg.count("streamlines")?;
    let ds = cfg.real("ds")?;
    let mut s = SeriesFile::new(&["line", "psi", "x", "y"]);
    for k in 0..count {
        let y0 = -0.9 + 1.8 * (k as f64 + 0.5) / count as f64;
        let level = -2.0 * y0.atanh();
        for p in streamline(level, ds, 1e-3, 100_000)? {
            s.push(vec![k as f64, level, p.x, p.y])?;
        }
    }
    out.series("streamlines.csv", &s)?;
    log(&format!(
        "pdisk: {} interior points, residuals CR {:.1e} div {:.1e} vort {:.1e} psi {:.1e}",
        rep.points, rep.cauchy_riemann, rep.divergence, rep.vorticity, rep.stream_round_trip
    ));
    Ok(())
}

fn metric_spectrum(cfg: &RunConfig, out: &mut Outputs, log: &mut dyn FnMut(&str)) -> Result<()> {
    let alpha = cfg.real("alpha")?;
    let k_max = cfg.count("k-max")?;
    let (l_min, l_max) = (cfg.count("l-min")?, cfg.count("l-max")?);
    let n_terms = cfg.count("n-terms")?;
    let series = coeffs_by_series(alpha, k_max, n_terms)?;
    let fft = coeffs_by_fft(alpha, k_max, cfg.count("grid-n")?, CoeffTarget::Metric)?;
    let fft_inv = coeffs_by_fft(alpha, k_max, cfg.count("grid-n")?, CoeffTarget::InverseMetric)?;
    let mut c = SeriesFile::new(&["k", "l", "series", "fft", "fft_inverse"]);
    for (k, l, z) in series.entries() {
        c.push(vec![k as f64, l as f64, z.re, fft.get(k, l).re, fft_inv.get(k, l).re])?;
    }
    out.series("coefficients.csv", &c)?;
    let wide = coeffs_by_series(alpha, k_max.max(l_max), n_terms)?;
    let bound = verify_bound(&wide, (l_min, l_max), cfg.real("c-claim")?)?;
    let mut b = SeriesFile::new(&["L", "C_L"]);
    for &(l, cl) in &bound.per_l {
        b.push(vec![l as f64, cl])?;
    }
    out.series("bound.csv", &b)?;
    let printed = check_ratio_bound(alpha, k_max, 40, |l, _| printed_ratio_bound(alpha, l));
    let proven = check_ratio_bound(alpha, k_max, 40, |_, j| proven_ratio_bound(alpha, j));
    let mut rep = String::new();
    let w = &mut rep;
    writeln!(w, "quantity                         value")?;
    writeln!(w, "alpha                            {alpha}")?;
    writeln!(w, "k_max                            {k_max}")?;
    writeln!(w, "a_00 (series)                    {:.16}", series.get(0, 0).re)?;
    writeln!(w, "max |series - fft|               {:.3e}", series.max_abs_difference(&fft))?;
    writeln!(w, "parity violations (series)       {:.3e}", series.parity_violation())?;
    writeln!(w, "parity violations (fft)          {:.3e}", fft.parity_violation())?;
    writeln!(w, "parity violations (fft, 1/g)     {:.3e}", fft_inv.parity_violation())?;
    writeln!(w, "C_observed over L in [{l_min}, {l_max}]     {:.6}", bound.c_observed)?;
    writeln!(w, "C = {} holds                     {}", bound.c_claimed, bound.holds)?;
    writeln!(w, "small-L exceptions               {:?}", bound.small_l_exceptions)?;
    writeln!(w, "ratio > a^2/(8(L+3))             {}/{} (worst {:.2}x)", printed.violations, printed.checked, printed.worst.0)?;
    writeln!(w, "ratio > a^2/(4(j+1)^2)           {}/{}", proven.violations, proven.checked)?;
    out.text("report.txt", &rep)?;
    log(&rep);
    Ok(())
}
