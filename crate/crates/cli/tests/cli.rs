use std::path::Path;
use std::process::{Command, Output};

use riemflow::io::{FieldFile, SeriesFile};
use riemflow_cli::output::{FileKind, Manifest};

fn riemflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riemflow")).args(args).output().expect("binary runs")
}

fn run_ok(exp: &str, dir: &Path, extra: &[&str]) -> Manifest {
    let d = dir.to_str().unwrap();
    let mut args = vec!["run", exp, "--output-dir", d];
    args.extend_from_slice(extra);
    let out = riemflow(&args);
    assert!(out.status.success(), "{exp} failed: {}", String::from_utf8_lossy(&out.stderr));
    let m = Manifest::read(dir).unwrap();
    assert_eq!(m.experiment, exp);
    assert_eq!(m.status, "ok");
    assert!(m.missing(dir).is_empty(), "missing {:?}", m.missing(dir));
    for e in &m.files {
        let p = dir.join(&e.path);
        match e.kind {
            FileKind::Field => {
                FieldFile::read(&p).unwrap();
            }
            FileKind::Series => {
                SeriesFile::read(&p).unwrap();
            }
            FileKind::Text => assert!(!std::fs::read_to_string(&p).unwrap().is_empty()),
        }
    }
    m
}

fn paths(m: &Manifest) -> Vec<&str> {
    m.files.iter().map(|e| e.path.as_str()).collect()
}

#[test]
fn list_names_every_experiment() {
    let out = riemflow(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "jet-verify",
        "sphere-hypb",
        "sphere-ftle",
        "sphere-hypb-time",
        "torus-sim",
        "torus-lines",
        "pdisk",
        "metric-spectrum",
    ] {
        assert!(text.lines().any(|l| l == name), "{name} not listed");
    }
}

#[test]
fn jet_verify_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_ok("jet-verify", dir.path(), &[]);
    assert_eq!(paths(&m), ["jet_verify.csv"]);
    let s = SeriesFile::read(&dir.path().join("jet_verify.csv")).unwrap();
    assert_eq!(s.rows.len(), 12);
    for col in ["rel_err", "line_rel_err"] {
        for e in s.column(col).unwrap() {
            assert!(e < 1e-6, "{col} = {e}");
        }
    }
    assert_eq!(m.config["params"]["delta-q"], serde_json::json!(2.0));
}

#[test]
fn sphere_hypb_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--n-lambda", "36", "--n-mu", "18"];
    let ma = run_ok("sphere-hypb", a.path(), &args);
    run_ok("sphere-hypb", b.path(), &args);
    for p in paths(&ma) {
        let (x, y) = (std::fs::read(a.path().join(p)).unwrap(), std::fs::read(b.path().join(p)).unwrap());
        assert_eq!(x, y, "{p} differs between runs");
    }
    let with = FieldFile::read(&a.path().join("hyperbolic_with_curvature.mfe")).unwrap();
    let without = FieldFile::read(&a.path().join("hyperbolic_without_curvature.mfe")).unwrap();
    assert_eq!((with.nx, with.ny, with.chart.as_str()), (36, 18, "sphere"));
    assert!(with.values.iter().zip(&without.values).all(|(w, o)| w <= o));
}

#[test]
fn sphere_lagrangian_maps() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_ok("sphere-ftle", dir.path(), &["--n-lambda", "12", "--n-mu", "6", "--t-final", "0.5", "--dt", "1e-2"]);
    assert_eq!(paths(&m), ["ftle.mfe"]);
    let dir = tempfile::tempdir().unwrap();
    run_ok("sphere-hypb-time", dir.path(), &["--n-lambda", "12", "--n-mu", "6", "--t-final", "0.5", "--dt", "1e-2"]);
    let plain = FieldFile::read(&dir.path().join("hyperbolicity_time.mfe")).unwrap();
    let strong = FieldFile::read(&dir.path().join("strong_hyperbolicity_time.mfe")).unwrap();
    assert!(plain.values.iter().zip(&strong.values).all(|(p, s)| s <= p && *p <= 0.5 + 1e-12));
}

#[test]
fn torus_sim_small() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--nx", "32", "--k-max", "10", "--t-end", "0.02", "--record-every", "5", "--snapshot-times", "0,0.01"];
    let m = run_ok("torus-sim", dir.path(), &args);
    let p = paths(&m);
    for f in ["budget.csv", "metric.mfe", "curvature.mfe", "pressure_t0.000.mfe", "vorticity_t0.000.mfe", "vorticity_t0.010.mfe"] {
        assert!(p.contains(&f), "{f} missing from {p:?}");
    }
    let b = SeriesFile::read(&dir.path().join("budget.csv")).unwrap();
    assert_eq!(b.column("t").unwrap(), vec![0.0, 0.005, 0.01, 0.015, 0.02]);
    let e = b.column("energy").unwrap();
    assert!((e[4] / e[0] - 1.0).abs() < 1e-6);
    assert!(b.column("g_mean").unwrap().iter().all(|g| g.abs() < 1e-12));
    let q = FieldFile::read(&dir.path().join("vorticity_t0.010.mfe")).unwrap();
    assert_eq!((q.nx, q.ny, q.t, q.alpha), (32, 32, 0.01, 1.8));
}

#[test]
fn torus_lines_small() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--nx", "32", "--k-max", "10", "--t-end", "0.02", "--snapshot-times", "0,0.02", "--line-nodes", "11"];
    run_ok("torus-lines", dir.path(), &args);
    let e = SeriesFile::read(&dir.path().join("line_energy.csv")).unwrap();
    assert_eq!(e.rows.len(), 21);
    assert_eq!(e.rows[0][4..], [1.0, 1.0, 1.0]);
    let l = SeriesFile::read(&dir.path().join("lines_t0.020.csv")).unwrap();
    assert_eq!(l.rows.len(), 33);
}

#[test]
fn blow_up_keeps_last_good_state() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let args = ["run", "torus-sim", "--output-dir", d, "--nx", "32", "--k-max", "10", "--t-end", "0.01", "--blowup-q", "1e-3"];
    let out = riemflow(&args);
    assert!(!out.status.success());
    let m = Manifest::read(dir.path()).unwrap();
    assert!(m.status.starts_with("error"), "{}", m.status);
    assert!(m.missing(dir.path()).is_empty());
    let q = FieldFile::read(&dir.path().join("vorticity_last_good.mfe")).unwrap();
    assert_eq!(q.t, 0.0);
}

#[test]
fn pdisk_outputs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("pdisk", dir.path(), &["--n", "40", "--streamlines", "3"]);
    let psi = FieldFile::read(&dir.path().join("stream_function.mfe")).unwrap();
    assert_eq!(psi.chart, "poincare-disk");
    // Corners lie outside the unit disk.
    assert!(psi.values[0].is_nan());
    assert!(psi.values[20 * 40 + 20].is_finite());
    let r = SeriesFile::read(&dir.path().join("residuals.csv")).unwrap();
    assert!(r.rows[0][1..].iter().all(|v| *v < 1e-8));
    let s = SeriesFile::read(&dir.path().join("streamlines.csv")).unwrap();
    assert!(s.rows.iter().all(|r| r[2].hypot(r[3]) < 1.0));
}

#[test]
fn metric_spectrum_tables() {
    let dir = tempfile::tempdir().unwrap();
    let m = run_ok("metric-spectrum", dir.path(), &["--k-max", "12", "--grid-n", "64", "--l-max", "20"]);
    assert_eq!(paths(&m), ["coefficients.csv", "bound.csv", "report.txt"]);
    let c = SeriesFile::read(&dir.path().join("coefficients.csv")).unwrap();
    assert_eq!(c.rows.len(), 25 * 25);
    for r in &c.rows {
        assert!((r[2] - r[3]).abs() < 1e-12, "{r:?}");
    }
}

#[test]
fn config_file_then_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# jet settings\nmu0_values = 0.25\nz0-values = 0.5\ndelta-q = 1\n").unwrap();
    let out = dir.path().join("out");
    let m = run_ok("jet-verify", &out, &["--config", cfg.to_str().unwrap(), "--delta-q=3"]);
    assert_eq!(m.config["params"]["delta-q"], serde_json::json!(3.0));
    let s = SeriesFile::read(&out.join("jet_verify.csv")).unwrap();
    assert_eq!(s.rows.len(), 1);
    assert_eq!(s.rows[0][..2], [0.25, 0.5]);
}

#[test]
fn rejects_unknown_keys_and_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = riemflow(&["run", "jet-verify", "--output-dir", d, "--colour", "red"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
    let out = riemflow(&["run", "sphere-flat", "--output-dir", d]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown experiment"));
    assert!(!dir.path().join("manifest.json").exists());
}
