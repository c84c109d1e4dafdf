//! Run configuration: per-experiment defaults, `key = value` files and
//! `--key value` overrides. Keys are kebab-case; `_` is accepted for `-`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

pub const OUTPUT_DIR_ENV: &str = "RIEMFLOW_OUTPUT_DIR";
const DEFAULT_OUTPUT_DIR: &str = "riemflow-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    JetVerify,
    SphereHypb,
    SphereFtle,
    SphereHypbTime,
    TorusSim,
    TorusLines,
    Pdisk,
    MetricSpectrum,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::JetVerify,
        Experiment::SphereHypb,
        Experiment::SphereFtle,
        Experiment::SphereHypbTime,
        Experiment::TorusSim,
        Experiment::TorusLines,
        Experiment::Pdisk,
        Experiment::MetricSpectrum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::JetVerify => "jet-verify",
            Experiment::SphereHypb => "sphere-hypb",
            Experiment::SphereFtle => "sphere-ftle",
            Experiment::SphereHypbTime => "sphere-hypb-time",
            Experiment::TorusSim => "torus-sim",
            Experiment::TorusLines => "torus-lines",
            Experiment::Pdisk => "pdisk",
            Experiment::MetricSpectrum => "metric-spectrum",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    /// Complete default parameter set; `full` selects the large torus grid.
    pub fn defaults(self, full: bool) -> Vec<(&'static str, Value)> {
        use Value::{Int, Real, Str};
        let torus = |t_end: f64, snaps: &str| {
            let (nx, k) = if full { (800, 199) } else { (256, 85) };
            vec![
                ("alpha", Real(1.8)),
                ("nu", Real(1e-6)),
                ("dt", Real(1e-3)),
                ("k-max", Int(k)),
                ("nx", Int(nx)),
                ("t-end", Real(t_end)),
                ("record-every", Int(10)),
                ("snapshot-times", Str(snaps.into())),
                ("blowup-q", Real(1e6)),
            ]
        };
        match self {
            Experiment::JetVerify => vec![
                ("delta-q", Real(2.0)),
                ("mu0-values", Str("-0.5,0,0.5".into())),
                ("z0-values", Str("-0.5,0,0.3,0.8".into())),
                ("line-dmu", Real(1e-7)),
                ("tau", Real(0.05)),
            ],
            Experiment::SphereHypb => vec![("n-lambda", Int(720)), ("n-mu", Int(360))],
            Experiment::SphereFtle => {
                vec![("n-lambda", Int(360)), ("n-mu", Int(180)), ("t-final", Real(2.0)), ("dt", Real(1e-3))]
            }
            Experiment::SphereHypbTime => {
                vec![("n-lambda", Int(180)), ("n-mu", Int(90)), ("t-final", Real(2.0)), ("dt", Real(5e-3))]
            }
            Experiment::TorusSim => torus(5.0, "0,1,2,3,4,5"),
            Experiment::TorusLines => {
                let mut v = torus(2.0, "0,1,2");
                v.extend([
                    ("seed-x", Str("0.25,0.30,0.35".into())),
                    ("seed-y", Real(0.70)),
                    ("line-s0", Real(0.1)),
                    ("line-nodes", Int(101)),
                ]);
                v
            }
            Experiment::Pdisk => vec![("n", Int(200)), ("streamlines", Int(9)), ("ds", Real(2e-3))],
            Experiment::MetricSpectrum => vec![
                ("alpha", Real(1.8)),
                ("k-max", Int(40)),
                ("grid-n", Int(160)),
                ("n-terms", Int(200)),
                ("l-min", Int(10)),
                ("l-max", Int(60)),
                ("c-claim", Real(4.0)),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Real(f64),
    Str(String),
}

impl Value {
    fn parse_like(&self, key: &str, text: &str) -> Result<Value> {
        let bad = || anyhow!("invalid value {text:?} for {key}");
        Ok(match self {
            Value::Int(_) => Value::Int(text.parse().map_err(|_| bad())?),
            Value::Real(_) => {
                let v: f64 = text.parse().map_err(|_| bad())?;
                if !v.is_finite() {
                    return Err(bad());
                }
                Value::Real(v)
            }
            Value::Str(_) => Value::Str(text.to_string()),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: String,
    pub full: bool,
    pub output_dir: PathBuf,
    pub params: BTreeMap<String, Value>,
    #[serde(skip)]
    kind: Option<Experiment>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

/// `key = value` lines with `#` comments.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
        let (k, v) = (normalize(k), v.trim().to_string());
        if k.is_empty() || v.is_empty() {
            bail!("line {}: empty key or value", i + 1);
        }
        out.push((k, v));
    }
    Ok(out)
}

/// `--key value` pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let key = a.strip_prefix("--").ok_or_else(|| anyhow!("expected --key, got {a:?}"))?;
        if let Some((k, v)) = key.split_once('=') {
            out.push((normalize(k), v.to_string()));
            continue;
        }
        let v = it.next().ok_or_else(|| anyhow!("missing value for --{key}"))?;
        out.push((normalize(key), v.clone()));
    }
    Ok(out)
}

impl RunConfig {
    /// Defaults, then the config file, then command-line overrides.
    pub fn resolve(
        experiment: &str,
        full: bool,
        file_entries: &[(String, String)],
        overrides: &[(String, String)],
        output_dir: Option<PathBuf>,
    ) -> Result<Self> {
        let kind = Experiment::from_name(experiment).ok_or_else(|| {
            let names: Vec<_> = Experiment::ALL.iter().map(|e| e.name()).collect();
            anyhow!("unknown experiment {experiment:?}; expected one of {}", names.join(", "))
        })?;
        let mut params: BTreeMap<String, Value> =
            kind.defaults(full).into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        let mut dir = None;
        for (k, v) in file_entries.iter().chain(overrides) {
            if k == "output-dir" {
                dir = Some(PathBuf::from(v));
                continue;
            }
            let Some(slot) = params.get(k) else {
                let keys: Vec<_> = params.keys().cloned().collect();
                bail!("unknown key {k:?} for {experiment}; valid keys: {}", keys.join(", "));
            };
            let parsed = slot.parse_like(k, v)?;
            params.insert(k.clone(), parsed);
        }
        let output_dir = output_dir
            .or(dir)
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        Ok(Self { experiment: experiment.to_string(), full, output_dir, params, kind: Some(kind) })
    }

    pub fn kind(&self) -> Experiment {
        self.kind.or_else(|| Experiment::from_name(&self.experiment)).expect("resolved experiment")
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        match self.params.get(key) {
            Some(Value::Real(v)) => Ok(*v),
            Some(Value::Int(v)) => Ok(*v as f64),
            _ => bail!("missing real parameter {key}"),
        }
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        match self.params.get(key) {
            Some(Value::Int(v)) if *v >= 0 => Ok(*v as usize),
            Some(Value::Int(v)) => bail!("{key} must be non-negative, got {v}"),
            _ => bail!("missing integer parameter {key}"),
        }
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.params.get(key) {
            Some(Value::Str(s)) => s
                .split(',')
                .map(|t| t.trim())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<f64>().with_context(|| format!("invalid number {t:?} in {key}")))
                .collect(),
            _ => bail!("missing list parameter {key}"),
        }
    }
}
