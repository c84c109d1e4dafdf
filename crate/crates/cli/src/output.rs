//! Output directory bookkeeping and the run manifest.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use riemflow::io::{FieldFile, SeriesFile};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileKind {
    Field,
    Series,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub kind: FileKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    /// `ok`, or the error that stopped the run.
    pub status: String,
    pub config: serde_json::Value,
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let p = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))
    }

    /// Listed files that are missing from `dir`.
    pub fn missing(&self, dir: &Path) -> Vec<String> {
        self.files.iter().filter(|f| !dir.join(&f.path).is_file()).map(|f| f.path.clone()).collect()
    }
}

pub struct Outputs {
    dir: PathBuf,
    files: Vec<ManifestEntry>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn record(&mut self, name: &str, kind: FileKind) {
        self.files.retain(|f| f.path != name);
        self.files.push(ManifestEntry { path: name.to_string(), kind });
    }

    pub fn field(&mut self, name: &str, f: &FieldFile) -> Result<()> {
        f.write(&self.dir.join(name))?;
        self.record(name, FileKind::Field);
        Ok(())
    }

    pub fn series(&mut self, name: &str, s: &SeriesFile) -> Result<()> {
        s.write(&self.dir.join(name))?;
        self.record(name, FileKind::Series);
        Ok(())
    }

    pub fn text(&mut self, name: &str, s: &str) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, s).with_context(|| format!("writing {}", p.display()))?;
        self.record(name, FileKind::Text);
        Ok(())
    }

    pub fn files(&self) -> &[ManifestEntry] {
        &self.files
    }

    pub fn finish(self, cfg: &RunConfig, status: &str) -> Result<Manifest> {
        let m = Manifest {
            experiment: cfg.experiment.clone(),
            status: status.to_string(),
            config: serde_json::to_value(cfg)?,
            files: self.files,
        };
        let p = self.dir.join(MANIFEST_NAME);
        std::fs::write(&p, serde_json::to_string_pretty(&m)? + "\n").with_context(|| format!("writing {}", p.display()))?;
        Ok(m)
    }
}
