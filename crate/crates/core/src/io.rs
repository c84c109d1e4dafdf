//! Output formats.
//!
//! A field file is five ASCII header lines followed by `nx·ny` little-endian
//! `f64` values, `y` outer:
//!
//! ```text
//! MFE1
//! <name>
//! <nx> <ny>
//! t=<time>
//! chart=<kind> alpha=<alpha>
//! ```
//!
//! A series file is CSV with a header row and values written with 17
//! significant digits.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const FIELD_MAGIC: &str = "MFE1";

#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub name: String,
    pub nx: usize,
    pub ny: usize,
    pub t: f64,
    pub chart: String,
    pub alpha: f64,
    /// Row-major with `y` outer: `values[j * nx + i]`.
    pub values: Vec<f64>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

impl FieldFile {
    pub fn header(&self) -> String {
        format!(
            "{FIELD_MAGIC}\n{}\n{} {}\nt={}\nchart={} alpha={}\n",
            self.name, self.nx, self.ny, self.t, self.chart, self.alpha
        )
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.values.len() != self.nx * self.ny {
            return Err(Error::Consistency(format!(
                "field {} has {} values for {}x{}",
                self.name,
                self.values.len(),
                self.nx,
                self.ny
            )));
        }
        if self.name.contains('\n') || self.chart.contains(char::is_whitespace) {
            return Err(Error::Usage(format!("field name/chart not representable: {:?}/{:?}", self.name, self.chart)));
        }
        let mut out = self.header().into_bytes();
        out.reserve(8 * self.values.len());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        let mut f = BufWriter::new(File::create(path).map_err(|e| io_err(path, e))?);
        f.write_all(&bytes).and_then(|_| f.flush()).map_err(|e| io_err(path, e))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = BufReader::new(bytes);
        let mut lines = Vec::with_capacity(5);
        for _ in 0..5 {
            let mut s = String::new();
            let n = r.read_line(&mut s).map_err(|e| Error::Io(e.to_string()))?;
            if n == 0 || !s.ends_with('\n') {
                return Err(Error::Io("truncated field header".into()));
            }
            s.pop();
            lines.push(s);
        }
        if lines[0] != FIELD_MAGIC {
            return Err(Error::Io(format!("bad magic {:?}", lines[0])));
        }
        let bad = |what: &str| Error::Io(format!("malformed header line: {what}"));
        let mut dims = lines[2].split(' ');
        let nx: usize = dims.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad(&lines[2]))?;
        let ny: usize = dims.next().and_then(|s| s.parse().ok()).ok_or_else(|| bad(&lines[2]))?;
        if dims.next().is_some() {
            return Err(bad(&lines[2]));
        }
        let t: f64 = lines[3].strip_prefix("t=").and_then(|s| s.parse().ok()).ok_or_else(|| bad(&lines[3]))?;
        let (chart, alpha) = lines[4]
            .strip_prefix("chart=")
            .and_then(|s| s.split_once(" alpha="))
            .ok_or_else(|| bad(&lines[4]))?;
        let alpha: f64 = alpha.parse().map_err(|_| bad(&lines[4]))?;
        let mut payload = Vec::new();
        r.read_to_end(&mut payload).map_err(|e| Error::Io(e.to_string()))?;
        if payload.len() != 8 * nx * ny {
            return Err(Error::Io(format!("payload has {} bytes, expected {}", payload.len(), 8 * nx * ny)));
        }
        let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Ok(Self { name: lines[1].clone(), nx, ny, t, chart: chart.to_string(), alpha, values })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SeriesFile {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Consistency(format!("row of {} values for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| Error::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| format!("{v:.16e}"))).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string()?).map_err(|e| io_err(path, e))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let columns: Vec<String> =
            r.headers().map_err(|e| Error::Io(e.to_string()))?.iter().map(|s| s.to_string()).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Io(format!("not a number: {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        let mut out = Self { columns, rows: Vec::new() };
        for r in rows {
            out.push(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        Self::parse(&text)
    }
}
