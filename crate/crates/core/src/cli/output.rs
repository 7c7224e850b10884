//! CSV files with `#` comment headers.

use std::fmt::Write as _;
use std::path::Path;

use canetoad::config::RunConfig;
use canetoad::Result;

/// Provenance stamped on every file.
#[derive(Debug, Clone)]
pub struct Meta {
    pub name: String,
    pub hash: String,
}

impl Meta {
    pub fn of(cfg: &RunConfig) -> Self {
        Self {
            name: cfg.name.clone(),
            hash: cfg.hash(),
        }
    }
}

pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(meta: &Meta, columns: &[&str]) -> Self {
        let mut buf = String::new();
        writeln!(buf, "# canetoad {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(buf, "# config {} sha256={}", meta.name, meta.hash).unwrap();
        buf.push_str(&columns.join(","));
        buf.push('\n');
        Self { buf }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<String> = fields.iter().map(|f| quote(f.as_ref())).collect();
        self.buf.push_str(&line.join(","));
        self.buf.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.buf)?;
        Ok(())
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Time label used in file names, e.g. `10` or `2.5`.
pub fn time_label(t: f64) -> String {
    let r = (t * 1000.0).round() / 1000.0;
    format!("{r}")
}
