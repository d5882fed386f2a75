//! Trace CSV files: `#`-prefixed `key = value` lines, a header row starting
//! with `tau`, then one row per sample.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub tau: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl Table {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        out.push_str("tau");
        for (name, _) in &self.columns {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, tau) in self.tau.iter().enumerate() {
            write!(out, "{tau}").unwrap();
            for (_, values) in &self.columns {
                write!(out, ",{}", values[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        }
        std::fs::write(path, self.render()).with_context(|| format!("writing {}", path.display()))
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn meta_map(&self) -> BTreeMap<&str, &str> {
        self.meta.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect()
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let mut meta = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(comment) = line.strip_prefix('#') else {
                break;
            };
            body_start += line.len();
            if let Some((k, v)) = comment.split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text[body_start..].as_bytes());
        let headers = reader.headers().context("reading CSV header")?.clone();
        if headers.get(0) != Some("tau") || headers.len() < 2 {
            bail!("CSV header must start with `tau` and name at least one W column");
        }
        let mut tau = Vec::new();
        let mut columns: Vec<(String, Vec<f64>)> = headers.iter().skip(1).map(|h| (h.to_string(), Vec::new())).collect();
        for (row, record) in reader.records().enumerate() {
            let record = record.with_context(|| format!("CSV row {}", row + 1))?;
            if record.len() != headers.len() {
                bail!("CSV row {} has {} fields, expected {}", row + 1, record.len(), headers.len());
            }
            let parse = |i: usize| -> anyhow::Result<f64> {
                record[i]
                    .parse::<f64>()
                    .with_context(|| format!("CSV row {}: `{}` is not a number", row + 1, &record[i]))
            };
            tau.push(parse(0)?);
            for (i, (_, values)) in columns.iter_mut().enumerate() {
                values.push(parse(i + 1)?);
            }
        }
        if tau.is_empty() {
            bail!("CSV has no data rows");
        }
        Ok(Self { meta, tau, columns })
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
