//! Plain-text model files: `key: value` header lines, a `values:` marker,
//! then one number per line. Floats are written with Rust's shortest
//! round-trip formatting, so a write/read cycle is bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TextDoc {
    pub entries: Vec<(String, String)>,
    pub values: Vec<f64>,
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn fmt_list(vs: &[f64]) -> String {
    vs.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(" ")
}

impl TextDoc {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(v);
            out.push('\n');
        }
        out.push_str("values:\n");
        for v in &self.values {
            out.push_str(&fmt_f64(*v));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut doc = TextDoc::default();
        let mut lines = text.lines().enumerate();
        for (i, line) in lines.by_ref() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "values:" {
                break;
            }
            let (k, v) = line
                .split_once(':')
                .ok_or_else(|| format!("line {}: expected 'key: value'", i + 1))?;
            doc.push(k.trim(), v.trim());
        }
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            doc.values.push(
                line.parse()
                    .map_err(|_| format!("line {}: '{line}' is not a number", i + 1))?,
            );
        }
        Ok(doc)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|msg| Error::Model {
            path: path.to_path_buf(),
            msg,
        })
    }

    /// Required header value parsed as `T`.
    pub fn field<T: std::str::FromStr>(&self, key: &str) -> std::result::Result<T, String> {
        let raw = self.get(key).ok_or_else(|| format!("missing '{key}'"))?;
        raw.parse()
            .map_err(|_| format!("'{key}': cannot parse '{raw}'"))
    }

    pub fn list(&self, key: &str) -> std::result::Result<Vec<f64>, String> {
        let raw = self.get(key).ok_or_else(|| format!("missing '{key}'"))?;
        raw.split_whitespace()
            .map(|t| t.parse().map_err(|_| format!("'{key}': bad number '{t}'")))
            .collect()
    }
}
