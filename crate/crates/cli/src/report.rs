//! Reports: a deterministic document with every check, its residual and the
//! config used. Key order is fixed (struct order, then sorted map keys).

use std::fmt::Write as _;

use cba33::linalg::{CMatrix, ResidualReport, C64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::SuiteConfig;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Informational checks never change the exit status.
    pub mandatory: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Index of the random draw within its check family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub draw: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            mandatory: true,
            passed,
            residual: None,
            tolerance: None,
            draw: None,
            detail: None,
        }
    }

    pub fn residual(name: impl Into<String>, r: &ResidualReport) -> Self {
        Self {
            residual: Some(r.rel),
            tolerance: Some(r.tolerance),
            ..Self::new(name, r.passed)
        }
    }

    pub fn value(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            residual: Some(residual),
            tolerance: Some(tolerance),
            ..Self::new(name, residual <= tolerance)
        }
    }

    pub fn informational(mut self) -> Self {
        self.mandatory = false;
        self
    }

    pub fn at(mut self, draw: usize) -> Self {
        self.draw = Some(draw);
        self
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub report_version: u32,
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub data: Value,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

impl Report {
    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = writeln!(out, "{} {} (exit {})", self.command, status, self.exit_code);
        let _ = writeln!(out, "seed {}", self.config.seed);
        if let Some(e) = &self.error {
            let _ = writeln!(out, "error [{}]: {}", e.kind, e.message);
        }
        for c in &self.checks {
            let mark = match (c.passed, c.mandatory) {
                (true, _) => "ok  ",
                (false, true) => "FAIL",
                (false, false) => "info",
            };
            let _ = write!(out, "  {mark} {}", c.name);
            if let Some(d) = c.draw {
                let _ = write!(out, " #{d}");
            }
            if let (Some(r), Some(t)) = (c.residual, c.tolerance) {
                let _ = write!(out, "  residual {r:.3e} (tol {t:.0e})");
            }
            out.push('\n');
        }
        if !self.data.is_null() {
            write_value(&mut out, &self.data, 1);
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

// Indented key: value tree; complex pairs print as a+bi.
fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_leaf(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", leaf(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    write_value(out, x, depth + 1);
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                if is_leaf(x) {
                    let _ = writeln!(out, "{pad}- {}", leaf(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    write_value(out, x, depth + 1);
                }
            }
        }
        x => {
            let _ = writeln!(out, "{pad}{}", leaf(x));
        }
    }
}

// Complex values are pairs of floats; integer pairs stay lists.
fn as_pair(v: &Value) -> Option<(f64, f64)> {
    match v.as_array()?.as_slice() {
        [a, b] if a.is_f64() && b.is_f64() => Some((a.as_f64()?, b.as_f64()?)),
        _ => None,
    }
}

fn is_leaf(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => {
            as_pair(v).is_some()
                || items
                    .iter()
                    .all(|x| as_pair(x).is_some() || !(x.is_array() || x.is_object()))
        }
        _ => true,
    }
}

fn leaf(v: &Value) -> String {
    if let Some((re, im)) = as_pair(v) {
        return format_complex(re, im);
    }
    match v {
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(leaf).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::String(s) => s.clone(),
        Value::Null => "null".into(),
        x => x.to_string(),
    }
}

fn format_complex(re: f64, im: f64) -> String {
    // drop the sign of negative zero
    let re = re + 0.0;
    if im == 0.0 {
        format!("{re}")
    } else if im < 0.0 {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

pub fn cx(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn cx_list(zs: &[C64]) -> Value {
    Value::Array(zs.iter().map(|&z| cx(z)).collect())
}

/// Row-major list of rows of `[re, im]` pairs.
pub fn matrix(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| cx(m[(i, j)])).collect()))
            .collect(),
    )
}
