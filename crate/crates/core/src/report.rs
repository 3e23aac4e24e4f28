//! Machine-readable reports.

use serde::{Deserialize, Serialize};

use crate::contrast::{ContrastPath, ContrastReport};
use crate::linalg::SpectralBounds;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: Option<String>,
    pub shape: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub path: Option<String>,
    pub bounds: Option<SpectralBounds>,
    pub optimal_scale: Option<f64>,
}

impl Metric {
    pub fn plain(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            path: None,
            bounds: None,
            optimal_scale: None,
        }
    }

    pub fn from_contrast(name: impl Into<String>, r: &ContrastReport) -> Self {
        Self {
            name: name.into(),
            value: r.value,
            path: Some(path_name(r.path).to_string()),
            bounds: Some(r.bounds),
            optimal_scale: r.optimal_scale,
        }
    }
}

pub fn path_name(p: ContrastPath) -> &'static str {
    match p {
        ContrastPath::Spectral => "spectral",
        ContrastPath::InverseFormula => "inverse_formula",
        ContrastPath::Scan => "scan",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub input: InputInfo,
    pub metrics: Vec<Metric>,
    pub config: serde_json::Value,
}

impl ReportDocument {
    pub fn new(input: InputInfo, config: serde_json::Value) -> Self {
        Self {
            tool_version: TOOL_VERSION.to_string(),
            input,
            metrics: Vec::new(),
            config,
        }
    }

    pub fn push(&mut self, m: Metric) {
        self.metrics.push(m);
    }

    pub fn metric(&self, name: &str) -> Option<&Metric> {
        self.metrics.iter().find(|m| m.name == name)
    }

    /// Pretty JSON with lexicographically sorted object keys.
    pub fn to_json(&self) -> String {
        // serde_json::Value maps are ordered by key
        let v = serde_json::to_value(self).expect("report is always serializable");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// One `name = value` line per metric.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.metrics {
            out.push_str(&format!("{} = {}", m.name, fmt_sig(m.value)));
            if let Some(a) = m.optimal_scale {
                out.push_str(&format!("  (A* = {})", fmt_sig(a)));
            }
            out.push('\n');
        }
        out
    }
}

/// Formats with 9 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if !(-5..=9).contains(&exp) {
        return format!("{v:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}
