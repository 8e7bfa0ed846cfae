use std::fmt::Write as _;

use ffkr::restriction::{FieldId, NormCertificate};
use ffkr::Exponent;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ExperimentConfig, Format};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(
        default,
        with = "ffkr::decimal::option",
        skip_serializing_if = "Option::is_none"
    )]
    pub deviation: Option<f64>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            pass,
            deviation: None,
        }
    }

    /// Passes when `deviation <= tolerance`.
    pub fn within(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            pass: deviation <= tolerance,
            deviation: Some(deviation),
        }
    }
}

/// One self-contained record per run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    pub certificates: Vec<NormCertificate>,
    pub checks: Vec<Check>,
    /// Operation-specific results; numbers appear as decimal strings.
    pub data: Value,
    pub runtime_ms: String,
    pub version: String,
    pub seed: String,
    pub config: ExperimentConfig,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        ExperimentReport {
            experiment: config.command.name(),
            field: None,
            n: None,
            surface: None,
            p: None,
            q: None,
            certificates: Vec::new(),
            checks: Vec::new(),
            data: Value::Null,
            runtime_ms: "0".into(),
            version: crate::VERSION.into(),
            seed: config.seed.to_string(),
            config: config.clone(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize") + "\n"
    }
}

/// Decimal-string form of a float for the `data` section.
pub fn num(v: f64) -> Value {
    Value::String(ffkr::decimal::to_string(v))
}

pub fn render(report: &ExperimentReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => render_csv(report),
        Format::Text => render_text(report),
    }
}

fn cert_line(c: &NormCertificate) -> String {
    let what = match c.quantity {
        ffkr::restriction::Quantity::RStar => "R*",
        ffkr::restriction::Quantity::KakeyaK => "K",
    };
    format!(
        "{what}({} -> {}) {:?} {:?} = {}",
        c.p,
        c.q,
        c.kind,
        c.method,
        ffkr::decimal::to_string(c.value)
    )
}

fn render_text(r: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} (seed {}, {} ms)",
        r.experiment, r.seed, r.runtime_ms
    );
    if let Some(f) = r.field {
        let _ = write!(out, "field F_{}", f.p);
        if f.k > 1 {
            let _ = write!(out, "^{}", f.k);
        }
        if let Some(n) = r.n {
            let _ = write!(out, "  n = {n}");
        }
        if let Some(s) = &r.surface {
            let _ = write!(out, "  surface {s}");
        }
        out.push('\n');
    }
    if let Some(rows) = r.data.get("rows").and_then(Value::as_array) {
        out.push_str(&crate::figure::render_rows_text(rows));
    } else if !r.data.is_null() {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&r.data).unwrap_or_default()
        );
    }
    for c in &r.certificates {
        let _ = writeln!(out, "  {}", cert_line(c));
    }
    for c in &r.checks {
        let dev = c
            .deviation
            .map(|d| format!(" (deviation {d:e})"))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "  [{}] {}{}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            dev
        );
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(r: &ExperimentReport) -> String {
    if let Some(rows) = r.data.get("rows").and_then(Value::as_array) {
        return crate::figure::render_rows_csv(rows);
    }
    let mut out = String::from("record,name,kind,method,p,q,value,pass,deviation\n");
    for c in &r.certificates {
        let name = c
            .witness
            .as_ref()
            .map(|w| w.name.clone())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "certificate,{},{:?},{:?},{},{},{},,",
            csv_field(&name),
            c.kind,
            c.method,
            c.p,
            c.q,
            ffkr::decimal::to_string(c.value)
        );
    }
    for c in &r.checks {
        let dev = c
            .deviation
            .map(ffkr::decimal::to_string)
            .unwrap_or_default();
        let _ = writeln!(out, "check,{},,,,,,{},{}", csv_field(&c.name), c.pass, dev);
    }
    out
}
