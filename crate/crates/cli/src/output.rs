use std::io::Write;

use nalgebra::{Matrix3, Matrix4, Vector4};
use num_complex::Complex64;
use serde_json::{json, Value};

use petrov_core::bivector::Mat6;

/// Accumulates one report in both output formats.
pub struct Report {
    lines: Vec<String>,
    json: serde_json::Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut json = serde_json::Map::new();
        json.insert("command".into(), json!(command));
        Report {
            lines: Vec::new(),
            json,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn field(&mut self, key: &str, v: Value) {
        self.json.insert(key.into(), v);
    }

    /// A labelled scalar shown in both formats.
    pub fn value(&mut self, key: &str, label: &str, v: Value) {
        let shown = match &v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        self.line(format!("{label}: {shown}"));
        self.field(key, v);
    }

    pub fn matrix6(&mut self, key: &str, label: &str, m: &Mat6) {
        self.line(format!("{label}:"));
        for r in 0..6 {
            self.line(row((0..6).map(|c| m[(r, c)]), 1e-13 * m.amax()));
        }
        self.field(key, mat6_json(m));
    }

    pub fn matrix3(&mut self, key: &str, label: &str, m: &Matrix3<f64>) {
        self.line(format!("{label}:"));
        for r in 0..3 {
            self.line(row((0..3).map(|c| m[(r, c)]), 1e-13 * m.amax()));
        }
        self.field(key, json!((0..3).map(|r| (0..3).map(|c| m[(r, c)]).collect::<Vec<_>>()).collect::<Vec<_>>()));
    }

    pub fn matrix4(&mut self, key: &str, label: &str, m: &Matrix4<f64>) {
        self.line(format!("{label}:"));
        for r in 0..4 {
            self.line(row((0..4).map(|c| m[(r, c)]), 1e-13 * m.amax()));
        }
        self.field(key, json!((0..4).map(|r| (0..4).map(|c| m[(r, c)]).collect::<Vec<_>>()).collect::<Vec<_>>()));
    }

    pub fn print(&self, format: crate::Format) {
        match format {
            crate::Format::Human => {
                emit(&self.lines.join("\n"));
            }
            crate::Format::Json => {
                emit(&serde_json::to_string_pretty(&Value::Object(self.json.clone())).expect("json"));
            }
        }
    }
}

/// Writes one block to stdout. A closed pipe (`petrov ... | head`) is not
/// an error worth a panic.
pub fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// One matrix row; entries below `floor` are shown as zero.
fn row(vals: impl Iterator<Item = f64>, floor: f64) -> String {
    let cells: Vec<String> = vals
        .map(|v| format!("{:>13.6e}", if v.abs() <= floor { 0.0 } else { v }))
        .collect();
    format!("  {}", cells.join(" "))
}

pub fn mat6_json(m: &Mat6) -> Value {
    json!((0..6).map(|r| (0..6).map(|c| m[(r, c)]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// Values that would print as `-0.000000000` print without the sign.
pub fn snap(v: f64) -> f64 {
    if v.abs() < 5e-10 {
        0.0
    } else {
        v
    }
}

pub fn vec4(v: &Vector4<f64>) -> String {
    format!("({:.9}, {:.9}, {:.9}, {:.9})", snap(v[0]), snap(v[1]), snap(v[2]), snap(v[3]))
}

pub fn arr4(v: &[f64; 4]) -> String {
    vec4(&Vector4::from(*v))
}

pub fn vec_json(v: &[f64]) -> Value {
    json!(v)
}

pub fn complex(z: Complex64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:.9} {sign} {:.9}i", snap(z.re), z.im.abs())
}

pub fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}
