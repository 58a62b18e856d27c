//! Result documents. Keys keep insertion order, numbers carry 17
//! significant digits, and non-finite numbers become `null`, so the same
//! result always serializes to the same bytes.

use std::fmt::Write as _;

use crate::constants::to_hz;
use crate::estimators::{PhotonEstimate, VacuumFieldEstimate};
use crate::fit::{AnticrossingFit, FitResult, LorentzianFit, TemperatureFit};

pub const SCHEMA: &str = "cqed-spectrokit/1";

#[derive(Debug, Clone, PartialEq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Array(Vec<JsonValue>),
    Object(Vec<(String, JsonValue)>),
}

impl JsonValue {
    fn write(&self, out: &mut String) {
        match self {
            JsonValue::Null => out.push_str("null"),
            JsonValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            JsonValue::Int(i) => {
                let _ = write!(out, "{i}");
            }
            JsonValue::Num(x) if x.is_finite() => {
                let _ = write!(out, "{x:.16e}");
            }
            JsonValue::Num(_) => out.push_str("null"),
            JsonValue::Str(s) => write_str(s, out),
            JsonValue::Array(items) => {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    v.write(out);
                }
                out.push(']');
            }
            JsonValue::Object(entries) => write_object(entries, out),
        }
    }
}

fn write_str(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_object(entries: &[(String, JsonValue)], out: &mut String) {
    out.push('{');
    for (i, (k, v)) in entries.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_str(k, out);
        out.push(':');
        v.write(out);
    }
    out.push('}');
}

/// An ordered top-level result object, opened with the schema tag and the
/// result type.
#[derive(Debug, Clone, PartialEq)]
pub struct JsonDoc {
    entries: Vec<(String, JsonValue)>,
}

impl JsonDoc {
    pub fn new(result: &str) -> Self {
        Self {
            entries: vec![
                ("schema".into(), JsonValue::Str(SCHEMA.into())),
                ("result".into(), JsonValue::Str(result.into())),
            ],
        }
    }

    pub fn push(&mut self, key: &str, value: JsonValue) -> &mut Self {
        self.entries.push((key.into(), value));
        self
    }

    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, JsonValue::Num(value))
    }

    pub fn int(&mut self, key: &str, value: i64) -> &mut Self {
        self.push(key, JsonValue::Int(value))
    }

    pub fn bool(&mut self, key: &str, value: bool) -> &mut Self {
        self.push(key, JsonValue::Bool(value))
    }

    pub fn str(&mut self, key: &str, value: &str) -> &mut Self {
        self.push(key, JsonValue::Str(value.into()))
    }

    pub fn opt_num(&mut self, key: &str, value: Option<f64>) -> &mut Self {
        self.push(key, value.map_or(JsonValue::Null, JsonValue::Num))
    }

    /// Parameters, then `stderr_<name>`, then the residual summary.
    pub fn fit(&mut self, fit: &FitResult) -> &mut Self {
        for (n, v) in fit.names.iter().zip(&fit.params) {
            self.num(n, *v);
        }
        for (n, e) in fit.names.iter().zip(&fit.std_errs) {
            self.num(&format!("stderr_{n}"), *e);
        }
        let rms_key = if fit.residual_unit.is_empty() {
            "residual_rms".to_string()
        } else {
            format!("residual_rms_{}", fit.residual_unit)
        };
        self.num(&rms_key, fit.residual_rms)
            .int("iterations", fit.iterations as i64)
            .bool("converged", fit.converged)
    }

    /// Compact single-line rendering with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        write_object(&self.entries, &mut out);
        out.push('\n');
        out
    }
}

pub trait ToResultJson {
    fn to_json(&self) -> JsonDoc;
}

pub fn write_result_json<T: ToResultJson + ?Sized>(result: &T) -> String {
    result.to_json().render()
}

impl ToResultJson for LorentzianFit {
    fn to_json(&self) -> JsonDoc {
        let mut d = JsonDoc::new("lorentzian");
        d.fit(&self.fit);
        d
    }
}

impl ToResultJson for AnticrossingFit {
    fn to_json(&self) -> JsonDoc {
        let mut d = JsonDoc::new("anticrossing");
        let fixed = self.fit.get("f0_hz").is_none();
        if fixed {
            d.num("f0_hz", self.f0);
        }
        d.bool("f0_fixed", fixed).fit(&self.fit);
        d
    }
}

impl ToResultJson for TemperatureFit {
    fn to_json(&self) -> JsonDoc {
        let mut d = JsonDoc::new("gc_temperature");
        d.fit(&self.fit);
        d
    }
}

impl ToResultJson for PhotonEstimate {
    fn to_json(&self) -> JsonDoc {
        let mut d = JsonDoc::new("photons");
        d.num("p_circ_w", self.p_circ).num("n_ph", self.n_ph);
        d
    }
}

impl ToResultJson for VacuumFieldEstimate {
    fn to_json(&self) -> JsonDoc {
        let mut d = JsonDoc::new("vacuum_field");
        d.num("i_vac_a", self.i_vac)
            .num("b_vac_t", self.b_vac)
            .num("g_single_hz", to_hz(self.g_single));
        d
    }
}
