//! Run reports and their two output forms.

use std::fmt::Write as _;

use arcmatch::{EngineStats, Mode, NapsResult};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub pattern: String,
    pub text: String,
    pub mode: Mode,
    pub m: usize,
    pub n: usize,
    pub pattern_arcs: usize,
    pub text_arcs: usize,
    pub is_subsequence: bool,
    pub gamma_root: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<EngineStats>,
}

pub struct Sizes {
    pub m: usize,
    pub n: usize,
    pub pattern_arcs: usize,
    pub text_arcs: usize,
}

impl RunReport {
    pub fn new(
        (pattern, text): (&str, &str),
        mode: Mode,
        sizes: Sizes,
        result: &NapsResult,
        with_stats: bool,
    ) -> Self {
        Self {
            pattern: pattern.to_string(),
            text: text.to_string(),
            mode,
            m: sizes.m,
            n: sizes.n,
            pattern_arcs: sizes.pattern_arcs,
            text_arcs: sizes.text_arcs,
            is_subsequence: result.is_subsequence,
            gamma_root: result.gamma_root,
            stats: with_stats.then(|| result.stats.clone()),
        }
    }
}

/// One JSON object on a single line.
pub fn json_line<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("reports serialize")
}

/// `key: value` lines, nested objects flattened with dotted keys.
pub fn key_lines<T: Serialize>(value: &T) -> String {
    let mut out = String::new();
    flatten(
        "",
        &serde_json::to_value(value).expect("reports serialize"),
        &mut out,
    );
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix}: {s}");
        }
        other => {
            let _ = writeln!(out, "{prefix}: {other}");
        }
    }
}
