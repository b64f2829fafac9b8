//! Machine-readable result records emitted by the CLI.
//!
//! Reports are deterministic: given the same inputs and seed, two runs
//! serialise to identical bytes. Timings are therefore opt-in and excluded
//! from the document unless requested.

use serde::Serialize;
use serde_json::{Map, Value};

/// One theorem/verification check with its expected and observed values.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: &str, expected: impl ToString, got: impl ToString, pass: bool) -> Check {
        Check {
            name: name.to_string(),
            expected: expected.to_string(),
            got: got.to_string(),
            pass,
        }
    }

    /// Check of an exact (integer or string) equality.
    pub fn exact<T: PartialEq + ToString>(name: &str, expected: T, got: T) -> Check {
        let pass = expected == got;
        Check::new(name, expected.to_string(), got.to_string(), pass)
    }

    /// Check of a residual against a bound.
    pub fn residual(name: &str, bound: f64, got: f64) -> Check {
        Check::new(name, format!("<= {bound:e}"), format!("{got:e}"), got <= bound)
    }

    pub fn boolean(name: &str, got: bool) -> Check {
        Check::new(name, "true", got.to_string(), got)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 of the problem document and the relevant flags.
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<Vec<(String, f64)>>,
}

impl Report {
    pub fn new(command: &str, inputs_digest: String) -> Report {
        Report {
            command: command.to_string(),
            inputs_digest,
            seed: None,
            results: Value::Object(Map::new()),
            checks: Vec::new(),
            timings_ms: None,
        }
    }

    pub fn insert_result(&mut self, key: &str, value: Value) {
        if let Value::Object(map) = &mut self.results {
            map.insert(key.to_string(), value);
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Aligned text table: results, then one line per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("command : {}\n", self.command));
        out.push_str(&format!("digest  : {}\n", self.inputs_digest));
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed    : {seed}\n"));
        }
        if let Value::Object(map) = &self.results {
            if !map.is_empty() {
                out.push_str("results :\n");
                for (k, v) in map {
                    out.push_str(&format!("  {k} = {}\n", compact(v)));
                }
            }
        }
        if !self.checks.is_empty() {
            let w_name = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let w_exp = self
                .checks
                .iter()
                .map(|c| c.expected.len())
                .max()
                .unwrap_or(0)
                .min(28);
            out.push_str("checks  :\n");
            for c in &self.checks {
                out.push_str(&format!(
                    "  [{}] {:w_name$}  expected {:w_exp$}  got {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.got,
                ));
            }
        }
        out.push_str(&format!(
            "verdict : {}\n",
            if self.all_pass() { "PASS" } else { "FAIL" }
        ));
        out
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_else(|_| "null".into())
}

/// JSON value for a float list (spectra etc.).
pub fn float_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| serde_json::json!(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_serialise_deterministically() {
        let build = || {
            let mut r = Report::new("betti", "abc".into());
            r.seed = Some(7);
            r.insert_result("b0", serde_json::json!(1));
            r.insert_result("b1", serde_json::json!(2));
            r.push(Check::exact("index", -1i64, -1i64));
            r
        };
        assert_eq!(build().to_json(), build().to_json());
        assert_eq!(build().to_text(), build().to_text());
        assert!(build().all_pass());
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = Report::new("x", "d".into());
        r.push(Check::exact("eq", 1, 2));
        assert!(!r.all_pass());
        assert!(r.to_text().contains("[FAIL]"));
    }
}
