use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// Machine-readable result of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub outputs: Map<String, Value>,
    pub error_estimates: Map<String, Value>,
    pub seed: u64,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, seed: u64) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Map::new(),
            outputs: Map::new(),
            error_estimates: Map::new(),
            seed,
            wall_time_ms: 0,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.inputs.insert(key.to_string(), value.into());
        self
    }

    pub fn output(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.outputs.insert(key.to_string(), value.into());
        self
    }

    pub fn error_estimate(&mut self, key: &str, value: f64) -> &mut Self {
        self.error_estimates.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are serializable")
    }

    /// Human-readable rendering; floats are shown with 15 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.command).unwrap();
        for (title, map) in
            [("inputs", &self.inputs), ("outputs", &self.outputs), ("error estimates", &self.error_estimates)]
        {
            if map.is_empty() {
                continue;
            }
            writeln!(out, "{title}:").unwrap();
            for (key, value) in map {
                match value {
                    Value::Array(items) if items.iter().any(|v| v.is_object()) => {
                        writeln!(out, "  {key}:").unwrap();
                        for item in items {
                            writeln!(out, "    {}", inline(item)).unwrap();
                        }
                    }
                    _ => writeln!(out, "  {key}: {}", inline(value)).unwrap(),
                }
            }
        }
        writeln!(out, "seed: {}", self.seed).unwrap();
        if self.wall_time_ms > 0 {
            writeln!(out, "wall time: {} ms", self.wall_time_ms).unwrap();
        }
        out
    }
}

fn inline(value: &Value) -> String {
    match value {
        Value::Number(n) if n.is_f64() => sig15(n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
        Value::Null => "null".into(),
        Value::Array(items) => items.iter().map(inline).collect::<Vec<_>>().join(", "),
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}={}", inline(v))).collect::<Vec<_>>().join("  "),
    }
}

/// Fifteen significant digits with trailing zeros dropped, fixed notation
/// for moderate magnitudes.
pub fn sig15(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..15).contains(&exponent) {
        let text = format!("{:.*}", (14 - exponent).max(0) as usize, x);
        if text.contains('.') {
            text.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            text
        }
    } else {
        let text = format!("{x:.14e}");
        let (mantissa, exp) = text.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exp}")
    }
}

/// Seventeen significant digits, as written to CSV files.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with a header row; every number carries 17 significant digits.
pub fn csv(header: &[&str], rows: &[Vec<CsvCell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                CsvCell::Num(x) => sig17(*x),
                CsvCell::Int(i) => i.to_string(),
                CsvCell::Text(t) => t.clone(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub enum CsvCell {
    Num(f64),
    Int(i64),
    Text(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(5.283508001182123), "5.28350800118212");
        assert_eq!(sig15(0.0179), "0.0179");
        assert_eq!(sig15(4.0), "4");
        assert_eq!(sig15(1.5e-7), "1.5e-7");
        assert_eq!(sig15(1e20), "1e20");
        assert_eq!(sig17(0.1), "1.0000000000000001e-1");
        assert_eq!(sig17(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn csv_layout() {
        let text = csv(&["a", "b"], &[vec![CsvCell::Num(1.0), CsvCell::Text("x".into())]]);
        assert_eq!(text, "a,b\n1.0000000000000000e0,x\n");
    }

    #[test]
    fn keys_are_stable() {
        let mut r = RunReport::new("conv", 3);
        r.output("value", 1.0).output("region", "interior");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 6);
        for k in ["command", "inputs", "outputs", "error_estimates", "seed", "wall_time_ms"] {
            assert!(v.get(k).is_some());
        }
    }
}
