//! Report rendering. Floats are printed with 12 significant digits so that
//! reports are stable across platforms and runs.

use serde_json::Value;

/// A rendered report: a JSON document plus an optional table for CSV output.
pub struct Report {
    pub body: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Report {
    pub fn new(body: Value) -> Self {
        Report { body, table: None }
    }

    pub fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        self.table = Some(Table { header, rows });
        self
    }

    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write_value(&mut out, &self.body, 0);
        out.push('\n');
        out
    }

    /// The table if there is one, otherwise the flattened `key,value` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.table {
            Some(t) => {
                out.push_str(&t.header.join(","));
                out.push('\n');
                for row in &t.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            None => {
                out.push_str("key,value\n");
                let mut pairs = Vec::new();
                flatten("", &self.body, &mut pairs);
                for (k, v) in pairs {
                    out.push_str(&csv_escape(&k));
                    out.push(',');
                    out.push_str(&csv_cell(&v));
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// `v` with 12 significant digits: fixed notation for moderate exponents,
/// scientific otherwise.
pub fn fmt_f64(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "Infinity".into()
        } else {
            "-Infinity".into()
        };
    }
    if v == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        format!("{:.*}", (11 - exp) as usize, v)
    } else {
        format!("{mantissa}e{exp}")
    }
}

fn fmt_number(n: &serde_json::Number) -> String {
    if n.is_i64() || n.is_u64() {
        n.to_string()
    } else {
        fmt_f64(n.as_f64().unwrap_or(f64::NAN))
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, n: usize| out.extend(std::iter::repeat_n("  ", n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            let s = fmt_number(n);
            // JSON has no literal for non-finite numbers
            if s.chars().any(|c| c.is_ascii_alphabetic() && c != 'e') {
                out.push_str(&Value::String(s).to_string());
            } else {
                out.push_str(&s);
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else if items.iter().all(is_scalar) {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    write_value(out, item, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(out, indent);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                flatten(&key(k), item, out);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), item, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => fmt_number(n),
        Value::String(s) => csv_escape(s),
        other => csv_escape(&other.to_string()),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
