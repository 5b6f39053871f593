//! The JSON envelope every command writes, and a printer with fixed float
//! formatting so identical inputs give byte-identical output.

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub residuals: Map<String, Value>,
    pub elapsed: Option<f64>,
}

impl CommandReport {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("inputs".into(), self.inputs.clone());
        m.insert("outputs".into(), self.outputs.clone());
        m.insert("residuals".into(), Value::Object(self.residuals.clone()));
        m.insert("elapsed".into(), self.elapsed.map_or(Value::Null, real));
        Value::Object(m)
    }
}

/// Records what a command read: scalar parameters verbatim, files by content
/// hash, and one digest over all of it.
#[derive(Debug, Default)]
pub struct InputLog {
    params: Map<String, Value>,
    files: Map<String, Value>,
    hasher: Sha256,
}

impl InputLog {
    pub fn param(&mut self, name: &str, value: Value) {
        self.hasher.update(format!("param {name}={}\n", render(&value, false)));
        self.params.insert(name.into(), value);
    }

    pub fn file(&mut self, name: &str, bytes: &[u8]) {
        let digest = hex(&Sha256::digest(bytes));
        self.hasher.update(format!("file {name}={digest}\n"));
        self.files.insert(name.into(), Value::String(digest));
    }

    pub fn finish(self) -> Value {
        let mut m = Map::new();
        m.insert("digest".into(), Value::String(hex(&self.hasher.finalize())));
        m.insert("files".into(), Value::Object(self.files));
        m.insert("params".into(), Value::Object(self.params));
        Value::Object(m)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A real as JSON; non-finite values become `null`.
pub fn real(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| real(x)).collect())
}

/// Floats are written with 17 significant digits in exponent form, integers
/// as integers.
pub fn render(v: &Value, pretty: bool) -> String {
    let mut out = String::new();
    write_value(&mut out, v, pretty, 0);
    out
}

fn write_value(out: &mut String, v: &Value, pretty: bool, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if x.is_finite() {
                    out.push_str(&format!("{x:.16e}"));
                } else {
                    out.push_str("null");
                }
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            // Arrays of scalars stay on one line; matrices would otherwise
            // spread over thousands of lines.
            let flat = !pretty || items.iter().all(|x| !x.is_object() && !x.is_array() || is_small(x));
            write_seq(out, '[', ']', items.len(), flat, depth, |out, i, d| {
                write_value(out, &items[i], pretty && !flat, d)
            });
        }
        Value::Object(map) => {
            let entries: Vec<(&String, &Value)> = map.iter().collect();
            write_seq(out, '{', '}', entries.len(), !pretty, depth, |out, i, d| {
                out.push_str(&Value::String(entries[i].0.clone()).to_string());
                out.push_str(if pretty { ": " } else { ":" });
                write_value(out, entries[i].1, pretty, d);
            });
        }
    }
}

fn is_small(v: &Value) -> bool {
    matches!(v, Value::Array(xs) if xs.len() <= 2 && xs.iter().all(|x| x.is_number() || x.is_null()))
}

fn write_seq(
    out: &mut String,
    open: char,
    close: char,
    len: usize,
    flat: bool,
    depth: usize,
    mut item: impl FnMut(&mut String, usize, usize),
) {
    out.push(open);
    if len == 0 {
        out.push(close);
        return;
    }
    for i in 0..len {
        if i > 0 {
            out.push(',');
            if flat {
                out.push(' ');
            }
        }
        if !flat {
            out.push('\n');
            out.push_str(&"  ".repeat(depth + 1));
        }
        item(out, i, depth + 1);
    }
    if !flat {
        out.push('\n');
        out.push_str(&"  ".repeat(depth));
    }
    out.push(close);
}
