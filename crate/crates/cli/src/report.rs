use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use substrata::Error;

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_UNCERTIFIED: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { EXIT_INPUT } else { EXIT_PRECONDITION },
            message: e.to_string(),
        }
    }
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    #[serde(rename = "MATCH")]
    Match,
    #[serde(rename = "MISMATCH")]
    Mismatch,
}

#[derive(Serialize, Debug)]
pub struct Check {
    pub check: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize, Debug)]
pub struct RunReport {
    pub command: String,
    pub inputs: Vec<Input>,
    pub result: Value,
    pub verification: Vec<Check>,
    pub elapsed_ms: u128,
}

impl RunReport {
    pub fn mismatched(&self) -> bool {
        self.verification.iter().any(|c| c.status == Status::Mismatch)
    }

    pub fn check(&mut self, name: impl Into<String>, ok: bool, detail: Option<String>) {
        self.verification.push(Check {
            check: name.into(),
            status: if ok { Status::Match } else { Status::Mismatch },
            detail: if ok { None } else { detail },
        });
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Value::Object(map) = &self.result {
            for (k, v) in map {
                render(&mut out, k, v, 0);
            }
        }
        for c in &self.verification {
            match (&c.status, &c.detail) {
                (Status::Match, _) => writeln!(out, "MATCH {}", c.check),
                (Status::Mismatch, Some(d)) => writeln!(out, "MISMATCH {}: {d}", c.check),
                (Status::Mismatch, None) => writeln!(out, "MISMATCH {}", c.check),
            }
            .unwrap();
        }
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn render(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    if let Some(s) = scalar(v) {
        writeln!(out, "{pad}{key}: {s}").unwrap();
        return;
    }
    match v {
        Value::Array(items) if items.is_empty() => writeln!(out, "{pad}{key}: (none)").unwrap(),
        Value::Array(items) => {
            writeln!(out, "{pad}{key}:").unwrap();
            for item in items {
                match scalar(item) {
                    Some(s) => writeln!(out, "{pad}  {s}").unwrap(),
                    None => render_item(out, item, indent + 1),
                }
            }
        }
        Value::Object(map) => {
            writeln!(out, "{pad}{key}:").unwrap();
            for (k, x) in map {
                render(out, k, x, indent + 1);
            }
        }
        _ => unreachable!(),
    }
}

fn render_item(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            let mut first = true;
            for (k, x) in map {
                let mut block = String::new();
                render(&mut block, k, x, indent + 1);
                let block = block.trim_start();
                if first {
                    write!(out, "{pad}- {block}").unwrap();
                    first = false;
                } else {
                    write!(out, "{pad}  {block}").unwrap();
                }
            }
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(|x| scalar(x).unwrap_or_else(|| x.to_string())).collect();
            writeln!(out, "{pad}- [{}]", parts.join(", ")).unwrap();
        }
        other => writeln!(out, "{pad}- {}", scalar(other).unwrap_or_default()).unwrap(),
    }
}

pub fn read_input(path: &Path, inputs: &mut Vec<Input>) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    inputs.push(Input {
        path: path.display().to_string(),
        sha256: format!("{:x}", Sha256::digest(&bytes)),
    });
    String::from_utf8(bytes).map_err(|_| Failure::input(format!("{}: not UTF-8", path.display())))
}
