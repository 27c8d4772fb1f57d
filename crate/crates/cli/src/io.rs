//! File input, output and the error-to-exit-code mapping.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(robust_matching::Error),
    Malformed { path: String, message: String },
    NoInput { path: String, message: String },
    Output { path: String, message: String },
}

impl From<robust_matching::Error> for CliError {
    fn from(e: robust_matching::Error) -> Self {
        CliError::Validation(e)
    }
}

impl CliError {
    /// sysexits-style codes, except validation failures which use 2.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Malformed { .. } => 65,
            CliError::NoInput { .. } => 66,
            CliError::Output { .. } => 74,
        }
    }

    /// One JSON object on a single line.
    pub fn diagnostic(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            exit_code: u8,
            #[serde(skip_serializing_if = "Option::is_none")]
            kind: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            path: Option<&'a str>,
            message: String,
        }
        let (error, kind, path, message) = match self {
            CliError::Usage(m) => ("usage", None, None, m.clone()),
            CliError::Validation(e) => ("validation", Some(variant_name(e)), None, e.to_string()),
            CliError::Malformed { path, message } => ("malformed_input", None, Some(path.as_str()), message.clone()),
            CliError::NoInput { path, message } => ("no_input", None, Some(path.as_str()), message.clone()),
            CliError::Output { path, message } => ("output", None, Some(path.as_str()), message.clone()),
        };
        let line = Line {
            error,
            exit_code: self.exit_code(),
            kind,
            path,
            message,
        };
        serde_json::to_string(&line).expect("plain strings")
    }
}

fn variant_name(e: &robust_matching::Error) -> String {
    let debug = format!("{e:?}");
    debug
        .split(|c: char| !c.is_alphanumeric())
        .next()
        .unwrap_or_default()
        .to_string()
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::NoInput {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn malformed(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Malformed {
        path: path.display().to_string(),
        message: message.into(),
    }
}

#[derive(Deserialize)]
struct SchemaProbe {
    schema: Option<serde_json::Value>,
}

/// Reads a versioned JSON document. The body type ignores the `schema` key.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    let json_error = |e: serde_json::Error| {
        malformed(
            path,
            format!("{} (line {}, column {})", strip_position(&e.to_string()), e.line(), e.column()),
        )
    };
    let probe: SchemaProbe = serde_json::from_str(&text).map_err(json_error)?;
    match probe.schema {
        Some(serde_json::Value::Number(v)) if v.as_u64() == Some(SCHEMA_VERSION as u64) => {}
        Some(other) => {
            return Err(malformed(
                path,
                format!("unsupported schema {other} (line 1, column 1); expected {SCHEMA_VERSION}"),
            ))
        }
        None => {
            return Err(malformed(
                path,
                format!("missing top-level \"schema\": {SCHEMA_VERSION} (line 1, column 1)"),
            ))
        }
    }
    serde_json::from_str(&text).map_err(json_error)
}

/// serde_json appends " at line L column C"; the caller re-adds it uniformly.
fn strip_position(message: &str) -> &str {
    match message.rfind(" at line ") {
        Some(i) => &message[..i],
        None => message,
    }
}

/// Reads a TOML document; an optional `schema` key must equal 1.
pub fn read_toml<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    let position = |span: Option<std::ops::Range<usize>>| {
        let offset = span.map_or(0, |r| r.start);
        line_column(&text, offset)
    };
    let value: toml::Table = toml::from_str(&text).map_err(|e| {
        let (line, col) = position(e.span());
        malformed(path, format!("{} (line {line}, column {col})", e.message()))
    })?;
    if let Some(v) = value.get("schema") {
        if v.as_integer() != Some(SCHEMA_VERSION as i64) {
            return Err(malformed(path, format!("unsupported schema {v} (line 1, column 1)")));
        }
    }
    toml::from_str(&text).map_err(|e| {
        let (line, col) = position(e.span());
        malformed(path, format!("{} (line {line}, column {col})", e.message()))
    })
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
    (line, col)
}

/// Numeric CSV with a header row. Returns header and rows; the column in an
/// error message is the 1-based field index.
pub fn read_numeric_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>), CliError> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(path, format!("{e} (line 1, column 1)")))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(path, format!("{e} (line {line}, column 1)"))
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(i, field)| {
                field.parse::<f64>().map_err(|_| {
                    malformed(path, format!("expected a number, found {field:?} (line {line}, column {})", i + 1))
                })
            })
            .collect::<Result<Vec<f64>, CliError>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

#[derive(Serialize)]
struct Versioned<'a, T> {
    schema: u32,
    #[serde(flatten)]
    body: &'a T,
}

pub fn json_document<T: Serialize>(body: &T) -> String {
    let mut s = serde_json::to_string_pretty(&Versioned {
        schema: SCHEMA_VERSION,
        body,
    })
    .expect("serializable output");
    s.push('\n');
    s
}

/// Builds CSV text from a header and already formatted rows.
pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// Shortest round-trip formatting, exponent form for very small or large
/// magnitudes; non-finite values print as `inf`/`NaN`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Two-space aligned columns.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| CliError::Output {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Output {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                })
        }
    }
}

pub fn announce_seed(seed: u64) {
    eprintln!("seed: {seed}");
}

pub fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Usage(format!("{command} does not support --format {format:?}").to_lowercase())
}
