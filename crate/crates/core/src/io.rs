//! Versioned file formats and exports.
//!
//! A design file is a JSON document laid out one entry per line:
//!
//! ```text
//! {"format":"cod-design","version":1,"m":2,"p":4,"n":3,"k":3,"entries":[
//! {"row":1,"col":1,"var":"1100","sign":"+","conj":false},
//! ...
//! ]}
//! ```
//!
//! Rows and columns are 1-based, entries are sorted by `(row, col)`, and
//! omitted cells are zero.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitvec::BitVec;
use crate::design::{CodMatrix, DesignError, Entry, Sign, VarId};
use crate::equivalence::EquivOp;
use crate::parity::{Certificate, Constraint};

pub const DESIGN_FORMAT: &str = "cod-design";
pub const CERTIFICATE_FORMAT: &str = "cod-parity-certificate";
pub const EXPORT_FORMAT: &str = "cod-export";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("expected format \"{expected}\", found \"{found}\"")]
    Format {
        expected: &'static str,
        found: String,
    },
    #[error("unsupported version {0}")]
    Version(u32),
    #[error("entry {index}: {message}")]
    Entry { index: usize, message: String },
    #[error("constraint {index}: {message}")]
    Constraint { index: usize, message: String },
    #[error("declared k = {declared} but {found} distinct variables appear")]
    VariableCount { declared: usize, found: usize },
    #[error("op log line {line}: cannot parse \"{text}\"")]
    Op { line: usize, text: String },
    #[error(transparent)]
    Design(#[from] DesignError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let mut message = e.to_string();
        if let Some(at) = message.rfind(" at line ") {
            message.truncate(at);
        }
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignHeader<E> {
    format: String,
    version: u32,
    m: usize,
    p: usize,
    n: usize,
    k: usize,
    entries: Vec<E>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    row: usize,
    col: usize,
    var: String,
    sign: String,
    conj: bool,
}

fn check_header(format: &str, expected: &'static str, version: u32) -> Result<(), IoError> {
    if format != expected {
        return Err(IoError::Format {
            expected,
            found: format.to_string(),
        });
    }
    if version != FORMAT_VERSION {
        return Err(IoError::Version(version));
    }
    Ok(())
}

pub fn write_design(cod: &CodMatrix) -> String {
    let (p, n, k) = cod.params();
    let mut out = format!(
        "{{\"format\":\"{DESIGN_FORMAT}\",\"version\":{FORMAT_VERSION},\"m\":{},\"p\":{p},\"n\":{n},\"k\":{k},\"entries\":[\n",
        cod.m()
    );
    let mut lines = Vec::new();
    for r in 0..p {
        for c in 0..n {
            if let Entry::Term(t) = cod.get(r, c) {
                let raw = RawEntry {
                    row: r + 1,
                    col: c + 1,
                    var: t.var.0.to_string(),
                    sign: t.sign.to_string(),
                    conj: t.conj,
                };
                lines.push(serde_json::to_string(&raw).expect("plain struct"));
            }
        }
    }
    out.push_str(&lines.join(",\n"));
    if !lines.is_empty() {
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

fn parse_sign(s: &str) -> Option<Sign> {
    match s {
        "+" => Some(Sign::Plus),
        "-" | "\u{2212}" => Some(Sign::Minus),
        _ => None,
    }
}

pub fn read_design(text: &str) -> Result<CodMatrix, IoError> {
    let raw: DesignHeader<RawEntry> = serde_json::from_str(text)?;
    check_header(&raw.format, DESIGN_FORMAT, raw.version)?;
    let (p, n) = (raw.p, raw.n);
    let mut cells = vec![Entry::Zero; p * n];
    let mut previous: Option<(usize, usize)> = None;
    for (i, e) in raw.entries.iter().enumerate() {
        let bad = |message: String| IoError::Entry {
            index: i + 1,
            message,
        };
        if e.row == 0 || e.row > p || e.col == 0 || e.col > n {
            return Err(bad(format!(
                "cell ({}, {}) outside a {p}x{n} design",
                e.row, e.col
            )));
        }
        if previous.is_some_and(|prev| prev >= (e.row, e.col)) {
            return Err(bad(
                "entries must be sorted by (row, col) without repeats".into()
            ));
        }
        previous = Some((e.row, e.col));
        let var = BitVec::from_str(&e.var).map_err(|err| bad(format!("var: {err}")))?;
        let sign =
            parse_sign(&e.sign).ok_or_else(|| bad(format!("sign \"{}\" is not + or -", e.sign)))?;
        cells[(e.row - 1) * n + e.col - 1] = Entry::term(VarId(var), sign, e.conj);
    }
    let cod = CodMatrix::new(raw.m, p, n, cells)?;
    if cod.k() != raw.k {
        return Err(IoError::VariableCount {
            declared: raw.k,
            found: cod.k(),
        });
    }
    Ok(cod)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    format: String,
    version: u32,
    m: usize,
    constraints: Vec<RawConstraint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    from: String,
    to: String,
    parity: u8,
}

pub fn write_certificate(m: usize, cert: &Certificate) -> String {
    let mut out = format!(
        "{{\"format\":\"{CERTIFICATE_FORMAT}\",\"version\":{FORMAT_VERSION},\"m\":{m},\"constraints\":[\n"
    );
    let lines: Vec<String> = cert
        .cycle
        .iter()
        .map(|c| {
            let raw = RawConstraint {
                from: c.a.to_string(),
                to: c.b.to_string(),
                parity: c.parity as u8,
            };
            serde_json::to_string(&raw).expect("plain struct")
        })
        .collect();
    out.push_str(&lines.join(",\n"));
    if !lines.is_empty() {
        out.push('\n');
    }
    out.push_str("]}\n");
    out
}

/// Returns `m` and the certificate. Structural validity is checked separately
/// with [`Certificate::check`].
pub fn read_certificate(text: &str) -> Result<(usize, Certificate), IoError> {
    let raw: CertificateFile = serde_json::from_str(text)?;
    check_header(&raw.format, CERTIFICATE_FORMAT, raw.version)?;
    let mut cycle = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.iter().enumerate() {
        let bad = |message: String| IoError::Constraint {
            index: i + 1,
            message,
        };
        let a = BitVec::from_str(&c.from).map_err(|e| bad(format!("from: {e}")))?;
        let b = BitVec::from_str(&c.to).map_err(|e| bad(format!("to: {e}")))?;
        let parity = match c.parity {
            0 => false,
            1 => true,
            other => return Err(bad(format!("parity {other} is not 0 or 1"))),
        };
        cycle.push(Constraint::new(a, b, parity));
    }
    Ok((raw.m, Certificate { cycle }))
}

pub fn write_op_log(ops: &[EquivOp]) -> String {
    ops.iter().map(|op| format!("{op}\n")).collect()
}

/// One op per line; blank lines and lines starting with `#` are skipped.
pub fn read_op_log(text: &str) -> Result<Vec<EquivOp>, IoError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| IoError::Op {
                line: i + 1,
                text: l.to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Csv,
    Latex,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            "latex" => Ok(ExportFormat::Latex),
            _ => Err(format!("unknown export format \"{s}\"")),
        }
    }
}

/// Variables numbered `1..=k` in increasing order of their ids.
fn numbering(cod: &CodMatrix) -> BTreeMap<VarId, usize> {
    cod.variables().into_iter().zip(1..).collect()
}

fn plain_cell(e: &Entry, names: &BTreeMap<VarId, usize>) -> String {
    match e {
        Entry::Zero => "0".into(),
        Entry::Term(t) => format!(
            "{}z{}{}",
            if t.sign.is_minus() { "-" } else { "" },
            names[&t.var],
            if t.conj { "*" } else { "" }
        ),
    }
}

fn latex_cell(e: &Entry, names: &BTreeMap<VarId, usize>) -> String {
    match e {
        Entry::Zero => "0".into(),
        Entry::Term(t) => format!(
            "{}z{}_{}",
            if t.sign.is_minus() { "-" } else { "" },
            if t.conj { "^*" } else { "" },
            names[&t.var]
        ),
    }
}

pub fn export(cod: &CodMatrix, format: ExportFormat) -> String {
    let names = numbering(cod);
    let (p, n, k) = cod.params();
    match format {
        ExportFormat::Csv => cod
            .rows()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(|e| plain_cell(e, &names)).collect();
                cells.join(",") + "\n"
            })
            .collect(),
        ExportFormat::Latex => {
            let mut out = String::from("\\begin{pmatrix}\n");
            let rows: Vec<String> = cod
                .rows()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|e| latex_cell(e, &names)).collect();
                    cells.join(" & ")
                })
                .collect();
            out.push_str(&rows.join(" \\\\\n"));
            out.push_str("\n\\end{pmatrix}\n");
            out
        }
        ExportFormat::Json => {
            let mut out = format!(
                "{{\"format\":\"{EXPORT_FORMAT}\",\"version\":{FORMAT_VERSION},\"p\":{p},\"n\":{n},\"k\":{k},\"variables\":["
            );
            let ids: Vec<String> = names
                .keys()
                .map(|v| serde_json::to_string(&v.0.to_string()).expect("string"))
                .collect();
            out.push_str(&ids.join(","));
            out.push_str("],\"rows\":[\n");
            let rows: Vec<String> = cod
                .rows()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|e| plain_cell(e, &names)).collect();
                    serde_json::to_string(&cells).expect("strings")
                })
                .collect();
            out.push_str(&rows.join(",\n"));
            out.push_str("\n]}\n");
            out
        }
    }
}
