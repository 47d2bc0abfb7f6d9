//! Test-suite text formats.
//!
//! * `plain`: header `N k t`, then `N` lines of `k` space-separated values.
//! * `csv`: header `p0,p1,...`, then one comma-separated row per line.
//! * `json-lines`: one JSON array per row.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{ModelError, SystemModel, TestSuite, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SuiteFormat {
    #[default]
    Plain,
    Csv,
    JsonLines,
}

impl FromStr for SuiteFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(SuiteFormat::Plain),
            "csv" => Ok(SuiteFormat::Csv),
            "json-lines" | "jsonl" => Ok(SuiteFormat::JsonLines),
            other => Err(format!("unknown suite format {other:?}")),
        }
    }
}

impl fmt::Display for SuiteFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteFormat::Plain => "plain",
            SuiteFormat::Csv => "csv",
            SuiteFormat::JsonLines => "json-lines",
        })
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("row {row}: {source}")]
    Row {
        row: usize,
        #[source]
        source: ModelError,
    },
}

pub fn write_suite(suite: &TestSuite, format: SuiteFormat) -> String {
    let mut out = String::new();
    let join = |row: &[Value], sep: &str| {
        row.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(sep)
    };
    match format {
        SuiteFormat::Plain => {
            out.push_str(&format!(
                "{} {} {}\n",
                suite.len(),
                suite.parameters(),
                suite.strength()
            ));
            for row in suite.rows() {
                out.push_str(&join(row, " "));
                out.push('\n');
            }
        }
        SuiteFormat::Csv => {
            let header: Vec<String> = (0..suite.parameters()).map(|p| format!("p{p}")).collect();
            out.push_str(&header.join(","));
            out.push('\n');
            for row in suite.rows() {
                out.push_str(&join(row, ","));
                out.push('\n');
            }
        }
        SuiteFormat::JsonLines => {
            for row in suite.rows() {
                out.push_str(&serde_json::to_string(row.values()).expect("plain integers"));
                out.push('\n');
            }
        }
    }
    out
}

/// Reads a suite in any of the three formats, detected from the first
/// non-blank line, and validates every row against `model`.
pub fn read_suite(text: &str, model: &SystemModel) -> Result<TestSuite, SuiteError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let syntax = |line: usize, message: String| SuiteError::Syntax { line, message };

    let mut rows: Vec<Vec<Value>> = Vec::new();
    match lines.next() {
        None => {}
        Some((line, first)) if first.starts_with('[') => {
            for (line, l) in std::iter::once((line, first)).chain(lines) {
                rows.push(serde_json::from_str(l).map_err(|e| syntax(line, e.to_string()))?);
            }
        }
        Some((_, first)) if first.contains(',') => {
            for (line, l) in lines {
                rows.push(parse_values(l.split(','), line)?);
            }
        }
        Some((line, first)) => {
            let header = parse_values(first.split_whitespace(), line)?;
            let [n, k, t] = header[..] else {
                return Err(syntax(line, "expected header \"N k t\"".into()));
            };
            if k as usize != model.parameters() || t as usize != model.strength() {
                return Err(syntax(
                    line,
                    format!(
                        "suite is for k={k}, t={t}; model has k={}, t={}",
                        model.parameters(),
                        model.strength()
                    ),
                ));
            }
            for (line, l) in lines {
                rows.push(parse_values(l.split_whitespace(), line)?);
            }
            if rows.len() != n as usize {
                return Err(syntax(
                    line,
                    format!("header declares {n} rows, found {}", rows.len()),
                ));
            }
        }
    }

    let mut suite = TestSuite::new(model);
    for (i, row) in rows.into_iter().enumerate() {
        let tc = crate::model::TestCase::new(model, row)
            .map_err(|source| SuiteError::Row { row: i, source })?;
        suite.push(tc);
    }
    Ok(suite)
}

fn parse_values<'a>(
    parts: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<Vec<Value>, SuiteError> {
    parts
        .map(|p| {
            p.trim().parse().map_err(|_| SuiteError::Syntax {
                line,
                message: format!("expected integer, found {p:?}"),
            })
        })
        .collect()
}
