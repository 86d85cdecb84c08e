//! Plain-text observation files.
//!
//! One observation per line. Commas and whitespace both separate values, so
//! single-column CSV and space-separated dumps load the same way. A first
//! data line containing anything non-numeric is taken as a header. Lines
//! starting with `#` are comments.

use std::path::Path;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub values: Vec<f64>,
    pub header: Option<String>,
}

pub fn read_observations(path: &Path) -> CliResult<Observations> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_observations(&text)
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
}

pub fn parse_observations(text: &str) -> CliResult<Observations> {
    let mut values = Vec::new();
    let mut header = None;
    let mut seen_data = false;
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = tokens(trimmed).map(str::parse::<f64>).collect();
        if parsed.iter().any(|r| r.is_err()) {
            if !seen_data && header.is_none() {
                header = Some(trimmed.to_string());
                continue;
            }
            return Err(CliError::Parse(format!(
                "line {}: not a number: {trimmed:?}",
                idx + 1
            )));
        }
        for v in parsed.into_iter().flatten() {
            if !v.is_finite() {
                return Err(CliError::Parse(format!("line {}: non-finite value", idx + 1)));
            }
            values.push(v);
        }
        seen_data = true;
    }
    if values.is_empty() {
        return Err(CliError::Parse("no observations found".into()));
    }
    Ok(Observations { values, header })
}
