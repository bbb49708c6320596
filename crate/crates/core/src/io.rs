//! Parsing and emission of the external file formats: gain-table CSV and
//! intensity lists. These accept untrusted input; the fuzz targets under
//! `fuzz/` drive them directly.
//!
//! Gain CSV dialect: comma separators, '.' decimal point, '#' comment lines,
//! one optional header row `outcome,k,l,q`. Each data row names a detector
//! outcome ("10" or "01"), the intensity indices k and l, and the observed
//! gain. A file carries one complete K x K table per outcome present.

use std::fmt::Write as _;

use thiserror::Error;

use crate::types::{GainTable, Outcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: expected {expected} comma-separated fields")]
    FieldCount { line: usize, expected: usize },
    #[error("line {line}: {what} `{text}` is not valid")]
    Field {
        line: usize,
        what: &'static str,
        text: String,
    },
    #[error("line {line}: gain {value} outside [0, 1]")]
    GainRange { line: usize, value: f64 },
    #[error("line {line}: duplicate entry for outcome {outcome}, ({k},{l})")]
    Duplicate {
        line: usize,
        outcome: String,
        k: usize,
        l: usize,
    },
    #[error("outcome {outcome}: table is not a complete KxK square (got {got} entries)")]
    Incomplete { outcome: String, got: usize },
    #[error("outcome {outcome}: intensity index {index} exceeds the table size {size}")]
    IndexRange {
        outcome: String,
        index: usize,
        size: usize,
    },
    #[error("no gain rows found")]
    Empty,
    #[error("intensity list must hold 2..=4 values, got {0}")]
    IntensityCount(usize),
    #[error("intensity `{0}` is not a finite nonnegative number")]
    Intensity(String),
}

/// Parse a gain-table CSV into one table per outcome present, in outcome
/// order (ClickC first). The table size is inferred from the largest index;
/// every outcome must form a complete square.
pub fn parse_gains_csv(text: &str) -> Result<Vec<GainTable>, ParseError> {
    let mut rows: Vec<(usize, Outcome, usize, usize, f64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(ParseError::FieldCount { line, expected: 4 });
        }
        if fields[0].eq_ignore_ascii_case("outcome") {
            continue; // header row
        }
        let outcome = Outcome::from_label(fields[0]).map_err(|_| ParseError::Field {
            line,
            what: "outcome",
            text: fields[0].to_string(),
        })?;
        let k: usize = fields[1].parse().map_err(|_| ParseError::Field {
            line,
            what: "index k",
            text: fields[1].to_string(),
        })?;
        let l: usize = fields[2].parse().map_err(|_| ParseError::Field {
            line,
            what: "index l",
            text: fields[2].to_string(),
        })?;
        let q: f64 = fields[3].parse().map_err(|_| ParseError::Field {
            line,
            what: "gain",
            text: fields[3].to_string(),
        })?;
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(ParseError::GainRange { line, value: q });
        }
        if k > 16 || l > 16 {
            return Err(ParseError::IndexRange {
                outcome: outcome.label().to_string(),
                index: k.max(l),
                size: 16,
            });
        }
        rows.push((line, outcome, k, l, q));
    }
    if rows.is_empty() {
        return Err(ParseError::Empty);
    }

    let mut tables = Vec::new();
    for outcome in Outcome::BOTH {
        let mut entries = std::collections::BTreeMap::new();
        for &(line, o, k, l, v) in &rows {
            if o != outcome {
                continue;
            }
            if entries.insert((k, l), v).is_some() {
                return Err(ParseError::Duplicate {
                    line,
                    outcome: outcome.label().to_string(),
                    k,
                    l,
                });
            }
        }
        if entries.is_empty() {
            continue;
        }
        let size = entries.keys().map(|&(k, l)| k.max(l)).max().unwrap() + 1;
        if entries.len() != size * size {
            return Err(ParseError::Incomplete {
                outcome: outcome.label().to_string(),
                got: entries.len(),
            });
        }
        let mut q = vec![0.0; size * size];
        for (&(k, l), &v) in &entries {
            q[k * size + l] = v;
        }
        // a complete square with no duplicates fills every slot
        let table = GainTable::new(outcome, size, q).expect("validated rows");
        tables.push(table);
    }
    Ok(tables)
}

/// Emit gain tables in the same CSV dialect (17 significant digits, stable
/// byte-for-byte).
pub fn format_gains_csv(tables: &[GainTable]) -> String {
    let mut out = String::from("outcome,k,l,q\n");
    for t in tables {
        for k in 0..t.size() {
            for l in 0..t.size() {
                writeln!(out, "{},{},{},{:.16e}", t.outcome.label(), k, l, t.get(k, l)).unwrap();
            }
        }
    }
    out
}

/// Parse a comma-separated intensity list such as "1e-1,1e-2,1e-3".
pub fn parse_intensity_list(text: &str) -> Result<Vec<f64>, ParseError> {
    let vals: Vec<&str> = text.split(',').map(str::trim).collect();
    if !(2..=4).contains(&vals.len()) {
        return Err(ParseError::IntensityCount(vals.len()));
    }
    vals.iter()
        .map(|s| {
            let v: f64 = s
                .parse()
                .map_err(|_| ParseError::Intensity(s.to_string()))?;
            if !v.is_finite() || v < 0.0 {
                return Err(ParseError::Intensity(s.to_string()));
            }
            Ok(v)
        })
        .collect()
}
