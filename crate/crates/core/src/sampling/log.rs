//! Sample logs: CSV with columns `pulse_index,trigger_pattern,input_pattern,output_pattern`.
//!
//! Patterns use the compact one-digit-per-mode form. Lines starting with `#`
//! carry provenance and are skipped on read.

use std::fmt::Write;

use super::SampleRecord;
use crate::error::{Error, Result};

pub const COLUMNS: &str = "pulse_index,trigger_pattern,input_pattern,output_pattern";

pub fn format_sample_log(records: &[SampleRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + COLUMNS.len() + 1);
    out.push_str(COLUMNS);
    out.push('\n');
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.pulse_index, r.trigger_pattern, r.input_pattern, r.output_pattern);
    }
    out
}

pub fn parse_sample_log(text: &str) -> Result<Vec<SampleRecord>> {
    let mut records = Vec::new();
    let mut saw_columns = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_columns {
            if line != COLUMNS {
                return Err(Error::Parse(format!("line {}: expected column header {COLUMNS:?}", lineno + 1)));
            }
            saw_columns = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields, found {}", lineno + 1, fields.len())));
        }
        let pulse_index =
            fields[0].parse().map_err(|e| Error::Parse(format!("line {}: pulse index: {e}", lineno + 1)))?;
        records.push(SampleRecord {
            pulse_index,
            trigger_pattern: fields[1].parse()?,
            input_pattern: fields[2].parse()?,
            output_pattern: fields[3].parse()?,
        });
    }
    if !saw_columns {
        return Err(Error::Parse("sample log has no column header".into()));
    }
    Ok(records)
}
