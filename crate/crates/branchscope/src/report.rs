//! CSV serialization for traces, cross-check mismatch tables, and aggregated
//! results.
//!
//! All files are plain UTF-8 CSV with fixed headers; every field is a bare
//! identifier or a number, so no quoting is ever needed. Branching factors
//! are rounded to 4 decimal places on output.

use std::io::{Read, Write};

use crate::trace::{CrossCheckRecord, EnumerationRecord};

pub const TRACE_HEADER: &[&str] = &["env", "frame", "new_states", "cumulative_states"];
pub const MISMATCH_HEADER: &[&str] = &[
    "env",
    "states_bfs",
    "states_id",
    "frames_bfs",
    "frames_id",
    "b_bfs",
    "b_id",
    "b_diff",
];
pub const RESULTS_HEADER: &[&str] = &["env", "frames", "states", "branching_factor"];

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("expected header '{expected}', got '{actual}'")]
    Header { expected: String, actual: String },
    #[error("row {row}: {message}")]
    Malformed { row: usize, message: String },
}

/// One parsed line of a trace CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub env: String,
    pub record: EnumerationRecord,
}

/// One line of the aggregated results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub env: String,
    pub frames: u32,
    pub states: u64,
    pub branching_factor: f64,
}

pub fn format_branching(b: f64) -> String {
    format!("{b:.4}")
}

pub fn write_trace(out: impl Write, env: &str, records: &[EnumerationRecord]) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(TRACE_HEADER)?;
    for record in records {
        writer.write_record([
            env,
            &record.frame.to_string(),
            &record.new_states.to_string(),
            &record.cumulative_states.to_string(),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trace(input: impl Read) -> Result<Vec<TraceRow>, ReportError> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, TRACE_HEADER)?;
    let mut rows = Vec::new();
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        let row = index + 1;
        if record.len() != TRACE_HEADER.len() {
            return Err(ReportError::Malformed {
                row,
                message: format!("expected {} fields, got {}", TRACE_HEADER.len(), record.len()),
            });
        }
        let env = record[0].to_string();
        if env.is_empty() {
            return Err(ReportError::Malformed {
                row,
                message: "empty env name".into(),
            });
        }
        rows.push(TraceRow {
            env,
            record: EnumerationRecord {
                frame: parse_field(row, "frame", &record[1])?,
                new_states: parse_field(row, "new_states", &record[2])?,
                cumulative_states: parse_field(row, "cumulative_states", &record[3])?,
            },
        });
    }
    Ok(rows)
}

/// Groups trace rows by environment in first-seen order, checking that each
/// environment's records form a well-formed trace (frames contiguous from 0,
/// cumulative counts additive).
pub fn group_traces(rows: &[TraceRow]) -> Result<Vec<(String, Vec<EnumerationRecord>)>, ReportError> {
    let mut groups: Vec<(String, Vec<EnumerationRecord>)> = Vec::new();
    for row in rows {
        match groups.iter_mut().find(|(env, _)| *env == row.env) {
            Some((_, records)) => records.push(row.record),
            None => groups.push((row.env.clone(), vec![row.record])),
        }
    }
    for (env, records) in &groups {
        let mut cumulative = 0u64;
        for (offset, record) in records.iter().enumerate() {
            if record.frame as usize != offset {
                return Err(ReportError::Malformed {
                    row: offset + 1,
                    message: format!("trace for '{env}' skips to frame {}", record.frame),
                });
            }
            cumulative += record.new_states;
            if record.cumulative_states != cumulative {
                return Err(ReportError::Malformed {
                    row: offset + 1,
                    message: format!(
                        "trace for '{env}' reports cumulative {} but rows sum to {cumulative}",
                        record.cumulative_states
                    ),
                });
            }
        }
    }
    Ok(groups)
}

pub fn write_results(out: impl Write, rows: Vec<ResultRow>) -> Result<(), ReportError> {
    let mut rows = rows;
    rows.sort_by(|a, b| a.env.cmp(&b.env));
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(RESULTS_HEADER)?;
    for row in &rows {
        writer.write_record([
            row.env.as_str(),
            &row.frames.to_string(),
            &row.states.to_string(),
            &format_branching(row.branching_factor),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_mismatches(out: impl Write, records: &[CrossCheckRecord]) -> Result<(), ReportError> {
    let mut records: Vec<&CrossCheckRecord> = records.iter().collect();
    records.sort_by(|a, b| {
        b.b_diff
            .total_cmp(&a.b_diff)
            .then_with(|| a.env_name.cmp(&b.env_name))
    });
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(MISMATCH_HEADER)?;
    for record in records {
        writer.write_record([
            record.env_name.as_str(),
            &record.states_bfs.to_string(),
            &record.states_id.to_string(),
            &record.frames_bfs.to_string(),
            &record.frames_id.to_string(),
            &format_branching(record.b_bfs),
            &format_branching(record.b_id),
            &format_branching(record.b_diff),
        ])?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), ReportError> {
    let actual = reader.headers()?;
    if actual.iter().ne(expected.iter().copied()) {
        return Err(ReportError::Header {
            expected: expected.join(","),
            actual: actual.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(row: usize, name: &str, raw: &str) -> Result<T, ReportError> {
    raw.parse().map_err(|_| ReportError::Malformed {
        row,
        message: format!("{name} field '{raw}' is not a number"),
    })
}
