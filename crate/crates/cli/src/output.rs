use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

use crate::Failure;

/// Version of the JSON envelope. Bump on any incompatible change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Result of one command, renderable in every output format.
pub trait Report: Serialize {
    fn passed(&self) -> bool {
        true
    }

    fn text(&self) -> String;

    fn csv(&self) -> Result<String, Failure>;
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    command: &'a str,
    seed: u64,
    passed: bool,
    result: &'a T,
}

/// Writes `rows` under an explicit header, so an empty table still has one.
pub fn csv_table<T: Serialize>(header: &[&str], rows: &[T]) -> Result<String, Failure> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Internal(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Internal(e.to_string()))
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Internal(format!("csv: {e}"))
}

pub fn render<R: Report>(report: &R, command: &str, seed: u64, format: Format) -> Result<String, Failure> {
    Ok(match format {
        Format::Text => {
            let mut s = report.text();
            if !s.ends_with('\n') {
                s.push('\n');
            }
            s
        }
        Format::Csv => report.csv()?,
        Format::Json => {
            let env = Envelope { schema_version: SCHEMA_VERSION, command, seed, passed: report.passed(), result: report };
            let mut s = serde_json::to_string_pretty(&env).map_err(|e| Failure::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
    })
}

pub fn write_out(body: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        a: i64,
        note: Option<String>,
    }

    #[test]
    fn empty_csv_keeps_header() {
        assert_eq!(csv_table::<Row>(&["a", "note"], &[]).unwrap(), "a,note\n");
    }

    #[test]
    fn csv_quotes_and_blanks() {
        let rows = [Row { a: -1, note: None }, Row { a: 2, note: Some("x,y".into()) }];
        assert_eq!(csv_table(&["a", "note"], &rows).unwrap(), "a,note\n-1,\n2,\"x,y\"\n");
    }
}
