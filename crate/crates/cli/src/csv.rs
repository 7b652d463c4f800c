//! CSV ingestion: comma-separated, optional header, '.' decimal separator,
//! one observation per row, order preserved.

use std::path::Path;

use crate::CliError;

/// Column selector: a 0-based index, or a name resolved against the header.
#[derive(Debug, Clone)]
pub enum ColumnSpec {
    Index(usize),
    Name(String),
}

impl ColumnSpec {
    pub fn parse(s: &str) -> Self {
        match s.parse::<usize>() {
            Ok(i) => ColumnSpec::Index(i),
            Err(_) => ColumnSpec::Name(s.to_string()),
        }
    }
}

fn split_row(line: &str) -> Vec<&str> {
    line.split(',').map(|c| c.trim()).collect()
}

/// Reads one numeric column, in file order. A leading non-numeric row is
/// treated as the header; every later non-numeric cell is an error carrying
/// its 1-based line number.
pub fn ingest_csv(path: &Path, column: &ColumnSpec) -> Result<Vec<f64>, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = raw
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .peekable();

    let (col, mut pending): (usize, Option<(usize, &str)>) = match column {
        ColumnSpec::Name(name) => {
            let (lineno, header) = lines
                .next()
                .ok_or_else(|| CliError::validation(format!("{}: empty file", path.display())))?;
            let cells = split_row(header);
            let idx = cells.iter().position(|c| *c == name).ok_or_else(|| {
                CliError::validation(format!(
                    "column '{name}' not found in header (line {lineno}: {cells:?})"
                ))
            })?;
            (idx, None)
        }
        ColumnSpec::Index(idx) => {
            // header row is optional: keep the first row unless it fails to parse
            let first = lines.next();
            match first {
                None => {
                    return Err(CliError::validation(format!(
                        "{}: empty file",
                        path.display()
                    )))
                }
                Some((lineno, row)) => {
                    let cells = split_row(row);
                    let looks_numeric = cells
                        .get(*idx)
                        .map(|c| c.parse::<f64>().is_ok())
                        .unwrap_or(false);
                    (
                        *idx,
                        if looks_numeric {
                            Some((lineno, row))
                        } else {
                            None
                        },
                    )
                }
            }
        }
    };

    let mut values = Vec::new();
    let mut parse_cell = |lineno: usize, row: &str| -> Result<(), CliError> {
        if row.is_empty() {
            return Err(CliError::validation(format!("line {lineno}: empty row")));
        }
        let cells = split_row(row);
        let cell = cells.get(col).ok_or_else(|| {
            CliError::validation(format!("line {lineno}: only {} column(s)", cells.len()))
        })?;
        let v: f64 = cell.parse().map_err(|_| {
            CliError::validation(format!("line {lineno}: '{cell}' is not a number"))
        })?;
        if !v.is_finite() {
            return Err(CliError::validation(format!(
                "line {lineno}: non-finite value {v}"
            )));
        }
        values.push(v);
        Ok(())
    };

    if let Some((lineno, row)) = pending.take() {
        parse_cell(lineno, row)?;
    }
    for (lineno, row) in lines {
        parse_cell(lineno, row)?;
    }
    if values.is_empty() {
        return Err(CliError::validation(format!(
            "{}: no numeric rows in column",
            path.display()
        )));
    }
    Ok(values)
}
