//! Data files for `overlap-t test`.
//!
//! A CSV file with header `x1,x2`. A row with both fields is a pair, a row
//! with one field is an independent observation of that sample, and a blank
//! field is missing.
//!
//! ```text
//! x1,x2
//! 1.2,1.5
//! 0.7,
//! ,2.4
//! ```

use std::io::Read;
use std::path::Path;

use overlap_core::OverlappingSamples;

use crate::error::{CliError, Result};

pub fn read_data_file(path: &Path) -> Result<OverlappingSamples> {
    let file = std::fs::File::open(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_data(file, path)
}

/// Parses the two-column format; `origin` only labels error messages.
pub fn parse_data<R: Read>(input: R, origin: &Path) -> Result<OverlappingSamples> {
    let err = |line: u64, msg: String| CliError::Parse {
        path: origin.to_path_buf(),
        line,
        msg,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let header = reader.headers().map_err(|e| err(1, e.to_string()))?;
    if header.len() != 2 || &header[0] != "x1" || &header[1] != "x2" {
        return Err(err(1, format!("expected header `x1,x2`, found `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }

    let (mut a, mut b, mut pairs) = (Vec::new(), Vec::new(), Vec::new());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<Option<f64>> {
            let raw = &record[i];
            if raw.is_empty() {
                return Ok(None);
            }
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                _ => Err(err(line, format!("`{raw}` is not a finite number"))),
            }
        };
        match (field(0)?, field(1)?) {
            (Some(x1), Some(x2)) => pairs.push((x1, x2)),
            (Some(x1), None) => a.push(x1),
            (None, Some(x2)) => b.push(x2),
            (None, None) => return Err(err(line, "row has no values".into())),
        }
    }

    if a.is_empty() && b.is_empty() && pairs.is_empty() {
        return Err(err(1, "no observations".into()));
    }
    OverlappingSamples::new(a, b, pairs).map_err(|e| err(0, e.to_string()))
}
