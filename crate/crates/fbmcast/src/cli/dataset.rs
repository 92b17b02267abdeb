//! CSV ingestion: one value column or `index,value`, header optional,
//! blank lines ignored, decimal points only.

use std::path::{Path, PathBuf};

use super::CliError;
use crate::model::Series;

/// A named series loaded from disk.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub values: Vec<f64>,
    pub source: PathBuf,
}

impl Dataset {
    pub fn series(&self) -> Result<Series, CliError> {
        Series::new(self.values.clone()).map_err(CliError::from)
    }
}

/// Loads a dataset, reporting parse failures with their line number.
pub fn load_dataset(path: &Path) -> Result<Dataset, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut values = Vec::new();
    let mut saw_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match parse_line(line) {
            Some(value) => {
                values.push(value);
                saw_data = true;
            }
            None if !saw_data => {
                // A single leading non-numeric line is a header.
                if values.is_empty() && !line.is_empty() && idx == first_content_line(&text) {
                    continue;
                }
                return Err(parse_error(path, idx + 1, line));
            }
            None => return Err(parse_error(path, idx + 1, line)),
        }
    }
    if values.is_empty() {
        return Err(CliError::Parse {
            path: path.display().to_string(),
            line: 1,
            message: "no data rows found".into(),
        });
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "series".into());
    Ok(Dataset {
        name,
        values,
        source: path.to_path_buf(),
    })
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| !l.trim().is_empty())
        .unwrap_or(0)
}

/// Parses `value` or `index,value`; returns `None` when not numeric.
fn parse_line(line: &str) -> Option<f64> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    match fields.as_slice() {
        [value] => value.parse().ok(),
        [index, value] => {
            // The index column must at least look numeric for a data row.
            index.parse::<f64>().ok()?;
            value.parse().ok()
        }
        _ => None,
    }
}

fn parse_error(path: &Path, line: usize, content: &str) -> CliError {
    CliError::Parse {
        path: path.display().to_string(),
        line,
        message: format!("cannot parse '{content}' as a data row"),
    }
}
