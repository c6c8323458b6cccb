//! Thin helpers over the `csv` crate shared by the loaders.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{ScenarioError, TimeGridError, TopologyError};

#[derive(Debug)]
pub(crate) enum CsvFail {
    Io(PathBuf, std::io::Error),
    Schema { file: String, row: u64, msg: String },
}

fn file_label(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub(crate) fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CsvFail> {
    let file = File::open(path).map_err(|e| CsvFail::Io(path.to_path_buf(), e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut out = Vec::new();
    for rec in rdr.deserialize() {
        let row: T = rec.map_err(|e| {
            let row = e.position().map(|p| p.line()).unwrap_or(0);
            CsvFail::Schema {
                file: file_label(path),
                row,
                msg: e.to_string(),
            }
        })?;
        out.push(row);
    }
    Ok(out)
}

pub(crate) fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CsvFail> {
    let io = |e: std::io::Error| CsvFail::Io(path.to_path_buf(), e);
    let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
    for r in rows {
        w.serialize(r).map_err(|e| io(e.into()))?;
    }
    w.flush().map_err(io)
}

/// Writes a header-only file when `rows` is empty so the schema stays visible.
pub(crate) fn write_rows_or_header<T: Serialize>(
    path: &Path,
    rows: &[T],
    header: &[&str],
) -> Result<(), CsvFail> {
    if rows.is_empty() {
        let io = |e: std::io::Error| CsvFail::Io(path.to_path_buf(), e);
        let mut w = csv::Writer::from_path(path).map_err(|e| io(e.into()))?;
        w.write_record(header).map_err(|e| io(e.into()))?;
        return w.flush().map_err(io);
    }
    write_rows(path, rows)
}

macro_rules! from_fail {
    ($t:ty) => {
        impl From<CsvFail> for $t {
            fn from(f: CsvFail) -> Self {
                match f {
                    CsvFail::Io(path, source) => Self::Io { path, source },
                    CsvFail::Schema { file, row, msg } => Self::SchemaViolation { file, row, msg },
                }
            }
        }
    };
}

from_fail!(TopologyError);
from_fail!(TimeGridError);
from_fail!(ScenarioError);

/// Splits a `;`-separated list cell.
pub(crate) fn split_list(s: &str) -> Vec<String> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}
