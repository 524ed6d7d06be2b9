//! Parser for the CSV files written by this crate.

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ReadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("no column {0:?}")]
    MissingColumn(String),
    #[error("column {column:?} row {row}: {value:?} is not a number")]
    NotANumber { column: String, row: usize, value: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Metadata lines without the leading "# ".
    pub meta: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    /// Value of a "key: value" metadata line.
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find_map(|l| l.strip_prefix(key)?.strip_prefix(": "))
    }

    pub fn column_index(&self, name: &str) -> Result<usize, ReadError> {
        self.header.iter().position(|h| h == name).ok_or_else(|| ReadError::MissingColumn(name.into()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<&str>, ReadError> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    /// Parses a numeric column; empty fields become `None`.
    pub fn column_f64(&self, name: &str) -> Result<Vec<Option<f64>>, ReadError> {
        self.column(name)?
            .into_iter()
            .enumerate()
            .map(|(row, v)| {
                if v.is_empty() {
                    Ok(None)
                } else {
                    v.parse().map(Some).map_err(|_| ReadError::NotANumber { column: name.into(), row, value: v.into() })
                }
            })
            .collect()
    }
}

pub fn read_table(path: &Path) -> Result<Table, ReadError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReadError::Io { path: path.into(), source })?;
    let meta = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| l.trim_start_matches('#').trim_start().to_string())
        .collect();
    let csv_err = |source| ReadError::Csv { path: path.into(), source };
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()
        .map_err(csv_err)?;
    Ok(Table { meta, header, rows })
}
