use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CampaignResult;
use crate::error::{Result, RfdaError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "snake_case")]
pub enum ColumnData {
    Float(Vec<f64>),
    Int(Vec<i64>),
    Bool(Vec<bool>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Float(v) => v.len(),
            ColumnData::Int(v) => v.len(),
            ColumnData::Bool(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn cell(&self, i: usize) -> String {
        match self {
            ColumnData::Float(v) => format_float(v[i]),
            ColumnData::Int(v) => v[i].to_string(),
            ColumnData::Bool(v) => v[i].to_string(),
            ColumnData::Text(v) => v[i].clone(),
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

/// Named, column-oriented dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
}

impl Table {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            columns: vec![],
        }
    }

    fn push(mut self, name: &str, data: ColumnData) -> Self {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.data.len(), data.len(), "column `{name}` length differs in table `{}`", self.name);
        }
        self.columns.push(Column {
            name: name.to_string(),
            data,
        });
        self
    }

    pub fn float(self, name: &str, v: Vec<f64>) -> Self {
        self.push(name, ColumnData::Float(v))
    }

    pub fn int(self, name: &str, v: Vec<i64>) -> Self {
        self.push(name, ColumnData::Int(v))
    }

    pub fn boolean(self, name: &str, v: Vec<bool>) -> Self {
        self.push(name, ColumnData::Bool(v))
    }

    pub fn text(self, name: &str, v: Vec<String>) -> Self {
        self.push(name, ColumnData::Text(v))
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        self.columns.iter().find(|c| c.name == name).map(|c| &c.data)
    }

    pub fn floats(&self, name: &str) -> Option<&[f64]> {
        match self.column(name)? {
            ColumnData::Float(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RfdaError + '_ {
    move |source| RfdaError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv(table: &Table, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| RfdaError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    let flush_err = |e: csv::Error| RfdaError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    w.write_record(table.columns.iter().map(|c| c.name.as_str()))
        .map_err(flush_err)?;
    for i in 0..table.n_rows() {
        w.write_record(table.columns.iter().map(|c| c.data.cell(i)))
            .map_err(flush_err)?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| RfdaError::Config(e.to_string()))?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}

/// Write one file per table plus `metadata.json` and `timing.json` into
/// `dir`. Everything except `timing.json` is a pure function of the config.
pub fn emit(result: &CampaignResult, dir: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = vec![];
    for table in &result.tables {
        let path = match format {
            OutputFormat::Csv => {
                let p = dir.join(format!("{}.csv", table.name));
                write_csv(table, &p)?;
                p
            }
            OutputFormat::Json => {
                let p = dir.join(format!("{}.json", table.name));
                write_json(table, &p)?;
                p
            }
        };
        written.push(path);
    }
    let meta = dir.join("metadata.json");
    write_json(&result.metadata, &meta)?;
    written.push(meta);
    let timing = dir.join("timing.json");
    write_json(&serde_json::json!({ "wall_time_s": result.wall_time_s }), &timing)?;
    written.push(timing);
    Ok(written)
}
