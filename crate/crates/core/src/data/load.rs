use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::ser::{Serialize, SerializeMap, Serializer};
use serde_json::{json, Value};

use super::{Column, ColumnType, DataValue, Dataset};
use crate::diagnostic::{index_path, key_path, Code, Diagnostic};

/// Where a spec's rows come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSourceRef {
    /// `data.values`: an array of flat objects embedded in the spec.
    Inline(Vec<Value>),
    Csv(PathBuf),
    Json(PathBuf),
}

impl DataSourceRef {
    /// Picks CSV or JSON from the file extension; anything but `.csv` is read as JSON.
    pub fn from_path(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let is_csv = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            DataSourceRef::Csv(path)
        } else {
            DataSourceRef::Json(path)
        }
    }

    /// Resolves a relative file path against `base` (usually the spec's directory).
    pub fn relative_to(&self, base: &Path) -> Self {
        let join = |p: &PathBuf| if p.is_relative() { base.join(p) } else { p.clone() };
        match self {
            DataSourceRef::Inline(v) => DataSourceRef::Inline(v.clone()),
            DataSourceRef::Csv(p) => DataSourceRef::Csv(join(p)),
            DataSourceRef::Json(p) => DataSourceRef::Json(join(p)),
        }
    }
}

impl Serialize for DataSourceRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        match self {
            DataSourceRef::Inline(values) => map.serialize_entry("values", values)?,
            DataSourceRef::Csv(p) => {
                map.serialize_entry("url", &p.to_string_lossy())?;
                map.serialize_entry("format", &json!({"type": "csv"}))?;
            }
            DataSourceRef::Json(p) => {
                map.serialize_entry("url", &p.to_string_lossy())?;
                map.serialize_entry("format", &json!({"type": "json"}))?;
            }
        }
        map.end()
    }
}

pub fn load_dataset(source: &DataSourceRef) -> Result<Dataset, Diagnostic> {
    match source {
        DataSourceRef::Inline(values) => {
            dataset_from_records(values).map_err(|d| d.under("data.values"))
        }
        DataSourceRef::Csv(path) => {
            let file = fs::File::open(path).map_err(|e| unreadable(path, e))?;
            dataset_from_csv(file).map_err(|d| d.under("data"))
        }
        DataSourceRef::Json(path) => {
            let text = fs::read_to_string(path).map_err(|e| unreadable(path, e))?;
            dataset_from_json(&text).map_err(|d| d.under("data"))
        }
    }
}

fn unreadable(path: &Path, err: std::io::Error) -> Diagnostic {
    Diagnostic::new(
        Code::E_DATA_UNREADABLE,
        "data",
        format!("cannot read {}: {err}", path.display()),
    )
}

/// Parses a JSON array of flat objects.
pub fn dataset_from_json(text: &str) -> Result<Dataset, Diagnostic> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Diagnostic::new(Code::E_DATA_MALFORMED, "", format!("invalid JSON: {e}"))
            .with_position(e.line(), e.column())
    })?;
    match value {
        Value::Array(records) => dataset_from_records(&records),
        _ => Err(Diagnostic::new(
            Code::E_DATA_MALFORMED,
            "",
            "expected a JSON array of objects",
        )),
    }
}

/// RFC 4180 CSV with a header row. Empty cells become nulls.
pub fn dataset_from_csv(reader: impl Read) -> Result<Dataset, Diagnostic> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Diagnostic::new(Code::E_NO_COLUMNS, "", "CSV header has no columns"));
    }
    let mut cells = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        cells.push(
            record
                .iter()
                .map(|c| if c.is_empty() { Cell::Null } else { Cell::Str(c.to_string()) })
                .collect::<Vec<_>>(),
        );
    }
    build(headers, cells)
}

fn csv_error(err: csv::Error) -> Diagnostic {
    let code = match err.kind() {
        csv::ErrorKind::UnequalLengths { .. } => Code::E_DATA_RAGGED,
        csv::ErrorKind::Io(_) => Code::E_DATA_UNREADABLE,
        _ => Code::E_DATA_MALFORMED,
    };
    let mut d = Diagnostic::new(code, "", err.to_string());
    if let Some(pos) = err.position() {
        d = d.with_position(pos.line() as usize, 1);
    }
    d
}

/// Builds a dataset from flat JSON objects. Columns appear in first-seen key
/// order; a key missing from a record reads as null.
pub fn dataset_from_records(records: &[Value]) -> Result<Dataset, Diagnostic> {
    let mut columns: IndexMap<String, ()> = IndexMap::new();
    let mut objects = Vec::with_capacity(records.len());
    for (i, rec) in records.iter().enumerate() {
        let obj = rec.as_object().ok_or_else(|| {
            Diagnostic::new(
                Code::E_DATA_MALFORMED,
                index_path("", i),
                "every record must be a JSON object",
            )
        })?;
        for key in obj.keys() {
            columns.entry(key.clone()).or_default();
        }
        objects.push(obj);
    }
    if records.is_empty() {
        return Err(Diagnostic::new(Code::E_EMPTY_DATASET, "", "dataset has no rows"));
    }
    let names: Vec<String> = columns.into_keys().collect();
    let mut cells = Vec::with_capacity(objects.len());
    for (i, obj) in objects.iter().enumerate() {
        let mut row = Vec::with_capacity(names.len());
        for name in &names {
            row.push(match obj.get(name) {
                None | Some(Value::Null) => Cell::Null,
                Some(Value::Bool(b)) => Cell::Bool(*b),
                Some(Value::Number(n)) => Cell::Num(n.to_string(), n.as_f64().unwrap_or(f64::NAN)),
                Some(Value::String(s)) if s.is_empty() => Cell::Null,
                Some(Value::String(s)) => Cell::Str(s.clone()),
                Some(_) => {
                    return Err(Diagnostic::new(
                        Code::E_DATA_MALFORMED,
                        key_path(&index_path("", i), name),
                        "nested values are not supported",
                    ))
                }
            });
        }
        cells.push(row);
    }
    build(names, cells)
}

enum Cell {
    Null,
    Bool(bool),
    /// Original JSON text plus its numeric value.
    Num(String, f64),
    Str(String),
}

fn parse_finite(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|n| n.is_finite())
}

fn build(names: Vec<String>, cells: Vec<Vec<Cell>>) -> Result<Dataset, Diagnostic> {
    if names.is_empty() {
        return Err(Diagnostic::new(Code::E_NO_COLUMNS, "", "dataset has no columns"));
    }
    if cells.is_empty() {
        return Err(Diagnostic::new(Code::E_EMPTY_DATASET, "", "dataset has no rows"));
    }
    let types: Vec<ColumnType> = (0..names.len())
        .map(|c| {
            let mut any = false;
            let numeric = cells.iter().all(|row| match &row[c] {
                Cell::Null => true,
                Cell::Bool(_) => false,
                Cell::Num(_, n) => {
                    any = true;
                    n.is_finite()
                }
                Cell::Str(s) => {
                    any = true;
                    parse_finite(s).is_some()
                }
            });
            if numeric && any {
                ColumnType::Number
            } else {
                ColumnType::Text
            }
        })
        .collect();
    let rows = cells
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&types)
                .map(|(cell, ty)| match (cell, ty) {
                    (Cell::Null, _) => DataValue::Null,
                    (Cell::Bool(b), _) => DataValue::Boolean(b),
                    (Cell::Num(_, n), ColumnType::Number) => DataValue::Number(n),
                    (Cell::Num(text, _), ColumnType::Text) => DataValue::Text(text),
                    (Cell::Str(s), ColumnType::Number) => {
                        DataValue::Number(parse_finite(&s).expect("column checked numeric"))
                    }
                    (Cell::Str(s), ColumnType::Text) => DataValue::Text(s),
                })
                .collect()
        })
        .collect();
    let columns = names
        .into_iter()
        .zip(types)
        .map(|(name, ty)| Column { name, ty })
        .collect();
    Ok(Dataset::new(columns, rows))
}
