//! Tabular data: values, datasets, ingestion and the transforms the
//! compiler needs (row filters and group-by aggregation).

mod aggregate;
mod filter;
mod load;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use aggregate::{aggregate_column_name, apply_aggregation, group_keys};
pub use filter::{apply_filter, Filter, FilterOp};
pub use load::{dataset_from_csv, dataset_from_json, dataset_from_records, load_dataset, DataSourceRef};

/// A single cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DataValue {
    Null,
    Number(f64),
    Text(String),
    Boolean(bool),
}

impl DataValue {
    pub fn is_null(&self) -> bool {
        matches!(self, DataValue::Null)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            DataValue::Number(n) => Some(*n),
            _ => None,
        }
    }

    /// Text used when the value is spoken or announced.
    ///
    /// Integral numbers drop the decimal point (`1971`, not `1971.0`); other
    /// numbers keep at most two decimals with trailing zeros trimmed.
    pub fn speech_text(&self) -> String {
        match self {
            DataValue::Null => String::new(),
            DataValue::Number(n) => format_speech_number(*n),
            DataValue::Text(s) => s.clone(),
            DataValue::Boolean(b) => b.to_string(),
        }
    }

    pub(crate) fn group_key(&self) -> KeyPart {
        match self {
            DataValue::Null => KeyPart::Null,
            // -0.0 and 0.0 group together
            DataValue::Number(n) => KeyPart::Number(if *n == 0.0 { 0 } else { n.to_bits() }),
            DataValue::Text(s) => KeyPart::Text(s.clone()),
            DataValue::Boolean(b) => KeyPart::Boolean(*b),
        }
    }

    /// Equality used for category membership (numbers compare by value).
    pub fn same_category(&self, other: &DataValue) -> bool {
        self.group_key() == other.group_key()
    }

    /// Total order used by filters: numbers numerically, everything else by
    /// its speech text. `None` when either side is null.
    pub(crate) fn compare(&self, other: &DataValue) -> Option<Ordering> {
        match (self, other) {
            (DataValue::Null, _) | (_, DataValue::Null) => None,
            (DataValue::Number(a), DataValue::Number(b)) => a.partial_cmp(b),
            (a, b) => Some(a.speech_text().cmp(&b.speech_text())),
        }
    }
}

impl fmt::Display for DataValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataValue::Null => f.write_str("null"),
            other => f.write_str(&other.speech_text()),
        }
    }
}

impl From<&str> for DataValue {
    fn from(s: &str) -> Self {
        DataValue::Text(s.to_string())
    }
}

impl From<f64> for DataValue {
    fn from(n: f64) -> Self {
        DataValue::Number(n)
    }
}

pub fn format_speech_number(n: f64) -> String {
    if n.fract() == 0.0 {
        let s = format!("{n:.0}");
        if s == "-0" {
            "0".to_string()
        } else {
            s
        }
    } else {
        let s = format!("{n:.2}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) enum KeyPart {
    Null,
    Number(u64),
    Text(String),
    Boolean(bool),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Number,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub name: String,
    pub ty: ColumnType,
}

pub type Row = Vec<DataValue>;

/// Rows in source order; every row has exactly one value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Column>,
    rows: Vec<Row>,
}

impl Dataset {
    /// Builds a dataset, panicking if a row does not match the column count.
    /// Ingestion goes through [`load_dataset`], which reports ragged input as a diagnostic.
    pub fn new(columns: Vec<Column>, rows: Vec<Row>) -> Self {
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(
                row.len(),
                columns.len(),
                "row {i} has {} values for {} columns",
                row.len(),
                columns.len()
            );
        }
        Dataset { columns, rows }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Values of one column, in row order.
    pub fn column_values(&self, index: usize) -> impl Iterator<Item = &DataValue> + '_ {
        self.rows.iter().map(move |r| &r[index])
    }

    pub(crate) fn with_rows(&self, rows: Vec<Row>) -> Dataset {
        Dataset { columns: self.columns.clone(), rows }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speech_numbers() {
        assert_eq!(format_speech_number(1971.0), "1971");
        assert_eq!(format_speech_number(20.5), "20.5");
        assert_eq!(format_speech_number(0.75), "0.75");
        assert_eq!(format_speech_number(2.0), "2");
        assert_eq!(format_speech_number(1.30000001), "1.3");
        assert_eq!(format_speech_number(-0.0), "0");
        assert_eq!(format_speech_number(-0.001), "0");
        assert_eq!(format_speech_number(-2.5), "-2.5");
    }

    #[test]
    fn zero_signs_share_a_group() {
        assert!(DataValue::Number(0.0).same_category(&DataValue::Number(-0.0)));
        assert!(!DataValue::Number(1.0).same_category(&DataValue::Text("1".into())));
    }

    #[test]
    fn null_never_compares() {
        assert_eq!(DataValue::Null.compare(&DataValue::Number(1.0)), None);
        assert_eq!(
            DataValue::from("b").compare(&DataValue::from("a")),
            Some(Ordering::Greater)
        );
    }

    #[test]
    #[should_panic(expected = "row 0 has 1 values for 2 columns")]
    fn ragged_construction_panics() {
        let cols = vec![
            Column { name: "a".into(), ty: ColumnType::Text },
            Column { name: "b".into(), ty: ColumnType::Text },
        ];
        Dataset::new(cols, vec![vec![DataValue::Null]]);
    }
}
