use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{ColumnType, DataValue, Dataset};
use crate::diagnostic::{Code, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterOp {
    Eq,
    Neq,
    Lt,
    Lte,
    Gt,
    Gte,
}

impl FilterOp {
    pub fn parse(s: &str) -> Option<FilterOp> {
        Some(match s {
            "eq" => FilterOp::Eq,
            "neq" => FilterOp::Neq,
            "lt" => FilterOp::Lt,
            "lte" => FilterOp::Lte,
            "gt" => FilterOp::Gt,
            "gte" => FilterOp::Gte,
            _ => return None,
        })
    }

    fn admits(self, ord: Ordering) -> bool {
        match self {
            FilterOp::Eq => ord == Ordering::Equal,
            FilterOp::Neq => ord != Ordering::Equal,
            FilterOp::Lt => ord == Ordering::Less,
            FilterOp::Lte => ord != Ordering::Greater,
            FilterOp::Gt => ord == Ordering::Greater,
            FilterOp::Gte => ord != Ordering::Less,
        }
    }
}

/// Keeps the rows whose `field` compares to `value` under `op`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filter {
    pub field: String,
    pub op: FilterOp,
    pub value: DataValue,
}

/// Rows satisfying the predicate, in their original order. Number columns
/// compare numerically, text columns lexicographically; a null cell (or a
/// null literal) never matches.
pub fn apply_filter(ds: &Dataset, filter: &Filter) -> Result<Dataset, Diagnostic> {
    let col = ds.column_index(&filter.field).ok_or_else(|| {
        Diagnostic::new(
            Code::E_UNKNOWN_FIELD,
            "filter.field",
            format!("no column named {:?}", filter.field),
        )
    })?;
    let ty = ds.columns()[col].ty;
    let compatible = matches!(
        (&filter.value, ty),
        (DataValue::Null, _)
            | (DataValue::Number(_), ColumnType::Number)
            | (DataValue::Text(_) | DataValue::Boolean(_), ColumnType::Text)
    );
    if !compatible {
        return Err(Diagnostic::new(
            Code::E_FILTER_TYPE_MISMATCH,
            "filter.value",
            format!(
                "literal {} cannot be compared with {:?} column {:?}",
                filter.value, ty, filter.field
            ),
        ));
    }
    let rows = ds
        .rows()
        .iter()
        .filter(|row| {
            row[col]
                .compare(&filter.value)
                .is_some_and(|ord| filter.op.admits(ord))
        })
        .cloned()
        .collect();
    Ok(ds.with_rows(rows))
}
