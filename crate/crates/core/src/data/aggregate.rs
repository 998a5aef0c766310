use indexmap::IndexMap;

use super::{Column, ColumnType, DataValue, Dataset, KeyPart};
use crate::diagnostic::{key_path, Code, Diagnostic};
use crate::spec::{Aggregate, ChannelName, SpecDocument};

/// Name of the synthetic column holding a channel's aggregate.
pub fn aggregate_column_name(channel: ChannelName) -> String {
    format!("__agg_{}", channel.as_str())
}

/// Grouping fields: every field bound by a non-aggregated channel, plus the
/// text channel's value when it names a column. Channel order, deduplicated.
pub fn group_keys(spec: &SpecDocument, ds: &Dataset) -> Vec<String> {
    let mut keys: Vec<String> = Vec::new();
    for (name, def) in spec.encoding.iter().filter(|(c, _)| c.is_implemented()) {
        if def.aggregate.is_some() {
            continue;
        }
        let field = match (name, &def.field, &def.value) {
            (_, Some(f), _) => Some(f.clone()),
            (ChannelName::SpeechToneText, None, Some(DataValue::Text(v)))
                if ds.column_index(v).is_some() =>
            {
                Some(v.clone())
            }
            _ => None,
        };
        if let Some(f) = field {
            if !keys.contains(&f) {
                keys.push(f);
            }
        }
    }
    keys
}

#[derive(Default)]
struct Acc {
    rows: usize,
    seen: usize,
    sum: f64,
    min: Option<f64>,
    max: Option<f64>,
}

impl Acc {
    fn push(&mut self, v: Option<f64>) {
        self.rows += 1;
        if let Some(v) = v {
            self.seen += 1;
            self.sum += v;
            self.min = Some(self.min.map_or(v, |m| m.min(v)));
            self.max = Some(self.max.map_or(v, |m| m.max(v)));
        }
    }

    fn finish(&self, agg: Aggregate) -> DataValue {
        let num = |o: Option<f64>| o.map_or(DataValue::Null, DataValue::Number);
        match agg {
            Aggregate::Count => DataValue::Number(self.rows as f64),
            Aggregate::Sum => DataValue::Number(self.sum),
            Aggregate::Mean => num((self.seen > 0).then(|| self.sum / self.seen as f64)),
            Aggregate::Min => num(self.min),
            Aggregate::Max => num(self.max),
        }
    }
}

/// Groups `ds` by [`group_keys`] and computes each channel's aggregate.
///
/// One output row per distinct key tuple, in first-appearance order. The
/// output holds the key columns followed by one `__agg_<channel>` column per
/// aggregated channel. `count` counts rows; the others skip nulls and need a
/// numeric field. Null keys form their own group.
pub fn apply_aggregation(ds: &Dataset, spec: &SpecDocument) -> Result<Dataset, Diagnostic> {
    let channel_field = |name: ChannelName| key_path(&key_path("encoding", name.as_str()), "field");

    let mut key_cols = Vec::new();
    let keys = group_keys(spec, ds);
    for key in &keys {
        let idx = ds.column_index(key).ok_or_else(|| {
            let owner = spec
                .encoding
                .iter()
                .find(|(_, d)| d.field.as_deref() == Some(key.as_str()))
                .map(|(c, _)| *c)
                .unwrap_or(ChannelName::Time);
            Diagnostic::new(Code::E_UNKNOWN_FIELD, channel_field(owner), format!("no column named {key:?}"))
        })?;
        key_cols.push(idx);
    }

    let mut aggs = Vec::new();
    for (name, def) in &spec.encoding {
        let Some(agg) = def.aggregate else { continue };
        let source = match (&def.field, agg) {
            (_, Aggregate::Count) => None,
            (None, _) => {
                return Err(Diagnostic::new(
                    Code::E_AGGREGATE_FIELD_REQUIRED,
                    key_path("encoding", name.as_str()),
                    format!("aggregate {} needs a field", agg.as_str()),
                ))
            }
            (Some(f), _) => {
                let idx = ds.column_index(f).ok_or_else(|| {
                    Diagnostic::new(Code::E_UNKNOWN_FIELD, channel_field(*name), format!("no column named {f:?}"))
                })?;
                if ds.columns()[idx].ty != ColumnType::Number {
                    return Err(Diagnostic::new(
                        Code::E_AGGREGATE_NON_NUMERIC,
                        channel_field(*name),
                        format!("{} over text column {f:?}", agg.as_str()),
                    ));
                }
                Some(idx)
            }
        };
        aggs.push((*name, agg, source));
    }

    let mut groups: IndexMap<Vec<KeyPart>, (Vec<DataValue>, Vec<Acc>)> = IndexMap::new();
    for row in ds.rows() {
        let key: Vec<KeyPart> = key_cols.iter().map(|&c| row[c].group_key()).collect();
        let (_, accs) = groups.entry(key).or_insert_with(|| {
            let values = key_cols.iter().map(|&c| row[c].clone()).collect();
            (values, aggs.iter().map(|_| Acc::default()).collect())
        });
        for (acc, (_, _, source)) in accs.iter_mut().zip(&aggs) {
            acc.push(source.and_then(|c| row[c].as_number()));
        }
    }

    let mut columns: Vec<Column> = key_cols.iter().map(|&c| ds.columns()[c].clone()).collect();
    columns.extend(aggs.iter().map(|(name, _, _)| Column {
        name: aggregate_column_name(*name),
        ty: ColumnType::Number,
    }));
    let rows = groups
        .into_values()
        .map(|(mut values, accs)| {
            values.extend(accs.iter().zip(&aggs).map(|(acc, (_, agg, _))| acc.finish(*agg)));
            values
        })
        .collect();
    Ok(Dataset::new(columns, rows))
}
