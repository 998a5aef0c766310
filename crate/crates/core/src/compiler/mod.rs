//! Spec + dataset -> ordered speech schedule.

mod prelude;

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::data::{
    aggregate_column_name, apply_aggregation, apply_filter, group_keys, Column, ColumnType,
    DataValue, Dataset, Row,
};
use crate::diagnostic::{index_path, key_path, Code, Diagnostic, Diagnostics};
use crate::emit::canonical;
use crate::scales::{apply_scale, infer_domain, resolve_scale, ChannelLimits, ResolvedScale};
use crate::spec::{validate_spec, ChannelDef, ChannelName, DataType, SpecDocument, TransformDef};

pub use prelude::generate_prelude;

pub const GENERATOR: &str = concat!("speechtone ", env!("CARGO_PKG_VERSION"));

/// One spoken item.
#[derive(Debug, Clone, PartialEq)]
pub struct Utterance {
    pub index: usize,
    pub text: String,
    pub pitch: f64,
    pub rate: f64,
    pub voice_id: u64,
}

impl Utterance {
    /// An utterance with every speech attribute at its default.
    pub fn plain(index: usize, text: impl Into<String>) -> Self {
        Utterance {
            index,
            text: text.into(),
            pitch: ChannelLimits::PITCH.default_value,
            rate: ChannelLimits::RATE.default_value,
            voice_id: ChannelLimits::VOICE.default_value as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleMetadata {
    /// SHA-256 of the spec's canonical JSON form.
    pub spec_hash: String,
    /// Rows in the dataset handed to the compiler, before transforms.
    pub row_count: usize,
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeechSchedule {
    pub prelude: Vec<Utterance>,
    pub body: Vec<Utterance>,
    pub metadata: ScheduleMetadata,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Compiled {
    pub schedule: SpeechSchedule,
    pub warnings: Vec<Diagnostic>,
}

/// Row indices in speaking order, plus rows dropped for a null time value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowOrder {
    pub rows: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// Orders rows along the time channel. Continuous time sorts ascending
/// (stable); nominal and ordinal time keep dataset order.
pub fn order_rows(ds: &Dataset, time: &ChannelDef) -> Result<RowOrder, Diagnostic> {
    let field = time
        .field
        .as_deref()
        .ok_or_else(|| Diagnostic::new(Code::E_TIME_REQUIRES_FIELD, "", "time has no field"))?;
    let col = ds.column_index(field).ok_or_else(|| {
        Diagnostic::new(Code::E_UNKNOWN_FIELD, "field", format!("no column named {field:?}"))
    })?;
    let column_type = ds.columns()[col].ty;
    let continuous = match time.data_type {
        Some(t) => t.is_continuous(),
        None => column_type == ColumnType::Number,
    };
    if continuous && column_type != ColumnType::Number {
        return Err(Diagnostic::new(
            Code::E_DOMAIN_TYPE,
            "field",
            format!("quantitative time bound to text column {field:?}"),
        ));
    }
    let (mut rows, dropped): (Vec<usize>, Vec<usize>) =
        (0..ds.len()).partition(|&i| !ds.rows()[i][col].is_null());
    if continuous {
        let key = |i: &usize| ds.rows()[*i][col].as_number().expect("numeric column");
        rows.sort_by(|a, b| key(a).total_cmp(&key(b)));
    }
    Ok(RowOrder { rows, dropped })
}

/// Text for one row: the row's value when the channel's value names a
/// column, otherwise the literal itself. `None` when the named cell is null.
pub fn resolve_text(channel: &ChannelDef, row: &Row, columns: &[Column]) -> Option<String> {
    let value = channel.value.as_ref()?;
    if let DataValue::Text(name) = value {
        if let Some(i) = columns.iter().position(|c| &c.name == name) {
            return match &row[i] {
                DataValue::Null => None,
                v => Some(v.speech_text()),
            };
        }
    }
    Some(value.speech_text())
}

pub fn spec_hash(spec: &SpecDocument) -> String {
    let value = serde_json::to_value(spec).expect("spec serializes to JSON");
    let digest = Sha256::digest(canonical::to_string(&value).as_bytes());
    format!("{digest:x}")
}

fn channel_path(name: ChannelName) -> String {
    key_path("encoding", name.as_str())
}

/// Runs the whole pipeline: transforms, aggregation, ordering, scale
/// resolution, per-row utterances and the optional prelude.
pub fn compile(spec: &SpecDocument, ds: &Dataset) -> Result<Compiled, Diagnostics> {
    let errors: Vec<Diagnostic> = validate_spec(spec).into_iter().filter(Diagnostic::is_error).collect();
    if !errors.is_empty() {
        return Err(Diagnostics(errors));
    }
    let mut warnings = Vec::new();

    let mut data = ds.clone();
    for (i, t) in spec.transforms.iter().enumerate() {
        let TransformDef::Filter(f) = t;
        data = apply_filter(&data, f).map_err(|d| d.under(&index_path("transform", i)))?;
    }

    let keys = group_keys(spec, &data);
    let mut encoding = spec.encoding.clone();
    if spec.has_aggregates() {
        data = apply_aggregation(&data, spec)?;
        for (name, def) in encoding.iter_mut() {
            if def.aggregate.take().is_some() {
                def.field = Some(aggregate_column_name(*name));
                def.data_type.get_or_insert(DataType::Quantitative);
            }
        }
    }

    let time = &encoding[&ChannelName::Time];
    let order = order_rows(&data, time).map_err(|d| d.under(&channel_path(ChannelName::Time)))?;
    if !order.dropped.is_empty() {
        warnings.push(Diagnostic::new(
            Code::W_NULL_TIME,
            key_path(&channel_path(ChannelName::Time), "field"),
            format!("{} row(s) with a null time value were dropped", order.dropped.len()),
        ));
    }

    let mut scales = BTreeMap::new();
    let mut bound_columns = BTreeMap::new();
    for name in ChannelName::ATTRIBUTES {
        let Some(def) = encoding.get(&name) else { continue };
        let at = channel_path(name);
        let column = match &def.field {
            Some(f) => Some(data.column_index(f).ok_or_else(|| {
                Diagnostic::new(Code::E_UNKNOWN_FIELD, key_path(&at, "field"), format!("no column named {f:?}"))
            })?),
            None => None,
        };
        let domain = match column {
            Some(_) if def.scale.is_some() => Some(infer_domain(&data, def).map_err(|d| d.under(&at))?),
            _ => None,
        };
        let scale = resolve_scale(name, def, domain.as_ref()).map_err(|d| d.under(&at))?;
        scales.insert(name, scale);
        if let Some(c) = column {
            bound_columns.insert(name, c);
        }
    }

    let time_col = data.column_index(time.field.as_deref().unwrap_or_default()).expect("ordered above");
    let text_channel = encoding.get(&ChannelName::SpeechToneText);
    let mut null_text = 0usize;
    let mut null_values: BTreeMap<ChannelName, usize> = BTreeMap::new();
    let mut body = Vec::with_capacity(order.rows.len());
    for &r in &order.rows {
        let row = &data.rows()[r];
        let text = match text_channel {
            Some(ch) => resolve_text(ch, row, data.columns()),
            None => Some(row[time_col].speech_text()),
        };
        let Some(text) = text else {
            null_text += 1;
            continue;
        };
        let mut attr = |name: ChannelName| -> Result<f64, Diagnostic> {
            let limits = ChannelLimits::for_channel(name).expect("attribute channel");
            let Some(scale) = scales.get(&name) else { return Ok(limits.default_value) };
            let value = match bound_columns.get(&name) {
                Some(&c) => &row[c],
                None => return apply_scale(scale, &DataValue::Null),
            };
            if value.is_null() && !matches!(scale, ResolvedScale::Constant { .. }) {
                *null_values.entry(name).or_default() += 1;
                return Ok(limits.default_value);
            }
            apply_scale(scale, value).map_err(|d| d.under(&channel_path(name)))
        };
        let pitch = attr(ChannelName::SpeechTonePitch)?;
        let rate = attr(ChannelName::SpeechToneSpeed)?;
        let voice = attr(ChannelName::SpeechToneVoice)?;
        debug_assert!(!text.is_empty());
        debug_assert!(ChannelLimits::PITCH.contains(pitch) && ChannelLimits::RATE.contains(rate));
        body.push(Utterance { index: body.len(), text, pitch, rate, voice_id: voice as u64 });
    }
    if null_text > 0 {
        warnings.push(Diagnostic::new(
            Code::W_NULL_TEXT,
            key_path(&channel_path(ChannelName::SpeechToneText), "value"),
            format!("{null_text} row(s) with null text were skipped"),
        ));
    }
    for (name, n) in null_values {
        warnings.push(Diagnostic::new(
            Code::W_NULL_VALUE,
            channel_path(name),
            format!("{n} row(s) had a null {name} value and use the channel default"),
        ));
    }

    let prelude = if spec.prelude_enabled {
        generate_prelude(spec, &scales, &keys)
    } else {
        Vec::new()
    };

    Ok(Compiled {
        schedule: SpeechSchedule {
            prelude,
            body,
            metadata: ScheduleMetadata {
                spec_hash: spec_hash(spec),
                row_count: ds.len(),
                generator: GENERATOR.to_string(),
            },
        },
        warnings,
    })
}
