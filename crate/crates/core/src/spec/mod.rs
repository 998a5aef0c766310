//! Sonification spec documents: the typed model, the JSON parser and the
//! semantic validator.
//!
//! A document mirrors the JSON layout: top-level `data`, `tone`,
//! `transform` and `encoding`, plus an optional boolean `prelude`.

mod parse;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::data::{DataSourceRef, DataValue, Filter};

pub use parse::{parse_spec, parse_tone, ParsedSpec};
pub use validate::validate_spec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecDocument {
    #[serde(rename = "data", skip_serializing_if = "Option::is_none")]
    pub data_source: Option<DataSourceRef>,
    pub tone: ToneDef,
    #[serde(rename = "transform")]
    pub transforms: Vec<TransformDef>,
    pub encoding: BTreeMap<ChannelName, ChannelDef>,
    #[serde(rename = "prelude")]
    pub prelude_enabled: bool,
}

impl SpecDocument {
    pub fn channel(&self, name: ChannelName) -> Option<&ChannelDef> {
        self.encoding.get(&name)
    }

    pub fn time(&self) -> Option<&ChannelDef> {
        self.channel(ChannelName::Time)
    }

    pub fn has_aggregates(&self) -> bool {
        self.encoding.values().any(|c| c.aggregate.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ToneType {
    SpeechTone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ToneDef {
    #[serde(rename = "type")]
    pub tone_type: ToneType,
    pub continued: bool,
}

impl Default for ToneDef {
    fn default() -> Self {
        ToneDef { tone_type: ToneType::SpeechTone, continued: false }
    }
}

/// Encoding channel keys, case-sensitive as written in specs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChannelName {
    #[serde(rename = "time")]
    Time,
    SpeechTonePitch,
    SpeechToneSpeed,
    SpeechToneVoice,
    SpeechToneText,
    /// Reserved: recognised for diagnostics only.
    SpeechToneLoudness,
    /// Reserved: recognised for diagnostics only.
    SpeechToneDuration,
}

impl ChannelName {
    pub const ALL: [ChannelName; 7] = [
        ChannelName::Time,
        ChannelName::SpeechTonePitch,
        ChannelName::SpeechToneSpeed,
        ChannelName::SpeechToneVoice,
        ChannelName::SpeechToneText,
        ChannelName::SpeechToneLoudness,
        ChannelName::SpeechToneDuration,
    ];

    /// Channels that map data onto a numeric speech attribute.
    pub const ATTRIBUTES: [ChannelName; 3] = [
        ChannelName::SpeechTonePitch,
        ChannelName::SpeechToneSpeed,
        ChannelName::SpeechToneVoice,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelName::Time => "time",
            ChannelName::SpeechTonePitch => "SpeechTonePitch",
            ChannelName::SpeechToneSpeed => "SpeechToneSpeed",
            ChannelName::SpeechToneVoice => "SpeechToneVoice",
            ChannelName::SpeechToneText => "SpeechToneText",
            ChannelName::SpeechToneLoudness => "SpeechToneLoudness",
            ChannelName::SpeechToneDuration => "SpeechToneDuration",
        }
    }

    pub fn parse(s: &str) -> Option<ChannelName> {
        ChannelName::ALL.into_iter().find(|c| c.as_str() == s)
    }

    pub fn is_implemented(self) -> bool {
        !matches!(self, ChannelName::SpeechToneLoudness | ChannelName::SpeechToneDuration)
    }

    pub fn is_attribute(self) -> bool {
        ChannelName::ATTRIBUTES.contains(&self)
    }

    /// Short spoken name, used in the prelude ("Pitch represents ...").
    pub fn spoken_name(self) -> &'static str {
        match self {
            ChannelName::Time => "Time",
            ChannelName::SpeechTonePitch => "Pitch",
            ChannelName::SpeechToneSpeed => "Speed",
            ChannelName::SpeechToneVoice => "Voice",
            ChannelName::SpeechToneText => "Text",
            ChannelName::SpeechToneLoudness => "Loudness",
            ChannelName::SpeechToneDuration => "Duration",
        }
    }
}

impl fmt::Display for ChannelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Nominal,
    Ordinal,
    Quantitative,
    Temporal,
}

impl DataType {
    pub fn parse(s: &str) -> Option<DataType> {
        Some(match s {
            "nominal" => DataType::Nominal,
            "ordinal" => DataType::Ordinal,
            "quantitative" => DataType::Quantitative,
            "temporal" => DataType::Temporal,
            _ => return None,
        })
    }

    /// Quantitative and temporal data map through linear scales and sort numerically.
    pub fn is_continuous(self) -> bool {
        matches!(self, DataType::Quantitative | DataType::Temporal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    Count,
    Sum,
    Mean,
    Min,
    Max,
}

impl Aggregate {
    pub fn parse(s: &str) -> Option<Aggregate> {
        Some(match s {
            "count" => Aggregate::Count,
            "sum" => Aggregate::Sum,
            "mean" => Aggregate::Mean,
            "min" => Aggregate::Min,
            "max" => Aggregate::Max,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Aggregate::Count => "count",
            Aggregate::Sum => "sum",
            Aggregate::Mean => "mean",
            Aggregate::Min => "min",
            Aggregate::Max => "max",
        }
    }
}

/// One entry of the `encoding` block.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ChannelDef {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<DataValue>,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub data_type: Option<DataType>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregate: Option<Aggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<ScaleDef>,
}

impl ChannelDef {
    pub fn field(name: &str) -> Self {
        ChannelDef { field: Some(name.to_string()), ..Default::default() }
    }

    pub fn value(v: impl Into<DataValue>) -> Self {
        ChannelDef { value: Some(v.into()), ..Default::default() }
    }

    pub fn aggregate(agg: Aggregate) -> Self {
        ChannelDef { aggregate: Some(agg), ..Default::default() }
    }

    pub fn typed(mut self, ty: DataType) -> Self {
        self.data_type = Some(ty);
        self
    }

    pub fn with_scale(mut self, scale: ScaleDef) -> Self {
        self.scale = Some(scale);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleDef {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<DataValue>>,
    pub range: Vec<f64>,
}

impl ScaleDef {
    pub fn range(range: impl Into<Vec<f64>>) -> Self {
        ScaleDef { domain: None, range: range.into() }
    }

    pub fn with_domain(mut self, domain: Vec<DataValue>) -> Self {
        self.domain = Some(domain);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TransformDef {
    #[serde(rename = "filter")]
    Filter(Filter),
}
