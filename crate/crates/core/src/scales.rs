//! Scale resolution: turns a channel's scale declaration plus the data it is
//! bound to into a concrete value mapping, bounded by the channel's hard limits.

use std::collections::HashSet;

use crate::data::{ColumnType, DataValue, Dataset};
use crate::diagnostic::{Code, Diagnostic};
use crate::spec::{ChannelDef, ChannelName};

/// Fixed bounds of a speech attribute.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelLimits {
    pub channel: ChannelName,
    pub hard_min: f64,
    /// `None` for voice IDs, which have no upper bound.
    pub hard_max: Option<f64>,
    pub default_value: f64,
    /// Voice IDs are rounded to the nearest integer.
    pub integral: bool,
}

impl ChannelLimits {
    pub const PITCH: ChannelLimits = ChannelLimits {
        channel: ChannelName::SpeechTonePitch,
        hard_min: 0.0,
        hard_max: Some(2.0),
        default_value: 1.0,
        integral: false,
    };

    pub const RATE: ChannelLimits = ChannelLimits {
        channel: ChannelName::SpeechToneSpeed,
        hard_min: 0.1,
        hard_max: Some(10.0),
        default_value: 1.0,
        integral: false,
    };

    pub const VOICE: ChannelLimits = ChannelLimits {
        channel: ChannelName::SpeechToneVoice,
        hard_min: 0.0,
        hard_max: None,
        default_value: 0.0,
        integral: true,
    };

    pub fn for_channel(name: ChannelName) -> Option<ChannelLimits> {
        match name {
            ChannelName::SpeechTonePitch => Some(Self::PITCH),
            ChannelName::SpeechToneSpeed => Some(Self::RATE),
            ChannelName::SpeechToneVoice => Some(Self::VOICE),
            _ => None,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.hard_min && self.hard_max.is_none_or(|max| v <= max)
    }

    pub fn clamp(&self, v: f64) -> f64 {
        let v = v.max(self.hard_min);
        match self.hard_max {
            Some(max) => v.min(max),
            None => v,
        }
    }

    /// Rounds (voice) and clamps a scaled value.
    pub fn finish(&self, v: f64) -> f64 {
        let v = if self.integral { v.round() } else { v };
        self.clamp(v)
    }

    pub fn describe(&self) -> String {
        match self.hard_max {
            Some(max) => format!("[{}, {}] for {}", self.hard_min, max, self.channel),
            None => format!("[{}, ∞) for {}", self.hard_min, self.channel),
        }
    }
}

/// Data extent a scale maps from.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Quantitative { min: f64, max: f64 },
    /// Ordered, distinct categories.
    Categorical(Vec<DataValue>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedScale {
    /// Every value maps to the same output (no scale block, or a literal value).
    Constant { value: f64, limits: ChannelLimits },
    Linear {
        domain_min: f64,
        domain_max: f64,
        range_min: f64,
        range_max: f64,
        limits: ChannelLimits,
    },
    Ordinal {
        categories: Vec<DataValue>,
        range_values: Vec<f64>,
        limits: ChannelLimits,
    },
}

impl ResolvedScale {
    pub fn limits(&self) -> &ChannelLimits {
        match self {
            ResolvedScale::Constant { limits, .. }
            | ResolvedScale::Linear { limits, .. }
            | ResolvedScale::Ordinal { limits, .. } => limits,
        }
    }
}

/// Whether a channel maps through a linear scale. Declared types win;
/// aggregates are numeric; otherwise the bound column's type decides.
pub fn is_continuous(channel: &ChannelDef, column: Option<ColumnType>) -> bool {
    match channel.data_type {
        Some(t) => t.is_continuous(),
        None if channel.aggregate.is_some() => true,
        None => column == Some(ColumnType::Number),
    }
}

/// The domain of a field-bound channel. An explicit `scale.domain` overrides
/// membership and order; otherwise quantitative channels span the non-null
/// min..max and categorical channels list distinct values by first appearance.
pub fn infer_domain(ds: &Dataset, channel: &ChannelDef) -> Result<Domain, Diagnostic> {
    let field = channel
        .field
        .as_deref()
        .ok_or_else(|| Diagnostic::new(Code::E_SCHEMA, "", "channel is not bound to a field"))?;
    let col = ds.column_index(field).ok_or_else(|| {
        Diagnostic::new(Code::E_UNKNOWN_FIELD, "field", format!("no column named {field:?}"))
    })?;
    let column_type = ds.columns()[col].ty;
    let explicit = channel.scale.as_ref().and_then(|s| s.domain.as_ref());

    if is_continuous(channel, Some(column_type)) {
        if let Some(d) = explicit {
            if let [DataValue::Number(a), DataValue::Number(b)] = d.as_slice() {
                return Ok(Domain::Quantitative { min: *a, max: *b });
            }
            return Err(Diagnostic::new(
                Code::E_SCHEMA,
                "scale.domain",
                "a quantitative domain is two numbers [min, max]",
            ));
        }
        if column_type != ColumnType::Number {
            return Err(Diagnostic::new(
                Code::E_DOMAIN_TYPE,
                "field",
                format!("quantitative channel bound to text column {field:?}"),
            ));
        }
        let mut values = ds.column_values(col).filter_map(DataValue::as_number);
        let first = values.next().ok_or_else(|| all_null(field))?;
        let (min, max) = values.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        return Ok(Domain::Quantitative { min, max });
    }

    if let Some(d) = explicit {
        return Ok(Domain::Categorical(d.clone()));
    }
    let mut seen = HashSet::new();
    let categories: Vec<DataValue> = ds
        .column_values(col)
        .filter(|v| !v.is_null())
        .filter(|v| seen.insert(v.group_key()))
        .cloned()
        .collect();
    if categories.is_empty() {
        return Err(all_null(field));
    }
    Ok(Domain::Categorical(categories))
}

fn all_null(field: &str) -> Diagnostic {
    Diagnostic::new(Code::E_DOMAIN_EMPTY, "field", format!("column {field:?} has no non-null values"))
}

/// Builds the mapping for one speech attribute channel. `domain` is only
/// consulted when the channel declares a scale.
pub fn resolve_scale(
    name: ChannelName,
    channel: &ChannelDef,
    domain: Option<&Domain>,
) -> Result<ResolvedScale, Diagnostic> {
    let limits = ChannelLimits::for_channel(name).ok_or_else(|| {
        Diagnostic::new(Code::E_SCHEMA, "", format!("{name} is not a speech attribute channel"))
    })?;
    if let Some(v) = &channel.value {
        let n = v.as_number().ok_or_else(|| {
            Diagnostic::new(Code::E_SCHEMA, "value", format!("{name} value must be a number"))
        })?;
        return Ok(ResolvedScale::Constant { value: limits.finish(n), limits });
    }
    let (Some(scale), Some(domain)) = (&channel.scale, domain) else {
        return Ok(ResolvedScale::Constant { value: limits.default_value, limits });
    };
    if scale.range.is_empty() {
        return Err(Diagnostic::new(Code::E_RANGE_EMPTY, "scale.range", "scale range is empty"));
    }
    match domain {
        Domain::Quantitative { min, max } => {
            let [r0, r1] = scale.range[..] else {
                return Err(Diagnostic::new(
                    Code::E_RANGE_ARITY,
                    "scale.range",
                    format!("a quantitative scale needs exactly 2 range values, found {}", scale.range.len()),
                ));
            };
            let (r0, r1) = (limits.clamp(r0), limits.clamp(r1));
            // keep domain_min <= domain_max; a reversed domain flips the range instead
            let (domain_min, domain_max, range_min, range_max) =
                if min <= max { (*min, *max, r0, r1) } else { (*max, *min, r1, r0) };
            Ok(ResolvedScale::Linear { domain_min, domain_max, range_min, range_max, limits })
        }
        Domain::Categorical(categories) => {
            if scale.range.len() < categories.len() {
                return Err(Diagnostic::new(
                    Code::E_RANGE_TOO_SHORT,
                    "scale.range",
                    format!(
                        "{} categories but only {} range values",
                        categories.len(),
                        scale.range.len()
                    ),
                ));
            }
            Ok(ResolvedScale::Ordinal {
                categories: categories.clone(),
                range_values: scale.range.iter().map(|r| limits.clamp(*r)).collect(),
                limits,
            })
        }
    }
}

pub fn apply_scale(scale: &ResolvedScale, value: &DataValue) -> Result<f64, Diagnostic> {
    match scale {
        ResolvedScale::Constant { value, .. } => Ok(*value),
        ResolvedScale::Linear { domain_min, domain_max, range_min, range_max, limits } => {
            let v = value.as_number().ok_or_else(|| {
                Diagnostic::new(Code::E_DOMAIN_TYPE, "", format!("linear scale cannot map {value}"))
            })?;
            let out = if domain_min == domain_max {
                (range_min + range_max) / 2.0
            } else {
                range_min + (v - domain_min) / (domain_max - domain_min) * (range_max - range_min)
            };
            Ok(limits.finish(out))
        }
        ResolvedScale::Ordinal { categories, range_values, limits } => {
            let i = categories
                .iter()
                .position(|c| c.same_category(value))
                .ok_or_else(|| {
                    Diagnostic::new(Code::E_DOMAIN_MISS, "", format!("{value} is not in the scale domain"))
                })?;
            Ok(limits.finish(range_values[i]))
        }
    }
}
