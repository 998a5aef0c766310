use std::collections::HashSet;

use super::{ChannelDef, ChannelName, SpecDocument};
use crate::data::DataValue;
use crate::diagnostic::{index_path, key_path, Code, Diagnostic};
use crate::scales::ChannelLimits;

/// Semantic checks over a typed document. An empty result, or one holding
/// only warnings, means the document compiles.
pub fn validate_spec(spec: &SpecDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if spec.tone.continued {
        out.push(Diagnostic::new(
            Code::E_TONE_CONTINUED,
            "tone.continued",
            "speech tones are discrete; \"continued\" must be false",
        ));
    }

    let has = |c: ChannelName| spec.encoding.contains_key(&c);
    if has(ChannelName::SpeechToneDuration) && has(ChannelName::SpeechToneSpeed) {
        out.push(Diagnostic::new(
            Code::E_DURATION_SPEED_CONFLICT,
            channel_path(ChannelName::SpeechToneDuration),
            "duration and speed depend on each other and cannot both be mapped",
        ));
    }
    for name in spec.encoding.keys().filter(|c| !c.is_implemented()) {
        out.push(Diagnostic::new(
            Code::E_CHANNEL_UNIMPLEMENTED,
            channel_path(*name),
            format!("{name} is reserved but not implemented"),
        ));
    }

    if !has(ChannelName::Time) {
        out.push(Diagnostic::new(
            Code::E_MISSING_TIME_CHANNEL,
            "encoding",
            "encoding needs a \"time\" channel to order utterances",
        ));
    }

    for (name, def) in spec.encoding.iter().filter(|(c, _)| c.is_implemented()) {
        check_channel(*name, def, &mut out);
    }
    out
}

fn channel_path(name: ChannelName) -> String {
    key_path("encoding", name.as_str())
}

fn check_channel(name: ChannelName, def: &ChannelDef, out: &mut Vec<Diagnostic>) {
    let path = channel_path(name);
    let mut push = |code, at: String, msg: String| out.push(Diagnostic::new(code, at, msg));

    match name {
        ChannelName::Time => {
            if def.field.is_none() || def.aggregate.is_some() || def.value.is_some() {
                push(
                    Code::E_TIME_REQUIRES_FIELD,
                    path.clone(),
                    "time must be bound to a field, without aggregate or value".into(),
                );
            }
            if def.scale.is_some() {
                push(Code::W_SCALE_IGNORED, key_path(&path, "scale"), "time ignores scale".into());
            }
            return;
        }
        ChannelName::SpeechToneText => {
            match &def.value {
                None => push(
                    Code::E_TEXT_REQUIRES_VALUE,
                    path.clone(),
                    "SpeechToneText takes a \"value\" (a field name or literal text)".into(),
                ),
                Some(_) if def.field.is_some() || def.aggregate.is_some() => push(
                    Code::E_TEXT_REQUIRES_VALUE,
                    path.clone(),
                    "SpeechToneText takes only a \"value\"".into(),
                ),
                Some(v) if v.speech_text().is_empty() => push(
                    Code::E_SCHEMA,
                    key_path(&path, "value"),
                    "text value must not be empty".into(),
                ),
                Some(_) => {}
            }
            if def.scale.is_some() {
                push(Code::W_SCALE_IGNORED, key_path(&path, "scale"), "text ignores scale".into());
            }
            return;
        }
        _ => {}
    }

    // numeric speech attributes
    let Some(limits) = ChannelLimits::for_channel(name) else { return };
    let bindings = [def.field.is_some(), def.value.is_some(), def.aggregate.is_some()];
    if def.value.is_some() && bindings.iter().filter(|b| **b).count() > 1 {
        push(
            Code::E_CHANNEL_BINDING,
            path.clone(),
            "a literal value cannot be combined with field or aggregate".into(),
        );
    } else if !bindings.iter().any(|b| *b) {
        push(Code::E_CHANNEL_BINDING, path.clone(), "channel needs a field, value or aggregate".into());
    }
    if let Some(agg) = def.aggregate {
        if agg != crate::spec::Aggregate::Count && def.field.is_none() {
            push(
                Code::E_AGGREGATE_FIELD_REQUIRED,
                path.clone(),
                format!("aggregate {} needs a field", agg.as_str()),
            );
        }
    }

    if let Some(value) = &def.value {
        let at = key_path(&path, "value");
        match value {
            DataValue::Number(n) => check_limit(&limits, *n, at, out),
            _ => out.push(Diagnostic::new(
                Code::E_SCHEMA,
                at,
                format!("{name} value must be a number"),
            )),
        }
        if def.scale.is_some() {
            out.push(Diagnostic::new(
                Code::W_SCALE_IGNORED,
                key_path(&path, "scale"),
                "a literal value ignores scale",
            ));
        }
        return;
    }

    let Some(scale) = &def.scale else { return };
    let scale_path = key_path(&path, "scale");
    let range_path = key_path(&scale_path, "range");
    if scale.range.is_empty() {
        out.push(Diagnostic::new(Code::E_RANGE_EMPTY, range_path.clone(), "scale range is empty"));
    }
    // Aggregates are numeric, so an untyped aggregated channel is quantitative.
    let linear = match def.data_type {
        Some(t) => t.is_continuous(),
        None if def.aggregate.is_some() => true,
        None => false,
    };
    let categorical = def.data_type.is_some_and(|t| !t.is_continuous());
    if linear && !scale.range.is_empty() && scale.range.len() != 2 {
        out.push(Diagnostic::new(
            Code::E_RANGE_ARITY,
            range_path.clone(),
            format!("a quantitative scale needs exactly 2 range values, found {}", scale.range.len()),
        ));
    }
    if let Some(domain) = &scale.domain {
        let domain_path = key_path(&scale_path, "domain");
        let mut seen = HashSet::new();
        for (i, v) in domain.iter().enumerate() {
            if !seen.insert(v.group_key()) {
                out.push(Diagnostic::new(
                    Code::E_DOMAIN_DUPLICATE,
                    index_path(&domain_path, i),
                    format!("domain value {v} appears more than once"),
                ));
            }
        }
        if linear && (domain.len() != 2 || domain.iter().any(|v| v.as_number().is_none())) {
            out.push(Diagnostic::new(
                Code::E_SCHEMA,
                domain_path.clone(),
                "a quantitative domain is two numbers [min, max]",
            ));
        }
        if categorical && domain.len() > scale.range.len() && !scale.range.is_empty() {
            out.push(Diagnostic::new(
                Code::E_RANGE_TOO_SHORT,
                range_path.clone(),
                format!(
                    "{} domain values but only {} range values",
                    domain.len(),
                    scale.range.len()
                ),
            ));
        }
    }
    for (i, v) in scale.range.iter().enumerate() {
        check_limit(&limits, *v, index_path(&range_path, i), out);
    }
}

fn check_limit(limits: &ChannelLimits, v: f64, at: String, out: &mut Vec<Diagnostic>) {
    if !limits.contains(v) {
        out.push(Diagnostic::new(
            Code::W_RANGE_CLAMPED,
            at.clone(),
            format!("{v} is outside {}; it will be clamped", limits.describe()),
        ));
    }
    if limits.integral && v.fract() != 0.0 {
        out.push(Diagnostic::new(
            Code::W_VOICE_NOT_INTEGER,
            at,
            format!("voice IDs are integers; {v} will be rounded"),
        ));
    }
}
