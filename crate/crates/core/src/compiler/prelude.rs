use std::collections::BTreeMap;

use super::Utterance;
use crate::data::{format_speech_number, DataValue};
use crate::scales::ResolvedScale;
use crate::spec::{Aggregate, ChannelDef, ChannelName, SpecDocument};

/// Spoken legend: one utterance per data-bound speech attribute, at default
/// pitch, rate and voice. Literal-valued channels and the text channel are
/// not announced.
///
/// Templates:
/// - linear: `Pitch represents <what>, from <r0> for <d0> to <r1> for <d1>.`
/// - ordinal: `Voice represents <what>: <c1>, <c2>, <c3>.`
/// - no scale: `Pitch represents <what>, held at <default>.`
pub fn generate_prelude(
    spec: &SpecDocument,
    scales: &BTreeMap<ChannelName, ResolvedScale>,
    group_keys: &[String],
) -> Vec<Utterance> {
    let mut out = Vec::new();
    for name in ChannelName::ATTRIBUTES {
        let (Some(def), Some(scale)) = (spec.channel(name), scales.get(&name)) else { continue };
        let Some(what) = describe(def, group_keys) else { continue };
        let attr = name.spoken_name();
        let text = match scale {
            ResolvedScale::Linear { domain_min, domain_max, range_min, range_max, .. } => format!(
                "{attr} represents {what}, from {} for {} to {} for {}.",
                format_speech_number(*range_min),
                format_speech_number(*domain_min),
                format_speech_number(*range_max),
                format_speech_number(*domain_max),
            ),
            ResolvedScale::Ordinal { categories, .. } => {
                let cats: Vec<String> = categories.iter().map(DataValue::speech_text).collect();
                format!("{attr} represents {what}: {}.", cats.join(", "))
            }
            ResolvedScale::Constant { value, .. } => {
                format!("{attr} represents {what}, held at {}.", format_speech_number(*value))
            }
        };
        out.push(Utterance::plain(out.len(), text));
    }
    out
}

fn describe(def: &ChannelDef, group_keys: &[String]) -> Option<String> {
    match (def.aggregate, &def.field) {
        (Some(agg), field) => {
            let subject = match (agg, field) {
                (Aggregate::Count, _) => "count of records".to_string(),
                (_, Some(f)) => format!("{} of {f}", agg.as_str()),
                (_, None) => agg.as_str().to_string(),
            };
            if group_keys.is_empty() {
                Some(subject)
            } else {
                Some(format!("{subject} per {}", group_keys.join(" and ")))
            }
        }
        (None, Some(f)) => Some(f.clone()),
        (None, None) => None,
    }
}
