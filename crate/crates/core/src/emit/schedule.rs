use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::canonical;
use crate::compiler::{ScheduleMetadata, SpeechSchedule, Utterance};
use crate::diagnostic::{Code, Diagnostic};

pub const SCHEDULE_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireSchedule {
    version: u64,
    metadata: WireMetadata,
    prelude: Vec<WireUtterance>,
    body: Vec<WireUtterance>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct WireMetadata {
    spec_hash: String,
    row_count: usize,
    generator: String,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct WireUtterance {
    index: usize,
    text: String,
    pitch: f64,
    rate: f64,
    voice_id: u64,
}

impl From<&Utterance> for WireUtterance {
    fn from(u: &Utterance) -> Self {
        WireUtterance { index: u.index, text: u.text.clone(), pitch: u.pitch, rate: u.rate, voice_id: u.voice_id }
    }
}

impl From<WireUtterance> for Utterance {
    fn from(u: WireUtterance) -> Self {
        Utterance { index: u.index, text: u.text, pitch: u.pitch, rate: u.rate, voice_id: u.voice_id }
    }
}

/// Canonical schedule document (`"version": 1`), newline-terminated.
pub fn emit_schedule_json(schedule: &SpeechSchedule) -> String {
    let wire = WireSchedule {
        version: SCHEDULE_VERSION,
        metadata: WireMetadata {
            spec_hash: schedule.metadata.spec_hash.clone(),
            row_count: schedule.metadata.row_count,
            generator: schedule.metadata.generator.clone(),
        },
        prelude: schedule.prelude.iter().map(WireUtterance::from).collect(),
        body: schedule.body.iter().map(WireUtterance::from).collect(),
    };
    let value = serde_json::to_value(&wire).expect("schedule serializes to JSON");
    let mut text = canonical::to_string(&value);
    text.push('\n');
    text
}

/// Reads a schedule document back. Only version 1 is accepted.
pub fn parse_schedule_json(text: &str) -> Result<SpeechSchedule, Diagnostic> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        Diagnostic::new(Code::E_SCHEDULE_FORMAT, "", format!("malformed schedule: {e}"))
            .with_position(e.line(), e.column())
    })?;
    match value.get("version").and_then(Value::as_u64) {
        Some(SCHEDULE_VERSION) => {}
        Some(v) => {
            return Err(Diagnostic::new(
                Code::E_SCHEDULE_VERSION,
                "version",
                format!("unsupported schedule version {v}"),
            ))
        }
        None => {
            return Err(Diagnostic::new(Code::E_SCHEDULE_VERSION, "", "schedule has no integer \"version\""))
        }
    }
    let wire: WireSchedule = serde_json::from_value(value)
        .map_err(|e| Diagnostic::new(Code::E_SCHEDULE_FORMAT, "", format!("malformed schedule: {e}")))?;
    Ok(SpeechSchedule {
        prelude: wire.prelude.into_iter().map(Utterance::from).collect(),
        body: wire.body.into_iter().map(Utterance::from).collect(),
        metadata: ScheduleMetadata {
            spec_hash: wire.metadata.spec_hash,
            row_count: wire.metadata.row_count,
            generator: wire.metadata.generator,
        },
    })
}
