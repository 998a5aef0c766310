use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use quick_xml::escape::escape;
use serde_json::Value;

use crate::compiler::SpeechSchedule;
use crate::diagnostic::{key_path, Code, Diagnostic};

/// Voice IDs are platform-specific, so engine voice names come from configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoiceMap {
    entries: BTreeMap<u64, String>,
    default_name: String,
}

impl VoiceMap {
    pub const BUILTIN_DEFAULT: &'static str = "default";

    pub fn new(default_name: impl Into<String>) -> Result<Self, Diagnostic> {
        let default_name = default_name.into();
        if default_name.is_empty() {
            return Err(Diagnostic::new(Code::E_VOICE_MAP_INVALID, "default", "default voice name is empty"));
        }
        Ok(VoiceMap { entries: BTreeMap::new(), default_name })
    }

    /// Maps every ID to the built-in default voice.
    pub fn builtin() -> Self {
        VoiceMap { entries: BTreeMap::new(), default_name: Self::BUILTIN_DEFAULT.to_string() }
    }

    pub fn with_voice(mut self, id: u64, name: impl Into<String>) -> Self {
        self.entries.insert(id, name.into());
        self
    }

    /// Parses `{"0": "David", "65": "Kyoko", "default": "David"}`.
    pub fn from_json(text: &str) -> Result<Self, Diagnostic> {
        let invalid = |path: String, msg: String| Diagnostic::new(Code::E_VOICE_MAP_INVALID, path, msg);
        let value: Value = serde_json::from_str(text).map_err(|e| {
            invalid(String::new(), format!("malformed voice map: {e}")).with_position(e.line(), e.column())
        })?;
        let obj = value
            .as_object()
            .ok_or_else(|| invalid(String::new(), "voice map must be a JSON object".into()))?;
        let default = match obj.get("default") {
            Some(Value::String(s)) if !s.is_empty() => s.clone(),
            _ => return Err(invalid("default".into(), "voice map needs a non-empty \"default\" name".into())),
        };
        let mut map = VoiceMap::new(default)?;
        for (key, v) in obj.iter().filter(|(k, _)| k.as_str() != "default") {
            let id: u64 = key
                .parse()
                .map_err(|_| invalid(key_path("", key), format!("voice ID {key:?} is not a non-negative integer")))?;
            match v {
                Value::String(name) if !name.is_empty() => map.entries.insert(id, name.clone()),
                _ => return Err(invalid(key_path("", key), "voice names must be non-empty strings".into())),
            };
        }
        Ok(map)
    }

    pub fn lookup(&self, id: u64) -> Option<&str> {
        self.entries.get(&id).map(String::as_str)
    }

    pub fn name_for(&self, id: u64) -> &str {
        self.lookup(id).unwrap_or(&self.default_name)
    }

    pub fn default_name(&self) -> &str {
        &self.default_name
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsmlOptions {
    /// Pause between consecutive utterances; 0 disables breaks.
    pub break_ms: u64,
    pub lang: String,
}

impl Default for SsmlOptions {
    fn default() -> Self {
        SsmlOptions { break_ms: 300, lang: "en-US".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsmlOutput {
    pub document: String,
    /// One `W_VOICE_UNMAPPED` per distinct voice ID that fell back to the default.
    pub warnings: Vec<Diagnostic>,
}

/// Pitch multiplier as a signed relative change: 0.75 -> `-25.0%`.
pub fn pitch_percent(pitch: f64) -> String {
    let pct = round1((pitch - 1.0) * 100.0);
    if pct == 0.0 {
        "+0.0%".to_string()
    } else {
        format!("{pct:+.1}%")
    }
}

/// Rate multiplier as an absolute percentage: 4.0 -> `400.0%`.
pub fn rate_percent(rate: f64) -> String {
    format!("{:.1}%", round1(rate * 100.0))
}

fn round1(v: f64) -> f64 {
    (v * 10.0).round() / 10.0
}

/// SSML 1.0 document: prelude then body, one voice-wrapped prosody element
/// per utterance, with a break between consecutive utterances.
pub fn emit_ssml(schedule: &SpeechSchedule, voices: &VoiceMap, options: &SsmlOptions) -> SsmlOutput {
    let mut doc = String::new();
    doc.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        doc,
        "<speak version=\"1.0\" xmlns=\"http://www.w3.org/2001/10/synthesis\" xml:lang=\"{}\">",
        escape(options.lang.as_str())
    )
    .unwrap();
    let mut unmapped = BTreeSet::new();
    let mut warnings = Vec::new();
    let all = schedule.prelude.iter().map(|u| ("prelude", u)).chain(schedule.body.iter().map(|u| ("body", u)));
    for (n, (section, u)) in all.enumerate() {
        if n > 0 && options.break_ms > 0 {
            writeln!(doc, "  <break time=\"{}ms\"/>", options.break_ms).unwrap();
        }
        if voices.lookup(u.voice_id).is_none() && unmapped.insert(u.voice_id) {
            warnings.push(Diagnostic::new(
                Code::W_VOICE_UNMAPPED,
                format!("{section}[{}].voiceId", u.index),
                format!("voice ID {} is not mapped; using {:?}", u.voice_id, voices.default_name()),
            ));
        }
        writeln!(
            doc,
            "  <voice name=\"{}\"><prosody pitch=\"{}\" rate=\"{}\">{}</prosody></voice>",
            escape(voices.name_for(u.voice_id)),
            pitch_percent(u.pitch),
            rate_percent(u.rate),
            escape(u.text.as_str()),
        )
        .unwrap();
    }
    doc.push_str("</speak>\n");
    SsmlOutput { document: doc, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{ScheduleMetadata, Utterance};

    fn schedule(body: Vec<Utterance>) -> SpeechSchedule {
        SpeechSchedule {
            prelude: vec![],
            body,
            metadata: ScheduleMetadata { spec_hash: String::new(), row_count: 0, generator: String::new() },
        }
    }

    #[test]
    fn japan_element() {
        let mut u = Utterance::plain(0, "Japan");
        u.pitch = 2.0;
        u.voice_id = 65;
        let vm = VoiceMap::new("David").unwrap().with_voice(65, "ja-voice");
        let out = emit_ssml(&schedule(vec![u]), &vm, &SsmlOptions::default());
        assert!(out.document.contains(
            r#"<voice name="ja-voice"><prosody pitch="+100.0%" rate="100.0%">Japan</prosody></voice>"#
        ));
        assert!(out.warnings.is_empty());
    }

    #[test]
    fn percentages() {
        assert_eq!(pitch_percent(0.75), "-25.0%");
        assert_eq!(pitch_percent(1.0), "+0.0%");
        assert_eq!(pitch_percent(0.0), "-100.0%");
        assert_eq!(pitch_percent(1.0004), "+0.0%");
        assert_eq!(pitch_percent(0.9996), "+0.0%");
        assert_eq!(rate_percent(4.0), "400.0%");
        assert_eq!(rate_percent(1.0), "100.0%");
        assert_eq!(rate_percent(0.1), "10.0%");
        assert_eq!(rate_percent(1.2), "120.0%");
    }

    #[test]
    fn breaks_between_utterances_only() {
        let body = vec![Utterance::plain(0, "a"), Utterance::plain(1, "b"), Utterance::plain(2, "c")];
        let out = emit_ssml(&schedule(body.clone()), &VoiceMap::builtin(), &SsmlOptions::default());
        assert_eq!(out.document.matches("<break time=\"300ms\"/>").count(), 2);
        let opts = SsmlOptions { break_ms: 0, ..Default::default() };
        let out = emit_ssml(&schedule(body), &VoiceMap::builtin(), &opts);
        assert!(!out.document.contains("<break"));
    }

    #[test]
    fn unmapped_voice_warns_once() {
        let mut a = Utterance::plain(0, "a");
        a.voice_id = 65;
        let mut b = a.clone();
        b.index = 1;
        let vm = VoiceMap::new("David").unwrap();
        let out = emit_ssml(&schedule(vec![a, b]), &vm, &SsmlOptions::default());
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.warnings[0].code, Code::W_VOICE_UNMAPPED);
        assert_eq!(out.warnings[0].path, "body[0].voiceId");
        assert!(out.document.contains("<voice name=\"David\">"));
    }

    #[test]
    fn text_is_escaped() {
        let out = emit_ssml(
            &schedule(vec![Utterance::plain(0, "AT&T <b> \"q\"")]),
            &VoiceMap::builtin(),
            &SsmlOptions::default(),
        );
        assert!(out.document.contains("AT&amp;T &lt;b&gt; &quot;q&quot;"));
    }

    #[test]
    fn voice_map_file() {
        let vm = VoiceMap::from_json(include_str!("../../fixtures/voices.json")).unwrap();
        assert_eq!(vm.name_for(65), "Google 日本語");
        assert_eq!(vm.name_for(7), vm.default_name());
        let err = VoiceMap::from_json(r#"{"0": "a"}"#).unwrap_err();
        assert_eq!(err.code, Code::E_VOICE_MAP_INVALID);
        let err = VoiceMap::from_json(r#"{"default": "a", "x": "b"}"#).unwrap_err();
        assert_eq!(err.path, "x");
        let err = VoiceMap::from_json(r#"{"default": "a", "-1": "b"}"#).unwrap_err();
        assert_eq!(err.code, Code::E_VOICE_MAP_INVALID);
    }
}
