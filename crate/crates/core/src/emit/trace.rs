use crate::compiler::{SpeechSchedule, Utterance};

/// One line per utterance, prelude first (prefixed `P`):
/// `#0 "USA" pitch=1.000 rate=1.000 voice=0`.
pub fn emit_trace(schedule: &SpeechSchedule) -> String {
    let mut out = String::new();
    for u in &schedule.prelude {
        out.push('P');
        push_line(&mut out, u);
    }
    for u in &schedule.body {
        push_line(&mut out, u);
    }
    out
}

fn push_line(out: &mut String, u: &Utterance) {
    let text = u.text.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n");
    out.push_str(&format!(
        "#{} \"{}\" pitch={:.3} rate={:.3} voice={}\n",
        u.index, text, u.pitch, u.rate, u.voice_id
    ));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::ScheduleMetadata;

    fn schedule(prelude: Vec<Utterance>, body: Vec<Utterance>) -> SpeechSchedule {
        SpeechSchedule {
            prelude,
            body,
            metadata: ScheduleMetadata { spec_hash: String::new(), row_count: 0, generator: String::new() },
        }
    }

    #[test]
    fn default_line() {
        let s = schedule(vec![], vec![Utterance::plain(0, "USA")]);
        assert_eq!(emit_trace(&s), "#0 \"USA\" pitch=1.000 rate=1.000 voice=0\n");
    }

    #[test]
    fn prelude_prefix_and_escaping() {
        let mut u = Utterance::plain(1, "say \"hi\"");
        u.pitch = 1.375;
        u.voice_id = 34;
        let s = schedule(vec![Utterance::plain(0, "Pitch represents x.")], vec![Utterance::plain(0, "a"), u]);
        assert_eq!(
            emit_trace(&s),
            "P#0 \"Pitch represents x.\" pitch=1.000 rate=1.000 voice=0\n\
             #0 \"a\" pitch=1.000 rate=1.000 voice=0\n\
             #1 \"say \\\"hi\\\"\" pitch=1.375 rate=1.000 voice=34\n"
        );
    }
}
