//! Output formats for a compiled schedule.

pub mod canonical;
mod schedule;
mod ssml;
mod trace;

pub use schedule::{emit_schedule_json, parse_schedule_json, SCHEDULE_VERSION};
pub use ssml::{emit_ssml, pitch_percent, rate_percent, SsmlOptions, SsmlOutput, VoiceMap};
pub use trace::emit_trace;
