//! Compiles declarative speech sonification specs into speech schedules.
//!
//! A spec binds data fields to speech channels (text, pitch, speed, voice)
//! and a time channel that orders the utterances. [`compile`] turns a spec
//! plus a dataset into a [`SpeechSchedule`], which the [`emit`] module
//! serializes as schedule JSON, SSML, or a plain-text trace.
//!
//! ```
//! use speechtone::{compile, parse_spec, dataset_from_json};
//!
//! let spec = parse_spec(r#"{
//!     "tone": {"type": "speechtone"},
//!     "encoding": {
//!         "time": {"field": "n", "type": "quantitative"},
//!         "SpeechToneText": {"value": "name"}
//!     }
//! }"#).unwrap().document;
//! let data = dataset_from_json(r#"[{"n": 2, "name": "b"}, {"n": 1, "name": "a"}]"#).unwrap();
//! let out = compile(&spec, &data).unwrap();
//! let spoken: Vec<_> = out.schedule.body.iter().map(|u| u.text.as_str()).collect();
//! assert_eq!(spoken, ["a", "b"]);
//! ```

pub mod cli;
pub mod compiler;
pub mod data;
pub mod diagnostic;
pub mod emit;
pub mod scales;
pub mod spec;

pub use compiler::{compile, spec_hash, Compiled, ScheduleMetadata, SpeechSchedule, Utterance};
pub use data::{dataset_from_csv, dataset_from_json, load_dataset, DataSourceRef, DataValue, Dataset};
pub use diagnostic::{Code, Diagnostic, Diagnostics, Severity};
pub use spec::{parse_spec, validate_spec, ChannelName, SpecDocument};
