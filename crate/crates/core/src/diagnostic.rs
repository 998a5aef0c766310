//! Structured diagnostics shared by every stage of the pipeline.
//!
//! A diagnostic carries a stable [`Code`], a severity implied by that code,
//! a human-readable message and a dotted path into the input document
//! (`encoding.SpeechTonePitch.scale.range[1]`). Codes are part of the
//! external contract; messages are not.

use std::fmt;

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! codes {
    ($( $(#[$doc:meta])* $variant:ident => $text:literal, )*) => {
        /// Stable diagnostic identifiers. The `E_` prefix marks errors, `W_` warnings.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        #[allow(non_camel_case_types)]
        pub enum Code {
            $( $(#[$doc])* $variant, )*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$(Code::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $( Code::$variant => $text, )*
                }
            }
        }
    };
}

codes! {
    /// The input text is not well-formed JSON.
    E_PARSE => "E_PARSE",
    /// A key holds a value of the wrong JSON type or an unsupported literal.
    E_SCHEMA => "E_SCHEMA",
    E_MISSING_TONE => "E_MISSING_TONE",
    E_MISSING_ENCODING => "E_MISSING_ENCODING",
    E_TONE_TYPE => "E_TONE_TYPE",
    E_TONE_CONTINUED => "E_TONE_CONTINUED",
    E_CHANNEL_UNKNOWN => "E_CHANNEL_UNKNOWN",
    /// Loudness and duration are reserved names without an implementation.
    E_CHANNEL_UNIMPLEMENTED => "E_CHANNEL_UNIMPLEMENTED",
    E_DURATION_SPEED_CONFLICT => "E_DURATION_SPEED_CONFLICT",
    E_MISSING_TIME_CHANNEL => "E_MISSING_TIME_CHANNEL",
    /// A channel has none, or more than one, of field / value / aggregate.
    E_CHANNEL_BINDING => "E_CHANNEL_BINDING",
    E_AGGREGATE_FIELD_REQUIRED => "E_AGGREGATE_FIELD_REQUIRED",
    E_TEXT_REQUIRES_VALUE => "E_TEXT_REQUIRES_VALUE",
    E_TIME_REQUIRES_FIELD => "E_TIME_REQUIRES_FIELD",
    E_RANGE_EMPTY => "E_RANGE_EMPTY",
    E_RANGE_ARITY => "E_RANGE_ARITY",
    E_RANGE_TOO_SHORT => "E_RANGE_TOO_SHORT",
    E_DOMAIN_DUPLICATE => "E_DOMAIN_DUPLICATE",
    E_TRANSFORM_UNKNOWN => "E_TRANSFORM_UNKNOWN",
    E_MISSING_DATA => "E_MISSING_DATA",
    E_DATA_UNREADABLE => "E_DATA_UNREADABLE",
    E_DATA_MALFORMED => "E_DATA_MALFORMED",
    E_DATA_RAGGED => "E_DATA_RAGGED",
    E_DATA_FORMAT => "E_DATA_FORMAT",
    E_EMPTY_DATASET => "E_EMPTY_DATASET",
    E_NO_COLUMNS => "E_NO_COLUMNS",
    E_UNKNOWN_FIELD => "E_UNKNOWN_FIELD",
    E_FILTER_TYPE_MISMATCH => "E_FILTER_TYPE_MISMATCH",
    E_AGGREGATE_NON_NUMERIC => "E_AGGREGATE_NON_NUMERIC",
    E_DOMAIN_EMPTY => "E_DOMAIN_EMPTY",
    E_DOMAIN_TYPE => "E_DOMAIN_TYPE",
    E_DOMAIN_MISS => "E_DOMAIN_MISS",
    E_SCHEDULE_FORMAT => "E_SCHEDULE_FORMAT",
    E_SCHEDULE_VERSION => "E_SCHEDULE_VERSION",
    E_VOICE_MAP_INVALID => "E_VOICE_MAP_INVALID",
    W_UNKNOWN_KEY => "W_UNKNOWN_KEY",
    W_RANGE_CLAMPED => "W_RANGE_CLAMPED",
    W_VOICE_NOT_INTEGER => "W_VOICE_NOT_INTEGER",
    W_SCALE_IGNORED => "W_SCALE_IGNORED",
    W_NULL_TIME => "W_NULL_TIME",
    W_NULL_TEXT => "W_NULL_TEXT",
    W_NULL_VALUE => "W_NULL_VALUE",
    W_VOICE_UNMAPPED => "W_VOICE_UNMAPPED",
    W_DEFAULT_VOICE_MAP => "W_DEFAULT_VOICE_MAP",
}

impl Code {
    pub fn severity(self) -> Severity {
        if self.as_str().starts_with("W_") {
            Severity::Warning
        } else {
            Severity::Error
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Line/column of a syntax error in the raw input (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{} {} {}: {}", .severity, .code, display_path(.path), .message)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    /// Dotted location, empty for the document root.
    pub path: String,
    pub position: Option<Position>,
}

fn display_path(path: &str) -> &str {
    if path.is_empty() {
        "<root>"
    } else {
        path
    }
}

impl Diagnostic {
    pub fn new(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            message: message.into(),
            path: path.into(),
            position: None,
        }
    }

    pub fn with_position(mut self, line: usize, column: usize) -> Self {
        self.position = Some(Position { line, column });
        self
    }

    /// Re-roots the path under `prefix` (`filter.field` -> `transform[0].filter.field`).
    pub fn under(mut self, prefix: &str) -> Self {
        self.path = join_path(prefix, &self.path);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Splits the dotted path into segments; array indices become `Index` segments.
    pub fn path_segments(&self) -> Vec<PathSegment> {
        parse_path(&self.path)
    }

    /// Looks the path up in a JSON document, returning the addressed node.
    pub fn locate<'a>(&self, doc: &'a Value) -> Option<&'a Value> {
        let mut node = doc;
        for seg in self.path_segments() {
            node = match seg {
                PathSegment::Key(k) => node.as_object()?.get(&k)?,
                PathSegment::Index(i) => node.as_array()?.get(i)?,
            };
        }
        Some(node)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSegment {
    Key(String),
    Index(usize),
}

pub(crate) fn join_path(prefix: &str, rest: &str) -> String {
    match (prefix.is_empty(), rest.is_empty()) {
        (true, _) => rest.to_string(),
        (false, true) => prefix.to_string(),
        (false, false) if rest.starts_with('[') => format!("{prefix}{rest}"),
        (false, false) => format!("{prefix}.{rest}"),
    }
}

/// Appends an object key to a path, quoting keys that are not plain identifiers.
pub fn key_path(prefix: &str, key: &str) -> String {
    let plain = !key.is_empty()
        && key
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '$');
    if plain {
        join_path(prefix, key)
    } else {
        let quoted = serde_json::to_string(key).expect("string serialization is infallible");
        format!("{prefix}[{quoted}]")
    }
}

pub fn index_path(prefix: &str, index: usize) -> String {
    format!("{prefix}[{index}]")
}

fn parse_path(path: &str) -> Vec<PathSegment> {
    let bytes = path.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'.' => i += 1,
            b'[' if bytes.get(i + 1) == Some(&b'"') => {
                // quoted key: scan to the closing quote, honouring escapes
                let start = i + 1;
                let mut j = start + 1;
                while j < bytes.len() && bytes[j] != b'"' {
                    j += if bytes[j] == b'\\' { 2 } else { 1 };
                }
                let end = (j + 1).min(bytes.len());
                if let Ok(key) = serde_json::from_str::<String>(&path[start..end]) {
                    out.push(PathSegment::Key(key));
                }
                i = end + 1;
            }
            b'[' => {
                let end = path[i..].find(']').map_or(bytes.len(), |e| i + e);
                if let Ok(n) = path[i + 1..end].parse() {
                    out.push(PathSegment::Index(n));
                }
                i = end + 1;
            }
            _ => {
                let end = path[i..]
                    .find(['.', '['])
                    .map_or(bytes.len(), |e| i + e);
                out.push(PathSegment::Key(path[i..end].to_string()));
                i = end;
            }
        }
    }
    out
}

/// An ordered batch of diagnostics, returned when a stage fails.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn has_errors(&self) -> bool {
        self.0.iter().any(Diagnostic::is_error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter().filter(|d| d.is_error())
    }

    pub fn codes(&self) -> Vec<Code> {
        self.0.iter().map(|d| d.code).collect()
    }

    pub fn contains(&self, code: Code) -> bool {
        self.0.iter().any(|d| d.code == code)
    }
}

impl From<Diagnostic> for Diagnostics {
    fn from(d: Diagnostic) -> Self {
        Diagnostics(vec![d])
    }
}

impl From<Vec<Diagnostic>> for Diagnostics {
    fn from(v: Vec<Diagnostic>) -> Self {
        Diagnostics(v)
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for Diagnostics {}
