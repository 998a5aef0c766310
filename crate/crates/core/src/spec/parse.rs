use std::collections::BTreeMap;

use serde_json::{Map, Value};

use super::{
    validate_spec, Aggregate, ChannelDef, ChannelName, DataType, ScaleDef, SpecDocument, ToneDef,
    ToneType, TransformDef,
};
use crate::data::{DataSourceRef, DataValue, Filter, FilterOp};
use crate::diagnostic::{index_path, key_path, Code, Diagnostic, Diagnostics};

/// A successfully parsed document plus any warnings raised along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSpec {
    pub document: SpecDocument,
    pub warnings: Vec<Diagnostic>,
}

/// Parses and validates a spec. On failure every diagnostic collected so far
/// (errors and warnings, in emission order) is returned.
pub fn parse_spec(raw: &str) -> Result<ParsedSpec, Diagnostics> {
    let root: Value = serde_json::from_str(raw).map_err(|e| {
        Diagnostic::new(Code::E_PARSE, "", format!("malformed JSON: {e}"))
            .with_position(e.line(), e.column())
    })?;
    let mut p = Parser::default();
    let document = p.document(&root);
    let mut diags = p.diags;
    match document {
        Some(doc) if !diags.iter().any(Diagnostic::is_error) => {
            diags.extend(validate_spec(&doc));
            if diags.iter().any(Diagnostic::is_error) {
                Err(Diagnostics(diags))
            } else {
                Ok(ParsedSpec { document: doc, warnings: diags })
            }
        }
        _ => Err(Diagnostics(diags)),
    }
}

/// Parses a standalone `tone` object such as `{"continued": false, "type": "speechtone"}`.
pub fn parse_tone(raw: &str) -> Result<ToneDef, Diagnostics> {
    let value: Value = serde_json::from_str(raw).map_err(|e| {
        Diagnostic::new(Code::E_PARSE, "", format!("malformed JSON: {e}"))
            .with_position(e.line(), e.column())
    })?;
    let mut p = Parser::default();
    match p.tone(&value, "") {
        Some(tone) if !p.diags.iter().any(Diagnostic::is_error) => Ok(tone),
        _ => Err(Diagnostics(p.diags)),
    }
}

#[derive(Default)]
struct Parser {
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn error(&mut self, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(code, path, message));
    }

    fn object<'a>(&mut self, value: &'a Value, path: &str) -> Option<&'a Map<String, Value>> {
        let obj = value.as_object();
        if obj.is_none() {
            self.error(Code::E_SCHEMA, path, format!("expected an object, found {}", kind(value)));
        }
        obj
    }

    fn unknown_key(&mut self, path: &str, key: &str) {
        self.error(Code::W_UNKNOWN_KEY, key_path(path, key), format!("unknown key {key:?} ignored"));
    }

    fn document(&mut self, root: &Value) -> Option<SpecDocument> {
        let obj = self.object(root, "")?;
        let mut data_source = None;
        let mut tone = None;
        let mut transforms = Vec::new();
        let mut encoding = None;
        let mut prelude_enabled = false;
        for (key, value) in obj {
            match key.as_str() {
                "data" => data_source = self.data(value, "data"),
                "tone" => tone = self.tone(value, "tone"),
                "transform" => transforms = self.transforms(value, "transform"),
                "encoding" => encoding = self.encoding(value, "encoding"),
                "prelude" => match value {
                    Value::Bool(b) => prelude_enabled = *b,
                    other => self.error(
                        Code::E_SCHEMA,
                        "prelude",
                        format!("expected a boolean, found {}", kind(other)),
                    ),
                },
                _ => self.unknown_key("", key),
            }
        }
        if !obj.contains_key("tone") {
            self.error(Code::E_MISSING_TONE, "", "missing \"tone\" declaration");
        }
        if !obj.contains_key("encoding") {
            self.error(Code::E_MISSING_ENCODING, "", "missing \"encoding\" block");
        }
        Some(SpecDocument {
            data_source,
            tone: tone?,
            transforms,
            encoding: encoding?,
            prelude_enabled,
        })
    }

    fn data(&mut self, value: &Value, path: &str) -> Option<DataSourceRef> {
        let obj = self.object(value, path)?;
        let mut values = None;
        let mut url = None;
        let mut format = None;
        for (key, v) in obj {
            let here = key_path(path, key);
            match key.as_str() {
                "values" => match v {
                    Value::Array(items) => values = Some(items.clone()),
                    other => self.error(Code::E_SCHEMA, here, format!("expected an array, found {}", kind(other))),
                },
                "url" => match v {
                    Value::String(s) if !s.is_empty() => url = Some(s.clone()),
                    other => self.error(Code::E_SCHEMA, here, format!("expected a file path, found {}", kind(other))),
                },
                "format" => {
                    let ty = v.as_object().and_then(|f| f.get("type")).and_then(Value::as_str);
                    match ty {
                        Some("csv") | Some("json") => format = ty.map(str::to_string),
                        _ => self.error(
                            Code::E_DATA_FORMAT,
                            here,
                            "format must be {\"type\": \"csv\"} or {\"type\": \"json\"}",
                        ),
                    }
                }
                _ => self.unknown_key(path, key),
            }
        }
        match (values, url) {
            (Some(values), None) => Some(DataSourceRef::Inline(values)),
            (None, Some(url)) => Some(match format.as_deref() {
                Some("csv") => DataSourceRef::Csv(url.into()),
                Some(_) => DataSourceRef::Json(url.into()),
                None => DataSourceRef::from_path(url),
            }),
            (Some(_), Some(_)) => {
                self.error(Code::E_SCHEMA, path, "data takes either \"values\" or \"url\", not both");
                None
            }
            (None, None) => {
                if !self.diags.iter().any(|d| d.is_error() && d.path.starts_with(path)) {
                    self.error(Code::E_SCHEMA, path, "data needs \"values\" or \"url\"");
                }
                None
            }
        }
    }

    fn tone(&mut self, value: &Value, path: &str) -> Option<ToneDef> {
        let obj = self.object(value, path)?;
        let mut tone_type = None;
        let mut continued = false;
        for (key, v) in obj {
            let here = key_path(path, key);
            match key.as_str() {
                "type" => match v.as_str() {
                    Some("speechtone") => tone_type = Some(ToneType::SpeechTone),
                    _ => self.error(
                        Code::E_TONE_TYPE,
                        here,
                        format!("tone type must be \"speechtone\", found {v}"),
                    ),
                },
                "continued" => match v {
                    Value::Bool(b) => continued = *b,
                    other => self.error(Code::E_SCHEMA, here, format!("expected a boolean, found {}", kind(other))),
                },
                _ => self.unknown_key(path, key),
            }
        }
        if !obj.contains_key("type") {
            self.error(Code::E_TONE_TYPE, path, "tone has no \"type\"");
        }
        Some(ToneDef { tone_type: tone_type?, continued })
    }

    fn transforms(&mut self, value: &Value, path: &str) -> Vec<TransformDef> {
        let Some(items) = value.as_array() else {
            self.error(Code::E_SCHEMA, path, format!("expected an array, found {}", kind(value)));
            return Vec::new();
        };
        let mut out = Vec::new();
        for (i, item) in items.iter().enumerate() {
            let here = index_path(path, i);
            let Some(obj) = self.object(item, &here) else { continue };
            if obj.is_empty() {
                self.error(Code::E_TRANSFORM_UNKNOWN, here.clone(), "empty transform");
            }
            for (key, v) in obj {
                match key.as_str() {
                    "filter" => {
                        if let Some(f) = self.filter(v, &key_path(&here, key)) {
                            out.push(TransformDef::Filter(f));
                        }
                    }
                    _ => self.error(
                        Code::E_TRANSFORM_UNKNOWN,
                        key_path(&here, key),
                        format!("unsupported transform {key:?}"),
                    ),
                }
            }
        }
        out
    }

    fn filter(&mut self, value: &Value, path: &str) -> Option<Filter> {
        let obj = self.object(value, path)?;
        let mut field = None;
        let mut op = None;
        let mut literal = None;
        for (key, v) in obj {
            let here = key_path(path, key);
            match key.as_str() {
                "field" => field = self.field_name(v, &here),
                "op" => match v.as_str().and_then(FilterOp::parse) {
                    Some(o) => op = Some(o),
                    None => self.error(
                        Code::E_SCHEMA,
                        here,
                        format!("op must be one of eq, neq, lt, lte, gt, gte; found {v}"),
                    ),
                },
                "value" => literal = self.scalar(v, &here, true),
                _ => self.unknown_key(path, key),
            }
        }
        for (name, missing) in [("field", field.is_none()), ("op", op.is_none()), ("value", literal.is_none())] {
            if missing && !obj.contains_key(name) {
                self.error(Code::E_SCHEMA, path, format!("filter needs \"{name}\""));
            }
        }
        Some(Filter { field: field?, op: op?, value: literal? })
    }

    fn encoding(&mut self, value: &Value, path: &str) -> Option<BTreeMap<ChannelName, ChannelDef>> {
        let obj = self.object(value, path)?;
        let mut out = BTreeMap::new();
        for (key, v) in obj {
            let here = key_path(path, key);
            let Some(name) = ChannelName::parse(key) else {
                self.error(Code::E_CHANNEL_UNKNOWN, here, format!("unknown channel {key:?}"));
                continue;
            };
            if let Some(def) = self.channel(v, &here) {
                out.insert(name, def);
            }
        }
        Some(out)
    }

    fn channel(&mut self, value: &Value, path: &str) -> Option<ChannelDef> {
        let obj = self.object(value, path)?;
        let mut def = ChannelDef::default();
        let mut ok = true;
        for (key, v) in obj {
            let here = key_path(path, key);
            match key.as_str() {
                "field" => {
                    def.field = self.field_name(v, &here);
                    ok &= def.field.is_some();
                }
                "value" => {
                    def.value = self.scalar(v, &here, false);
                    ok &= def.value.is_some();
                }
                "type" => match v.as_str().and_then(DataType::parse) {
                    Some(t) => def.data_type = Some(t),
                    None => {
                        ok = false;
                        self.error(
                            Code::E_SCHEMA,
                            here,
                            format!("type must be nominal, ordinal, quantitative or temporal; found {v}"),
                        )
                    }
                },
                "aggregate" => match v.as_str().and_then(Aggregate::parse) {
                    Some(a) => def.aggregate = Some(a),
                    None => {
                        ok = false;
                        self.error(
                            Code::E_SCHEMA,
                            here,
                            format!("aggregate must be count, sum, mean, min or max; found {v}"),
                        )
                    }
                },
                "scale" => {
                    def.scale = self.scale(v, &here);
                    ok &= def.scale.is_some();
                }
                _ => self.unknown_key(path, key),
            }
        }
        ok.then_some(def)
    }

    fn scale(&mut self, value: &Value, path: &str) -> Option<ScaleDef> {
        let obj = self.object(value, path)?;
        let mut domain = None;
        let mut range = None;
        let mut ok = true;
        for (key, v) in obj {
            let here = key_path(path, key);
            match key.as_str() {
                "domain" => {
                    let Some(items) = v.as_array() else {
                        ok = false;
                        self.error(Code::E_SCHEMA, here, format!("expected an array, found {}", kind(v)));
                        continue;
                    };
                    let values: Vec<Option<DataValue>> = items
                        .iter()
                        .enumerate()
                        .map(|(i, item)| self.scalar(item, &index_path(&here, i), false))
                        .collect();
                    domain = values.into_iter().collect::<Option<Vec<_>>>();
                    ok &= domain.is_some();
                }
                "range" => {
                    let Some(items) = v.as_array() else {
                        ok = false;
                        self.error(Code::E_SCHEMA, here, format!("expected an array of numbers, found {}", kind(v)));
                        continue;
                    };
                    let mut nums = Vec::with_capacity(items.len());
                    for (i, item) in items.iter().enumerate() {
                        match item.as_f64() {
                            Some(n) => nums.push(n),
                            None => {
                                ok = false;
                                self.error(
                                    Code::E_SCHEMA,
                                    index_path(&here, i),
                                    format!("range entries must be numbers, found {}", kind(item)),
                                );
                            }
                        }
                    }
                    range = Some(nums);
                }
                _ => self.unknown_key(path, key),
            }
        }
        if !obj.contains_key("range") {
            self.error(Code::E_SCHEMA, path, "scale needs a \"range\"");
            return None;
        }
        if !ok {
            return None;
        }
        Some(ScaleDef { domain, range: range? })
    }

    fn field_name(&mut self, value: &Value, path: &str) -> Option<String> {
        match value {
            Value::String(s) if !s.is_empty() => Some(s.clone()),
            other => {
                self.error(Code::E_SCHEMA, path, format!("expected a field name, found {}", kind(other)));
                None
            }
        }
    }

    fn scalar(&mut self, value: &Value, path: &str, allow_null: bool) -> Option<DataValue> {
        match value {
            Value::Null if allow_null => Some(DataValue::Null),
            Value::Bool(b) => Some(DataValue::Boolean(*b)),
            Value::Number(n) => n.as_f64().map(DataValue::Number),
            Value::String(s) => Some(DataValue::Text(s.clone())),
            other => {
                self.error(Code::E_SCHEMA, path, format!("expected a scalar, found {}", kind(other)));
                None
            }
        }
    }
}

fn kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TONE: &str = r#""tone": {"continued": false, "type": "speechtone"}"#;

    fn doc(body: &str) -> String {
        format!("{{ {TONE}, {body} }}")
    }

    fn codes(raw: &str) -> Vec<Code> {
        match parse_spec(raw) {
            Ok(p) => p.warnings.iter().map(|d| d.code).collect(),
            Err(d) => d.codes(),
        }
    }

    #[test]
    fn tone_snippet() {
        let tone = parse_tone(r#"{"continued": false, "type": "speechtone"}"#).unwrap();
        assert_eq!(tone, ToneDef { tone_type: ToneType::SpeechTone, continued: false });
        let err = parse_tone(r#"{"continued": false, "type": "synth"}"#).unwrap_err();
        assert_eq!(err.codes(), [Code::E_TONE_TYPE]);
    }

    #[test]
    fn demo1_encoding_block_verbatim() {
        let raw = doc(r#""encoding": {
            "time": {
                "field": "Origin",
                "type": "nominal"
            },
            "SpeechToneText":{
                "value": "Origin"
            },
            "SpeechTonePitch":{
                "aggregate": "count",
                "type": "quantitative",
                "scale": { "range": [0.75, 2.0] }
            }
        }"#);
        let parsed = parse_spec(&raw).unwrap();
        assert!(parsed.warnings.is_empty());
        let spec = parsed.document;
        let names: Vec<_> = spec.encoding.keys().copied().collect();
        assert_eq!(
            names,
            [ChannelName::Time, ChannelName::SpeechTonePitch, ChannelName::SpeechToneText]
        );
        let pitch = spec.channel(ChannelName::SpeechTonePitch).unwrap();
        assert_eq!(pitch.aggregate, Some(Aggregate::Count));
        assert_eq!(pitch.data_type, Some(DataType::Quantitative));
        assert_eq!(pitch.scale.as_ref().unwrap().range, [0.75, 2.0]);
        assert_eq!(
            spec.channel(ChannelName::SpeechToneText).unwrap().value,
            Some(DataValue::Text("Origin".into()))
        );
        assert!(spec.data_source.is_none());
        assert!(!spec.prelude_enabled);
    }

    #[test]
    fn empty_encoding_misses_time() {
        assert_eq!(codes(&doc(r#""encoding": {}"#)), [Code::E_MISSING_TIME_CHANNEL]);
    }

    #[test]
    fn malformed_document_has_position() {
        let err = parse_spec("{\n  \"tone\": ,\n}").unwrap_err();
        assert_eq!(err.codes(), [Code::E_PARSE]);
        let pos = err.0[0].position.unwrap();
        assert_eq!(pos.line, 2);
        assert_eq!(codes("[]"), [Code::E_SCHEMA]);
        assert_eq!(codes(""), [Code::E_PARSE]);
    }

    #[test]
    fn missing_tone_and_encoding() {
        assert_eq!(codes("{}"), [Code::E_MISSING_TONE, Code::E_MISSING_ENCODING]);
    }

    #[test]
    fn channel_name_diagnostics() {
        let raw = doc(r#""encoding": {"time": {"field": "a"}, "pan": {"field": "b"}}"#);
        assert_eq!(codes(&raw), [Code::E_CHANNEL_UNKNOWN]);
        let raw = doc(r#""encoding": {"time": {"field": "a"}, "SpeechToneLoudness": {"field": "b"}}"#);
        assert_eq!(codes(&raw), [Code::E_CHANNEL_UNIMPLEMENTED]);
        // case-sensitive
        let raw = doc(r#""encoding": {"Time": {"field": "a"}}"#);
        assert!(codes(&raw).contains(&Code::E_CHANNEL_UNKNOWN));
    }

    #[test]
    fn duration_speed_conflict_comes_first() {
        let raw = doc(
            r#""encoding": {"time": {"field": "a"},
                "SpeechToneSpeed": {"field": "b"}, "SpeechToneDuration": {"field": "c"}}"#,
        );
        assert_eq!(
            codes(&raw),
            [Code::E_DURATION_SPEED_CONFLICT, Code::E_CHANNEL_UNIMPLEMENTED]
        );
    }

    #[test]
    fn unknown_keys_warn() {
        let raw = doc(r#""description": "x", "encoding": {"time": {"field": "a", "title": "A"}}"#);
        let parsed = parse_spec(&raw).unwrap();
        let paths: Vec<_> = parsed.warnings.iter().map(|d| (d.code, d.path.as_str())).collect();
        assert_eq!(
            paths,
            [(Code::W_UNKNOWN_KEY, "description"), (Code::W_UNKNOWN_KEY, "encoding.time.title")]
        );
    }

    #[test]
    fn data_sources() {
        let parsed = parse_spec(&doc(
            r#""data": {"values": [{"a": 1}]}, "encoding": {"time": {"field": "a"}}"#,
        ))
        .unwrap();
        assert!(matches!(parsed.document.data_source, Some(DataSourceRef::Inline(ref v)) if v.len() == 1));
        let parsed = parse_spec(&doc(
            r#""data": {"url": "cars.txt", "format": {"type": "csv"}}, "encoding": {"time": {"field": "a"}}"#,
        ))
        .unwrap();
        assert_eq!(parsed.document.data_source, Some(DataSourceRef::Csv("cars.txt".into())));
        let raw = doc(r#""data": {"url": "x", "values": []}, "encoding": {"time": {"field": "a"}}"#);
        assert_eq!(codes(&raw), [Code::E_SCHEMA]);
        let raw = doc(r#""data": {"url": "x", "format": {"type": "xml"}}, "encoding": {"time": {"field": "a"}}"#);
        assert_eq!(codes(&raw), [Code::E_DATA_FORMAT]);
    }

    #[test]
    fn filter_transform() {
        let raw = doc(
            r#""transform": [{"filter": {"field": "Year", "op": "eq", "value": 1982}}],
               "encoding": {"time": {"field": "a"}}"#,
        );
        let spec = parse_spec(&raw).unwrap().document;
        assert_eq!(
            spec.transforms,
            [TransformDef::Filter(Filter {
                field: "Year".into(),
                op: FilterOp::Eq,
                value: DataValue::Number(1982.0)
            })]
        );
        let raw = doc(r#""transform": [{"bin": {}}], "encoding": {"time": {"field": "a"}}"#);
        let err = parse_spec(&raw).unwrap_err();
        assert_eq!(err.codes(), [Code::E_TRANSFORM_UNKNOWN]);
        assert_eq!(err.0[0].path, "transform[0].bin");
        let raw = doc(r#""transform": [{"filter": {"field": "Year", "op": "like", "value": 1}}], "encoding": {"time": {"field": "a"}}"#);
        assert_eq!(codes(&raw), [Code::E_SCHEMA]);
    }

    #[test]
    fn wrong_value_types() {
        let raw = doc(r#""encoding": {"time": {"field": 3}}"#);
        assert!(codes(&raw).contains(&Code::E_SCHEMA));
        let raw = doc(r#""encoding": {"time": {"field": "a"}, "SpeechTonePitch": {"field": "b", "scale": {"range": ["lo", 2]}}}"#);
        let err = parse_spec(&raw).unwrap_err();
        assert_eq!(err.0[0].path, "encoding.SpeechTonePitch.scale.range[0]");
        let raw = doc(r#""encoding": {"time": {"field": "a"}, "SpeechTonePitch": {"field": "b", "scale": {}}}"#);
        assert_eq!(codes(&raw), [Code::E_SCHEMA]);
        let raw = doc(r#""prelude": "yes", "encoding": {"time": {"field": "a"}}"#);
        assert_eq!(codes(&raw), [Code::E_SCHEMA]);
    }

    #[test]
    fn continued_tone_is_rejected() {
        let raw = r#"{"tone": {"type": "speechtone", "continued": true}, "encoding": {"time": {"field": "a"}}}"#;
        assert_eq!(codes(raw), [Code::E_TONE_CONTINUED]);
    }

    #[test]
    fn prelude_flag() {
        let raw = doc(r#""prelude": true, "encoding": {"time": {"field": "a"}}"#);
        assert!(parse_spec(&raw).unwrap().document.prelude_enabled);
    }

    #[test]
    fn parsing_is_pure() {
        let raw = doc(r#""encoding": {"time": {"field": "a"}, "SpeechTonePitch": {"field": "b", "scale": {"range": [0.75, 2.5]}}}"#);
        assert_eq!(parse_spec(&raw), parse_spec(&raw));
    }
}
