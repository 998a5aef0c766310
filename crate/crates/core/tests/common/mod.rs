#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};
use speechtone::{load_dataset, parse_spec, Dataset, SpecDocument};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> PathBuf {
    fixture_dir().join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub fn oracle() -> Value {
    serde_json::from_str(&read_fixture("oracle/cars_oracle.json")).unwrap()
}

/// Parses a fixture spec and loads its data relative to the fixture directory.
pub fn demo(name: &str) -> (SpecDocument, Dataset) {
    let spec = parse_spec(&read_fixture(name)).unwrap().document;
    let source = spec.data_source.as_ref().unwrap().relative_to(&fixture_dir());
    let data = load_dataset(&source).unwrap();
    (spec, data)
}

pub fn with_data(name: &str, data_file: &str) -> (SpecDocument, Dataset) {
    let (spec, _) = demo(name);
    let data = load_dataset(&speechtone::DataSourceRef::from_path(fixture(data_file))).unwrap();
    (spec, data)
}

/// Count of records per key tuple, keyed by the JSON text of the tuple, in
/// first-appearance order.
pub fn tally(records: &[Value], keys: &[&str]) -> Vec<(String, usize)> {
    let mut order: Vec<String> = Vec::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for r in records {
        let k: Vec<&Value> = keys.iter().map(|f| r.get(*f).unwrap_or(&Value::Null)).collect();
        let k = serde_json::to_string(&k).unwrap();
        if !counts.contains_key(&k) {
            order.push(k.clone());
        }
        *counts.entry(k).or_default() += 1;
    }
    order
        .into_iter()
        .map(|k| {
            let n = counts[&k];
            (k, n)
        })
        .collect()
}

const CATEGORIES: [&str; 5] = ["a", "b", "c", "d", "e"];

fn maybe_null<R: Rng>(rng: &mut R, p: f64, v: Value) -> Value {
    if rng.gen_bool(p) { Value::Null } else { v }
}

fn wild_number<R: Rng>(rng: &mut R) -> Value {
    match rng.gen_range(0..6) {
        0 => json!(rng.gen_range(-1e12..1e12)),
        1 => json!(rng.gen_range(-3i64..3)),
        2 => json!(rng.gen_range(0.0..1e-9)),
        3 => json!(7),
        _ => json!(rng.gen_range(-100.0..100.0)),
    }
}

/// Flat records with a categorical key `k`, a second key `j`, numeric `x`
/// and `t`, and a text column `s`.
pub fn random_records<R: Rng>(rng: &mut R, max_rows: usize) -> Vec<Value> {
    let rows = rng.gen_range(1..=max_rows);
    let cats = rng.gen_range(1..=CATEGORIES.len());
    (0..rows)
        .map(|i| {
            let k = json!(CATEGORIES[rng.gen_range(0..cats)]);
            let k = maybe_null(rng, 0.05, k);
            let j = json!(rng.gen_range(1..4));
            let j = maybe_null(rng, 0.05, j);
            let x = wild_number(rng);
            let x = maybe_null(rng, 0.1, x);
            let t = wild_number(rng);
            let t = maybe_null(rng, 0.05, t);
            json!({"k": k, "j": j, "x": x, "t": t, "s": format!("row {i}")})
        })
        .collect()
}

fn random_range<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| (rng.gen_range(-30.0..30.0) * 4.0f64).round() / 4.0).collect()
}

fn attribute<R: Rng>(rng: &mut R) -> Option<Value> {
    match rng.gen_range(0..6) {
        0 => None,
        1 => Some(json!({"value": rng.gen_range(-20.0..20.0)})),
        2 => Some(json!({"aggregate": "count", "scale": {"range": random_range(rng, 2)}})),
        3 => Some(json!({"field": "x", "type": "quantitative", "scale": {"range": random_range(rng, 2)}})),
        4 => Some(json!({"field": "k", "type": "nominal", "scale": {"range": random_range(rng, CATEGORIES.len())}})),
        _ => Some(json!({"field": "x"})),
    }
}

/// A spec over [`random_records`] exercising every implemented channel,
/// including out-of-limit ranges and literals.
pub fn random_spec<R: Rng>(rng: &mut R, records: Vec<Value>) -> Value {
    let mut encoding = serde_json::Map::new();
    let time = match rng.gen_range(0..3) {
        0 => json!({"field": "k", "type": "nominal"}),
        1 => json!({"field": "t", "type": "quantitative"}),
        _ => json!({"field": "j", "type": "ordinal"}),
    };
    encoding.insert("time".into(), time);
    let text = ["s", "k", "x", "hello"].choose(rng).unwrap();
    if rng.gen_bool(0.8) {
        encoding.insert("SpeechToneText".into(), json!({"value": text}));
    }
    for name in ["SpeechTonePitch", "SpeechToneSpeed", "SpeechToneVoice"] {
        if let Some(def) = attribute(rng) {
            encoding.insert(name.into(), def);
        }
    }
    let mut spec = json!({
        "data": {"values": records},
        "tone": {"type": "speechtone"},
        "encoding": encoding,
        "prelude": rng.gen_bool(0.5),
    });
    if rng.gen_bool(0.2) {
        spec["transform"] = json!([{"filter": {"field": "j", "op": "gte", "value": 2}}]);
    }
    spec
}
