mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use speechtone::data::{aggregate_column_name, apply_aggregation, dataset_from_records};
use speechtone::emit::{emit_schedule_json, emit_ssml, SsmlOptions, VoiceMap};
use speechtone::{compile, load_dataset, parse_spec, ChannelName, Diagnostic};

fn assert_locates(d: &Diagnostic, doc: &Value) {
    assert!(d.locate(doc).is_some(), "{d} does not resolve in {doc}");
}

/// Parses and compiles a raw spec, checking that every diagnostic points
/// into the document. Returns the compiled body when it succeeds.
fn run(doc: &Value) -> Option<Vec<speechtone::Utterance>> {
    let parsed = match parse_spec(&doc.to_string()) {
        Ok(p) => p,
        Err(diags) => {
            diags.0.iter().for_each(|d| assert_locates(d, doc));
            return None;
        }
    };
    parsed.warnings.iter().for_each(|d| assert_locates(d, doc));
    let data = load_dataset(parsed.document.data_source.as_ref()?).map_err(|d| assert_locates(&d, doc)).ok()?;
    match compile(&parsed.document, &data) {
        Ok(c) => {
            c.warnings.iter().for_each(|d| assert_locates(d, doc));
            Some(c.schedule.body)
        }
        Err(diags) => {
            diags.0.iter().for_each(|d| assert_locates(d, doc));
            None
        }
    }
}

fn mutate(doc: &mut Value, rng: &mut ChaCha8Rng) {
    let enc = doc["encoding"].as_object_mut().unwrap();
    let channels: Vec<String> = enc.keys().cloned().collect();
    let ch = channels.choose(rng).unwrap().clone();
    match rand::Rng::gen_range(rng, 0..8) {
        0 => {
            enc.remove("time");
        }
        1 => {
            enc.insert("SpeechToneLoudness".into(), json!({"value": 1}));
        }
        2 => {
            enc.insert("SpeechToneColor".into(), json!({"value": 1}));
        }
        3 => enc[&ch]["scale"] = json!({"range": []}),
        4 => enc[&ch]["field"] = json!("nope"),
        5 => enc[&ch]["type"] = json!("temporal"),
        6 => enc[&ch]["aggregate"] = json!("median"),
        _ => doc["tone"] = json!({"type": "piano"}),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn compiled_attributes_stay_in_limits(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = common::random_records(&mut rng, 40);
        let doc = common::random_spec(&mut rng, records);
        if let Some(body) = run(&doc) {
            for (i, u) in body.iter().enumerate() {
                prop_assert_eq!(u.index, i);
                prop_assert!((0.0..=2.0).contains(&u.pitch), "pitch {}", u.pitch);
                prop_assert!((0.1..=10.0).contains(&u.rate), "rate {}", u.rate);
                prop_assert!(!u.text.is_empty());
            }
        }
    }

    #[test]
    fn broken_specs_point_at_the_problem(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = common::random_records(&mut rng, 10);
        let mut doc = common::random_spec(&mut rng, records);
        mutate(&mut doc, &mut rng);
        run(&doc);
    }

    #[test]
    fn parse_never_panics(raw in "\\PC{0,200}") {
        let _ = parse_spec(&raw);
    }

    #[test]
    fn parse_never_panics_on_json_shapes(seed in any::<u64>(), key in "[a-zA-Z\" ]{0,12}") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = common::random_records(&mut rng, 3);
        let mut doc = common::random_spec(&mut rng, records);
        doc["encoding"][&key] = json!({"field": key.clone(), "value": [1, {"x": null}]});
        doc[&key] = json!(null);
        run(&doc);
    }

    #[test]
    fn counts_match_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = common::random_records(&mut rng, 50);
        let doc = json!({
            "tone": {"type": "speechtone"},
            "encoding": {
                "time": {"field": "k", "type": "nominal"},
                "SpeechToneText": {"value": "j"},
                "SpeechTonePitch": {"aggregate": "count"}
            }
        });
        let spec = parse_spec(&doc.to_string()).unwrap().document;
        let data = dataset_from_records(&records).unwrap();
        let out = apply_aggregation(&data, &spec).unwrap();
        let col = out.column_index(&aggregate_column_name(ChannelName::SpeechTonePitch)).unwrap();
        let got: Vec<usize> = out.rows().iter().map(|r| r[col].as_number().unwrap() as usize).collect();
        let want: Vec<usize> = common::tally(&records, &["k", "j"]).into_iter().map(|(_, n)| n).collect();
        prop_assert_eq!(&got, &want);
        prop_assert_eq!(got.iter().sum::<usize>(), records.len());
    }

    #[test]
    fn grouping_ignores_row_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = common::random_records(&mut rng, 30);
        let mut shuffled = records.clone();
        shuffled.shuffle(&mut rng);
        let mut a = common::tally(&records, &["k"]);
        let mut b = common::tally(&shuffled, &["k"]);
        a.sort();
        b.sort();
        let spec = parse_spec(&json!({
            "tone": {"type": "speechtone"},
            "encoding": {"time": {"field": "k"}, "SpeechToneSpeed": {"aggregate": "count"}}
        }).to_string()).unwrap().document;
        let count = |recs: &[Value]| {
            let out = apply_aggregation(&dataset_from_records(recs).unwrap(), &spec).unwrap();
            let mut rows: Vec<(String, u64)> = out
                .rows()
                .iter()
                .map(|r| (format!("{:?}", r[0]), r[1].as_number().unwrap() as u64))
                .collect();
            rows.sort();
            rows
        };
        prop_assert_eq!(count(&records), count(&shuffled));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn emission_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let records = common::random_records(&mut rng, 20);
        let doc = common::random_spec(&mut rng, records);
        let Ok(parsed) = parse_spec(&doc.to_string()) else { return Ok(()) };
        let data = load_dataset(parsed.document.data_source.as_ref().unwrap()).unwrap();
        let Ok(first) = compile(&parsed.document, &data) else { return Ok(()) };
        let second = compile(&parsed.document, &data).unwrap();
        prop_assert_eq!(emit_schedule_json(&first.schedule), emit_schedule_json(&second.schedule));
        let ssml = |s| emit_ssml(s, &VoiceMap::builtin(), &SsmlOptions::default()).document;
        prop_assert_eq!(ssml(&first.schedule), ssml(&second.schedule));
    }
}
