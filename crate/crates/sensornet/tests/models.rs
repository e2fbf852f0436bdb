use std::collections::{BTreeSet, VecDeque};
use std::path::PathBuf;

use tcreol_core::semantics::{apply_in_place, Rule};
use tcreol_core::validate::validate;
use tcreol_core::{applicable, parse, SourceModel, Value};
use tcreol_sensornet::topology::Links;
use tcreol_sensornet::{build_model, load, metrics, CollisionRegistry, ModelError, SinkMetrics, TopologyRegistry, LIMIT};

const TABLE_TOPOLOGIES: [&str; 3] = ["linear", "mixed", "star"];

fn links(name: &str) -> Links {
    TopologyRegistry::default().get(name).unwrap().links()
}

#[test]
fn bundled_model_files_match_the_generator() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models");
    let collisions = CollisionRegistry::default();
    let topologies = TopologyRegistry::default();
    for t in TABLE_TOPOLOGIES {
        for c in collisions.all() {
            let generated = build_model(c, topologies.get(t).unwrap());
            let path = dir.join(&generated.origin);
            let on_disk = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert_eq!(on_disk, generated.text, "{} is stale; regenerate it with emit-model", path.display());
        }
    }
}

#[test]
fn every_combination_parses_and_validates() {
    let collisions = CollisionRegistry::default();
    let topologies = TopologyRegistry::default();
    for t in topologies.all() {
        for c in collisions.all() {
            let src = build_model(c, t);
            let p = parse(&src).unwrap_or_else(|e| panic!("{}: {e}", src.origin));
            if let Err(d) = validate(&p) {
                panic!("{}: {d:?}", src.origin);
            }
            assert_eq!(&*p.main, "Main");
        }
    }
}

#[test]
fn registries_know_the_case_study_variants() {
    let c: Vec<_> = CollisionRegistry::default().all().map(|c| c.name()).collect();
    assert_eq!(c, ["no-interference", "resend", "drop"]);
    let t = TopologyRegistry::default();
    for name in TABLE_TOPOLOGIES {
        assert!(t.get(name).is_some(), "{name}");
    }
    assert!(t.get("ring").is_none());
    assert!(CollisionRegistry::default().get("jam").is_none());
}

#[test]
fn star_links_every_sensor_to_the_sink() {
    let l = links("star");
    assert_eq!(l.len(), 4);
    for to in l.values() {
        assert_eq!(to, &["sink"]);
    }
    let text = build_model(CollisionRegistry::default().get("resend").unwrap(), TopologyRegistry::default().get("star").unwrap()).text;
    for n in 1..=4 {
        assert!(text.contains(&format!("nw.register(n{n}, [sink];);")), "n{n}");
    }
}

#[test]
fn linear_contains_the_chain_to_the_sink() {
    let l = links("linear");
    for (from, to) in [("n4", "n3"), ("n3", "n2"), ("n2", "n1"), ("n1", "sink")] {
        assert!(l[from].iter().any(|x| x == to), "{from} -> {to}");
    }
    for n in ["n2", "n3", "n4"] {
        assert!(!l[n].iter().any(|x| x == "sink"), "{n} must not reach the sink directly");
    }
}

#[test]
fn mixed_has_two_gateways() {
    let l = links("mixed");
    for n in ["n1", "n2"] {
        assert!(l[n].iter().any(|x| x == "sink"), "{n}");
    }
    for n in ["n3", "n4"] {
        let to: BTreeSet<&str> = l[n].iter().map(String::as_str).collect();
        assert_eq!(to, BTreeSet::from(["n1", "n2"]), "{n}");
    }
}

#[test]
fn every_sensor_can_reach_the_sink() {
    for t in TopologyRegistry::default().all() {
        let l = t.links();
        assert!(!l.contains_key("sink"), "{}: the sink never forwards", t.name());
        for start in ["n1", "n2", "n3", "n4"] {
            let mut seen = BTreeSet::from([start.to_string()]);
            let mut queue = VecDeque::from([start.to_string()]);
            while let Some(n) = queue.pop_front() {
                for m in l.get(&n).into_iter().flatten() {
                    if seen.insert(m.clone()) {
                        queue.push_back(m.clone());
                    }
                }
            }
            assert!(seen.contains("sink"), "{}: {start} is cut off", t.name());
        }
    }
}

#[test]
fn fresh_model_has_seen_nothing() {
    let src = build_model(CollisionRegistry::default().get("drop").unwrap(), TopologyRegistry::default().get("star").unwrap());
    let mut cfg = load(&src, LIMIT).unwrap();
    assert!(matches!(metrics(&cfg), Err(ModelError::NoSink)));
    // run main until the sink has finished its init
    while cfg.find_object("SinkNode").is_none_or(|s| s.active.is_some()) {
        let t = applicable(&cfg).into_iter().find(|t| t.rule != Rule::Tick).unwrap();
        apply_in_place(&mut cfg, &t).unwrap();
    }
    let sink = cfg.find_object("SinkNode").unwrap();
    assert_eq!(sink.attrs.get("lastReceived"), Some(&Value::Time(0)));
    assert_eq!(metrics(&cfg).unwrap(), SinkMetrics { received: 0, last: None });
}

#[test]
fn metrics_display() {
    assert_eq!(SinkMetrics { received: 12, last: Some(14) }.to_string(), "received=12 last=14");
    assert_eq!(SinkMetrics { received: 0, last: None }.to_string(), "received=0 last=--");
}

#[test]
fn models_without_a_sink_are_rejected() {
    let cfg = load(&SourceModel::inline("class Main() begin end"), 5).unwrap();
    assert!(matches!(metrics(&cfg), Err(ModelError::NoSink)));
}
