use std::collections::BTreeMap;
use std::time::Instant;

use tsvf_core::scenarios::{self, to_json_string, ParamValue};

fn overrides(pairs: &[(&str, ParamValue)]) -> BTreeMap<String, ParamValue> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

#[test]
fn every_default_scenario_passes_its_checks() {
    for s in scenarios::registry() {
        let start = Instant::now();
        let out = s.run_default().unwrap();
        println!("{} [{:.2?}]", out.one_line(), start.elapsed());
        for c in out.checks.iter().filter(|c| !c.passed) {
            println!("  failed {}: {}", c.name, c.detail);
        }
        assert!(out.passed(), "{}", s.name);
    }
}

#[test]
fn registry_names_are_unique_and_stable() {
    let names: Vec<&str> = scenarios::registry().iter().map(|s| s.name).collect();
    assert_eq!(names[0], "three_box");
    let mut sorted = names.clone();
    sorted.sort_unstable();
    sorted.dedup();
    assert_eq!(sorted.len(), names.len());
}

#[test]
fn same_seed_gives_identical_documents() {
    let o = overrides(&[("ensemble", ParamValue::Int(2000))]);
    let a = scenarios::run("spin_xi_weak", &o, 7).unwrap();
    let b = scenarios::run("spin_xi_weak", &o, 7).unwrap();
    assert_eq!(to_json_string(&a.to_json()), to_json_string(&b.to_json()));
    assert_eq!(a.csv, b.csv);
    let c = scenarios::run("spin_xi_weak", &o, 8).unwrap();
    assert_ne!(a.summary_value("ensemble_mean"), c.summary_value("ensemble_mean"));
}

#[test]
fn spin_xi_files_follow_figure_names() {
    let strong = scenarios::run("spin_xi_weak", &overrides(&[("delta", ParamValue::Real(0.1))]), 1).unwrap();
    assert_eq!(strong.csv[0].0, "fig3a.csv");
    let pre = scenarios::run(
        "spin_xi_weak",
        &overrides(&[("delta", ParamValue::Real(0.1)), ("postselect", ParamValue::Bool(false))]),
        1,
    )
    .unwrap();
    assert_eq!(pre.csv[0].0, "fig2a.csv");
    let peaks = pre.results["maxima"].as_array().unwrap();
    assert_eq!(peaks.len(), 2);
    for (p, want) in peaks.iter().zip([-1.0, 1.0]) {
        assert!((p.as_f64().unwrap() - want).abs() < 0.02);
    }
    let weak = scenarios::find("spin_xi_weak").unwrap().run_default().unwrap();
    let names: Vec<&str> = weak.csv.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["fig3e.csv", "fig3f.csv"]);
}

#[test]
fn unknown_parameter_and_scenario_are_rejected() {
    let err = scenarios::run("three_box", &overrides(&[("nope", ParamValue::Int(1))]), 1).unwrap_err();
    assert!(err.to_string().contains("nope"));
    assert!(scenarios::run("four_box", &BTreeMap::new(), 1).is_err());
}

#[test]
fn n_box_three_reduces_to_three_box() {
    let out = scenarios::run("n_box", &overrides(&[("n", ParamValue::Int(3))]), 1).unwrap();
    let w = out.results["weak_values"].as_array().unwrap();
    for (got, want) in w.iter().zip([1.0, 1.0, -1.0]) {
        assert!((got.as_f64().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn json_carries_schema_and_checks() {
    let out = scenarios::find("three_box").unwrap().run_default().unwrap();
    let doc = out.to_json();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().len() >= 5);
    assert!(to_json_string(&doc).ends_with('\n'));
}
