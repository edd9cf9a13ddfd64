use inflow_harness::config::{ExperimentConfig, Module, ProfileConfig};
use inflow_harness::report::{write_atomic, Check, Num, Table, Verdict};
use inflow_harness::run::{assemble, Outcome};
use inflow_harness::SolveReport;
use proptest::prelude::*;

fn sample_report(values: &[f64]) -> SolveReport {
    let mut t = Table::new("norms_n16", &["t", "value"]);
    for (i, v) in values.iter().enumerate() {
        t.push(&[i as f64, *v]);
    }
    let mut m = Table::new("monitors_n16", &["value", "tolerance"]);
    m.push_labeled("div_omega", &[values.first().copied().unwrap_or(0.0), 1.0]);
    let cfg = ExperimentConfig::new(Module::Pipe3d, "product-cosine");
    let out = Outcome {
        series: vec![t],
        monitors: vec![m],
        verdicts: vec![Verdict::new(8, "demo", vec![Check::at_most("x", 0.5, 1.0)])],
        runtime_limit: Some(10.0),
        ..Outcome::default()
    };
    assemble(&cfg, 3, out, 0.25)
}

fn any_value() -> impl Strategy<Value = f64> {
    prop_oneof![
        8 => any::<f64>(),
        1 => Just(f64::INFINITY),
        1 => Just(f64::NEG_INFINITY),
        1 => Just(f64::NAN),
    ]
}

proptest! {
    #[test]
    fn json_round_trip_is_exact(values in prop::collection::vec(any_value(), 0..20)) {
        let r = sample_report(&values);
        let back = SolveReport::from_json(&r.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn grid_sizes_accepted_only_as_powers_of_two(n in 1usize..2000) {
        let mut cfg = ExperimentConfig::new(Module::Hyp1d, "burgers-small");
        cfg.grids = Some(vec![n]);
        prop_assert_eq!(cfg.validate().is_ok(), n.is_power_of_two() && (16..=1024).contains(&n));
        let mut cfg = ExperimentConfig::new(Module::Pipe3d, "product-cosine");
        cfg.grids = Some(vec![n]);
        prop_assert_eq!(cfg.validate().is_ok(), n.is_power_of_two() && (16..=64).contains(&n));
    }
}

#[test]
fn json_keys_keep_their_order() {
    let json = sample_report(&[1.0]).to_json().unwrap();
    let pos = |k: &str| json.find(&format!("\"{k}\"")).unwrap();
    let keys = ["module", "preset", "series", "contraction", "monitors", "tables", "verdicts", "provenance"];
    assert!(keys.windows(2).all(|w| pos(w[0]) < pos(w[1])));
    assert!(pos("config_hash") < pos("code_version") && pos("code_version") < pos("seed"));
}

#[test]
fn non_finite_values_are_named_in_json_and_csv() {
    let mut t = Table::new("x", &["a", "b", "c"]);
    t.push(&[f64::NAN, f64::INFINITY, -1.5]);
    let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
    assert_eq!(csv, "a,b,c\nnan,inf,-1.5\n");
    assert_eq!(serde_json::to_string(&Num(f64::NEG_INFINITY)).unwrap(), "\"-inf\"");
}

#[test]
fn labeled_tables_lead_with_the_label() {
    let mut t = Table::new("m", &["value"]);
    t.push_labeled("div_omega", &[0.25]);
    assert_eq!(String::from_utf8(t.to_csv().unwrap()).unwrap(), "label,value\ndiv_omega,0.25\n");
}

#[test]
fn atomic_write_replaces_whole_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    write_atomic(&p, b"first version, longer").unwrap();
    write_atomic(&p, b"second").unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), b"second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn report_directory_holds_every_table() {
    let dir = tempfile::tempdir().unwrap();
    let r = sample_report(&[1.0, 2.0]);
    r.write(dir.path()).unwrap();
    for name in ["report.json", "norms_n16.csv", "monitors_n16.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    assert_eq!(SolveReport::load(&dir.path().join("report.json")).unwrap(), r);
}

#[test]
fn config_hash_ignores_the_output_directory() {
    let text = "preset = \"product-cosine\"\ngrids = [16]\n[profile]\nkind = \"cosine-shear\"\nc = 2.0\nm = 1\n";
    let a = ExperimentConfig::from_toml(text).unwrap().bind(Module::Pipe3d).unwrap();
    assert_eq!(a.profile, Some(ProfileConfig::CosineShear { c: 2.0, m: 1 }));
    let mut b = a.clone();
    b.out = Some("elsewhere".into());
    assert_eq!(a.hash(1), b.hash(1));
    assert_ne!(a.hash(1), a.hash(2));
    assert_eq!(a.hash(1).len(), 64);
}

#[test]
fn runtime_limit_is_recorded() {
    let r = sample_report(&[]);
    assert!(r.provenance.clock.within_runtime_limit);
    assert_eq!(r.provenance.clock.runtime_limit_seconds, Some(Num(10.0)));
    assert!(r.passed());
}

#[test]
fn shipped_configs_validate() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = ExperimentConfig::load(&path).unwrap();
            let module = cfg.module.expect("shipped configs name their module");
            cfg.bind(module).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 10);
}
