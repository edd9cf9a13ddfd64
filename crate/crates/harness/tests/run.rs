use inflow_harness::config::{ExperimentConfig, Module};
use inflow_harness::run;

#[test]
fn pipe_divcurl_preset_gives_a_refinement_table() {
    let mut cfg = ExperimentConfig::new(Module::Pipe3d, "divcurl-manufactured");
    cfg.grids = Some(vec![16, 32]);
    let r = run(&cfg, 0).unwrap();
    let orders = r.find_table("refinement").unwrap().column("order").unwrap();
    assert!(orders[0].is_nan());
    assert!((1.7..=2.3).contains(&orders[1]), "{orders:?}");
    assert!(r.passed());
}

#[test]
fn burgers_json_is_identical_apart_from_the_clock() {
    let mut cfg = ExperimentConfig::new(Module::Hyp1d, "burgers-small");
    cfg.grids = Some(vec![128]);
    cfg.horizon = Some(5.0);
    let a = run(&cfg, 4).unwrap().without_clock().to_json().unwrap();
    let b = run(&cfg, 4).unwrap().without_clock().to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn suite_runs_a_selection_of_criteria() {
    let mut cfg = ExperimentConfig::new(Module::Suite, "acceptance");
    cfg.criteria = Some(vec![1, 6, 9]);
    let r = run(&cfg, 0).unwrap();
    let ids: Vec<&str> = r.verdicts.iter().map(|v| v.criterion.as_str()).collect();
    assert_eq!(ids, ["C1", "C6", "C9"]);
    assert_eq!(r.find_table("criteria").unwrap().labels, ["C1", "C6", "C9"]);
    assert!(r.find_table("c1_translation_error").is_some());
}
