use std::path::Path;
use std::process::{Command, Output};

use inflow_harness::SolveReport;

fn inflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inflow")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_to(sub: &str, cfg: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", cfg, "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    inflow(&args)
}

#[test]
fn flush_test_passes_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "flush.toml", "preset = \"flush-test\"\n");
    let out = dir.path().join("flush");
    let o = run_to("transport1d", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("C2 PASS"));
    let report = SolveReport::load(&out.join("report.json")).unwrap();
    assert_eq!(report.module, "transport1d");
    let csv = std::fs::read_to_string(out.join("weighted_decay.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,sup_wf,bound_rhs,flush_flag"));
    assert_eq!(csv.lines().count(), report.find_table("weighted_decay").unwrap().rows.len() + 1);
}

#[test]
fn failed_verdict_exits_one() {
    // the horizon ends before the domain is flushed
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "short.toml", "module = \"transport1d\"\npreset = \"flush-test\"\nhorizon = 1.0\n");
    let o = run_to("transport1d", &cfg, &dir.path().join("o"), &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("C2 FAIL"));
}

#[test]
fn config_errors_exit_two_and_leave_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("transport1d", "preset = \"nonesuch\"\n"),
        ("hyp1d", "preset = \"burgers-small\"\ngrids = [48]\n"),
        ("hyp1d", "preset = \"burgers-small\"\ngrids = [2048]\n"),
        ("pipe3d", "preset = \"product-cosine\"\ngrids = [128]\n"),
        ("transport1d", "preset = \"translation\"\nspeed = 2.0\n"),
        ("hyp1d", "module = \"pipe3d\"\npreset = \"product-cosine\"\n"),
        ("hyp1d", "preset = \"burgers-small\"\ndt = -0.1\n"),
        ("pipe3d", "preset = \"product-cosine\"\np = 2.0\n"),
        ("compare", "preset = \"compare\"\n"),
        ("suite", "preset = \"acceptance\"\ncriteria = [10]\n"),
        ("transport1d", "preset = \"flush-test\"\nspeed = [0.0, 1.0]\n"),
        ("transport1d", "preset = \"flush-test\"\nf0 = \"square\"\n"),
        ("hyp1d", "preset = \"burgers-small\"\nsystem = \"euler\"\n"),
        ("hyp1d", "preset = \"burgers-small\"\nalpha = 2.0\n"),
        ("pipe3d", "preset = \"product-cosine\"\nl_max = 4\n"),
    ];
    for (i, (sub, body)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{i}.toml"), body);
        let out = dir.path().join(format!("bad{i}"));
        let o = run_to(sub, &cfg, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "case {i}: {}", String::from_utf8_lossy(&o.stderr));
        let record: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("error.json")).unwrap()).unwrap();
        assert_eq!(record["error"]["exit_code"], 2);
    }
    let o = inflow(&["transport1d", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_agree_apart_from_the_clock() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "trace.toml", "preset = \"lateral-invariance\"\nsamples = 200\nhorizon = 2.0\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(run_to("trace", &cfg, &a, &["--seed", "11"]).status.code(), Some(0));
    assert_eq!(run_to("trace", &cfg, &b, &["--seed", "11"]).status.code(), Some(0));
    let ra = SolveReport::load(&a.join("report.json")).unwrap();
    let rb = SolveReport::load(&b.join("report.json")).unwrap();
    assert_eq!(ra.without_clock(), rb.without_clock());
    assert_eq!(std::fs::read(a.join("wall_drift.csv")).unwrap(), std::fs::read(b.join("wall_drift.csv")).unwrap());
    assert_eq!(ra.provenance.seed, 11);

    let c = dir.path().join("c");
    assert_eq!(run_to("trace", &cfg, &c, &["--seed", "12"]).status.code(), Some(0));
    let rc = SolveReport::load(&c.join("report.json")).unwrap();
    assert_ne!(ra.provenance.config_hash, rc.provenance.config_hash);
}

#[test]
fn burgers_runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "b.toml", "preset = \"burgers-small\"\ngrids = [64, 128]\nhorizon = 2.0\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_to("hyp1d", &cfg, &a, &[]);
    run_to("hyp1d", &cfg, &b, &[]);
    let ra = SolveReport::load(&a.join("report.json")).unwrap();
    let rb = SolveReport::load(&b.join("report.json")).unwrap();
    assert_eq!(ra.without_clock(), rb.without_clock());
    assert!(ra.find_table("norms_n64").is_some() && ra.find_table("outer_n128").is_some());
}

#[test]
fn compare_reports_differences() {
    let dir = tempfile::tempdir().unwrap();
    let coarse = write_config(dir.path(), "c.toml", "preset = \"burgers-small\"\ngrids = [64]\nhorizon = 1.0\n");
    let fine = write_config(dir.path(), "f.toml", "preset = \"burgers-small\"\ngrids = [128]\nhorizon = 1.0\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_to("hyp1d", &coarse, &a, &[]);
    run_to("hyp1d", &fine, &b, &[]);

    let same = write_config(
        dir.path(),
        "same.toml",
        &format!(
            "preset = \"compare\"\nreport_a = {:?}\nreport_b = {:?}\ntolerance = 1e-12\n",
            a.join("report.json"),
            a.join("report.json")
        ),
    );
    let o = run_to("compare", &same, &dir.path().join("same"), &[]);
    assert_eq!(o.status.code(), Some(0));
    let r = SolveReport::load(&dir.path().join("same/report.json")).unwrap();
    let diffs = r.find_table("differences").unwrap();
    assert!(!diffs.rows.is_empty());
    assert!(diffs.column("abs_diff").unwrap().iter().all(|&d| d == 0.0));

    let cross = write_config(
        dir.path(),
        "cross.toml",
        &format!(
            "preset = \"compare\"\nreport_a = {:?}\nreport_b = {:?}\ntolerance = 0.5\ncolumns = [\"sup_v\"]\n",
            a.join("report.json"),
            b.join("report.json")
        ),
    );
    let o = run_to("compare", &cross, &dir.path().join("cross"), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = SolveReport::load(&dir.path().join("cross/report.json")).unwrap();
    let diffs = r.find_table("differences").unwrap();
    let k = diffs.labels.iter().position(|l| l == "norms:sup_v").unwrap();
    assert!(diffs.rows[k][0].0 > 0.0 && diffs.rows[k][1].0 < 0.5);
    assert!(diffs.rows[k][2].0 > 1.0);

    // reports of different presets do not compare
    let flush = write_config(dir.path(), "fl.toml", "preset = \"flush-test\"\n");
    run_to("transport1d", &flush, &dir.path().join("fl"), &[]);
    let bad = write_config(
        dir.path(),
        "bad.toml",
        &format!(
            "preset = \"compare\"\nreport_a = {:?}\nreport_b = {:?}\n",
            a.join("report.json"),
            dir.path().join("fl/report.json")
        ),
    );
    assert_eq!(run_to("compare", &bad, &dir.path().join("bad"), &[]).status.code(), Some(2));
}

#[test]
fn divcurl_refines_at_second_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "dc.toml", "preset = \"manufactured\"\n");
    let out = dir.path().join("dc");
    let o = run_to("divcurl", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = std::fs::read_to_string(out.join("refinement.csv")).unwrap();
    assert!(csv.starts_with("n,dx,relative_error,curl_residual,div_residual,order"));
}

#[test]
fn transport_data_from_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let body = "preset = \"flush-test\"\nspeed = [1.5, 0.25]\nf0 = [0.5, 0.0, 1.0]\nb = [0.5, -0.1]\nh = \"unit\"\nalpha = 1.0\nhorizon = 3.0\n";
    let cfg = write_config(dir.path(), "data.toml", body);
    let out = dir.path().join("data");
    let o = run_to("transport1d", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let r = SolveReport::load(&out.join("report.json")).unwrap();
    let t = r.find_table("weighted_decay").unwrap();
    let (lhs, rhs) = (t.column("sup_wf").unwrap(), t.column("bound_rhs").unwrap());
    assert!(lhs.iter().zip(&rhs).all(|(l, r)| *l <= r * (1.0 + 1e-6)));
    // with inflow and forcing the domain is never emptied
    assert!(r.find_table("flush").is_none());
}

#[test]
fn hyp1d_catalog_systems() {
    let dir = tempfile::tempdir().unwrap();
    for system in ["linear2", "psystem"] {
        let body = format!("preset = \"burgers-small\"\nsystem = \"{system}\"\ngrids = [64]\nhorizon = 2.0\nl_max = 6\n");
        let cfg = write_config(dir.path(), &format!("{system}.toml"), &body);
        let out = dir.path().join(system);
        let o = run_to("hyp1d", &cfg, &out, &[]);
        assert!(matches!(o.status.code(), Some(0 | 1)), "{system}: {}", String::from_utf8_lossy(&o.stderr));
        let r = SolveReport::load(&out.join("report.json")).unwrap();
        let levels = r.find_table("outer_n64").unwrap().rows.len();
        assert!((1..=6).contains(&levels));
        let sup = r.find_table("norms_n64").unwrap().column("sup_v").unwrap();
        assert!(sup.iter().all(|v| v.is_finite() && *v < 0.1));
    }
}
