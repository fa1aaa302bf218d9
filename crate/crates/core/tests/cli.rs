use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_bpdn-testgen");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn gen(dir: &Path, name: &str, extra: &[&str]) -> String {
    let out = dir.join(name).to_string_lossy().into_owned();
    let mut args = vec!["gen"];
    args.extend_from_slice(extra);
    args.extend_from_slice(&["--out", &out]);
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_verify_solve_for_every_ensemble() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 4] = [
        ("dct.json", &["--ensemble", "dct", "--n", "256", "--k", "96", "--sparsity", "6"]),
        ("bern.json", &["--ensemble", "bernoulli", "--n", "256", "--k", "96", "--sparsity", "6"]),
        ("three.json", &["--ensemble", "threebases", "--n", "192", "--k", "64", "--sparsity", "4", "--dynrange", "100"]),
        ("band.json", &["--ensemble", "banded", "--n", "80", "--K", "5", "--sparsity", "6", "--unit-magnitudes"]),
    ];
    for (name, flags) in cases {
        let mut all = flags.to_vec();
        all.extend_from_slice(&["--lambda", "0.1", "--seed", "3"]);
        let path = gen(dir.path(), name, &all);
        let v = run(&["verify", &path]);
        assert_eq!(v.status.code(), Some(0), "{name}");
        assert!(String::from_utf8_lossy(&v.stdout).contains("optimality_residual"));
        let trace = dir.path().join(format!("{name}.csv")).to_string_lossy().into_owned();
        let s = run(&["solve", &path, "--solver", "fista", "--max-iter", "50000", "--trace", &trace]);
        assert_eq!(s.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&s.stdout));
        let rows = bpdn_testgen::bench::read_traces(Path::new(&trace)).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.last().unwrap().rel_error <= 1e-6);
    }
}

#[test]
fn gen_reports_dimensions_and_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(
        dir.path(),
        "h.json",
        &["--ensemble", "banded", "--n", "300", "--k", "300", "--K", "300", "--sparsity", "30", "--lambda", "0.1", "--seed", "7"],
    );
    let file: bpdn_testgen::cli::InstanceFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((file.n, file.k, file.format_version), (300, 300, 1));
    assert!((file.coherence.unwrap() - (299.0f64 / 300.0).sqrt()).abs() < 1e-10);
    assert!(file.optimality_residual <= 1e-8);
}

#[test]
fn bad_flags_exit_one() {
    assert_eq!(code(&["gen", "--ensemble", "dct", "--n", "0", "--k", "1", "--sparsity", "1", "--lambda", "0.1", "--out", "x"]), 1);
    assert_eq!(code(&["gen", "--ensemble", "dct", "--n", "10", "--k", "20", "--sparsity", "1", "--lambda", "0.1", "--out", "x"]), 1);
    assert_eq!(code(&["gen", "--ensemble", "banded", "--n", "10", "--sparsity", "1", "--lambda", "0.1", "--out", "x"]), 1);
    assert_eq!(code(&["gen", "--ensemble", "dct", "--n", "10", "--k", "5", "--sparsity", "1", "--lambda", "-1", "--out", "x"]), 1);
    assert_eq!(code(&["bench", "--experiment", "nope", "--out", "x"]), 1);
    assert_eq!(code(&["nonsense"]), 1);
    let o = run(&["bench", "--experiment", "nope", "--out", "x"]);
    let err = String::from_utf8_lossy(&o.stderr);
    for name in ["lambda", "sparsity", "dynrange", "coherence"] {
        assert!(err.contains(name));
    }
}

#[test]
fn help_documents_exit_codes() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("Exit codes"));
    for c in ["0 ", "1 ", "2 ", "3 ", "4 ", "5 "] {
        assert!(text.contains(c));
    }
}

#[test]
fn infeasible_pattern_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json").to_string_lossy().into_owned();
    let o = run(&[
        "gen", "--ensemble", "bernoulli", "--n", "40", "--k", "4", "--sparsity", "4", "--lambda", "0.1", "--seed", "1",
        "--out", &out,
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sign pattern"));
    assert!(!Path::new(&out).exists());
}

#[test]
fn tampered_and_truncated_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(
        dir.path(),
        "i.json",
        &["--ensemble", "dct", "--n", "64", "--k", "32", "--sparsity", "4", "--lambda", "0.1", "--seed", "1"],
    );
    let text = std::fs::read_to_string(&path).unwrap();

    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let b0 = value["b"][0].as_f64().unwrap();
    value["b"][0] = serde_json::json!(b0 + 1.0);
    let edited = dir.path().join("edited.json");
    std::fs::write(&edited, serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(code(&["verify", edited.to_str().unwrap()]), 4);
    assert_eq!(code(&["solve", edited.to_str().unwrap(), "--solver", "ista"]), 4);

    let truncated = dir.path().join("trunc.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&["verify", truncated.to_str().unwrap()]), 3);
    assert_eq!(code(&["verify", dir.path().join("missing.json").to_str().unwrap()]), 3);

    let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
    value["b"].as_array_mut().unwrap().pop();
    let short = dir.path().join("short.json");
    std::fs::write(&short, serde_json::to_string(&value).unwrap()).unwrap();
    assert_eq!(code(&["verify", short.to_str().unwrap()]), 3);
}

#[test]
fn solve_hits_max_iter_with_exit_five_and_still_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(
        dir.path(),
        "i.json",
        &["--ensemble", "dct", "--n", "128", "--k", "48", "--sparsity", "5", "--lambda", "0.001", "--seed", "2"],
    );
    let trace = dir.path().join("t.csv");
    let o = run(&["solve", &path, "--solver", "ista", "--max-iter", "3", "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&o.stdout).contains("max_iter"));
    assert_eq!(bpdn_testgen::bench::read_traces(&trace).unwrap().len(), 3);
}

#[test]
fn bench_config_then_plot_regenerates_identical_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{
  "name": "small",
  "ensembles": [{"kind": {"type": "partial_dct"}, "n": 96, "k": 40}],
  "solutions": [{"sparsity": 3, "law": {"type": "gaussian"}}],
  "lambdas": [0.1],
  "seeds": [1, 2],
  "max_iter": 3000
}"#,
    )
    .unwrap();
    let out = dir.path().join("r");
    let o = run(&["bench", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("summary.csv").exists());
    let svgs: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "svg"))
        .collect();
    assert_eq!(svgs.len(), 1);
    let before = std::fs::read(&svgs[0]).unwrap();

    let replot = dir.path().join("replot");
    let trace = out.join("traces.csv");
    assert_eq!(code(&["plot", "--trace", trace.to_str().unwrap(), "--out", replot.to_str().unwrap()]), 0);
    let after = std::fs::read(replot.join(svgs[0].file_name().unwrap())).unwrap();
    assert_eq!(before, after);

    // seeds override and the bench is reproducible byte for byte
    let out2 = dir.path().join("r2");
    let o = run(&["bench", "--config", cfg.to_str().unwrap(), "--out", out2.to_str().unwrap(), "--seeds", "1-2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(out.join("summary.csv")).unwrap(), std::fs::read(out2.join("summary.csv")).unwrap());
}

#[test]
fn plot_rejects_malformed_trace() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.csv");
    std::fs::write(&p, "not,a,trace\n").unwrap();
    assert_eq!(code(&["plot", "--trace", p.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]), 1);
}
