use std::path::Path;
use std::process::{Command, Output};

fn dirlaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirlaw"))
        .args(args)
        .env_remove("DIRLAW_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = dirlaw(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["dirichlet", "cdf", "--alpha", "0.5,0.5", "--u", "0.25"]), "0.333333333333\n");
    assert_eq!(stdout(&["perms", "exact", "--n", "2", "--k", "2", "--u", "0.5"]), "5/8\n");
    assert_eq!(stdout(&["integers", "exact", "--x", "4", "--k", "2", "--u", "0.5"]), "2/3\n");
    assert_eq!(stdout(&["polys", "exact", "--q", "2", "--n", "2", "--u", "1/2"]), "31/48\n");
    assert_eq!(stdout(&["perms", "brute", "--n", "2", "--u", "1/2"]), "5/8\n");
    assert_eq!(stdout(&["series", "a0", "--p", "3", "--k", "3", "--v", "1"]), "8/9\n");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| dirlaw(args).status.code();
    assert_eq!(code(&["integers", "exact", "--x", "4", "--u", "0.7,0.7", "--k", "3"]), Some(2));
    assert_eq!(code(&["dirichlet", "density", "--alpha", "0.5,0.5", "--u", "0,1"]), Some(2));
    assert_eq!(code(&["dirichlet", "cdf", "--alpha", "1,1,1,1,1,1", "--u", "0.1,0.1,0.1,0.1,0.1"]), Some(2));
    assert_eq!(code(&["integers", "mc", "--x", "100", "--model", "tau-weights:2;1,1", "--u", "0.5"]), Some(2));
    assert_eq!(code(&["perms", "exact", "--n", "6000", "--u", "0.5"]), Some(3));
    assert_eq!(code(&["perms", "brute", "--n", "41", "--u", "0.5"]), Some(3));
    assert_eq!(code(&["perms", "frobnicate"]), Some(2));
    assert_eq!(code(&["integers", "exact", "--u", "0.5"]), Some(2));
}

#[test]
fn csv_headers() {
    let run = stdout(&["integers", "run", "--x", "1000", "--k", "3", "--grid", "0.25"]);
    let mut lines = run.lines();
    assert_eq!(lines.next(), Some("u_1,u_2,empirical,limit,deviation"));
    assert_eq!(lines.next().unwrap().split(',').count(), 5);
    let conv = stdout(&["perms", "converge", "--n", "10,100", "--k", "2", "--grid", "0.1"]);
    let lines: Vec<&str> = conv.lines().collect();
    assert_eq!(lines[0], "scale,sup_dev,scaled_sup_dev");
    assert!(lines[1].starts_with("10,") && lines[2].starts_with("100,"));
    let series = stdout(&["series", "direct", "--s", "2,2", "--n", "2"]);
    assert!(series.starts_with("re,im,tail_bound\n1.27083333333,0,"));
}

#[test]
fn json_report_keys() {
    let text = stdout(&["polys", "run", "--q", "3", "--n", "4", "--grid", "0.25", "--format", "json", "--seed", "9"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    for key in [
        "kind", "k", "scale", "model", "grid_step", "bins", "seed", "sup_dev", "scaled_sup_dev", "rows",
        "timestamp_utc", "tool_version",
    ] {
        assert!(keys.contains(&key), "missing {key}");
    }
    assert_eq!(v["kind"], "polys");
    assert_eq!(v["scale"], 4);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn outputs_carry_manifests_and_repeat_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("nested/b.csv");
    for out in [&a, &b] {
        let args = ["integers", "run", "--x", "150000", "--grid", "0.05", "--model", "squarefree"];
        let mut full: Vec<&str> = args.to_vec();
        let path = out.to_str().unwrap();
        full.extend(["--out", path]);
        let text = stdout(&full);
        assert!(text.contains("sup_dev=") && text.ends_with(&format!("{path}\n")));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["kind"], "integers");
    assert_eq!(manifest["verb"], "run");
    assert_eq!(manifest["params"]["model"], "squarefree");
    assert_eq!(manifest["outputs"][0], a.to_str().unwrap());
    assert!(Path::new(&dir.path().join("nested/b.manifest.json")).exists());
}

#[test]
fn samples_depend_only_on_seed() {
    let args = ["dirichlet", "sample", "--alpha", "1/3,1/3,1/3", "--n", "5", "--seed", "42"];
    let first = stdout(&args);
    assert_eq!(first, stdout(&[&args[..], &["--threads", "2"]].concat()));
    assert_eq!(first.lines().count(), 6);
    assert_ne!(first, stdout(&["dirichlet", "sample", "--alpha", "1/3,1/3,1/3", "--n", "5", "--seed", "43"]));
}

#[test]
fn cache_directory_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let run = |args: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_dirlaw"))
            .args(args)
            .env("DIRLAW_CACHE", &cache)
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let first = run(&["integers", "exact", "--x", "1000", "--u", "0.5"]);
    assert!(cache.join("spf_1000.bin").exists());
    assert_eq!(run(&["integers", "exact", "--x", "1000", "--u", "0.5"]), first);
    run(&["polys", "exact", "--q", "3", "--n", "6", "--u", "0.5"]);
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 2);
}
