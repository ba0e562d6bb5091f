use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gdt(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gdt"))
        .args(args)
        .current_dir(cwd)
        .env_remove("GDT_SEED")
        .env_remove("GDT_OUT")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

const PIPELINE: &str = r#"createobject("/source", "Source1", 0, 0, 0);
createobject("/queue", "Queue1", 4, 0, 0);
createobject("/processor", "Processor1", 8, 0, 0);
createobject("/sink", "Sink1", 12, 0, 0);
setparam(Source1, "InterArrivalTime", exponential(10));
setparam(Processor1, "ProcessTime", exponential(8));
contextdragconnection(Source1, Queue1, "A");
contextdragconnection(Queue1, Processor1, "A");
contextdragconnection(Processor1, Sink1, "A");
"#;

#[test]
fn parse_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("ok.fs"), PIPELINE).unwrap();
    let out = gdt(&["parse", "ok.fs"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["decls"], 4);
    assert_eq!(v["params"], 2);
    assert_eq!(v["connections"], 3);
}

#[test]
fn parse_flags_empty_and_garbage() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.fs"), "").unwrap();
    let out = gdt(&["parse", "empty.fs"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "ParseEmpty");

    let five = "createobject(\"/source\", \"S\", 0, 0, 0);\n\
        createobject(\"/sink\", \"K\", 1, 0, 0);\n\
        this is not a statement;\n\
        setparam(S, \"InterArrivalTime\", 3);\n\
        contextdragconnection(S, K, \"A\");\n";
    fs::write(dir.path().join("five.fs"), five).unwrap();
    let out = gdt(&["parse", "five.fs"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["unknown_statements"], 1);
    assert_eq!(v["recognized_statements"], 4);
}

#[test]
fn missing_file_is_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gdt(&["parse", "absent.fs"], dir.path()).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(gdt(&["score", "--refs", "."], dir.path()).status.code(), Some(2));
    assert_eq!(gdt(&["--weights", "0.2,0.2", "parse", "x"], dir.path()).status.code(), Some(2));
    assert_eq!(gdt(&["generate"], dir.path()).status.code(), Some(2));
    assert_eq!(gdt(&["frobnicate"], dir.path()).status.code(), Some(2));
}

fn corpus(dir: &Path, extra: &[&str]) -> Vec<Value> {
    let mut args = vec!["--seed", "42", "--out", "corpus", "generate", "--count", "10"];
    args.extend_from_slice(extra);
    let out = gdt(&args, dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    fs::read_to_string(dir.join("corpus/manifest.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn generate_respects_constraints() {
    let dir = tempfile::tempdir().unwrap();
    let records = corpus(dir.path(), &["--automation", "agv"]);
    assert_eq!(records.len(), 10);
    for r in &records {
        assert!(r["code"].as_str().unwrap().contains(r#"createobject("/agv", "AGV1""#));
        assert_eq!(r["metadata"]["automation"], "agv");
        let sketch = dir.path().join("corpus").join(r["sketch_path"].as_str().unwrap());
        assert!(sketch.is_file());
    }
    let bad = gdt(&["generate", "--count", "2", "--automation", "jetpack"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
}

fn write_pairs(dir: &Path, records: &[Value]) {
    fs::create_dir_all(dir.join("refs")).unwrap();
    fs::create_dir_all(dir.join("hyps")).unwrap();
    for r in records {
        let name = format!("{}.fs", r["id"].as_str().unwrap());
        let code = r["code"].as_str().unwrap();
        fs::write(dir.join("refs").join(&name), code).unwrap();
        fs::write(dir.join("hyps").join(&name), code).unwrap();
    }
}

#[test]
fn score_identity_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let records = corpus(dir.path(), &[]);
    write_pairs(dir.path(), &records);
    let out = gdt(&["score", "--refs", "refs", "--hyps", "hyps"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let agg = &json(&out)["aggregates"];
    for key in ["mean_svr", "mean_pmr", "esr", "corpus_bleu4"] {
        assert_eq!(agg[key], 1.0, "{key}");
    }
}

#[test]
fn one_broken_hypothesis_in_ten() {
    let dir = tempfile::tempdir().unwrap();
    let records = corpus(dir.path(), &[]);
    write_pairs(dir.path(), &records);
    let victim = dir.path().join("hyps/gdt-000004.fs");
    let broken = fs::read_to_string(&victim)
        .unwrap()
        .lines()
        .filter(|l| !l.contains(r#""/sink""#))
        .collect::<Vec<_>>()
        .join("\n");
    fs::write(&victim, broken).unwrap();
    let out = gdt(&["score", "--refs", "refs", "--hyps", "hyps", "--metrics", "esr"], dir.path());
    let agg = &json(&out)["aggregates"];
    assert_eq!(agg["esr"], 0.9);
    assert_eq!(agg["s_success"], 9);
    assert!(agg.get("corpus_bleu4").is_none());
}

#[test]
fn score_reports_unpaired_ids() {
    let dir = tempfile::tempdir().unwrap();
    let records = corpus(dir.path(), &[]);
    write_pairs(dir.path(), &records);
    fs::remove_file(dir.path().join("hyps/gdt-000003.fs")).unwrap();
    let out = gdt(&["score", "--refs", "refs", "--hyps", "hyps"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gdt-000003.fs"));
}

#[test]
fn score_from_pair_list_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.fs"), PIPELINE).unwrap();
    fs::write(
        dir.path().join("b.fs"),
        PIPELINE.replace("exponential(8)", "exponential(9)"),
    )
    .unwrap();
    fs::write(dir.path().join("pairs.csv"), "# ref,hyp\na.fs,b.fs\n").unwrap();
    let out = gdt(&["--format", "csv", "score", "--pairs", "pairs.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "b.fs");
    assert_eq!(row[10], "0.5");
}

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.fs"), PIPELINE).unwrap();
    let run = || gdt(&["--seed", "9", "--horizon", "5000", "simulate", "p.fs"], dir.path());
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["outcome"]["status"], "Success");
    let traced = gdt(&["--horizon", "30", "simulate", "p.fs", "--trace"], dir.path());
    let log = String::from_utf8(traced.stderr).unwrap();
    assert!(log.lines().all(|l| l.split('\t').count() == 4), "{log}");
    assert!(log.contains("\tSource1\tcreate\t0"));
}

#[test]
fn env_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.fs"), PIPELINE).unwrap();
    let flag = gdt(&["--seed", "5", "simulate", "p.fs"], dir.path());
    let env = Command::new(env!("CARGO_BIN_EXE_gdt"))
        .args(["simulate", "p.fs"])
        .env("GDT_SEED", "5")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn deadlocked_script_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let starved = r#"createobject("/source", "S", 0, 0, 0);
createobject("/queue", "Idle", 0, 2, 0);
createobject("/combiner", "C", 1, 0, 0);
createobject("/sink", "K", 2, 0, 0);
setparam(S, "InterArrivalTime", 1);
setparam(C, "ProcessTime", 1);
contextdragconnection(S, C, "A");
contextdragconnection(Idle, C, "A");
contextdragconnection(C, K, "A");
"#;
    fs::write(dir.path().join("d.fs"), starved).unwrap();
    let out = gdt(&["simulate", "d.fs"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["outcome"]["reason"], "DeadlockDetected");
}
