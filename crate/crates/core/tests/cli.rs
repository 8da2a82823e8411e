use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_degree-nli");

const SMALL: &str = r#"{"id": "chain", "premises": ["Taro-wa Jiro yori omoi.", "Jiro-wa omoi."], "hypothesis": "Taro-wa omoi.", "gold": "yes"}
{"id": "antonym", "premises": ["Taro-wa Jiro yori omoi."], "hypothesis": "Taro-wa Jiro yori karui.", "gold": "no"}
{"id": "broken", "premises": ["Taro-wa xyzzy."], "hypothesis": "Taro-wa omoi.", "gold": "yes", "expected": "error"}
"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

#[test]
fn parse_and_semantics_print() {
    let o = run(&["parse", "Taro-wa Jiro yori omoi."]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("yori"));
    let o = run(&["semantics", "Taro-wa Jiro izyoo-ni omoi."]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("presupposition formula: heavy(jiro, theta(heavy))"), "{}", stdout(&o));
}

#[test]
fn prove_single_problem() {
    let o = run(&[
        "prove",
        "-p",
        "Taro-wa Jiro yori omoi.",
        "-p",
        "Jiro-wa 70 kg yori omoi.",
        "-H",
        "Taro-wa 70 kg yori omoi.",
        "--gold",
        "yes",
        "--dump-semantics",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("answer: yes") && out.contains("gold: yes (correct)"), "{out}");
    assert!(out.contains("axiom cp_heavy"), "{out}");
}

#[test]
fn eval_writes_reports_and_tptp() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "small.jsonl", SMALL);
    let config = write(dir.path(), "ci.conf", "profile = ci\n");
    let out = dir.path().join("out");
    let tptp = dir.path().join("tptp");
    let o = run(&[
        "--config",
        &config,
        "eval",
        &data,
        "--out",
        out.to_str().unwrap(),
        "--tptp-out",
        tptp.to_str().unwrap(),
        "--oracle-check",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("accuracy 0.6667 (2/3), errors 1"), "{}", stdout(&o));
    let report = std::fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("known failure"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 3);
    // two prepared problems, one file per direction
    assert_eq!(std::fs::read_dir(&tptp).unwrap().count(), 4);
}

#[test]
fn prove_tptp_reports_szs_status() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "small.jsonl", SMALL);
    let tptp = dir.path().join("tptp");
    let o = run(&["tptp", &data, "--out", tptp.to_str().unwrap()]);
    assert!(o.status.success());
    let o = run(&["prove-tptp", tptp.join("chain.hypothesis.p").to_str().unwrap()]);
    assert!(stdout(&o).contains("SZS status Theorem"), "{}", stdout(&o));
    let o = run(&["prove-tptp", tptp.join("chain.negation.p").to_str().unwrap()]);
    assert!(!stdout(&o).contains("SZS status Theorem"), "{}", stdout(&o));
}

#[test]
fn io_and_config_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!run(&["eval", "/nonexistent/data.jsonl"]).status.success());
    let bad = write(dir.path(), "bad.conf", "no_such_key = 1\n");
    let data = write(dir.path(), "small.jsonl", SMALL);
    let o = run(&["--config", &bad, "eval", &data]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));
    let dup = write(dir.path(), "dup.jsonl", &SMALL.lines().chain(SMALL.lines().take(1)).collect::<Vec<_>>().join("\n"));
    let o = run(&["eval", &dup]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4: duplicate id"));
}
