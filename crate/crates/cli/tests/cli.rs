use std::process::{Command, Output};

fn config(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn schreier_member_and_enum() {
    let o = run(&["schreier", "member", "--alpha", "1", "--set", "2,3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "member = true\nmaximal = true\n");
    let o = run(&["schreier", "member", "--alpha", "1", "--set", "2,3,4"]);
    assert_eq!(stdout(&o), "member = false\n");
    let o = run(&["schreier", "enum", "--alpha", "2", "--max-n", "3"]);
    assert_eq!(stdout(&o), "{}\n{1}\n{2}\n{3}\n{2,3}\n");
}

#[test]
fn norm_and_dual_norm() {
    let t = config("T.cfg");
    let o = run(&["norm", "--config", &t, "--vec", "3:1,6:1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "value = 2\n");
    let o = run(&["norm", "--config", &t, "--vec", "3:1,6:1", "--engine", "exhaustive", "--json"]);
    let text = stdout(&o);
    assert!(text.starts_with("value = 2\n"));
    let json: serde_json::Value = serde_json::from_str(&text["value = 2\n".len()..]).unwrap();
    assert_eq!(json["value"], "2");
    let o = run(&["dualnorm", "--config", &t, "--func", "2:1/2,3:1/2"]);
    assert_eq!(stdout(&o), "value = 1\n");
    let o = run(&["dualnorm", "--config", &t, "--func", "3:1,6:-1"]);
    assert_eq!(stdout(&o), "value = 2\n");
}

#[test]
fn extreme_points() {
    let o = run(&["extreme", "--config", &config("T.cfg"), "--coords", "2,3"]);
    let text = stdout(&o);
    assert!(text.starts_with("count = 4\n"), "{text}");
}

#[test]
fn witness_lab_and_strict() {
    let lab = config("lab/c5.cfg");
    let o = run(&["witness", "--config", &lab, "--set", "1,2,3,4,5,6", "--alpha", "1", "--eps", "9/10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("total norm = 1\n"));
    let o = run(&[
        "witness", "--config", &config("T.cfg"), "--set", "1,2,3", "--alpha", "1", "--eps", "9/10", "--strict",
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("precondition"));
}

#[test]
fn check_exit_codes_and_report() {
    let dir = std::env::temp_dir().join(format!("epspace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = run(&[
        "check", "--config", &config("T.cfg"), "--suite", "L1", "--seed", "3", "--json",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "pass");
    assert_eq!(report["seed"], 3);
    assert_eq!(report["reports"][0]["id"], "L1");
    let o = run(&["check", "--config", &config("T.cfg"), "--suite", "unknown"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
}

#[test]
fn validate_reports_violations() {
    let o = run(&["validate", "--config", &config("G.cfg")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "ok\n");
}
