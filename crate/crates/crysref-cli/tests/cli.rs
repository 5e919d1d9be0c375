use std::process::{Command, Output};

fn crysref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crysref")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn dets_of_a3() {
    let o = crysref(&["dets", "A3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("det S (matrix) = 4"), "{s}");
    assert!(s.contains("det S (graph)  = 4"), "{s}");
}

#[test]
fn exit_codes() {
    assert_eq!(crysref(&["dets", "G(7,9,3)"]).status.code(), Some(1));
    assert_eq!(crysref(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(crysref(&["graph", "E8"]).status.code(), Some(2));
    assert_eq!(crysref(&["dets", "G(4,2,3)"]).status.code(), Some(2));
    assert_eq!(crysref(&["--cap", "10", "graph", "K31"]).status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let a = crysref(&["classify", "G(4,2,3)"]);
    let b = crysref(&["classify", "G(4,2,3)"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_report_and_spec_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("crysref-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("g443.json");
    let o = crysref(&["catalog", "G(4,4,3)"]);
    assert!(o.status.success());
    std::fs::write(&spec, &o.stdout).unwrap();
    let report = dir.join("report.json");
    let o = crysref(&["--json", report.to_str().unwrap(), "h1", spec.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["h1"][0]["invariant_factors"], serde_json::json!(["2", "2"]));
    assert_eq!(v["order"], serde_json::json!(96));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn one_dimensional_orders() {
    let o = crysref(&["one-dim", "--kind", "W6"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("reflection orders [2, 3, 6]"));
    let o = crysref(&["one-dim", "--kind", "W2l", "--lambda", "1+2i"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("reflection orders [2]"));
    assert_eq!(crysref(&["one-dim", "--kind", "W5"]).status.code(), Some(1));
}

#[test]
fn k31_classes() {
    let o = crysref(&["classes", "K31"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(r#"classes ["0", "1/2 + 1/2*i"]"#), "{}", stdout(&o));
}
