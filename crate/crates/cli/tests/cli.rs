use std::process::{Command, Output};

fn finitetc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_finitetc"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON on stdout")
}

#[test]
fn info_on_the_circle() {
    let o = finitetc(&["info", "sphere:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("elements: 4"));
    assert!(text.contains("connected: yes"));
    assert!(text.contains("core size: 4"));
    assert!(text.contains("contractible: no"));
}

#[test]
fn info_on_a_chain_json() {
    let v = json(&finitetc(&["info", "chain:3", "--format", "json"]));
    assert_eq!(v["contractible"], true);
    assert_eq!(v["core_size"], 1);
}

#[test]
fn info_on_a_complex() {
    let v = json(&finitetc(&["info", "--complex", "cycle:4", "--format", "json"]));
    assert_eq!(v["vertices"], 4);
    assert_eq!(v["dimension"], 1);
}

#[test]
fn malformed_file_is_a_parse_error() {
    let dir = std::env::temp_dir().join(format!("finitetc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.poset");
    std::fs::write(&path, "elements: a b\na < z\n").unwrap();
    let o = finitetc(&["info", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2, column 5"), "{}", err);
}

#[test]
fn unknown_zoo_name_is_rejected() {
    let o = finitetc(&["cat", "torus:2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn cc_of_the_circle() {
    let o = finitetc(&["cc", "--n", "2", "sphere:1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["value"], 4);
    assert_eq!(v["certified"], "exact");
}

#[test]
fn bounded_cc_at_m_zero() {
    let v = json(&finitetc(&["cc", "--n", "2", "--m", "0", "sphere:1", "--format", "json"]));
    assert_eq!(v["certified"], "exact");
    assert_eq!(v["m"], 0);
    assert!(v["value"] == "inf" || v["value"].as_u64().unwrap() >= 4);
}

#[test]
fn cc_inf_of_the_circle() {
    let o = finitetc(&["ccinf", "--n", "2", "--k-max", "2", "sphere:1", "--format", "json", "--emit-witness"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["value"], 2);
    assert_eq!(v["cover"].as_array().unwrap().len(), 2);
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 2);
}

#[test]
fn undecided_runs_exit_with_two() {
    let o = finitetc(&["cck", "--k", "1", "sphere:2", "--budget-seconds", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn n_below_two_is_rejected() {
    let o = finitetc(&["cc", "--n", "1", "sphere:1"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn json_is_identical_across_runs_and_jobs() {
    let args = ["cc", "--n", "2", "fence:3", "--format", "json"];
    let a = finitetc(&args);
    let b = finitetc(&[&args[..], &["--jobs", "1"]].concat());
    let c = finitetc(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn size_cap_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_finitetc"))
        .args(["cc", "--n", "3", "sphere:2"])
        .env("FINITETC_SIZE_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_corollaries_passes() {
    let o = finitetc(&["verify", "corollaries", "--random", "20", "--max-size", "5", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("[pass] cc_2 = 1 iff contractible"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_lemmas_json() {
    let o = finitetc(&["verify", "lemmas", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v[0]["suite"], "lemmas");
}
