use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn sample(name: &str) -> String {
    root().join("samples").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_omega-rb")).args(args).output().expect("spawn omega-rb")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_passes_on_the_family_example() {
    let o = run(&["check", &sample("family_z2.txt")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("level: Eds"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn check_reports_violations_with_exit_one() {
    let o = run(&["check", &sample("broken.txt")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("EDS1"));
}

#[test]
fn inapplicable_level_is_an_error() {
    let o = run(&["check", &sample("broken.txt"), "--level", "lambda-ets"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not applicable"));
}

#[test]
fn parse_errors_carry_a_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "size = 2\nleft = [[0,1]\n").unwrap();
    let o = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["enumerate", "--level", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn product_of_two_grafts() {
    let o = run(&["product", "--omega", &sample("family_z2.txt"), "--expr", "([a](|)) * ([b](|))"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "([b]([a](|))) + ([b]([b](|))) + ([b](|))");

    let o = run(&["product", "--weight-zero", "--omega", &sample("family_z2.txt"), "--expr", "([a](|)) * ([b](|))"]);
    assert_eq!(stdout(&o).trim(), "([b]([a](|))) + ([b]([b](|)))");
}

#[test]
fn corollas_merge() {
    let o = run(&["product", "--omega", &sample("family_z2.txt"), "--expr", "(| x | x |) * (| y |)"]);
    assert_eq!(stdout(&o).trim(), "(| x | x | y |)");
}

#[test]
fn unknown_generator_is_rejected() {
    let o = run(&["product", "--omega", &sample("family_z2.txt"), "--expr", "(| z |)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown generator label `z`"));
}

#[test]
fn words_products() {
    let omega = sample("family_z2.txt");
    let dual = sample("dual_numbers.txt");
    let o = run(&["words", "--omega", &omega, "--algebra", &dual, "--expr", "1 [a] x * 1 [b] x"]);
    assert_eq!(stdout(&o).trim(), "1 [b] x [a] x + 1 [b] x [b] x");
    let o = run(&["words", "--omega", &omega, "--algebra", &dual, "--expr", "x * (1 [a] 1)"]);
    assert_eq!(stdout(&o).trim(), "x [a] 1");
    let o = run(&["words", "--omega", &omega, "--algebra", &sample("square_zero.txt"), "--unitize", "--expr", "1 [a] x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1 [a] x");
}

#[test]
fn json_output() {
    let o = run(&[
        "--format",
        "json",
        "words",
        "--omega",
        &sample("family_z2.txt"),
        "--algebra",
        &sample("dual_numbers.txt"),
        "--expr",
        "2/3 * x",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], "2/3*x");
}

#[test]
fn evaluate_sends_trees_to_words() {
    let o = run(&[
        "evaluate",
        "--omega",
        &sample("family_z2.txt"),
        "--target-algebra",
        &sample("dual_numbers.txt"),
        "--subst",
        &sample("subst.txt"),
        "--expr",
        "([a](| x |)) * (| y |)",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1 [a] x + x [a] x");
}

#[test]
fn enumeration_matches_the_fixture() {
    let fixture = root().join("fixtures/ets2.json");
    let o = run(&["enumerate", "--level", "ets", "--diff", fixture.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("level ets  size 2  structures 124  classes 64"), "{out}");
    assert!(out.contains("fixture: exact match"));
}

#[test]
fn enumeration_reports_a_dropped_row() {
    let text = std::fs::read_to_string(root().join("fixtures/ets2.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["rows"].as_array_mut().unwrap().retain(|r| r["name"] != "G1");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let o = run(&["enumerate", "--level", "ets", "--diff", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not in the fixture"));
}

#[test]
fn verify_tables_passes() {
    let o = run(&["verify-tables"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn dendriform_on_a_sound_and_a_broken_structure() {
    let o = run(&["dendriform", "--omega", &sample("family_z2.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("hold on 37620 cases"));

    let args = ["--seed", "3", "dendriform", "--omega", &sample("broken.txt"), "--sample", "200"];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(1));
    assert!(stdout(&first).starts_with("FAIL"));
    assert_eq!(stdout(&first), stdout(&run(&args)));
}

#[test]
fn report_goes_to_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&["--format", "json", "--out", path.to_str().unwrap(), "check", &sample("family_z2.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v.as_array().unwrap().len() >= 2);
}

#[test]
fn eds_counts_in_json() {
    let o = run(&["--format", "json", "enumerate", "--level", "eds"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["raw_count"], 45);
    assert_eq!(v["class_count"], 24);
}
