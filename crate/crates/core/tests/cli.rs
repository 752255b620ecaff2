use std::path::PathBuf;
use std::process::{Command, Output};

fn map(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "maps", &format!("{name}.map")].iter().collect();
    p.to_string_lossy().into_owned()
}

fn pwdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwdyn")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn special_points_of_the_shift() {
    let o = pwdyn(&["special", &map("shift")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "S = {1/2}\nT = {}\nD = {1/2}\n");
}

#[test]
fn emitted_square_round_trips() {
    let o = pwdyn(&["iterate", &map("shift"), "-n", "2", "--emit-map"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f2.map");
    std::fs::write(&path, &text).unwrap();
    let o = pwdyn(&["special", path.to_str().unwrap()]);
    assert_eq!(stdout(&o), "S = {3/8, 5/8}\nT = {}\nD = {3/8, 5/8}\n");
    let composed = pwdyn(&["compose", &map("shift"), &map("shift"), "--emit-map"]);
    assert_eq!(stdout(&composed), text);
}

#[test]
fn eval_at_a_jump() {
    let o = pwdyn(&["eval", &map("shift"), "--x", "1/2"]);
    assert_eq!(stdout(&o), "undefined: f(1/2-) = 5/8, f(1/2+) = 3/8\n");
    let o = pwdyn(&["eval", &map("shift"), "--x", "1/2", "--side", "plus", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], "3/8");
}

#[test]
fn hat_bound_and_theorem5() {
    let o = pwdyn(&["bound", &map("hat"), "--horizon", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "count=1 N_T=1 N_D=0 bound=3 HOLDS\n");
    let o = pwdyn(&["theorem5", &map("hat"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["forward"][0]["orbit"], serde_json::json!(["7/12"]));
    assert_eq!(v["reverse"][0]["w"], "1/2");
    assert_eq!(v["reverse"][0]["regular"]["value"], "yes");
}

#[test]
fn classify_and_taxonomy() {
    let o = pwdyn(&["classify", &map("hat"), "--x", "7/12"]);
    assert!(stdout(&o).starts_with("7/12: stable\n"), "{}", stdout(&o));
    let o = pwdyn(&["taxonomy", &map("tent"), "--x", "3/5", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["trapped"], true);
}

#[test]
fn plot_outputs() {
    let o = pwdyn(&["plot", &map("hat"), "--mode", "cobweb", "--x0", "5/8", "-n", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# coordinates rounded to 12 decimal places\nsegment_id,x1,y1,x2,y2\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("cobweb-")).count(), 6);
    let o = pwdyn(&["plot", &map("shift"), "--format", "svg"]);
    let svg = stdout(&o);
    assert!(svg.starts_with("<svg") && svg.contains("jump-0"));
}

#[test]
fn suite_list_and_run() {
    let o = pwdyn(&["suite", "--list"]);
    assert_eq!(stdout(&o).lines().count(), pwdyn::harness::PROPERTY_NAMES.len());
    let o = pwdyn(&["suite", "shift_square", "half_point_cycles", "--scale", "0.1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn exit_codes() {
    assert_eq!(pwdyn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pwdyn(&["eval", &map("shift")]).status.code(), Some(2));
    assert_eq!(pwdyn(&["eval", &map("shift"), "--x", "2"]).status.code(), Some(2));
    assert_eq!(pwdyn(&["validate", "/no/such/file.map"]).status.code(), Some(2));
    assert_eq!(pwdyn(&["--version"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.map");
    std::fs::write(&bad, "interval 0 1\npiece 0 1 : 2 0\n").unwrap();
    let o = pwdyn(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("escapes"));
}
