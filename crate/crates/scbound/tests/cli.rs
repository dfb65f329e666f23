use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scbound::format::{ChannelJson, CmssFile, CmssJson, DistJson, ProtocolFile, ProtocolJson};
use scbound_core::cmss::and_cmss;
use scbound_core::dist::{Alphabet, JointDist};
use scbound_core::protocol::{and, MessageMap, Party, ProtocolSpec, Round};
use serde_json::Value;

const LOG3: f64 = 1.584_962_500_721_156;

fn scbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scbound")).args(args).env_remove("SCBOUND_THREADS").output().unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn json(o: &Output) -> Value {
    assert!(o.stderr.is_empty(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn link(v: &Value, section: &str, l: &str) -> f64 {
    v[section][l].as_f64().unwrap()
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, v: &T) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

/// Everyone simply forwards inputs: correct for AND, but Bob sees `X` and
/// Charlie sees both inputs.
fn leaky_and() -> ProtocolSpec {
    let bit = |n| Alphabet::range(n, 2);
    let fwd = || MessageMap::func(|v| v.input.unwrap());
    ProtocolSpec {
        name: "forward".into(),
        x: bit("X"),
        y: bit("Y"),
        z: bit("Z"),
        randomness: [1, 1, 1],
        rounds: vec![
            Round::new(Party::Alice, Party::Bob, bit("M12"), fwd()),
            Round::new(Party::Alice, Party::Charlie, bit("M31"), fwd()),
            Round::new(Party::Bob, Party::Charlie, bit("M23"), fwd()),
        ],
        output: MessageMap::func(|v| v.history[0] & v.history[1]),
        designed_for: None,
    }
}

#[test]
fn analyze_and() {
    let o = scbound(&["analyze", "--builtin", "and"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["links"]["M12"]["value"].as_f64().unwrap() >= 1.826 - 1e-3);
    assert_eq!(v["links"]["M12"]["family"], "SplitSwitching");
    assert!(v["links"]["M12"]["witnesses"]["X'"]["probs"].is_array());
    assert!(v["rho"].as_f64().unwrap() >= 1.826 - 1e-3);
    assert_eq!(v["conditions"]["product_inputs"], true);
    assert_eq!(v["manifest"]["command"], "analyze");
    assert_eq!(v["manifest"]["config"]["grid_resolution"], 0.02);
    assert!(v["manifest"].get("wall_time_s").is_none());
}

#[test]
fn analyze_group_add_order_five() {
    let v = json(&scbound(&["analyze", "--builtin", "group-add", "--order", "5"]));
    for l in ["M12", "M23", "M31"] {
        assert!((v["links"][l]["value"].as_f64().unwrap() - 5f64.log2()).abs() < 1e-6);
    }
}

#[test]
fn analyze_constant_channel_is_zero() {
    let path = data("constant_channel.json");
    let o = scbound(&["analyze", "--channel", &path]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for l in ["M12", "M23", "M31"] {
        assert_eq!(v["links"][l]["value"].as_f64().unwrap(), 0.0);
    }
    assert_eq!(v["rho"].as_f64().unwrap(), 0.0);
    assert_eq!(v["manifest"]["inputs"][0], path.as_str());
}

#[test]
fn analyze_channel_with_dist() {
    let (ch, dist) = (data("and_channel.json"), data("skewed_and_inputs.json"));
    let v = json(&scbound(&["analyze", "--channel", &ch, "--dist", &dist]));
    assert_eq!(v["conditions"]["product_inputs"], false);
    assert!(v["links"]["M12"]["value"].as_f64().unwrap() >= 1.826 - 1e-3);
    assert_eq!(v["manifest"]["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_remote_ot() {
    let o = scbound(&["simulate", "--builtin", "remote-ot", "--m", "2", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(link(&v, "entropies", "M12"), 3.0);
    assert_eq!(link(&v, "entropies", "M23"), 2.0);
    assert_eq!(link(&v, "entropies", "M31"), 2.0);
    assert_eq!(v["all_pass"], true);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn simulate_erasure_against_bound() {
    let v = json(&scbound(&["simulate", "--builtin", "erasure", "--p", "0.5", "--q", "0.5"]));
    assert!((link(&v, "entropies", "M31") - 1.5).abs() < 1e-9);
    assert!(link(&v, "bounds", "M31") >= 1.5 - 1e-3);
    assert!(link(&v, "expected_lengths", "M31") < 2.5);
    assert_eq!(v["all_pass"], true);
}

#[test]
fn simulate_without_bounds() {
    let v = json(&scbound(&["simulate", "--builtin", "and", "--no-bounds"]));
    assert!(v.get("bounds").is_none());
    assert!((v["randomness"].as_f64().unwrap() - (1.0 + LOG3)).abs() < 1e-9);
}

#[test]
fn simulate_leaky_spec_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let b = and(1).unwrap();
    let file = ProtocolFile {
        protocol: ProtocolJson::of(&leaky_and()).unwrap(),
        channel: ChannelJson::of(&b.channel),
        inputs: Some(DistJson::of(&b.inputs)),
    };
    let path = write_json(dir.path(), "bad.json", &file);
    let o = scbound(&["simulate", "--spec", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["all_pass"], false);
    let check = |name: &str| v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap().clone();
    assert_eq!(check("correctness")["pass"], true);
    assert_eq!(check("privacy against bob")["pass"], false);
    assert_eq!(check("privacy against charlie")["pass"], false);
}

#[test]
fn simulate_spec_file_of_a_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let b = and(1).unwrap();
    let file = ProtocolFile { protocol: ProtocolJson::of(&b.spec).unwrap(), channel: ChannelJson::of(&b.channel), inputs: None };
    let path = write_json(dir.path(), "and.json", &file);
    let skew = data("skewed_and_inputs.json");
    let o = scbound(&["simulate", "--spec", path.to_str().unwrap(), "--dist", &skew, "--no-bounds"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((link(&v, "entropies", "M23") - LOG3).abs() < 1e-9);
}

#[test]
fn simulate_cmss_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let b = and(1).unwrap();
    let secrets = JointDist::join(&b.inputs, &b.channel).unwrap();
    let file = CmssFile { scheme: CmssJson::of(&and_cmss()).unwrap(), secrets: DistJson::of(&secrets) };
    let path = write_json(dir.path(), "cmss.json", &file);
    let o = scbound(&["simulate", "--cmss", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    for l in ["M12", "M23", "M31"] {
        assert!((link(&v, "share_entropies", l) - LOG3).abs() < 1e-9);
        assert!((link(&v, "bounds", l) - LOG3).abs() < 1e-6);
    }
    assert!(v["realizability"].as_array().unwrap().iter().all(|c| c["value"].as_f64().unwrap() < -0.2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(scbound(&[]).status.code(), Some(1));
    assert_eq!(scbound(&["analyze"]).status.code(), Some(1));
    assert_eq!(scbound(&["analyze", "--builtin", "nope"]).status.code(), Some(1));
    assert_eq!(scbound(&["analyze", "--builtin", "and", "--channel", "x.json"]).status.code(), Some(1));
    assert_eq!(scbound(&["analyze", "--channel", "/no/such/file.json"]).status.code(), Some(1));
    assert_eq!(scbound(&["analyze", "--builtin", "and", "--format", "xml"]).status.code(), Some(1));
    assert_eq!(scbound(&["analyze", "--builtin", "and", "--grid", "0"]).status.code(), Some(1));
    assert_eq!(scbound(&["reproduce", "--only", "bogus"]).status.code(), Some(1));
    let bad = data("and_channel.json");
    // a channel is not a distribution
    assert_eq!(scbound(&["analyze", "--builtin", "and", "--dist", &bad]).status.code(), Some(1));
    let o = scbound(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn capacity_errors_exit_three() {
    let o = scbound(&["simulate", "--builtin", "remote-ot", "--m", "11", "--n", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("capacity"));
}

#[test]
fn reports_are_byte_stable() {
    let a = scbound(&["analyze", "--builtin", "sum"]);
    let b = scbound(&["analyze", "--builtin", "sum"]);
    assert_eq!(a.stdout, b.stdout);
    let a = scbound(&["simulate", "--builtin", "and", "--format", "csv"]);
    let b = scbound(&["simulate", "--builtin", "and", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    let t = json(&scbound(&["analyze", "--builtin", "sum", "--timing"]));
    assert!(t["manifest"]["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn out_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = scbound(&["analyze", "--builtin", "and", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# "));
    assert!(text.contains("# command: \"analyze\""));
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "link,family,expression,value,limit_point,best");
    let best: Vec<&&str> = body.iter().filter(|l| l.ends_with(",true")).collect();
    assert_eq!(best.len(), 3);
}

#[test]
fn thread_variable() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_scbound"))
            .args(["analyze", "--builtin", "sum"])
            .env("SCBOUND_THREADS", v)
            .output()
            .unwrap()
    };
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
    let one = run("1");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, scbound(&["analyze", "--builtin", "sum"]).stdout);
}

#[test]
fn reproduce_selected_rows() {
    let o = scbound(&["reproduce", "--only", "and"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert!((r["bound"]["M23"].as_f64().unwrap() - LOG3).abs() < 1e-3);
    assert!(r["bound"]["M12"].as_f64().unwrap() >= 1.825);
    assert!((r["simulated"]["M12"].as_f64().unwrap() - (1.0 + LOG3)).abs() < 1e-9);
    assert_eq!(v["all_match"], true);

    let v = json(&scbound(&["reproduce", "--only", "group-add,sum"]));
    let names: Vec<&str> = v["rows"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["group-add-2", "group-add-3", "group-add-6", "sum"]);
}

#[test]
fn reproduce_everything() {
    let o = scbound(&["reproduce"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = json(&o);
    assert_eq!(v["rows"].as_array().unwrap().len(), scbound::reproduce::ROWS.len());
}

#[test]
fn in_process_run_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = scbound::cli::run(["scbound", "analyze", "--builtin", "sum"].map(Into::into), &mut out, &mut err);
    assert_eq!(code, 0);
    assert_eq!(out, scbound(&["analyze", "--builtin", "sum"]).stdout);
}
