use std::net::TcpListener;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};
use std::thread;
use std::time::Duration;

use serde_json::Value;

fn dd2pc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dd2pc"))
}

fn run(args: &[&str]) -> Output {
    let out = dd2pc().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json(args: &[&str]) -> Value {
    serde_json::from_slice(&run(args).stdout).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn free_port() -> String {
    TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().to_string()
}

#[test]
fn precision_prints_envelope() {
    let v = json(&["precision", "--protocol", "s2php", "--n", "10", "--trials", "2", "--ranges", "0,2"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["kind"], "precision");
    let ranges = &v["data"][0]["ranges"];
    assert_eq!(ranges.as_array().unwrap().len(), 2);
    assert!(ranges[0]["mre"].as_f64().unwrap() < 1e-13);
}

#[test]
fn out_flag_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sec.json");
    run(&["security-theta", "--theta", "3,10", "--trials", "2000", "--out", out.to_str().unwrap()]);
    let v = read_json(&out);
    assert_eq!(v["kind"], "security-theta");
    assert_eq!(v["data"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn digit_loss_and_verification_reports() {
    let v = json(&["digit-loss", "--n", "500", "--d", "3", "--trials", "1000"]);
    assert!((v["data"][0]["analytic"].as_f64().unwrap() - 0.19681).abs() < 1e-4);

    let v = json(&["verify-fail", "--l", "1", "--trials", "200"]);
    let rate = v["data"][0]["miss_rate"].as_f64().unwrap();
    assert!(rate <= 0.25 + 3.0 * (0.25f64 * 0.75 / 200.0).sqrt());

    let v = json(&["verify-proportion", "--dims", "20", "--l", "0,4", "--repeats", "1"]);
    assert_eq!(v["data"][0]["verification_share"], 0.0);
}

#[test]
fn seed_makes_output_repeatable() {
    let args = ["security-theta", "--theta", "5", "--trials", "5000", "--seed", "3"];
    assert_eq!(json(&args)["data"], json(&args)["data"]);
}

#[test]
fn bad_arguments_fail() {
    assert!(!dd2pc().args(["security-theta", "--theta", "1"]).output().unwrap().status.success());
    assert!(!dd2pc().args(["precision", "--protocol", "nope"]).output().unwrap().status.success());
    assert!(!dd2pc().args(["train", "--data", "/nonexistent.csv"]).output().unwrap().status.success());
}

#[test]
fn gen_train_predict_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("raisin.csv");
    let model = dir.path().join("model.json");
    run(&["gen-data", "--kind", "raisin", "--seed", "1", "--out", data.to_str().unwrap()]);
    let header = std::fs::read_to_string(&data).unwrap();
    assert_eq!(header.lines().count(), 901);

    let v = json(&["train", "--data", data.to_str().unwrap(), "--model", model.to_str().unwrap(), "--iterations", "2", "--batch-size", "30"]);
    assert_eq!(v["kind"], "train");
    let m = read_json(&model);
    assert_eq!(m["w"].as_array().unwrap().len(), 8);

    let v = json(&["predict", "--data", data.to_str().unwrap(), "--model", model.to_str().unwrap()]);
    assert_eq!(v["data"]["scores"].as_array().unwrap().len(), 900);
    let acc = v["data"]["metrics"]["accuracy"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&acc));
}

#[test]
fn bench_on_synthetic_data() {
    let v = json(&["bench-lr", "--synthetic", "raisin", "--iterations", "1", "--batch-size", "30"]);
    assert_eq!(v["kind"], "bench-lr");
    assert!(v["data"]["accuracy_gap"].as_f64().unwrap() <= 0.01);
    assert_eq!(v["data"]["bench"]["train_rows"], 720);
}

fn spawn(args: &[String]) -> Child {
    dd2pc().args(args).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().unwrap()
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn four_processes_over_tcp() {
    let dir = tempfile::tempdir().unwrap();
    let (cs, client, alice) = (free_port(), free_port(), free_port());
    let session = "000000000000000000000000000000ab";
    let (ia, ib) = (dir.path().join("a.json"), dir.path().join("b.json"));
    std::fs::write(&ia, "[1.5, -2.0, 0.25]").unwrap();
    std::fs::write(&ib, "[2.0, 0.5, -4.0]").unwrap();

    let mut cs_proc = spawn(&strings(&["node", "--role", "cs", "--bind", &cs, "--sessions", "1", "--timeout-s", "20"]));
    let client_proc = spawn(&strings(&["node", "--role", "client", "--bind", &client, "--session", session, "--timeout-s", "20"]));
    thread::sleep(Duration::from_millis(300));
    let party = |role: &str, link: (&str, &str), input: &Path| {
        let mut args = strings(&["node", "--role", role, link.0, link.1, "--cs", &cs, "--client", &client, "--session", session]);
        args.extend(strings(&["--input", input.to_str().unwrap(), "--timeout-s", "20"]));
        spawn(&args)
    };
    let a = party("alice", ("--bind", &alice), &ia);
    thread::sleep(Duration::from_millis(200));
    let b = party("bob", ("--peer", &alice), &ib);

    for p in [a, b] {
        let out = p.wait_with_output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let out = client_proc.wait_with_output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let got: Vec<f64> = v["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(got.len(), 3);
    for (g, w) in got.iter().zip([3.0, -1.0, -1.0]) {
        assert!((g - w).abs() <= 1e-12, "{got:?}");
    }
    assert!(cs_proc.wait().unwrap().success());
}
