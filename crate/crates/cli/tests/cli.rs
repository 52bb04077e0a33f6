use std::fs;
use std::path::PathBuf;

use serde_json::Value;
use seqalloc::{Instance, Policy};
use seqalloc_cli::{run, CommandResult};

const REMARK1: &str = r#"{"agents": 2, "items": ["a", "b", "c", "d"], "utilities": [[5, 4, 2, 0], [8, 2, 1, 0]]}"#;

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("seqalloc-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_instance(name: &str, text: &str) -> String {
    let path = scratch_dir(name).join("instance.json");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn call(args: &[&str]) -> CommandResult {
    run(std::iter::once("seqalloc").chain(args.iter().copied()))
}

fn doc(r: &CommandResult) -> Value {
    serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}\n{}", r.stdout, r.stderr))
}

#[test]
fn simulate_remark1() {
    let file = write_instance("simulate", REMARK1);
    let r = call(&["simulate", "-i", &file, "-p", "1,2,2,1"]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let d = doc(&r);
    assert_eq!(d["allocation"], serde_json::json!({"a": 1, "b": 2, "c": 2, "d": 1}));
    assert_eq!(d["welfare"]["per_agent"], serde_json::json!([5, 3]));
    assert_eq!(d["welfare"]["utilitarian"], 8);
    assert_eq!(d["welfare"]["egalitarian"], 3);

    let compact = call(&["simulate", "-i", &file, "-p", "1221"]);
    assert_eq!(doc(&compact)["allocation"], d["allocation"]);
}

#[test]
fn decide_necessary_counterexample() {
    let file = write_instance("decide", REMARK1);
    let r = call(&[
        "decide", "-i", &file, "--class", "all", "--objective", "egalitarian", "--mode", "necessary", "-t", "1",
    ]);
    assert_eq!(r.exit_code, 1);
    let d = doc(&r);
    assert_eq!(d["answer"], false);
    assert_eq!(d["witness"], "1,1,1,1");
}

#[test]
fn solve_balanced_utilitarian() {
    let file = write_instance("solve", REMARK1);
    let r = call(&["solve", "-i", &file, "--class", "balanced", "--objective", "utilitarian", "--direction", "max"]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let d = doc(&r);
    assert_eq!(d["value"], 14);
    assert_eq!(d["policy"], "2,1,1,2");
    assert_eq!(d["method"], "PolynomialExact");
}

/// Every reported witness re-simulates to the reported numbers.
#[test]
fn reported_witnesses_replay() {
    let file = write_instance("replay", REMARK1);
    let inst = Instance::from_json(REMARK1).unwrap();
    for class in ["all", "balanced", "rb", "ba"] {
        for objective in ["utilitarian", "egalitarian"] {
            for direction in ["max", "min"] {
                let r = call(&["solve", "-i", &file, "--class", class, "--objective", objective, "--direction", direction]);
                assert_eq!(r.exit_code, 0, "{}", r.stderr);
                let d = doc(&r);
                let policy = Policy::parse(d["policy"].as_str().unwrap(), 2).unwrap();
                let w = inst.welfare(&seqalloc::simulate(&inst, &policy).unwrap());
                let value = if objective == "utilitarian" { w.utilitarian } else { w.egalitarian };
                assert_eq!(d["value"], value, "{class} {objective} {direction}");
            }
        }
    }
}

#[test]
fn decide_pads_and_witness_audits_with_simulate() {
    let file = write_instance("pad", r#"{"agents": 2, "items": ["x", "y", "z"], "utilities": [[3, 2, 1], [1, 3, 2]]}"#);
    let r = call(&["decide", "-i", &file, "--class", "rb", "--objective", "egalitarian", "--mode", "possible", "-t", "3"]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let witness = doc(&r)["witness"].as_str().unwrap().to_string();
    assert_eq!(witness.split(',').count(), 4);
    let sim = call(&["simulate", "-i", &file, "-p", &witness]);
    assert_eq!(sim.exit_code, 0, "{}", sim.stderr);
    assert!(doc(&sim)["welfare"]["egalitarian"].as_u64().unwrap() >= 3);
}

#[test]
fn exit_codes() {
    let file = write_instance("codes", REMARK1);
    assert_eq!(call(&["frobnicate"]).exit_code, 2);
    assert_eq!(call(&["simulate", "-i", &file, "-p", "1,2", "--bogus"]).exit_code, 2);
    assert_eq!(call(&["simulate", "-i", &file, "-p", "1,2"]).exit_code, 2);
    assert_eq!(call(&["simulate", "-i", "/nonexistent/instance.json", "-p", "1"]).exit_code, 2);

    let bad = write_instance("codes-bad", r#"{"agents": 2, "items": ["a"], "utilities": [[1], [-1]]}"#);
    let r = call(&["simulate", "-i", &bad, "-p", "1"]);
    assert_eq!(r.exit_code, 2);
    assert!(r.stderr.contains("negative"), "{}", r.stderr);

    let exact = call(&[
        "solve", "-i", &file, "--class", "all", "--objective", "egalitarian", "--direction", "max", "--exact-only",
    ]);
    assert_eq!(exact.exit_code, 3);
    let guarded = call(&[
        "decide", "-i", &file, "--class", "all", "--objective", "egalitarian", "--mode", "possible", "-t", "5",
        "--guard", "3",
    ]);
    assert_eq!(guarded.exit_code, 3);
    assert_eq!(call(&["--help"]).exit_code, 0);
}

#[test]
fn outputs_are_deterministic() {
    let file = write_instance("determinism", REMARK1);
    let args = ["sample", "-i", &file, "--objective", "egalitarian", "-t", "5", "--samples", "10000", "--seed", "42"];
    let first = call(&args);
    assert_eq!(first.exit_code, 0);
    assert_eq!(first, call(&args));
    let est = doc(&first)["estimate"].as_f64().unwrap();
    assert!((est - 0.5).abs() < 4.0 * 0.005);

    let jobs = |j: &str| {
        call(&[
            "solve", "-i", &file, "--class", "all", "--objective", "egalitarian", "--direction", "max", "--jobs", j,
        ])
        .stdout
    };
    assert_eq!(jobs("1"), jobs("4"));
}

#[test]
fn distribution_and_enumerate() {
    let file = write_instance("distribution", REMARK1);
    let d = doc(&call(&["distribution", "-i", &file, "--objective", "egalitarian", "-t", "5"]));
    assert_eq!(d["entries"], serde_json::json!({"3": 1, "6": 1}));
    assert_eq!(d["prob_at_least"], 0.5);

    let e = doc(&call(&["enumerate", "-i", &file, "--class", "all", "--limit", "3"]));
    assert_eq!(e["total"], "16");
    assert_eq!(e["listed"], 3);
    assert_eq!(e["policies"][0]["policy"], "1,1,1,1");
}

#[test]
fn generate_and_verify_round_trip() {
    let prefix = scratch_dir("gadget").join("part");
    let prefix_text = prefix.display().to_string();
    let r = call(&["generate", "partition", "--a", "1,1,2", "-o", &prefix_text]);
    assert_eq!(r.exit_code, 0, "{}", r.stderr);
    let d = doc(&r);
    let gadget = d["gadget_file"].as_str().unwrap().to_string();
    let instance = d["instance_file"].as_str().unwrap().to_string();

    let yes = call(&["verify", "-g", &gadget, "-w", "1,2,1,2,2,1"]);
    assert_eq!(yes.exit_code, 0);
    assert_eq!(doc(&yes)["valid"], true);
    let no = call(&["verify", "-g", &gadget, "-w", r#"{"indices": []}"#]);
    assert_eq!(no.exit_code, 1);
    let mismatch = call(&["verify", "-g", &gadget, "-w", r#"{"sigma": [1], "pi": [1]}"#]);
    assert_eq!(mismatch.exit_code, 2);

    let decided = call(&[
        "decide", "-i", &instance, "--class", "rb", "--objective", "egalitarian", "--mode", "possible", "-t", "7",
    ]);
    assert_eq!(decided.exit_code, 0);
    let witness = doc(&decided)["witness"].as_str().unwrap().to_string();
    assert_eq!(call(&["verify", "-g", &gadget, "-w", &witness]).exit_code, 0);

    let three = doc(&call(&["generate", "3dm", "--x", "1,2", "--y", "2,1", "--z", "1,1", "-t", "4"]));
    assert_eq!(three["instance"]["utilities"], serde_json::json!([[6, 5, 1, 1], [7, 6, 1, 1]]));
    assert_eq!(three["gadget"]["query"]["threshold"], 7);
    assert_eq!(call(&["generate", "3dm", "--x", "1,2", "--y", "2,1", "--z", "1,1", "-t", "5"]).exit_code, 2);

    let topk = doc(&call(&[
        "generate", "topk", "--profile", "1,2,3,4;2,1,4,3", "-k", "2", "--mode", "possible-egal", "--class", "rb",
    ]));
    assert_eq!(topk["instance"]["utilities"], serde_json::json!([[4, 4, 0, 0], [8, 8, 8, 8]]));
    assert_eq!(call(&["generate", "equipartition", "--a", "1,2"]).exit_code, 2);
}
