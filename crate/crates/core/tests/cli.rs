use dyngeo::cli::run_cli;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["dyngeo"];
    full.extend_from_slice(args);
    let code = run_cli(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = format!("{}/schemas/{name}", env!("CARGO_MANIFEST_DIR"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&v).unwrap()
}

#[test]
fn distance_of_identical_trees_is_zero() {
    let x = fixture("two_pair_x.nwk");
    let (code, out, _) = run(&["distance", &x, &x]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("0.000000000000"));
}

#[test]
fn distance_of_single_crossing() {
    let (code, out, _) = run(&["distance", &fixture("cross_x.nwk"), &fixture("cross_t.nwk")]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("2.000000000000"));
    assert_eq!(lines.next(), Some("k = 1"));
}

#[test]
fn inline_newick_arguments() {
    let (code, out, _) = run(&["distance", "((1:1,2:1):1,3:1,0:1);", "((2:1,3:1):1,1:1,0:1);"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("2.000000000000"));
}

#[test]
fn distance_json_matches_schema() {
    let (code, out, _) = run(&["distance", &fixture("two_pair_x.nwk"), &fixture("two_pair_t.nwk"), "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(schema("geodesic.v1.schema.json").is_valid(&v));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 2);
}

#[test]
fn network_dump_lists_flows() {
    let (code, out, _) = run(&["distance", &fixture("cross_x.nwk"), &fixture("cross_t.nwk"), "--dump-networks"]);
    assert_eq!(code, 0);
    let last: serde_json::Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(last["network"]["value"], 1.0);
}

#[test]
fn exclude_leaves_drops_pendant_terms() {
    let (_, out, _) = run(&["distance", "((1:1,2:1):1,3:1,0:1);", "((2:1,3:1):1,1:5,0:1);", "--exclude-leaves"]);
    assert!(out.starts_with("2.000000000000"));
}

#[test]
fn eval_endpoints_and_cone_point() {
    let (x, t) = (fixture("cross_x.nwk"), fixture("cross_t.nwk"));
    assert_eq!(run(&["eval", &x, &t, "--lambda", "0"]).1.trim(), "((1:1,2:1):1,3:1)0:1;");
    assert_eq!(run(&["eval", &x, &t, "--lambda", "1"]).1.trim(), "(1:1,(2:1,3:1):1)0:1;");
    assert_eq!(run(&["eval", &x, &t, "--lambda", "0.5"]).1.trim(), "(1:1,2:1,3:1)0:1;");
    let (code, _, err) = run(&["eval", &x, &t, "--lambda", "1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("outside [0, 1]"));
    assert_eq!(run(&["eval", &x, &t, "--lambda", "-0.5"]).0, 2);
}

#[test]
fn sweep_static_segment() {
    let x = fixture("one_split_x0.nwk");
    let (code, out, _) = run(&["sweep", &x, &x, &fixture("one_split_t.nwk"), "--samples", "4"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "0 events");
    let dists: Vec<&str> = lines[2..].iter().map(|l| l.split(' ').nth(1).unwrap()).collect();
    assert_eq!(dists.len(), 4);
    assert!(dists.iter().all(|d| *d == dists[0]));
}

#[test]
fn sweep_one_split_example() {
    let args = [fixture("one_split_x0.nwk"), fixture("one_split_x1.nwk"), fixture("one_split_t.nwk")];
    let (code, out, _) = run(&["sweep", &args[0], &args[1], &args[2], "--samples", "0"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "1 event");
    assert!(lines[1].contains("kind = P3Split"));
    assert!(lines[1].contains("lambda = 0.200000000000"));

    let (code, out, _) = run(&["sweep", &args[0], &args[1], &args[2], "--json", "--samples", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(schema("sweep.v1.schema.json").is_valid(&v));
    assert_eq!(v["events"][0]["kind"], "P3");
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);
}

#[test]
fn sweep_rejects_topology_change() {
    let (code, _, err) = run(&[
        "sweep",
        &fixture("two_pair_x.nwk"),
        &fixture("two_pair_t.nwk"),
        &fixture("two_pair_t.nwk"),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("segment must stay in one orthant"));
}

#[test]
fn sweep_tolerance_flags() {
    let args = [fixture("one_split_x0.nwk"), fixture("one_split_x1.nwk"), fixture("one_split_t.nwk")];
    let (code, out, _) = run(&["sweep", &args[0], &args[1], &args[2], "--residual-tol", "1e-9", "--event-tol", "1e-8"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("1 event"));
    assert_eq!(run(&["sweep", &args[0], &args[1], &args[2], "--ratio-tol", "0"]).0, 2);
    let (code, _, err) = run(&["sweep", &args[0], &args[1], &args[2], "--max-events", "0"]);
    assert_eq!(code, 1);
    assert!(err.contains("event cap"));
}

#[test]
fn validate_pass_and_failures() {
    let (x, t) = (fixture("two_pair_x.nwk"), fixture("two_pair_t.nwk"));
    let dir = std::env::temp_dir().join(format!("dyngeo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, json, _) = run(&["distance", &x, &t, "--json"]);
    let good = dir.join("good.json");
    std::fs::write(&good, &json).unwrap();
    let (code, out, _) = run(&["validate", &x, &t, "--certificate", good.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "PASS"));

    let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
    v["pairs"].as_array_mut().unwrap().swap(0, 1);
    let swapped = dir.join("swapped.json");
    std::fs::write(&swapped, v.to_string()).unwrap();
    let (code, out, _) = run(&["validate", &x, &t, "--certificate", swapped.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("FAIL(P2)"));

    let pairs = v["pairs"].as_array().unwrap().clone();
    let mut merged = pairs[0].clone();
    for side in ["a", "b"] {
        let extra = pairs[1][side].as_array().unwrap().clone();
        merged[side].as_array_mut().unwrap().extend(extra);
    }
    v["pairs"] = serde_json::json!([merged]);
    let merged_path = dir.join("merged.json");
    std::fs::write(&merged_path, v.to_string()).unwrap();
    let (code, out, _) = run(&["validate", &x, &t, "--certificate", merged_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("FAIL(P3): pair 0 splits into ([{4,5}], [{5,6}]) ([{1,2}], [{2,3}])") || out.starts_with("FAIL(P3)"));

    let junk = dir.join("junk.json");
    std::fs::write(&junk, "{\"version\": 1}").unwrap();
    assert_eq!(run(&["validate", &x, &t, "--certificate", junk.to_str().unwrap()]).0, 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["distance", "missing.nwk", "other.nwk"]).0, 2);
    assert_eq!(run(&["distance", "((1:1,2:1):1,3:1,0:1);", "((1:1,2:1):1,3:1,4:1,0:1);"]).0, 2);
    assert_eq!(run(&["distance", "((1:1,2:1):1,3:1,0:1", "((1:1,2:1):1,3:1,0:1);"]).0, 2);
    assert_eq!(run(&["nonsense"]).0, 2);
    assert_eq!(run(&["bench", "--leaves", "3"]).0, 2);
}

#[test]
fn help_goes_to_stdout() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("distance") && out.contains("sweep") && out.contains("bench"));
}

#[test]
fn bench_is_deterministic_without_timing() {
    let args = ["bench", "--leaves", "8", "--trials", "3", "--seed", "9", "--no-timing"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(a, run(&args).1);
    assert_eq!(a.lines().count(), 5);

    let (code, out, _) = run(&["bench", "--trials", "0", "--no-timing"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
}
