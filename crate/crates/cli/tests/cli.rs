use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn valdef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valdef"))
        .args(args)
        .env_remove("VALDEF_CATALOG")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{}/../core/data/towers/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("valdef-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn example_two_is_parameter_free_rank_one() {
    let o = valdef(&["analyze", &fixture("example_two"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["verdict"]["level"], "EmptysetDefinable");
    assert_eq!(r["verdict"]["route"], "HongRank1");
    assert_eq!(r["valuations"]["Ok"].as_array().unwrap().len(), 2);
}

#[test]
fn fj_is_not_definable() {
    let o = valdef(&["analyze", &fixture("fj_q"), "--cor00", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["verdict"]["level"], "NotDefinable");
    assert_eq!(r["verdict"]["route"], "EquicharZeroNegative");
    assert!(r.get("thm_a").is_none());
}

#[test]
fn input_errors_exit_3() {
    let o = valdef(&["analyze", r#"{"base": "NoSuchField"}"#]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("NoSuchField"));

    let dir = scratch("malformed");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"base\": \"R\",\n  \"extensions\": [[\"W\"]]\n}\n").unwrap();
    let o = valdef(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");

    assert_eq!(valdef(&["analyze", "/no/such/tower.json"]).status.code(), Some(3));
    assert_eq!(valdef(&["analyze", &fixture("pz_q"), "--primes", "4"]).status.code(), Some(3));
}

#[test]
fn unknown_flags_exit_2() {
    let o = valdef(&["analyze", r#"{"base": {"name": "K", "characteristic": 0}, "extensions": [["Z"]]}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("Inconclusive"));
}

#[test]
fn human_and_json_carry_the_same_verdict() {
    for name in ["example_two", "pz_q", "fj_q", "pz_l"] {
        let h = stdout(&valdef(&["analyze", &fixture(name)]));
        let j = json(&valdef(&["analyze", &fixture(name), "--format", "json"]));
        let level = j["verdict"]["level"].to_string();
        let level = level.trim_matches('"');
        let headline = h.lines().find(|l| l.starts_with("verdict")).unwrap();
        let shown = match &j["verdict"]["level"] {
            Value::Object(m) => format!("ParamDefinable({})", m["ParamDefinable"]["max_params"]),
            _ => level.to_string(),
        };
        assert!(headline.contains(&shown), "{name}: {headline} vs {shown}");
        if let Some(route) = j["verdict"]["route"].as_str() {
            assert!(headline.contains(route), "{name}: {headline}");
        }
    }
}

#[test]
fn batch_output_keeps_input_order_and_writes_only_the_output_file() {
    let dir = scratch("batch");
    let out = dir.join("report.json");
    let towers = [fixture("fj_q"), fixture("example_two"), fixture("pz_q")];
    let mut args = vec!["analyze", "--format", "json", "-o", out.to_str().unwrap()];
    args.extend(towers.iter().map(String::as_str));
    let o = valdef(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let towers: Vec<&str> = r.as_array().unwrap().iter().map(|x| x["tower"].as_str().unwrap()).collect();
    assert_eq!(towers, ["FJ((Q))", "R((Q))((Z))", "PZ((Q))"]);
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
}

#[test]
fn structural_prime_mode() {
    let t = r#"{"base": "R", "extensions": [["Q", {"ZInv": 3}]]}"#;
    let r = json(&valdef(&["analyze", t, "--all-primes-structural", "--group", "--format", "json"]));
    assert_eq!(r["primes"], serde_json::json!([2, 3]));
    assert_eq!(r["group"]["per_prime"][1]["p_divisible"], true);
    assert_eq!(r["group"]["per_prime"][0]["p_divisible"], false);
}

#[test]
fn group_predicates() {
    let o = valdef(&["group", r#"[{"BiInfinite":"Z"}]"#, "antiregular", "2", "--format", "json"]);
    assert_eq!(json(&o)["structural"], true);
    let r = json(&valdef(&["group", r#"["Z","Q"]"#, "p-regular", "2", "--format", "json"]));
    assert_eq!(r["structural"], false);
    assert!(r["oracle"]["counterexample"].is_array());
    assert_eq!(json(&valdef(&["group", r#"["Q"]"#, "divisible", "--format", "json"]))["structural"], true);
    let r = json(&valdef(&["group", r#"["Z","Q"]"#, "convex-subgroups", "--format", "json"]));
    assert_eq!(r["structural"].as_array().unwrap().len(), 3);
    assert_eq!(r["oracle"], 3);
    let r = json(&valdef(&[
        "group",
        r#"["Z","Q","Q"]"#,
        "equiv",
        "--other",
        r#"["Z","Q"]"#,
        "--format",
        "json",
    ]));
    assert_eq!(r["structural"], "equivalent");
    assert_eq!(valdef(&["group", "[\"W\"]", "divisible"]).status.code(), Some(3));
    assert_eq!(valdef(&["group", "[\"Z\"]", "p-regular"]).status.code(), Some(3));
}

#[test]
fn formulas_print_and_evaluate() {
    let o = valdef(&["formula", "p-antiregular", "--prime", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with('('));
    let r = json(&valdef(&[
        "formula",
        "delta-gamma",
        "--prime",
        "2",
        "--eval",
        r#"["Z","Z"]"#,
        "--assign",
        r#"g=[{"seg":1,"offset":0,"value":"1"}]"#,
        "--assign",
        r#"d=[{"seg":0,"offset":0,"value":"1"}]"#,
        "--format",
        "json",
    ]));
    assert_eq!(r["free"], serde_json::json!(["g", "d"]));
    assert_eq!(r["evaluation"]["outcome"], "false");

    let dir = scratch("formula");
    let f = dir.join("phi.sexpr");
    let printed = stdout(&valdef(&["formula", "p-regular", "--prime", "2"]));
    std::fs::write(&f, printed.lines().next().unwrap()).unwrap();
    let o = valdef(&["formula", "file", "--file", f.to_str().unwrap(), "--eval", r#"["Z"]"#]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("value: undecided (in box: true)"));
}

#[test]
fn oracle_summary() {
    let r = json(&valdef(&["oracle", "--cases", "25", "--seed", "9", "--format", "json"]));
    assert_eq!(r["cases"], 25);
    assert_eq!(r["agreements"], 25);
    assert_eq!(r["disagreements"].as_array().unwrap().len(), 0);
}

#[test]
fn verify_example_two() {
    let o = valdef(&["verify-paper", "--suite", "example_two", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["checks"], 4);
    assert_eq!(r["passed"], true);
}

#[test]
fn corrupted_fixture_fails_with_diff() {
    let dir = scratch("fixtures");
    std::fs::write(dir.join("fj_q.json"), r#"{ "base": "R", "extensions": [["Q"]] }"#).unwrap();
    let o = valdef(&["verify-paper", "--suite", "fj_q", "--fixtures", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL") && out.contains("- expected: NotDefinable via EquicharZeroNegative"), "{out}");
    assert!(out.contains("+ actual:"));
}

#[test]
fn catalog_from_environment() {
    let dir = scratch("catalog");
    let cat = dir.join("extra.json");
    std::fs::write(
        &cat,
        r#"[{"name": "Kx", "characteristic": 0, "separably_closed": false, "real_closed": false, "henselian": false, "t_henselian": false}]"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_valdef"))
        .args(["catalog", "list", "--format", "json"])
        .env("VALDEF_CATALOG", &cat)
        .output()
        .unwrap();
    let names = json(&o);
    assert!(names.as_array().unwrap().iter().any(|n| n == "Kx"));
    assert!(names.as_array().unwrap().iter().any(|n| n == "R"));

    let o = valdef(&["catalog", "show", "PZ"]);
    assert_eq!(json(&o)["name"], "PZ");
    assert_eq!(valdef(&["catalog", "show", "Kx"]).status.code(), Some(3));
    std::fs::write(&cat, "[{").unwrap();
    assert_eq!(valdef(&["--catalog", cat.to_str().unwrap(), "catalog", "list"]).status.code(), Some(3));
}
