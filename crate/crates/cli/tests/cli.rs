use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_equitower"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    let out = run(args);
    out.status.code().expect("exit code")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("equitower-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn read_json(path: &PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn eval_gamma_collinear_l2() {
    let out = run(&[
        "eval",
        "(rel GAMMA a b c)",
        "--points",
        "0,0; 1,0; 3,0",
        "--norm",
        "l2",
        "--impl",
        "PSI=oracle",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "true");
}

#[test]
fn eval_b_discriminates_in_linf() {
    let pts = [
        "--points",
        "0,0; 2,1; 4,0",
        "--norm",
        "linf",
        "--mode",
        "repaired",
    ];
    let b = [&["eval", "(rel B a b c)"][..], &pts[..]].concat();
    assert_eq!(code(&b), 1);
    let g = [&["eval", "(rel GAMMA a b c)"][..], &pts[..]].concat();
    assert_eq!(code(&g), 0);
}

#[test]
fn eval_errors_exit_two() {
    assert_eq!(
        code(&["eval", "(rel NOPE a b c)", "--points", "0,0; 1,0; 2,0"]),
        2
    );
    assert_eq!(
        code(&["eval", "(rel GAMMA a b c)", "--points", "0,0; 1,0"]),
        2
    );
    assert_eq!(
        code(&[
            "eval",
            "(rel GAMMA a b c)",
            "--points",
            "0,0; 1,0; 1/2,0",
            "--norm",
            "lp:3"
        ]),
        2
    );
    assert_eq!(code(&["eval", "(and (= a b)", "--points", "0,0; 1,0"]), 2);
}

#[test]
fn eval_named_points_and_report() {
    let pts = scratch("named.json");
    std::fs::write(
        &pts,
        r#"[{"name":"c","x":4,"y":0},{"name":"a","x":0,"y":0},{"name":"b","x":"2","y":"0"}]"#,
    )
    .unwrap();
    let out = scratch("eval.json");
    let status = code(&[
        "eval",
        "(rel B a b c)",
        "--points",
        pts.to_str().unwrap(),
        "--explain",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status, 0);
    let r = read_json(&out);
    assert_eq!(r["value"], true);
    assert_eq!(r["bindings"][1][0], "b");
}

#[test]
fn verify_layer_gamma_passes() {
    let out = scratch("gamma.json");
    let status = code(&[
        "verify-layer",
        "--relation",
        "GAMMA",
        "--samples",
        "1000",
        "--norm",
        "l2",
        "--backend",
        "exact",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status, 0);
    let r = read_json(&out);
    assert_eq!(r["agreements"], 1000);
    assert_eq!(r["seed"], 3);
}

#[test]
fn verify_layer_strict_b_records_counterexample() {
    let out = scratch("strict.json");
    let status = code(&[
        "verify-layer",
        "--relation",
        "B",
        "--mode",
        "strict-paper",
        "--sampler",
        "midpoint-triples",
        "--samples",
        "40",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status, 1);
    let r = read_json(&out);
    let cx = r["counterexamples"].as_array().unwrap();
    assert!(!cx.is_empty());
    assert_eq!(cx[0]["formula"], false);
    assert_eq!(cx[0]["oracle"], true);
}

#[test]
fn verify_layer_rejects_phi() {
    assert_eq!(
        code(&["verify-layer", "--relation", "PHI:3", "--seed", "1"]),
        2
    );
    assert_eq!(code(&["verify-layer", "--relation", "GAMMA"]), 2);
}

#[test]
fn check_axioms_l1() {
    let out = scratch("axioms.json");
    let status = code(&[
        "check-axioms",
        "--norm",
        "l1",
        "--samples",
        "10000",
        "--witness-samples",
        "200",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status, 0);
    let r = read_json(&out);
    assert_eq!(r["reports"].as_array().unwrap().len(), 9);
    assert_eq!(r["pass"], true);
}

#[test]
fn vogt_config_file() {
    let cfg = scratch("similarities.cfg");
    std::fs::write(
        &cfg,
        r#"{
  "seed": 4,
  "quadruples": 500,
  "triples": 500,
  "spaces": [{"norm": "l2"}, {"norm": "linf"}],
  "suites": ["similarities"],
  "maps": [
    {"name": "shear", "expect": "violating", "map": {"kind": "linear", "m": [["1", "1"], ["0", "1"]]}},
    {"name": "two similarities", "expect": "preserving", "map": {"kind": "compose", "maps": [
      {"kind": "similarity", "isometry": {"type": "signed-permutation", "code": 5}, "scale": "3", "translation": ["1", "0"]},
      {"kind": "similarity", "isometry": {"type": "signed-permutation", "code": 2}, "scale": "1/2", "translation": ["0", "-7/3"]}
    ]}}
  ]
}"#,
    )
    .unwrap();
    let out = scratch("vogt.json");
    assert_eq!(
        code(&[
            "vogt",
            "--maps",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    let r = read_json(&out);
    assert_eq!(r["weak_vogt_consistent"], true);
    let entries = r["entries"].as_array().unwrap();
    let shear = entries
        .iter()
        .find(|e| e["report"]["name"] == "shear")
        .unwrap();
    assert_eq!(shear["report"]["classification"], "violating");
    assert!(shear["report"]["first_forward"].is_object());
}

#[test]
fn vogt_needs_seed_without_config() {
    assert_eq!(code(&["vogt", "--quadruples", "10", "--triples", "10"]), 2);
}

#[test]
fn closure_delta_writes_tagged_universe() {
    let pts = scratch("chain.pts");
    std::fs::write(&pts, "0,0\n1,0\n4,0\n").unwrap();
    let out = scratch("universe.json");
    let status = code(&[
        "closure",
        "--relation",
        "DELTA:4",
        "--points",
        pts.to_str().unwrap(),
        "--norm",
        "l1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status, 0);
    let r = read_json(&out);
    let tags: Vec<&str> = r["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["tag"].as_str().unwrap())
        .collect();
    assert_eq!(tags.iter().filter(|t| **t == "input").count(), 3);
    assert!(tags.contains(&"chain-closure"));

    let back = scratch("eval-universe.json");
    let status = code(&[
        "eval",
        "(rel DELTA 4 z0 x y)",
        "--points",
        "0,0; 1,0; 4,0",
        "--norm",
        "l1",
        "--universe",
        out.to_str().unwrap(),
        "--out",
        back.to_str().unwrap(),
    ]);
    assert_eq!(status, 0);
    assert_eq!(
        code(&[
            "eval",
            "(rel DELTA 4 z0 x y)",
            "--points",
            "0,0; 1,0; 4,0",
            "--universe",
            out.to_str().unwrap()
        ]),
        2
    );
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    let mut texts = Vec::new();
    for i in 0..2 {
        let out = scratch(&format!("det-{i}.json"));
        code(&[
            "verify-layer",
            "--relation",
            "PSI:3:2",
            "--samples",
            "200",
            "--norm",
            "linf",
            "--seed",
            "77",
            "--out",
            out.to_str().unwrap(),
        ]);
        texts.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
    let a = run(&[
        "check-axioms",
        "--axioms",
        "b,i",
        "--witness-samples",
        "50",
        "--seed",
        "5",
    ]);
    let b = run(&[
        "check-axioms",
        "--axioms",
        "b,i",
        "--witness-samples",
        "50",
        "--seed",
        "5",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn expand_and_version() {
    let out = run(&["expand", "--relation", "DELTA:2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("(DELTA:2 z0 x z2)"), "{text}");
    let v = run(&["version"]);
    assert!(String::from_utf8_lossy(&v.stdout).contains(env!("CARGO_PKG_VERSION")));
}
