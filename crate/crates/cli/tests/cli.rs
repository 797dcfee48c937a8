use std::io::Write;
use std::process::Command;

fn hilbres(args: &[&str]) -> (i32, String, String) {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hilbres"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn analyze_a2_json() {
    let (code, stdout, _) = hilbres(&["analyze", "--k", "3", "--basis", "1,-1,0;0,1,-1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).expect("valid json");
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["group_order"], 6);
    assert_eq!(v["coxeter_components"][0]["type"], "A_2");
    assert_eq!(v["weyl_product"], true);
}

#[test]
fn analyze_table_output() {
    let (code, stdout, _) = hilbres(&[
        "analyze",
        "--k",
        "4",
        "--basis",
        "1,-1,0,0;0,0,1,-1",
        "--output",
        "table",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("normalizer order 8"));
    assert!(stdout.contains("B_2"));
}

#[test]
fn fixed_points_count() {
    let (code, stdout, _) = hilbres(&["fixed-points", "--k", "5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["count"], 7);
    assert_eq!(v["fixed_points"].as_array().unwrap().len(), 7);
}

#[test]
fn strata_poset_json() {
    let (code, stdout, _) = hilbres(&["strata", "--k", "4"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["count"], 5); // p(4)
    assert!(v["relation_count"].as_u64().unwrap() >= 5);
}

#[test]
fn genericity_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "0,-1;1,0").unwrap();
    let (code, stdout, _) = hilbres(&["genericity", "--j", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["endo_dim"], 2); // Q[J] ≅ Q(i) commutes in dim 2
    assert_eq!(v["generic"], false);
}

#[test]
fn kummer_strata() {
    let (code, stdout, _) = hilbres(&["kummer", "--n", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["points"], 4);
    let strata = v["strata"].as_array().unwrap();
    // Top stratum (sorted first): two free pairs, dim 4.
    assert_eq!(strata[0]["dim"], 4);
    assert_eq!(strata[0]["pairs"], 2);
}

#[test]
fn ginzburg_subcommand() {
    let (code, stdout, _) = hilbres(&["ginzburg", "--type", "A", "--rank", "3"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["group_order"], 24);
    assert_eq!(v["coxeter_components"][0]["type"], "A_3");
}

#[test]
fn request_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("req.json");
    std::fs::write(
        &path,
        r#"{ "k": 3, "basis": "1,-1,0;0,1,-1", "caps": { "full_search_k": 6 } }"#,
    )
    .unwrap();
    let (code, stdout, _) = hilbres(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["group_order"], 6);
}

#[test]
fn exit_code_contract() {
    // Domain error: k beyond the full-search cap, no search group.
    let basis: Vec<String> = (0..9)
        .map(|i| {
            let mut row = ["0"; 9];
            row[i] = "1";
            row.join(",")
        })
        .collect();
    let basis = basis.join(";");
    let (code, stdout, _) = hilbres(&["analyze", "--k", "9", "--basis", &basis]);
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("too large"));

    // Usage errors.
    let (code, _, _) = hilbres(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = hilbres(&["analyze", "--k", "3"]);
    assert_eq!(code, 2);
    let (code, _, stderr) = hilbres(&["analyze", "--k", "3", "--basis", "1,x,0"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("bad entry"));
}

#[test]
fn caps_env_override() {
    // Tighten the full-search cap so the k=3 request fails as a
    // domain error.
    let (code, stdout, _) = run_with_env(
        &["analyze", "--k", "3", "--basis", "1,-1,0;0,1,-1"],
        &[("HILBRES_CAPS", "full_search_k=2")],
    );
    assert_eq!(code, 1);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["error"].as_str().unwrap().contains("too large"));
    // Malformed override is a usage error.
    let (code, _, _) = run_with_env(
        &["analyze", "--k", "3", "--basis", "1,-1,0"],
        &[("HILBRES_CAPS", "nonsense")],
    );
    assert_eq!(code, 2);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["analyze", "--k", "4", "--basis", "1,-1,0,0;0,1,-1,0;0,0,1,-1"];
    let (c1, a, _) = hilbres(&args);
    let (c2, b, _) = hilbres(&args);
    assert_eq!(c1, 0);
    assert_eq!(c2, 0);
    assert_eq!(a, b);
}
