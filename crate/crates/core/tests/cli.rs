use std::process::Command;

fn quadcover() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quadcover"));
    c.env_remove("QUADCOVER_OUT_DIR");
    c
}

fn json(out: &[u8]) -> serde_json::Value {
    serde_json::from_slice(out).expect("report is JSON")
}

#[test]
fn census_q4_report() {
    let out = quadcover().args(["census", "--n", "2", "--mode", "full"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out.stdout);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["details"]["census"]["counts"]["n3"], 16320);
    assert_eq!(v["details"]["census"]["counts"]["n4"], 20400);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true && c["source"].is_string()));
    assert!(v["timings"].is_object());
}

#[test]
fn reports_are_deterministic() {
    let run = || {
        let out = quadcover().args(["census", "--n", "3", "--mode", "sampled", "--samples", "200", "--seed", "9", "--max-size", "4"]).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let mut v = json(&out.stdout);
        v.as_object_mut().unwrap().remove("timings");
        v
    };
    assert_eq!(run(), run());
}

#[test]
fn out_file_env_dir_and_exports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("b.json");
    let lines = dir.path().join("lines.csv");
    let st = quadcover().args(["build", "--n", "1", "--out"]).arg(&report).arg("--export-lines").arg(&lines).status().unwrap();
    assert!(st.success());
    assert_eq!(json(&std::fs::read(&report).unwrap())["model"]["points_q"], 27);
    let csv = std::fs::read_to_string(&lines).unwrap();
    assert_eq!(csv.lines().count(), 1 + 45);

    let inc = dir.path().join("inc.csv");
    let st = quadcover().env("QUADCOVER_OUT_DIR", dir.path()).args(["verify", "covering", "--n", "2", "--export-incidence"]).arg(&inc).status().unwrap();
    assert!(st.success());
    assert!(dir.path().join("verify-covering.json").exists());
    // 120 ovoids of 17 points each
    assert_eq!(std::fs::read_to_string(&inc).unwrap().lines().count(), 1 + 120 * 17);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| quadcover().args(args).output().unwrap().status.code();
    assert_eq!(code(&["counts", "--n-max", "9"]), Some(0));
    assert_eq!(code(&["census", "--n", "2", "--mode", "bogus"]), Some(2));
    assert_eq!(code(&["build", "--n", "7"]), Some(2));
    assert_eq!(code(&["census", "--n", "3", "--max-size", "1"]), Some(0));
    assert_eq!(code(&["lift", "--n", "2", "--clique", "0"]), Some(2));
    assert_eq!(code(&["subgeometry", "--n", "3", "--random", "6", "--seed", "4"]), Some(0));
    assert_eq!(code(&["--threads", "1", "verify", "srg", "--n", "2"]), Some(0));
}
