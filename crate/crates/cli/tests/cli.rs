use std::io::Write;
use std::process::{Command, Stdio};

use enriq_cli::report::{EXIT_CAP, EXIT_DOMAIN, EXIT_MALFORMED, EXIT_OK};
use enriq_cli::run;
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

struct Run {
    code: i32,
    report: Value,
    digest: String,
}

fn enriq(args: &[&str]) -> Run {
    let argv = std::iter::once("enriq").chain(args.iter().copied());
    let out = run(argv);
    let full: Value = serde_json::from_str(&out.text).expect("reports are JSON");
    Run {
        code: out.code,
        report: full["report"].clone(),
        digest: out.digest,
    }
}

fn results(r: &Run) -> &Value {
    &r.report["results"]
}

const A2_PAIR: &str = "std:sum(twist(A2,-1),twist(A2,-1))";

#[test]
fn a2_roots_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("A2neg.json");
    std::fs::write(&path, r#"{"rank":2,"gram":[[-2,1],[1,-2]]}"#).unwrap();
    let r = enriq(&["lattice", "roots", "--in", path.to_str().unwrap(), "--norm", "-2"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(results(&r)["count"], 6);
    let vectors = results(&r)["vectors"].as_array().unwrap();
    assert_eq!(vectors.len(), 6);
    let parsed: Vec<Vec<i64>> = vectors.iter().map(|v| serde_json::from_value(v.clone()).unwrap()).collect();
    let mut canonical = parsed.clone();
    canonical.sort();
    assert_eq!(parsed, canonical);
}

#[test]
fn sigma_one_census() {
    let r = enriq(&["gen", "enumerate", "--p", "3", "--m", "2", "--gram", "1,0;0,1", "--filter", "characteristic"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(results(&r)["count"], 2);
    let r = enriq(&["gen", "enumerate", "--p", "3", "--m", "1", "--gram", "1,0;0,1"]);
    assert_eq!(results(&r)["count"], 0);
}

#[test]
fn identical_points_compare_equal() {
    let g = r#"json:{"p":3,"m":2,"dim":2,"gram":[[1,0],[0,1]],"basis":[[[1,0],[0,1]]]}"#;
    let r = enriq(&["period", "compare", "--in", A2_PAIR, "--vectors", "1,0,1,0", "--p", "3", "--g1", g, "--g2", g]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(results(&r)["same"], true);

    let dir = tempfile::tempdir().unwrap();
    let point = dir.path().join("point.json");
    std::fs::write(&point, serde_json::to_string(&results(&r)["a"]).unwrap()).unwrap();
    let p = point.to_str().unwrap();
    let r = enriq(&["period", "compare", "--a", p, "--b", p]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(results(&r)["same"], true);
}

#[test]
fn generatrices_in_one_orbit_share_a_period() {
    let g1 = r#"json:{"p":3,"m":2,"dim":2,"gram":[[1,0],[0,1]],"basis":[[[1,0],[0,1]]]}"#;
    let g2 = r#"json:{"p":3,"m":2,"dim":2,"gram":[[1,0],[0,1]],"basis":[[[1,0],[0,2]]]}"#;
    let r = enriq(&["period", "compare", "--in", A2_PAIR, "--vectors", "1,0,1,0", "--p", "3", "--g1", g1, "--g2", g2]);
    assert_eq!(results(&r)["same"], true);
    let r = enriq(&["period", "orbit", "--in", A2_PAIR, "--vectors", "1,0,1,0", "--p", "3"]);
    assert_eq!(results(&r)["orbit_count"], 1);
    assert_eq!(results(&r)["stabilizer_order"], 8);
}

#[test]
fn exit_codes() {
    assert_eq!(enriq(&["lattice", "invariants", "--in", "std:A2"]).code, EXIT_OK);
    // chain needs a strictly characteristic generatrix
    let not_characteristic = r#"json:{"p":3,"m":1,"dim":2,"gram":[[0,1],[1,0]],"basis":[[[1],[0]]]}"#;
    let r = enriq(&["gen", "chain", "--in", not_characteristic]);
    assert_eq!(r.code, EXIT_DOMAIN);
    assert_eq!(r.report["status"], "error");
    assert_eq!(r.report["error"]["kind"], "domain");

    let r = enriq(&["--cap-group", "10", "lattice", "autgroup", "--in", "std:twist(D4,-1)"]);
    assert_eq!(r.code, EXIT_CAP);
    assert_eq!(r.report["error"]["kind"], "cap");

    let r = enriq(&["oracle", "box-roots", "--in", "std:twist(E8,-1)", "--budget", "100"]);
    assert_eq!(r.code, EXIT_CAP);

    assert_eq!(enriq(&["frobnicate"]).code, EXIT_MALFORMED);
    assert_eq!(enriq(&["lattice", "roots", "--in", "json:[1,2"]).code, EXIT_MALFORMED);
    assert_eq!(enriq(&["lattice", "roots", "--in", "std:Q7"]).code, EXIT_MALFORMED);
    assert_eq!(enriq(&["form", "neutral", "--p", "4", "--gram", "1,0;0,1"]).code, EXIT_DOMAIN);
}

#[test]
fn help_is_not_an_error() {
    let out = run(["enriq", "--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.text.contains("lattice"));
}

#[test]
fn grassmannian_cap_is_reported() {
    let r = enriq(&["--cap-grassmannian", "10", "gen", "enumerate", "--p", "5", "--m", "2", "--gram", "1,0;0,2"]);
    assert_eq!(r.code, EXIT_CAP);
    assert_eq!(r.report["status"], "error");
}

#[test]
fn workspace_roundtrip_is_byte_identical() {
    let path = fixture("workspace.json");
    let r = enriq(&["workspace", "roundtrip", "--in", &path]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(results(&r)["identical"], true);

    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("saved.json");
    let r = enriq(&["workspace", "roundtrip", "--in", &path, "--save", saved.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&saved).unwrap());
}

#[test]
fn unsorted_workspace_is_canonicalized() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("saved.json");
    let r = enriq(&[
        "workspace",
        "roundtrip",
        "--in",
        &fixture("workspace_unsorted.json"),
        "--save",
        saved.to_str().unwrap(),
    ]);
    assert_eq!(results(&r)["identical"], false);
    let canonical = std::fs::read_to_string(fixture("workspace.json")).unwrap();
    assert_eq!(std::fs::read_to_string(&saved).unwrap(), canonical);
    assert_eq!(results(&r)["objects"], 5);
}

#[test]
fn bad_embedding_names_the_object() {
    let r = enriq(&["workspace", "roundtrip", "--in", &fixture("workspace_bad_embedding.json")]);
    assert_eq!(r.code, EXIT_MALFORMED);
    let message = r.report["error"]["message"].as_str().unwrap();
    assert!(message.contains("objects.gamma"), "{message}");
}

#[test]
fn workspace_objects_are_addressable() {
    let ws = fixture("workspace.json");
    let r = enriq(&["lattice", "roots", "--in", &format!("{ws}#N")]);
    assert_eq!(results(&r)["count"], 12);
    let r = enriq(&["ctx", "admissible", "--embedding", &format!("{ws}#gamma"), "--p", "3"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(results(&r)["admissible"], true);
    let r = enriq(&["gen", "check", "--in", &format!("{ws}#G")]);
    assert_eq!(results(&r)["strictly_characteristic"], true);
    let r = enriq(&["census", "--in", &format!("{ws}#pair")]);
    assert_eq!(results(&r)["connected"], 2);
    let r = enriq(&["lattice", "roots", "--in", &format!("{ws}#gamma")]);
    assert_eq!(r.code, EXIT_MALFORMED);
    let r = enriq(&["lattice", "roots", "--in", &format!("{ws}#missing")]);
    assert_eq!(r.code, EXIT_MALFORMED);
}

#[test]
fn oracle_examples_match() {
    let r = enriq(&["oracle", "box-roots", "--in", "std:twist(E8,-1)", "--compare"]);
    assert_eq!(results(&r)["oracle"]["count"], 240);
    assert_eq!(results(&r)["match"], true);

    let r = enriq(&["oracle", "iso-subspaces", "--p", "3", "--gram", "1,0;0,1", "--compare"]);
    assert_eq!(results(&r)["oracle"]["neutral"], false);
    assert_eq!(results(&r)["match"], true);

    let r = enriq(&["oracle", "gen-census", "--p", "5", "--gram", "1,0;0,2", "--m", "2", "--compare"]);
    assert_eq!(results(&r)["oracle"]["characteristic"], 2);
    assert_eq!(results(&r)["match"], true);

    let r = enriq(&["oracle", "group-expand", "--in", "std:twist(D4,-1)", "--compare"]);
    assert_eq!(results(&r)["oracle"]["order"], 1152);
    assert_eq!(results(&r)["match"], true);

    let r = enriq(&["oracle", "orbit-brute", "--in", A2_PAIR, "--vectors", "1,0,1,0", "--p", "3", "--compare"]);
    assert_eq!(results(&r)["match"], true);
}

#[test]
fn lattice_commands() {
    let r = enriq(&["lattice", "invariants", "--in", "std:twist(U,3)", "--p", "3"]);
    assert_eq!(results(&r)["determinant"], -9);
    assert_eq!(results(&r)["prime"]["artin"]["sigma"], 1);
    assert_eq!(results(&r)["signature"]["positive"], 1);

    let r = enriq(&["lattice", "glue", "--in", "std:twist(U,3)", "--p", "3", "--glue", "1,0"]);
    assert_eq!(results(&r)["overlattice"]["gram"], serde_json::json!([[0, 1], [1, 0]]));
    let r = enriq(&["lattice", "glue", "--in", "std:twist(U,3)", "--p", "3"]);
    assert_eq!(results(&r)["overlattice"]["gram"], serde_json::json!([[0, 3], [3, 0]]));
    // a non-isotropic glue vector
    let r = enriq(&["lattice", "glue", "--in", "std:twist(U,3)", "--p", "3", "--glue", "1,1"]);
    assert_eq!(r.code, EXIT_DOMAIN);

    let r = enriq(&["lattice", "saturate", "--in", "std:U", "--vectors", "2,2"]);
    assert_eq!(results(&r)["index"], 2);
    assert_eq!(results(&r)["primitive"], false);

    let r = enriq(&["lattice", "complement", "--gamma", &format!("{}#gamma", fixture("workspace.json"))]);
    assert_eq!(results(&r)["complement"]["rank"], 3);

    let r = enriq(&["ctx", "build", "--in", A2_PAIR, "--vectors", "1,0,1,0", "--p", "3"]);
    assert_eq!(results(&r)["stabilizer"]["order"], 8);
}

#[test]
fn involution_of_a_split_marking() {
    // the marking is a direct summand, so +1 ⊕ -1 is integral
    let r = enriq(&["ctx", "involution", "--in", A2_PAIR, "--vectors", "1,0,0,0;0,1,0,0", "--p", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.report);
    assert_eq!(
        results(&r)["involution"],
        serde_json::json!([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]])
    );
}

#[test]
fn serial_runs_have_the_same_digest() {
    let cases: [&[&str]; 3] = [
        &["lattice", "autgroup", "--in", "std:twist(D4,-1)"],
        &["gen", "enumerate", "--p", "5", "--m", "2", "--gram", "1,0;0,2"],
        &["period", "orbit", "--in", A2_PAIR, "--vectors", "1,0,1,0", "--p", "3"],
    ];
    for args in cases {
        let parallel = enriq(args);
        let mut serial_args = vec!["--serial"];
        serial_args.extend_from_slice(args);
        let serial = enriq(&serial_args);
        assert_eq!(parallel.digest, serial.digest, "{args:?}");
        assert_eq!(parallel.digest, enriq(args).digest);
    }
}

#[test]
fn binary_reads_stdin_and_sets_the_exit_code() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_enriq"))
        .args(["lattice", "roots", "--in", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"rank":2,"gram":[[-2,1],[1,-2]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["report"]["results"]["count"], 6);

    let out = Command::new(env!("CARGO_BIN_EXE_enriq")).args(["nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_MALFORMED));
}
