use std::path::PathBuf;
use std::process::{Command, Output};

use raag::amalgam::ExtensionSpec;
use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn raag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_raag")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn check_coherent() {
    let out = raag(&["check-coherent", &data("p4.json")]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["chordal"], true);
    assert_eq!(v["peo"].as_array().unwrap().len(), 4);

    let out = raag(&["check-coherent", &data("c4.json")]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out), serde_json::json!({"chordal": false, "cycle": ["a", "b", "c", "d"]}));
}

#[test]
fn separate_certificate() {
    let out = raag(&["separate", &data("ext_f2.json"), "--element", "y s y^-1 s^-1", "--budget", "16"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["psi"], serde_json::json!([1]));
    assert_eq!(v["m"], 1);
    assert_eq!(v["image"], "y x y^-1 x^-1");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&raag(&["equals", &data("p4.json"), "--left", "a b", "--right", "b a"])), 0);
    assert_eq!(code(&raag(&["equals", &data("p4.json"), "--left", "a c", "--right", "c a"])), 1);
    assert_eq!(code(&raag(&["normalize", &data("p4.json"), "--word", "a q"])), 2);
    assert_eq!(code(&raag(&["normalize", &data("missing.json"), "--word", "a"])), 2);
    assert_eq!(code(&raag(&["centralizer", &data("c4.json"), "--word", "a"])), 2);
    assert_eq!(code(&raag(&["bp-scan", &data("p4.json"), "--tuple", "a,b"])), 2);
    assert_eq!(code(&raag(&["zt-eval", &data("ice_f2.json"), "--expr", "x^{t^3}"])), 3);
    let out = raag(&["bp-scan", &data("p4.json"), "--tuple", "a,d", "--budget", "10"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["collapse"], Value::Null);
}

#[test]
fn words_and_centralisers() {
    let v = json(&raag(&["normalize", &data("p4.json"), "--word", "c a b a^-1"]));
    assert_eq!(v["normal_form"], "b c");
    let v = json(&raag(&["root", &data("p4.json"), "--word", "a c a c"]));
    assert_eq!((v["root"].as_str().unwrap(), v["multiplicity"].as_u64().unwrap()), ("a c", 2));
    let v = json(&raag(&["blocks", &data("p4.json"), "--word", "b a c"]));
    assert_eq!(v["blocks"], serde_json::json!(["a c", "b"]));
    let v = json(&raag(&["centralizer", &data("figure1.json"), "--word", "d1 d2"]));
    let mut gens: Vec<String> = v["generators"].as_array().unwrap().iter().map(|g| g.as_str().unwrap().to_string()).collect();
    gens.sort();
    assert_eq!(gens, ["a", "c1", "c2", "d1", "d2"]);
    assert_eq!(v["zo"]["o"], serde_json::json!(["a", "c1", "c2"]));
    let v = json(&raag(&["representatives", &data("p4.json"), "--length-bound", "2"]));
    assert_eq!(v["w_k"], serde_json::json!(["a", "b", "c", "d", "b c"]));
}

#[test]
fn extension_round_trip() {
    let out = raag(&["reduce", &data("ext_p4.json"), "--element", "s1 a c s1^-1 b"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let spec: ExtensionSpec = serde_json::from_str(&std::fs::read_to_string(data("ext_p4.json")).unwrap()).unwrap();
    let g = spec.build().unwrap();
    assert_eq!(g.from_json(&v["element"]).unwrap(), g.parse("a c b").unwrap());
    let v = json(&raag(&["extend", &data("ext_p4.json")]));
    assert_eq!(v["a_rank"], 2);
    assert_eq!(v["c_basis"].as_array().unwrap().len(), 2);
}

#[test]
fn chains() {
    let v = json(&raag(&["zt-eval", &data("ice_f2.json"), "--expr", "x^{1+t} y", "--m", "1,2"]));
    assert_eq!(v["specialized"]["2"], "x^3 y");
    let out = raag(&["ice-build", &data("ice_p4.json")]);
    assert_eq!(code(&out), 0);
    let first = raag(&["axiom-check", &data("ice_p4.json"), "--samples", "30", "--seed", "7"]);
    let second = raag(&["axiom-check", &data("ice_p4.json"), "--samples", "30", "--seed", "7"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn towers() {
    for spec in ["tower_p4.json", "tower_figure1.json"] {
        let out = raag(&["tower-check", &data(spec), "--samples", "5"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["tree"], true);
        assert_eq!(code(&raag(&["tower-build", &data(spec)])), 0);
    }
    let out = raag(&["tower-tree", &data("tower_p4.json"), "--format", "dot"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("graph tree {"));
    let v = json(&raag(&["tower-tree", &data("tower_p4.json")]));
    assert_eq!(v["vertices"][1]["kind"], "abelian_times_surface");
}

#[test]
fn class_c() {
    let args = ["--samples", "100", "--length-bound", "4"];
    let out = raag(&[&["class-c-check", &data("p4.json")][..], &args].concat());
    assert_eq!(code(&out), 0);
    let out = raag(&[&["class-c-check", &data("f2.json"), "--empty-w"][..], &args].concat());
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert!(v["axioms"].as_array().unwrap().iter().any(|a| a["witness"].is_object()));
}
