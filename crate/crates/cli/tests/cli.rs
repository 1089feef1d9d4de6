//! End-to-end runs of the binary: the exit-code contract, deterministic
//! generation, and each subcommand on the worked examples.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_convtop"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

struct Workdir(PathBuf);

impl Workdir {
    fn new(tag: &str) -> Workdir {
        let dir = std::env::temp_dir().join(format!("convtop-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Workdir(dir)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }

    fn write(&self, name: &str, content: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, content).unwrap();
        p
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn gen_to(dir: &Workdir, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.path(name);
    let mut full: Vec<&str> = vec!["gen"];
    full.extend_from_slice(args);
    let out_str = out.to_str().unwrap().to_string();
    full.push("--out");
    full.push(&out_str);
    let result = run(&full);
    assert_eq!(
        result.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&result.stderr)
    );
    out
}

const PAPER_PRECONVEX: &str = r#"{
  "kind": "preconvex",
  "ground": ["0", "1", "2"],
  "preconvex": [[], ["0"], ["1"], ["2"], ["0", "1", "2"]]
}"#;

const NO_LIFT_CODOMAIN: &str = r#"{
  "kind": "topconvex",
  "ground": ["0", "1"],
  "closed": [[], ["0", "1"]],
  "convex": [[], ["0"], ["0", "1"]]
}"#;

#[test]
fn gen_is_deterministic_and_valid() {
    let dir = Workdir::new("gen");
    let first = gen_to(&dir, "chain.json", &["chain", "--height", "3"]);
    let second = gen_to(&dir, "chain2.json", &["chain", "--height", "3"]);
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert_eq!(a, b, "regeneration must be byte-identical");

    let validate = run(&["validate", first.to_str().unwrap()]);
    assert_eq!(validate.status.code(), Some(0));

    let boolean = gen_to(&dir, "b4.json", &["boolean", "--atoms", "2"]);
    assert_eq!(
        run(&["validate", boolean.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn gen_sn_has_twenty_convex_sets() {
    let dir = Workdir::new("sn");
    let sn = gen_to(&dir, "s3.json", &["sn", "--n", "3"]);
    let text = std::fs::read_to_string(&sn).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["ground"].as_array().unwrap().len(), 6);
    assert_eq!(value["convex"].as_array().unwrap().len(), 20);
    assert_eq!(
        run(&["validate", sn.to_str().unwrap()]).status.code(),
        Some(0)
    );
}

#[test]
fn gen_derived_kinds() {
    let dir = Workdir::new("derived");
    let chain = gen_to(&dir, "chain.json", &["chain", "--height", "2"]);
    let ideal = gen_to(
        &dir,
        "ideal.json",
        &["lattice-ideal", "--input", chain.to_str().unwrap()],
    );
    let text = std::fs::read_to_string(&ideal).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    // Convex members of the two-chain ideal space: {}, {bottom}, everything.
    assert_eq!(value["convex"].as_array().unwrap().len(), 3);

    let subgroup = gen_to(&dir, "z4.json", &["subgroup", "--cyclic", "4"]);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&subgroup).unwrap()).unwrap();
    assert_eq!(value["convex"].as_array().unwrap().len(), 4);

    let metric = dir.write(
        "metric.json",
        r#"{
  "kind": "metric",
  "points": ["0", "1", "2"],
  "d": [["0", "1", "2"], ["1", "0", "1"], ["2", "1", "0"]]
}"#,
    );
    let betweenness = gen_to(
        &dir,
        "betweenness.json",
        &["metric-betweenness", "--input", metric.to_str().unwrap()],
    );
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&betweenness).unwrap()).unwrap();
    // Collinear triple: {0,2} is not convex, so 7 of 8 subsets remain.
    assert_eq!(value["convex"].as_array().unwrap().len(), 7);

    let measure = dir.write(
        "measure.json",
        r#"{
  "kind": "measure",
  "atoms": ["a", "b"],
  "mass": {"a": "1", "b": "2"}
}"#,
    );
    let metric_out = dir.path("measure-metric.json");
    let algebra = gen_to(
        &dir,
        "algebra.json",
        &[
            "measure-algebra",
            "--input",
            measure.to_str().unwrap(),
            "--metric-out",
            metric_out.to_str().unwrap(),
        ],
    );
    assert_eq!(
        run(&["validate", algebra.to_str().unwrap()]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["validate", metric_out.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn validate_exit_codes() {
    let dir = Workdir::new("validate");
    // Missing empty set: property failure, exit 1.
    let invalid = dir.write(
        "invalid.json",
        r#"{
  "kind": "preconvex",
  "ground": ["0", "1"],
  "preconvex": [["0"], ["0", "1"]]
}"#,
    );
    let output = run(&["validate", invalid.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).contains("empty set"));

    // Truncated file: malformed input, exit 2.
    let truncated = dir.write("broken.json", "{\"kind\": \"preconvex\", \"gro");
    assert_eq!(
        run(&["validate", truncated.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    // Missing file: exit 2.
    assert_eq!(
        run(&["validate", dir.path("nope.json").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_adjunction_on_paper_pair() {
    let dir = Workdir::new("adjunction");
    let x = dir.write("x.json", NO_LIFT_CODOMAIN);
    let p = dir.write("p.json", PAPER_PRECONVEX);
    let output = run(&[
        "check",
        "adjunction",
        x.to_str().unwrap(),
        p.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout(&output));
    assert!(stdout(&output).contains("PASS"));
}

#[test]
fn check_geometric_file_and_corpus() {
    let dir = Workdir::new("geometric");
    let p = dir.write("p.json", PAPER_PRECONVEX);
    assert_eq!(
        run(&["check", "geometric", p.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    // Sampled corpus sweep, seeded for determinism.
    let sweep = run(&["check", "geometric", "--samples", "25", "--seed", "7"]);
    assert_eq!(sweep.status.code(), Some(0), "{}", stdout(&sweep));
}

#[test]
fn check_failures_exit_one() {
    let dir = Workdir::new("fail");
    // Indiscrete topology with full power-set convexity is not teetotal.
    let x = dir.write(
        "x.json",
        r#"{
  "kind": "topconvex",
  "ground": ["0", "1"],
  "closed": [[], ["0", "1"]],
  "convex": [[], ["0"], ["1"], ["0", "1"]]
}"#,
    );
    let output = run(&["check", "teetotal", x.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stdout(&output).contains("FAIL"));
    assert!(stdout(&output).contains("witness"));
}

#[test]
fn check_usage_errors_exit_two() {
    let dir = Workdir::new("usage");
    let p = dir.write("p.json", PAPER_PRECONVEX);
    assert_eq!(
        run(&["check", "no-such-check", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // Wrong arity.
    assert_eq!(
        run(&["check", "adjunction", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // Wrong kind.
    assert_eq!(
        run(&["check", "idempotent", p.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_stone_and_psl_roundtrips() {
    let dir = Workdir::new("roundtrips");
    let sierpinski = dir.write(
        "sierpinski.json",
        r#"{
  "kind": "topconvex",
  "ground": ["0", "1"],
  "closed": [[], ["0"], ["0", "1"]],
  "convex": [[], ["0"], ["1"], ["0", "1"]]
}"#,
    );
    assert_eq!(
        run(&["check", "stone-roundtrip", sierpinski.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    let pointed = dir.write(
        "pointed.json",
        r#"{
  "kind": "pointed_lattice",
  "elements": ["bot", "mid", "top"],
  "leq": [["bot", "bot"], ["bot", "mid"], ["bot", "top"], ["mid", "mid"], ["mid", "top"], ["top", "top"]],
  "chosen": ["mid", "top"]
}"#,
    );
    assert_eq!(
        run(&["check", "stone-roundtrip", pointed.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["check", "psl-roundtrip", pointed.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    // Non-T0 space: precondition failure, exit 2.
    let indiscrete = dir.write(
        "indiscrete.json",
        r#"{
  "kind": "topconvex",
  "ground": ["0", "1"],
  "closed": [[], ["0", "1"]],
  "convex": [[], ["0", "1"]]
}"#,
    );
    assert_eq!(
        run(&["check", "stone-roundtrip", indiscrete.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_perm_classify() {
    let output = run(&["check", "perm-classify", "--n", "3", "--m", "2"]);
    assert_eq!(output.status.code(), Some(0), "{}", stdout(&output));
    assert!(stdout(&output).contains("6 found"));

    let auto = run(&["check", "perm-classify", "--n", "3", "--json"]);
    assert_eq!(auto.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&auto)).unwrap();
    assert_eq!(value["pass"], serde_json::Value::Bool(true));
}

#[test]
fn check_measure_metric() {
    let dir = Workdir::new("measure");
    let measure = dir.write(
        "measure.json",
        r#"{
  "kind": "measure",
  "atoms": ["a", "b", "c"],
  "mass": {"a": "1/2", "b": "1", "c": "7/3"}
}"#,
    );
    assert_eq!(
        run(&["check", "measure-metric", measure.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );

    // Zero mass: rejected as malformed input.
    let degenerate = dir.write(
        "degenerate.json",
        r#"{
  "kind": "measure",
  "atoms": ["a"],
  "mass": {"a": "0"}
}"#,
    );
    assert_eq!(
        run(&["check", "measure-metric", degenerate.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn homs_sierpinski() {
    let dir = Workdir::new("homs");
    let sierpinski = dir.write(
        "sierpinski.json",
        r#"{
  "kind": "topconvex",
  "ground": ["0", "1"],
  "closed": [[], ["0"], ["0", "1"]],
  "convex": [[], ["0"], ["1"], ["0", "1"]]
}"#,
    );
    let output = run(&[
        "homs",
        sierpinski.to_str().unwrap(),
        sierpinski.to_str().unwrap(),
        "--category",
        "tc",
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).starts_with("3 homomorphism(s)"));

    let json = run(&[
        "homs",
        sierpinski.to_str().unwrap(),
        sierpinski.to_str().unwrap(),
        "--category",
        "tc",
        "--json",
    ]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(value["count"], serde_json::json!(3));
}

#[test]
fn export_dot_outputs() {
    let dir = Workdir::new("dot");
    let b4 = gen_to(&dir, "b4.json", &["boolean", "--atoms", "2"]);
    let output = run(&["export-dot", b4.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let dot = stdout(&output);
    assert_eq!(dot.matches("label=").count(), 4);
    assert_eq!(dot.matches(" -> ").count(), 4);

    let chain = gen_to(&dir, "c3.json", &["chain", "--height", "3"]);
    let dot = stdout(&run(&["export-dot", chain.to_str().unwrap()]));
    assert_eq!(dot.matches(" -> ").count(), 2);

    // Closed-convex inclusion order of a space document.
    let ideal = gen_to(
        &dir,
        "ideal.json",
        &["lattice-ideal", "--input", chain.to_str().unwrap()],
    );
    let dot = stdout(&run(&["export-dot", ideal.to_str().unwrap()]));
    // Ideals of the 3-chain: {}, three principal downsets.
    assert_eq!(dot.matches("label=").count(), 4);

    // The permutation space on three letters: twenty closed convex sets.
    let s3 = gen_to(&dir, "s3.json", &["sn", "--n", "3"]);
    let dot = stdout(&run(&["export-dot", s3.to_str().unwrap()]));
    assert_eq!(dot.matches("label=").count(), 20);

    // Wrong kind: exit 2.
    let measure = dir.write(
        "measure.json",
        r#"{"kind": "measure", "atoms": ["a"], "mass": {"a": "1"}}"#,
    );
    assert_eq!(
        run(&["export-dot", measure.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
