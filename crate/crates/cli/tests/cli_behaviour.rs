use std::path::{Path, PathBuf};

use gateaux_cli::{run, Outcome};
use serde_json::Value;

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let p = std::env::temp_dir().join(format!("gateaux-{name}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        Scratch(p)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p.display().to_string()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

fn fixture(stem: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(format!("{stem}.json"))
        .display()
        .to_string()
}

fn call(args: &[&str]) -> (Outcome, Value) {
    let mut argv = vec!["gateaux"];
    argv.extend_from_slice(args);
    let out = run(argv);
    let doc = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out, doc)
}

fn diag_problem(a: &[f64], b: &[f64], extra: &str) -> String {
    let m = |d: &[f64]| {
        let n = d.len();
        let data: Vec<String> = (0..n * n)
            .map(|i| {
                let v = if i / n == i % n { d[i / n] } else { 0.0 };
                format!("[{v}, 0]")
            })
            .collect();
        format!("{{\"rows\": {n}, \"cols\": {n}, \"data\": [{}]}}", data.join(", "))
    };
    format!("{{\"kind\": \"matrix\", \"A\": {}, \"B\": {}{extra}}}", m(a), m(b))
}

fn result(doc: &Value) -> f64 {
    doc["result"].as_f64().unwrap()
}

#[test]
fn scalar_matrix_commands() {
    let s = Scratch::new("scalar");
    let p = s.write("p.json", &diag_problem(&[2.0, 1.0], &[1.0, 0.0], ", \"phi\": 3.141592653589793, \"eps\": 1.5"));
    let (o, d) = call(&["norm", &p]);
    assert_eq!(o.code, 0);
    assert!((result(&d) - 2.0).abs() < 1e-12);

    let (_, d) = call(&["dphi", &p]);
    assert!((result(&d) + 1.0).abs() < 1e-12);

    let (_, d) = call(&["dmin", &p, "--check"]);
    assert!((result(&d) + 1.0).abs() < 1e-9);
    assert_eq!(d["oracle"]["agrees"], true);

    let (_, d) = call(&["dtwo", &p]);
    assert!((result(&d) - 1.0).abs() < 1e-12);

    // the window of width 1.5 also admits the second singular value
    let (_, d) = call(&["dcutoff", &p, "--check"]);
    assert!((result(&d) - 1.0).abs() < 1e-12);
    assert_eq!(d["oracle"]["agrees"], true);
}

#[test]
fn two_sided_derivative_is_null_at_a_kink() {
    let s = Scratch::new("kink");
    let p = s.write("p.json", &diag_problem(&[1.0, 1.0], &[1.0, -1.0], ""));
    let (o, d) = call(&["dtwo", &p, "--check"]);
    assert_eq!(o.code, 0);
    assert!(d["result"].is_null());
    assert_eq!(d["certificate"]["left"].as_f64().unwrap(), -1.0);
    assert_eq!(d["certificate"]["right"].as_f64().unwrap(), 1.0);
    assert_eq!(d["oracle"]["agrees"], true);
}

#[test]
fn smooth_matrix_exits_zero_with_witness() {
    let s = Scratch::new("smooth");
    let p = s.write("p.json", &diag_problem(&[3.0, 1.0], &[0.0, 0.0], ""));
    let (o, d) = call(&["smooth", &p, "--check"]);
    assert_eq!(o.code, 0);
    assert_eq!(d["result"], true);
    assert_eq!(d["certificate"]["kind"], "smooth_witness");
    assert_eq!(d["oracle"]["agrees"], true);
}

#[test]
fn function_commands() {
    let s = Scratch::new("function");
    let p = s.write(
        "f.json",
        r#"{"kind": "function", "f": {"values": [[2, 0], [1, 0], [-2, 0]]}, "g": {"values": [[1, 0], [5, 0], [1, 0]]}}"#,
    );
    let (_, d) = call(&["fn-norm", &p]);
    assert_eq!(result(&d), 2.0);
    assert_eq!(d["certificate"]["indices"], serde_json::json!([0, 2]));
    let (_, d) = call(&["fn-dplus", &p, "--check"]);
    assert_eq!(result(&d), 1.0);
    assert_eq!(d["oracle"]["agrees"], true);
}

#[test]
fn malformed_json_reports_position() {
    let s = Scratch::new("malformed");
    let p = s.write("p.json", "{\"kind\": \"matrix\",\n \"A\": {\"rows\": 1, \"cols\": 1, \"data\": [[1, 0]]\n");
    let (o, d) = call(&["norm", &p]);
    assert_eq!(o.code, 2);
    let msg = d["error"]["message"].as_str().unwrap();
    assert!(msg.contains("line 3"), "{msg}");
    assert!(o.stderr.contains("line 3"));
}

#[test]
fn input_errors_name_the_field() {
    let s = Scratch::new("fields");
    let cases = [
        (r#"{"kind": "matrix"}"#, "norm", "`A`"),
        (
            r#"{"kind": "matrix", "A": {"rows": 2, "cols": 2, "data": [[1, 0]]}}"#,
            "norm",
            "`A`",
        ),
        (
            r#"{"kind": "matrix", "A": {"rows": 1, "cols": 1, "data": [[1, 0]]}, "B": {"rows": 2, "cols": 1, "data": [[1, 0], [0, 0]]}}"#,
            "dplus",
            "`B`",
        ),
        (
            r#"{"kind": "matrix", "A": {"rows": 1, "cols": 1, "data": [[1, 0]]}, "Bs": [{"rows": 1, "cols": 1, "data": [[1, 0]]}, {"rows": 1, "cols": 2, "data": [[1, 0], [1, 0]]}]}"#,
            "bj-subspace",
            "`Bs[1]`",
        ),
        (r#"{"kind": "matrix", "A": {"rows": 1, "cols": 1, "data": [[1, "x"]]}}"#, "norm", "A.data[0]"),
        (r#"{"kind": "function", "f": {"values": [[1, 0]]}}"#, "norm", "`kind`"),
        (r#"{"kind": "function", "f": {"values": [[1, 0]]}, "hs": [{"values": []}]}"#, "fn-bj", "`hs[0]`"),
        (r#"{"kind": "function", "f": {"values": [[1, 0]]}, "g": {"values": [[1, 0]]}}"#, "fn-ddelta", "`delta`"),
        (r#"{"kind": "matrix", "A": {"rows": 1, "cols": 1, "data": [[1, 0]]}, "extra": 1}"#, "norm", "extra"),
        (
            r#"{"kind": "matrix", "A": {"rows": 1, "cols": 1, "data": [[1, 0]]}, "tolerances": {"feas_eps": -1}}"#,
            "norm",
            "tolerances",
        ),
    ];
    for (i, (text, command, needle)) in cases.iter().enumerate() {
        let p = s.write(&format!("p{i}.json"), text);
        let (o, d) = call(&[command, &p]);
        assert_eq!(o.code, 2, "case {i}: {}", o.stdout);
        let msg = d["error"]["message"].as_str().unwrap();
        assert!(msg.contains(needle), "case {i}: {msg}");
    }
}

#[test]
fn parameter_errors_exit_two() {
    let s = Scratch::new("params");
    let p = s.write("p.json", &diag_problem(&[2.0, 1.0], &[1.0, 0.0], ", \"eps\": 5.0"));
    assert_eq!(call(&["dcutoff", &p]).0.code, 2);
    let z = s.write("z.json", &diag_problem(&[0.0, 0.0], &[1.0, 0.0], ""));
    assert_eq!(call(&["dplus", &z]).0.code, 2);
    assert_eq!(call(&["norm", "/nonexistent/problem.json"]).0.code, 2);
    assert_eq!(call(&["frobnicate", &p]).0.code, 2);
}

#[test]
fn tolerance_flags_override_file_and_are_echoed() {
    let s = Scratch::new("tol");
    let p = s.write(
        "p.json",
        &diag_problem(&[2.0, 1.0], &[1.0, 0.0], ", \"tolerances\": {\"feas_eps\": 1e-5, \"grid_phi\": 32}"),
    );
    let (o, d) = call(&["dplus", &p, "--feas-eps", "1e-4", "--fd-steps", "1e-2,1e-3,1e-4"]);
    assert_eq!(o.code, 0);
    let t = &d["tolerances"];
    assert_eq!(t["feas_eps"].as_f64().unwrap(), 1e-4);
    assert_eq!(t["grid_phi"], 32);
    assert_eq!(t["fd_steps"].as_array().unwrap().len(), 3);
    assert_eq!(t["cluster_rel"].as_f64().unwrap(), 1e-8);

    let (o, _) = call(&["dplus", &p, "--fd-steps", "1e-3,1e-2"]);
    assert_eq!(o.code, 2);
}

#[test]
fn stalled_solver_is_indeterminate() {
    let p = fixture("subspace_slow");
    let (o, d) = call(&["bj-subspace", &p, "--max-iter", "2"]);
    assert_eq!(o.code, 3, "{}", o.stdout);
    assert_eq!(d["error"]["kind"], "indeterminate");
    assert!(d["result"].is_null());
    let (o, d) = call(&["bj-subspace", &p]);
    assert_eq!(o.code, 0);
    assert_eq!(d["certificate"]["kind"], "witness");
}

#[test]
fn certificate_checks_reject_foreign_or_broken_documents() {
    let s = Scratch::new("verify");
    let bj = fixture("bj_swap");
    let (_, doc) = call(&["bj", &bj]);

    // issued for another problem
    let other = s.write("other.json", &diag_problem(&[1.0, 0.5], &[0.0, 1.0], ""));
    let cert = s.write("cert.json", &serde_json::to_string(&doc).unwrap());
    let (o, d) = call(&["bj", &other, "--verify-certificate", &cert]);
    assert_eq!(o.code, 1);
    assert!(d["verification"]["reason"].as_str().unwrap().contains("inputs_digest"));

    // issued for another command
    let (o, _) = call(&["bj-subspace", &bj, "--verify-certificate", &cert]);
    assert_eq!(o.code, 1);

    // a bare certificate object is accepted without the envelope
    let bare = s.write("bare.json", &serde_json::to_string(&doc["certificate"]).unwrap());
    assert_eq!(call(&["bj", &bj, "--verify-certificate", &bare]).0.code, 0);

    // a witness that does not annihilate B
    let wrong = s.write(
        "wrong.json",
        r#"{"kind": "witness", "weights": [0.5, 0.5], "vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}"#,
    );
    let (o, d) = call(&["bj", &bj, "--verify-certificate", &wrong]);
    assert_eq!(o.code, 1, "{}", o.stdout);
    assert_eq!(d["result"], false);

    let garbage = s.write("garbage.json", r#"{"kind": "witness", "weights": "none"}"#);
    assert_eq!(call(&["bj", &bj, "--verify-certificate", &garbage]).0.code, 2);

    let unsupported = s.write("u.json", r#"{"kind": "separation", "coefficients": [1, 0]}"#);
    assert_eq!(call(&["bj", &bj, "--verify-certificate", &unsupported]).0.code, 2);

    let dplus = fixture("dplus_diagonal");
    assert_eq!(call(&["dplus", &dplus, "--verify-certificate", &bare]).0.code, 2);
}

#[test]
fn negative_verdict_certificates_verify() {
    let s = Scratch::new("negative");
    let p = s.write("p.json", &diag_problem(&[2.0, 1.0], &[0.5, 1.0], ""));
    let subdiff = p.replace("p.json", "g.json");
    std::fs::write(&subdiff, std::fs::read_to_string(&p).unwrap().replace("\"B\"", "\"G\"")).unwrap();
    let (o, doc) = call(&["subdiff", &subdiff]);
    assert_eq!(o.code, 1);
    assert_eq!(doc["certificate"]["kind"], "residuals");
    let cert = s.write("c.json", &o.stdout);
    assert_eq!(call(&["subdiff", &subdiff, "--verify-certificate", &cert]).0.code, 0);

    let self_fixture = fixture("bj_self");
    let (o, _) = call(&["bj", &self_fixture]);
    let cert = s.write("v.json", &o.stdout);
    assert_eq!(call(&["bj", &self_fixture, "--verify-certificate", &cert]).0.code, 0);
}

#[test]
fn help_goes_to_stdout() {
    let (o, _) = call(&["--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("bj-subspace"));
}
