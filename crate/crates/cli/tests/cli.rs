use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use respnet_cli::{run, EXIT_CLEAN, EXIT_ERRORS, EXIT_USAGE};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/maritime.resp")
}

fn fixture_arg() -> String {
    fixture().to_string_lossy().into_owned()
}

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn respnet(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("respnet").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn check_fixture_is_silent() {
    let r = respnet(&["check", &fixture_arg()]);
    assert_eq!(r.code, EXIT_CLEAN, "{}", r.err);
    assert_eq!(r.out, "");
    assert_eq!(r.err, "");
}

#[test]
fn ness_reports_witness_and_but_for() {
    let r = respnet(&[
        "ness",
        &fixture_arg(),
        "--cause",
        "camera_data_degraded",
        "--effect",
        "collision=true",
    ]);
    assert_eq!(r.code, EXIT_CLEAN, "{}", r.err);
    assert_eq!(
        r.out,
        "NESS: yes\nwitness: {camera_data_degraded=true, cas_approved=true, edge_case=true, link_lost=true}\nbut-for: yes\n"
    );
}

#[test]
fn ness_rejects_non_actual_literals() {
    let r = respnet(&[
        "ness",
        &fixture_arg(),
        "--cause",
        "camera_data_degraded=false",
        "--effect",
        "collision",
    ]);
    assert_eq!(r.code, EXIT_ERRORS);
    assert!(r.err.contains("E_NOT_ACTUAL"), "{}", r.err);
}

#[test]
fn analyze_json_follows_the_schema() {
    let r = respnet(&["analyze", &fixture_arg(), "--format", "json"]);
    assert_eq!(r.code, EXIT_CLEAN, "{}", r.err);
    let positions: Vec<usize> = ["\"scenario\"", "\"layers\"", "\"claims\"", "\"diagnostics\""]
        .iter()
        .map(|k| r.out.find(k).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");

    let doc: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(doc["scenario"], "maritime");
    for family in ["causal", "role", "liability", "moral"] {
        assert!(doc["layers"][family].is_object(), "{family}");
    }
    let claims = doc["claims"].as_array().unwrap();
    assert!(!claims.is_empty());
    for claim in claims {
        for key in ["subject", "occurrence", "sense", "status"] {
            assert!(claim[key].is_string(), "{key} in {claim}");
        }
        for entry in claim["ledger"].as_array().unwrap() {
            for key in ["condition", "value", "source"] {
                assert!(entry[key].is_string(), "{key} in {entry}");
            }
        }
    }
    for d in doc["diagnostics"].as_array().unwrap() {
        for key in ["severity", "code", "message"] {
            assert!(d[key].is_string());
        }
        assert!(d["subjects"].is_array());
        assert!(d.get("span").is_some());
    }
}

#[test]
fn analyze_sense_filter_limits_claims() {
    let r = respnet(&["analyze", &fixture_arg(), "--format", "json", "--sense", "liability"]);
    let doc: Value = serde_json::from_str(&r.out).unwrap();
    for claim in doc["claims"].as_array().unwrap() {
        assert!(claim["sense"].as_str().unwrap().starts_with("liability"));
    }
    let r = respnet(&["analyze", &fixture_arg(), "--order", "role-first"]);
    assert_eq!(r.code, EXIT_CLEAN);
    assert!(r.out.find("[role]").unwrap() < r.out.find("[causal]").unwrap());
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(respnet(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(respnet(&["check", &fixture_arg(), "--bogus"]).code, EXIT_USAGE);
    assert_eq!(respnet(&[]).code, EXIT_USAGE);
    assert_eq!(
        respnet(&["analyze", &fixture_arg(), "--format", "yaml"]).code,
        EXIT_USAGE
    );
    let missing = respnet(&["check", "/nonexistent/file.resp"]);
    assert_eq!(missing.code, EXIT_USAGE);
    assert!(missing.err.contains("E_IO"));
    let help = respnet(&["--help"]);
    assert_eq!(help.code, EXIT_CLEAN);
    assert!(help.out.contains("check"));
}

#[test]
fn diagnostics_use_the_editor_format() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.resp", "actor op kind human\nfact contrl(op, o2) = unmet\n");
    let r = respnet(&["check", &bad]);
    assert_eq!(r.code, EXIT_ERRORS);
    let line = r.err.lines().next().unwrap();
    assert!(line.starts_with(&format!("{bad}:2:6: error[E_SYN]: ")), "{line}");
    assert!(line.contains("control"), "{line}");
}

#[test]
fn strict_warnings_promotes_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let dup = write(
        &dir,
        "dup.resp",
        "actor a kind human\noccurrence o kind consequence\nclaim causal a for o\nclaim causal a for o\n",
    );
    let relaxed = respnet(&["check", &dup]);
    assert_eq!(relaxed.code, EXIT_CLEAN);
    assert!(relaxed.err.contains("W_DUPLICATE"));
    assert_eq!(respnet(&["check", &dup, "--strict-warnings"]).code, EXIT_ERRORS);
    assert_eq!(respnet(&["analyze", &dup, "--strict-warnings"]).code, EXIT_ERRORS);
}

#[test]
fn check_diagnostics_reappear_in_analyze_json() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}claim causal operator for consequence2\nclaim causal operator for consequence2\nattribute role(task) operator for omission2\n",
        fs::read_to_string(fixture()).unwrap().replace("equation cas_in_control = autonomous_mode & cas_approved", "equation cas_in_control = autonomous_mode")
    );
    let file = write(&dir, "m.resp", &text);
    let check = respnet(&["check", &file]);
    assert!(!check.err.is_empty());
    let doc: Value = serde_json::from_str(&respnet(&["analyze", &file, "--format", "json"]).out).unwrap();
    let codes: Vec<&str> = doc["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["code"].as_str().unwrap())
        .collect();
    for line in check.err.lines() {
        let code = &line[line.find('[').unwrap() + 1..line.find(']').unwrap()];
        assert!(codes.contains(&code), "{code} missing from {codes:?}");
    }
}

#[test]
fn build_failure_json_is_still_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(&dir, "x.resp", "actor a kind human\nactor a kind human\n");
    let r = respnet(&["analyze", &file, "--format", "json"]);
    assert_eq!(r.code, EXIT_ERRORS);
    let doc: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(doc["diagnostics"][0]["code"], "E_DUP_ID");
    assert_eq!(doc["claims"].as_array().unwrap().len(), 0);
}

#[test]
fn outputs_are_deterministic() {
    let file = fixture_arg();
    for args in [
        vec!["analyze", &file, "--format", "json"],
        vec!["analyze", &file],
        vec!["render", &file],
        vec![
            "explain",
            &file,
            "--subject",
            "operator",
            "--occurrence",
            "omission2",
            "--sense",
            "moral(attributability)",
        ],
    ] {
        assert_eq!(respnet(&args).out, respnet(&args).out, "{args:?}");
    }
}

#[test]
fn render_options_shape_the_graph() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.dot");
    let out_arg = out.to_string_lossy().into_owned();
    let r = respnet(&["render", &fixture_arg(), "-o", &out_arg]);
    assert_eq!(r.code, EXIT_CLEAN, "{}", r.err);
    assert_eq!(r.out, "");
    let full = fs::read_to_string(&out).unwrap();
    assert_eq!(full, respnet(&["render", &fixture_arg()]).out);
    respnet::render::validate_dot(&full).unwrap();

    let causal = respnet(&["render", &fixture_arg(), "--senses", "causal", "--no-legend"]).out;
    assert!(!causal.contains("liable for"));
    assert!(!causal.contains("cluster_legend"));
    let firm = respnet(&[
        "render",
        &fixture_arg(),
        "--senses",
        "liability,moral",
        "--no-candidates",
    ])
    .out;
    assert!(!firm.contains("style=dashed"));
    assert!(firm.contains("liable for"));
    assert_eq!(
        respnet(&["render", &fixture_arg(), "--senses", "legal"]).code,
        EXIT_USAGE
    );
}

#[test]
fn explain_prints_the_ledger() {
    let r = respnet(&[
        "explain",
        &fixture_arg(),
        "--subject",
        "operator",
        "--occurrence",
        "omission2",
        "--sense",
        "moral(attributability)",
    ]);
    assert_eq!(r.code, EXIT_CLEAN, "{}", r.err);
    assert!(r
        .out
        .starts_with("claim moral(attributability) operator for omission2: unsupported\n"));
    assert!(r.out.contains("decisive"));
    let unknown = respnet(&[
        "explain",
        &fixture_arg(),
        "--subject",
        "nobody",
        "--occurrence",
        "omission2",
        "--sense",
        "causal",
    ]);
    assert_eq!(unknown.code, EXIT_ERRORS);
    assert!(unknown.err.contains("E_UNRESOLVED"));
}

#[test]
fn several_files_are_checked_together() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.resp", "actor\n");
    let r = respnet(&["check", &fixture_arg(), &bad]);
    assert_eq!(r.code, EXIT_ERRORS);
    assert!(r.err.lines().all(|l| l.starts_with(&bad)), "{}", r.err);
    assert_eq!(respnet(&["check", &fixture_arg(), &fixture_arg()]).code, EXIT_CLEAN);
}

#[test]
fn mutated_inputs_never_panic() {
    let source = fs::read_to_string(fixture()).unwrap();
    let bytes = source.as_bytes();
    let noise = b"$#(){}=&|!-> \n\"abc_:,;";
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..200 {
        let mut text = bytes.to_vec();
        for _ in 0..rng.gen_range(1..6) {
            let at = rng.gen_range(0..text.len());
            match rng.gen_range(0..3) {
                0 => text[at] = noise[rng.gen_range(0..noise.len())],
                1 => {
                    text.remove(at);
                }
                _ => {
                    let end = (at + rng.gen_range(1..40)).min(text.len());
                    text.drain(at..end);
                }
            }
        }
        let file = dir.path().join(format!("f{i}.resp"));
        fs::write(&file, &text).unwrap();
        let arg = file.to_string_lossy().into_owned();
        for args in [
            vec!["check", &arg],
            vec!["analyze", &arg, "--format", "json"],
            vec!["render", &arg],
        ] {
            let r = respnet(&args);
            assert!(matches!(r.code, EXIT_CLEAN | EXIT_ERRORS), "{args:?} exited {}", r.code);
            if r.code == EXIT_ERRORS {
                let reported = !r.err.is_empty() || r.out.contains("\"severity\": \"error\"");
                assert!(reported, "{args:?} failed silently");
            }
        }
    }
}

#[test]
fn binary_honours_the_variable_cap() {
    let bin = env!("CARGO_BIN_EXE_respnet");
    let ness = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(bin);
        cmd.args(["ness", &fixture_arg(), "--cause", "link_lost", "--effect", "collision"])
            .args(extra);
        cmd.env_remove(respnet_cli::MAX_VARS_ENV);
        if let Some(v) = env {
            cmd.env(respnet_cli::MAX_VARS_ENV, v);
        }
        cmd.output().unwrap()
    };
    let capped = ness(Some("3"), &[]);
    assert_eq!(capped.status.code(), Some(EXIT_ERRORS));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("E_TOO_LARGE"));
    assert_eq!(ness(Some("3"), &["--max-vars", "30"]).status.code(), Some(EXIT_CLEAN));
    assert_eq!(ness(Some("lots"), &[]).status.code(), Some(EXIT_USAGE));
    assert_eq!(ness(None, &["--max-vars", "1000"]).status.code(), Some(EXIT_CLEAN));
    let plain = ness(None, &[]);
    assert_eq!(plain.status.code(), Some(EXIT_CLEAN));
    assert!(String::from_utf8_lossy(&plain.stdout).starts_with("NESS: "));
}
