use std::path::Path;
use std::process::{Command, Output};

fn ncross(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncross")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    let line = text.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no {key} in\n{text}"));
    line[prefix.len()..].parse().unwrap()
}

#[test]
fn gradient_input_has_no_divergence_free_part() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert!(ncross(&["synth", "--kind", "gradient-bump", "--output", "g.field"], dir).status.success());
    let out = ncross(&["decompose", "--input", "g.field"], dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(value(&stdout(&out), "max_abs_divfree") <= 1e-11);
}

#[test]
fn divergence_free_input_has_no_curl_free_part() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert!(ncross(&["synth", "--kind", "divfree-bump", "--n", "3", "--shape", "16", "--output", "d.field"], dir)
        .status
        .success());
    let out = ncross(&["decompose", "--input", "d.field", "--output", "parts"], dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(value(&stdout(&out), "max_abs_curlfree") <= 1e-11);
    assert!(dir.join("parts.curlfree.field").exists() && dir.join("parts.divfree.field").exists());
}

#[test]
fn truncated_file_reports_byte_offset() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ncross(&["synth", "--kind", "random", "--shape", "8", "--output", "r.field"], dir);
    let bytes = std::fs::read(dir.join("r.field")).unwrap();
    std::fs::write(dir.join("cut.field"), &bytes[..bytes.len() - 3]).unwrap();
    let out = ncross(&["decompose", "--input", "cut.field"], dir);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains(&format!("byte {}", bytes.len() - 3)), "{err}");
}

#[test]
fn identities_reports_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let a = ncross(&["identities", "--n", "3", "--trials", "1"], tmp.path());
    let b = ncross(&["identities", "--n", "3", "--trials", "1"], tmp.path());
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).ends_with("status=pass\n"));
    let five = ncross(&["identities", "--n", "5", "--trials", "1000"], tmp.path());
    assert_eq!(five.status.code(), Some(0));
}

#[test]
fn thread_count_does_not_change_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_ncross"))
            .args(["divcurl-demo", "--shape", "64", "--k", "2,4,8,16"])
            .env("NCROSS_THREADS", threads)
            .current_dir(tmp.path())
            .output()
            .unwrap()
    };
    assert_eq!(run("1").stdout, run("3").stdout);
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn laplacian_check_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(ncross(&["laplacian-check", "--n", "4", "--shape", "12"], dir).status.code(), Some(0));
    let fd = ncross(&["laplacian-check", "--n", "2", "--shape", "32", "--backend", "central2"], dir);
    assert_eq!(fd.status.code(), Some(0));
    let ratio = value(&stdout(&fd), "vector_laplacian_ratio");
    assert!((3.5..=4.5).contains(&ratio));
    assert_eq!(ncross(&["laplacian-check", "--n", "6", "--shape", "32"], dir).status.code(), Some(2));
    assert_eq!(ncross(&["laplacian-check", "--backend", "upwind"], dir).status.code(), Some(2));
}

#[test]
fn divcurl_demo_examples() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let out = ncross(&["divcurl-demo"], dir);
    assert_eq!(out.status.code(), Some(0));
    assert!(value(&stdout(&out), "decay_exponent") <= -0.9);
    let flat = ncross(&["divcurl-demo", "--amplitude", "0"], dir);
    assert_eq!(flat.status.code(), Some(0));
    assert_eq!(value(&stdout(&flat), "deviation_k32"), 0.0);
    assert_eq!(ncross(&["divcurl-demo", "--k", "4,8,16,64"], dir).status.code(), Some(2));
    let csv = ncross(&["--csv", "divcurl-demo", "--shape", "64", "--k", "2,4,8,16"], dir);
    assert!(stdout(&csv).starts_with("k,pairing,deviation\n2,"));
}

#[test]
fn symbol_and_nye_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let three = ncross(&["ellipticity", "--n", "3", "--expect", "non-elliptic"], dir);
    assert_eq!(three.status.code(), Some(0));
    assert!(stdout(&three).contains("elliptic=false"));
    assert_eq!(ncross(&["ellipticity", "--n", "3", "--expect", "elliptic"], dir).status.code(), Some(1));
    assert_eq!(ncross(&["ellipticity", "--n", "2", "--operator", "curl-n", "--expect", "elliptic"], dir).status.code(), Some(1));
    let nye = ncross(&["nye-check", "--shape", "8"], dir);
    assert_eq!(nye.status.code(), Some(0));
    assert!(value(&stdout(&nye), "roundtrip_residual") <= 1e-10);
}

#[test]
fn usage_errors_and_help() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    assert_eq!(ncross(&["--help"], dir).status.code(), Some(0));
    assert_eq!(ncross(&["frobnicate"], dir).status.code(), Some(2));
    assert_eq!(ncross(&["decompose"], dir).status.code(), Some(2));
    assert_eq!(ncross(&["decompose", "--input", "missing.field"], dir).status.code(), Some(2));
}
