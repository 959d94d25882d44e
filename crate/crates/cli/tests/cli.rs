use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(rel)
}

fn pqd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pqd"))
        .args(args)
        .output()
        .expect("pqd runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn check_prints_declaration_types() {
    let o = pqd(&["check", corpus("ok/conv.pqd").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("conv : !((x : List Qubit) -o Vec Qubit (toNat x))"));
}

#[test]
fn circuit_exports_a_single_gate() {
    let o = pqd(&["circuit", corpus("ok/hadamard.pqd").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(
        text.lines().filter(|l| l.starts_with("GATE H")).count(),
        1,
        "{text}"
    );
    assert_eq!(
        text.lines().filter(|l| l.starts_with("GATE")).count(),
        1,
        "{text}"
    );
}

#[test]
fn ill_typed_programs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("dup.pqd");
    std::fs::write(
        &file,
        "dup : !(Qubit -o Qubit * Qubit)\ndup = \\q -> (q, q)\n",
    )
    .unwrap();
    let o = pqd(&["check", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("LinearityViolation"), "{err}");
    assert!(err.contains("dup.pqd:2:"), "{err}");
}

#[test]
fn exports_are_deterministic() {
    let f = corpus("ok/ghz.pqd");
    let a = pqd(&["circuit", f.to_str().unwrap()]);
    let b = pqd(&["circuit", f.to_str().unwrap()]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn output_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.txt");
    let f = corpus("ok/hadamard.pqd");
    let o = pqd(&["circuit", f.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let written = std::fs::read_to_string(&out).unwrap();
    let direct = stdout(&pqd(&["circuit", f.to_str().unwrap()]));
    assert_eq!(written, direct);
}

#[test]
fn count_reports_gate_totals() {
    let o = pqd(&["count", corpus("ok/allh.pqd").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "H 4");
}

#[test]
fn no_elab_requires_explicit_lift_and_force() {
    let dir = tempfile::tempdir().unwrap();
    let implicit = dir.path().join("implicit.pqd");
    std::fs::write(&implicit, "id : !(Qubit -o Qubit)\nid = \\q -> q\n").unwrap();
    let path = implicit.to_str().unwrap();
    assert!(pqd(&["check", path]).status.success());
    assert_eq!(pqd(&["check", "--no-elab", path]).status.code(), Some(1));
    let explicit = dir.path().join("explicit.pqd");
    std::fs::write(&explicit, "id : !(Qubit -o Qubit)\nid = lift (\\q -> q)\n").unwrap();
    assert!(pqd(&["check", "--no-elab", explicit.to_str().unwrap()])
        .status
        .success());
}

#[test]
fn run_prints_the_value_of_main() {
    let o = pqd(&["run", corpus("ok/nat_arith.pqd").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains(" : "), "{}", stdout(&o));
}

#[test]
fn missing_files_fail_cleanly() {
    let o = pqd(&["check", "/nonexistent/file.pqd"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn circuit_requires_a_boxed_main() {
    let o = pqd(&["circuit", corpus("ok/nat_arith.pqd").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}
