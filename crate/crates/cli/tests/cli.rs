use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn swnet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swnet"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("run swnet")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn thm2_pipeline_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(swnet(d, &["gen-inputs", "--k", "2", "--n", "6"]).status.success());
    let b = swnet(d, &["build", "thm2", "--n", "6", "--k", "2", "--seed", "0"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let manifest = fs::read_to_string(d.join("thm2.manifest")).unwrap();
    assert!(manifest.contains("kind=thm2") && manifest.contains("st_shortcut=false"));
    let net = d.join("thm2.net");
    let fam = d.join("path2-n6.family");
    let v = swnet(d, &["verify", "--network", net.to_str().unwrap(), "--family", fam.to_str().unwrap(), "--sound"]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).contains("48 of 48"));
}

#[test]
fn incompleteness_is_a_check_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(swnet(d, &["build", "thm1", "--n", "6", "--k", "2", "--seed", "1"]).status.success());
    let net = d.join("thm1.net");
    let v = swnet(d, &["verify", "--network", net.to_str().unwrap(), "--complete"]);
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn basic_ck_is_sound_and_complete() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(swnet(d, &["build", "basic-ck", "--n", "5", "--m", "3"]).status.success());
    let net = d.join("basic-ck.net");
    let v = swnet(d, &["verify", "--network", net.to_str().unwrap(), "--sound", "--complete"]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn worker_count_does_not_change_output() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    for (d, w) in [(one.path(), "1"), (four.path(), "4")] {
        let o = swnet(d, &["--workers", w, "build", "thm2", "--n", "6", "--k", "2", "--seed", "3"]);
        assert!(o.status.success());
        let o = swnet(d, &["--workers", w, "build", "thm1", "--n", "7", "--k", "2", "--seed", "3"]);
        assert!(o.status.success());
    }
    for f in ["thm2.net", "thm2.manifest", "thm1.net", "thm1.manifest"] {
        assert_eq!(fs::read(one.path().join(f)).unwrap(), fs::read(four.path().join(f)).unwrap(), "{f}");
    }
    let a = swnet(one.path(), &["--workers", "1", "mc-useful", "--n", "20", "--k", "2", "--m", "1", "--x", "4", "--seed", "9", "--samples", "5000"]);
    let b = swnet(one.path(), &["--workers", "4", "mc-useful", "--n", "20", "--k", "2", "--m", "1", "--x", "4", "--seed", "9", "--samples", "5000"]);
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn sc_of_short_paths() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(stdout(&swnet(dir.path(), &["sc", "--path-k", "1"])).trim(), "1");
    assert_eq!(stdout(&swnet(dir.path(), &["sc", "--path-k", "3"])).trim(), "2");
}

#[test]
fn audit_passes_on_one_sided_family() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(swnet(d, &["build", "thm1", "--n", "7", "--k", "2", "--seed", "3"]).status.success());
    let net = d.join("thm1.net");
    let a = swnet(d, &["audit-ck", "--network", net.to_str().unwrap(), "--n", "7", "--k", "2", "--m", "2", "--one-sided"]);
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).contains("0 not accepted"));
}

#[test]
fn crossover_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let o = swnet(dir.path(), &["crossover", "--from", "16", "--to", "24", "--tsv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("#lg_n"));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 9);
}

#[test]
fn bounds_and_exact_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&swnet(dir.path(), &["bounds", "--n", "1024", "--k", "4", "--m", "3"]));
    assert!(out.contains("thm1\t1966080"));
    let out = stdout(&swnet(dir.path(), &["exact-useful", "--n", "64", "--k", "4", "--m", "2", "--x", "6"]));
    assert!(out.contains("tail\t4847/111569"));
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(swnet(d, &["bounds", "--n", "3", "--k", "9"]).status.code(), Some(2));
    assert_eq!(swnet(d, &["build", "thm2", "--n", "6", "--seed", "0"]).status.code(), Some(2));
    fs::write(d.join("junk.net"), "not a network").unwrap();
    let junk = d.join("junk.net");
    assert_eq!(swnet(d, &["verify", "--network", junk.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(swnet(d, &["build", "thm1", "--n", "6", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn resource_limit_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = swnet(dir.path(), &["gen-inputs", "--k", "6", "--n", "40"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
