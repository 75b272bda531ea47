use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn juna(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_juna")).args(args).output().expect("run juna")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn toy_keys(dir: &Path, seed: u64) -> (String, String) {
    let p = dir.join(format!("toy{seed}.pub")).to_string_lossy().into_owned();
    let s = dir.join(format!("toy{seed}.prv")).to_string_lossy().into_owned();
    let o = juna(&["keygen", "--profile", "toy", "--seed", &seed.to_string(), "--out-pub", &p, "--out-prv", &s]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("lgM=48"));
    (p, s)
}

#[test]
fn keygen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (p1, s1) = toy_keys(dir.path(), 5);
    let p2 = dir.path().join("again.pub").to_string_lossy().into_owned();
    let s2 = dir.path().join("again.prv").to_string_lossy().into_owned();
    let o = juna(&["keygen", "--profile", "toy", "--seed", "5", "--out-pub", &p2, "--out-prv", &s2]);
    assert!(o.status.success());
    assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    assert_eq!(fs::read(&s1).unwrap(), fs::read(&s2).unwrap());
    let text = fs::read_to_string(&p1).unwrap();
    assert!(text.starts_with("JUNA-PUB v1\nn=8 pad=4 tbar=48 pbar=101\n"));
}

#[test]
fn n80_public_file_has_144_items() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("n80.pub").to_string_lossy().into_owned();
    let s = dir.path().join("n80.prv").to_string_lossy().into_owned();
    let o = juna(&["keygen", "--profile", "n80", "--seed", "1", "--out-pub", &p, "--out-prv", &s]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("lgM=464"));
    assert_eq!(fs::read_to_string(&p).unwrap().lines().count(), 3 + 144);
}

#[test]
fn keygen_bad_path_exits_3() {
    let o = juna(&["keygen", "--profile", "toy", "--seed", "1", "--out-pub", "/nonexistent/dir/k.pub", "--out-prv", "/nonexistent/dir/k.prv"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!stderr(&o).is_empty());
}

#[test]
fn encrypt_then_decrypt() {
    let dir = TempDir::new().unwrap();
    let (p, s) = toy_keys(dir.path(), 9);
    for (input, hex) in [("0xa5", "a5"), ("0b00000001", "01"), ("ff", "ff"), ("11000000", "c0")] {
        let e = juna(&["encrypt", "--pub", &p, "--in", input, "--seed", "3"]);
        assert!(e.status.success(), "{}", stderr(&e));
        let ct = stdout(&e).trim().to_string();
        let d = juna(&["decrypt", "--prv", &s, "--in", &ct]);
        assert!(d.status.success(), "{}", stderr(&d));
        assert_eq!(stdout(&d).trim(), hex);
    }
}

#[test]
fn encrypt_seeds_differ_and_output_is_below_m() {
    let dir = TempDir::new().unwrap();
    let (p, _) = toy_keys(dir.path(), 2);
    let m = u64::from_str_radix(fs::read_to_string(&p).unwrap().lines().nth(2).unwrap(), 16).unwrap();
    let outs: Vec<String> = (0..6)
        .map(|seed| stdout(&juna(&["encrypt", "--pub", &p, "--in", "5a", "--seed", &seed.to_string()])))
        .collect();
    let distinct: std::collections::HashSet<_> = outs.iter().collect();
    assert!(distinct.len() > 1);
    for o in &outs {
        assert!(u64::from_str_radix(o.trim(), 16).unwrap() < m);
    }
    let again = stdout(&juna(&["encrypt", "--pub", &p, "--in", "5a", "--seed", "0"]));
    assert_eq!(again, outs[0]);
}

#[test]
fn encrypt_input_errors() {
    let dir = TempDir::new().unwrap();
    let (p, _) = toy_keys(dir.path(), 3);
    let o = juna(&["encrypt", "--pub", &p, "--in", "00"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("plaintext must be nonzero"));
    let o = juna(&["encrypt", "--pub", &p, "--in", "0x123"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn decrypt_failures() {
    let dir = TempDir::new().unwrap();
    let (_, s) = toy_keys(dir.path(), 4);
    let mut rejected = 0;
    for v in ["1234567", "abcdef0123", "deadbeef", "3", "7777777777"] {
        let o = juna(&["decrypt", "--prv", &s, "--in", v]);
        if o.status.code() == Some(2) {
            assert!(stderr(&o).contains("not a ciphertext"));
            rejected += 1;
        }
    }
    assert!(rejected >= 4);

    let text = fs::read_to_string(&s).unwrap();
    let truncated = dir.path().join("short.prv");
    fs::write(&truncated, text.lines().take(7).map(|l| format!("{l}\n")).collect::<String>()).unwrap();
    let o = juna(&["decrypt", "--prv", truncated.to_str().unwrap(), "--in", "abc"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 8"), "{}", stderr(&o));

    let o = juna(&["decrypt", "--prv", "/nonexistent.prv", "--in", "abc"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn analyze_reports() {
    let o = juna(&["analyze", "density", "--nt", "96", "--lgm", "464"]);
    assert!(stdout(&o).contains("1.5517"));
    let o = juna(&["analyze", "density", "--n", "128", "--lgm", "1216"]);
    assert!(stdout(&o).contains("0.8421"));
    let o = juna(&["analyze", "costs", "--n", "80"]);
    assert!(stdout(&o).contains("log2(Fm)=97"));
    let o = juna(&["analyze", "costs", "--n", "64"]);
    assert_eq!(o.status.code(), Some(1));
    let o = juna(&["analyze", "kbounds", "--nt", "128"]);
    assert!(stdout(&o).contains("kmax=21792"));
    let o = juna(&["analyze", "kbounds", "--nt", "96", "--csv"]);
    assert_eq!(stdout(&o), "ntilde,kmax,kexpected,kabs\n96,12312,6156,13968\n");
    let o = juna(&["analyze", "mitm", "--weights", "1,2,4,8", "--target", "5"]);
    assert_eq!(stdout(&o), "b=1010\n");
    let o = juna(&["analyze", "mitm", "--weights", "3,5,7", "--target", "14"]);
    assert_eq!(stdout(&o), "no solution\n");
}

#[test]
fn census_on_toy_and_refusal_on_full_scale() {
    let dir = TempDir::new().unwrap();
    let (p, s) = toy_keys(dir.path(), 6);
    let o = juna(&["analyze", "census", "--pub", &p, "--prv", &s, "--csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[5], "0", "collisions: {out}");
    assert_eq!(row[6], "0", "roundtrip failures: {out}");

    let bp = dir.path().join("n80.pub").to_string_lossy().into_owned();
    let bs = dir.path().join("n80.prv").to_string_lossy().into_owned();
    assert!(juna(&["keygen", "--profile", "n80", "--seed", "2", "--out-pub", &bp, "--out-prv", &bs]).status.success());
    let o = juna(&["analyze", "census", "--pub", &bp, "--prv", &bs]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(juna(&[]).status.code(), Some(1));
    assert_eq!(juna(&["keygen", "--profile", "n64", "--seed", "1", "--out-pub", "a", "--out-prv", "b"]).status.code(), Some(1));
    assert_eq!(juna(&["--help"]).status.code(), Some(0));
}
