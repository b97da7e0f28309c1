use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mhd4(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mhd4"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MHD4_OUTPUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn run_then_info() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ot.cfg", "problem = orszag_tang\nresolution = 24 24 1\nt_end = 0.02\noutput = out\n");
    let out = mhd4(&["--threads", "2", "run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let snap = dir.path().join("out/final.snap");
    assert!(snap.exists() && dir.path().join("out/ledger.csv").exists());
    let info = mhd4(&["info", snap.to_str().unwrap()], dir.path());
    assert_eq!(info.status.code(), Some(0));
    let text = String::from_utf8_lossy(&info.stdout);
    assert!(text.contains("orszag_tang") && text.contains("max |divB|"), "{text}");
}

#[test]
fn output_directory_follows_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bw.cfg", "problem = brio_wu\nresolution = 32 1 1\nt_end = 0.01\noutput = ignored\n");
    let status = Command::new(env!("CARGO_BIN_EXE_mhd4"))
        .args(["run", &cfg])
        .current_dir(dir.path())
        .env("MHD4_OUTPUT_DIR", dir.path().join("elsewhere"))
        .env("RUST_LOG", "warn")
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("elsewhere/final.snap").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn converge_prints_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.cfg", "problem = alfven\nt_end = 0.1\noutput = conv\n");
    let out = mhd4(&["converge", &cfg, "--resolutions", "8", "16"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.trim_start().starts_with("16")), "{text}");
    assert!(dir.path().join("conv/convergence.csv").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "problem = alfven\nscheme = nope\n");
    assert_eq!(mhd4(&["run", &bad], dir.path()).status.code(), Some(2));
    assert_eq!(mhd4(&["run", "missing.cfg"], dir.path()).status.code(), Some(2));
    let blowup = write(
        dir.path(),
        "blowup.cfg",
        "problem = brio_wu\nresolution = 64 1 1\nfallback.enabled = false\n\
         brio_wu.left = 1 0 0 0 1000 0.75 1 0\nbrio_wu.right = 0.001 0 0 0 0.0001 0.75 -1 0\n\
         t_end = 0.01\noutput = fail\n",
    );
    assert_eq!(mhd4(&["run", &blowup], dir.path()).status.code(), Some(3));
    assert!(dir.path().join("fail/failure.snap").exists());
    let garbage = write(dir.path(), "junk.snap", "not a snapshot");
    assert_ne!(mhd4(&["info", &garbage], dir.path()).status.code(), Some(0));
}
