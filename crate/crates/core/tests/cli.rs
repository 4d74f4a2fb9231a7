use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moire-sort"))
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.scn"))
        .display()
        .to_string()
}

#[test]
fn simulate_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate", &scenario("peptides"), "--samples", "20000", "--format", "svg", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "peptides_YGW_scan.csv",
        "peptides_YWG_scan.csv",
        "peptides_fit.csv",
        "peptides_enrichment.csv",
        "peptides_scan.svg",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(dir.path().join("peptides_YGW_scan.csv")).unwrap();
    assert!(csv.starts_with("offset_nm,species,signal,stderr\n"));
    assert_eq!(csv.lines().count(), 65);
}

#[test]
fn outputs_identical_across_thread_counts() {
    let run = |threads: &str| {
        let dir = tempfile::tempdir().unwrap();
        let st = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args(["simulate", &scenario("swcnt"), "--samples", "30000", "--seed", "5", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(st.success());
        std::fs::read(dir.path().join("swcnt_swcnt-9-0-100nm_scan.csv")).unwrap()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn parse_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.scn");
    std::fs::write(&path, "[species]\npreset = C60\n[beam]\nvelocity_mean = 340\n").unwrap();
    let out = bin().arg("simulate").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4, column 17"), "{err}");
}

#[test]
fn missing_file_is_runtime_error() {
    let out = bin().args(["simulate", "/nonexistent/x.scn"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimize_refuses_single_species() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenario("peptides")).unwrap();
    let single = text.replacen("[species]\npreset = YGW            # 460 u, chi = 480 A3\n", "", 1);
    assert_ne!(single, text);
    let path = dir.path().join("single.scn");
    std::fs::write(&path, single).unwrap();
    let out = bin().arg("optimize").arg(&path).arg("--out").arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["optimize", &scenario("swcnt"), "--target", "swcnt-9-0-100nm", "--umax", "0.6", "--steps", "13", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("U* ="), "{text}");
    let curve = std::fs::read_to_string(dir.path().join("swcnt_swcnt-9-0-100nm_eta_curve.csv")).unwrap();
    assert_eq!(curve.lines().count(), 14);
}

#[test]
fn species_commands() {
    let out = bin().args(["species", "9", "0", "100nm"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("metallic"));
    assert_eq!(bin().args(["species", "3", "1", "10nm"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["species", "1", "4", "10nm"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["simulate"]).status().unwrap().code(), Some(2));
}
