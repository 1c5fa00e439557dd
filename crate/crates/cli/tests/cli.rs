use std::fs;
use std::path::Path;
use std::process::Command;

fn oddsym() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_oddsym"));
    c.env_remove("ODDSYM_OUT");
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c
}

fn preset(name: &str) -> String {
    format!("{}/../../presets/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn presets_lists_the_catalog() {
    let out = oddsym().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 6);
    for name in ["thm1_2_expquad", "example1_8_decay", "unweighted_heteroclinic"] {
        assert!(text.contains(name), "{name}");
    }
}

#[test]
fn run_writes_report_and_csvs_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let (d1, d2) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&d1, &d2] {
        let st = oddsym()
            .args(["run", &preset("thm1_2_expquad"), "--seed", "7", "--out"])
            .arg(d)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
    }
    let (c1, c2) = (csv_files(&d1), csv_files(&d2));
    let names: Vec<_> = c1.iter().map(|c| c.0.as_str()).collect();
    assert_eq!(names, ["solution.csv", "starts.csv"]);
    assert_eq!(c1, c2);
    assert_eq!(fs::read(d1.join("report.json")).unwrap(), fs::read(d2.join("report.json")).unwrap());
    let sol = String::from_utf8(c1[0].1.clone()).unwrap();
    assert!(sol.starts_with("x,u,uprime,hamiltonian\n"));
    assert!(!sol.contains('\r'));
}

#[test]
fn env_out_overrides_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");
    let st = oddsym()
        .env("ODDSYM_OUT", &env_dir)
        .args(["run", &preset("audit_expquad"), "--out"])
        .arg(&flag_dir)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(env_dir.join("report.json").is_file());
    assert!(!flag_dir.exists());
}

#[test]
fn builtin_names_and_overrides_resolve() {
    let tmp = tempfile::tempdir().unwrap();
    let st = oddsym()
        .args(["run", "expquad_supersolution", "--jobs", "2", "--mesh", "256", "--out"])
        .arg(tmp.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(tmp.path().join("eigenvector.csv").is_file());
}

#[test]
fn audit_prints_verdicts() {
    let out = oddsym().args(["audit", &preset("audit_expquad.conf")]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"log_convex_a\""));
    assert!(text.contains("\"theorems\""));
}

#[test]
fn precondition_failure_exits_2_with_report_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("tab.conf");
    fs::write(
        &cfg,
        "task = eigen\nproblem.g.family = tabulated_even\n\
         problem.g.nodes = 0, 0.5, 1, 2\nproblem.g.values = 0.25, 0.14, 0, 2.25\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let st = oddsym().arg("run").arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(2));
    let files: Vec<_> = fs::read_dir(&out).unwrap().collect();
    assert_eq!(files.len(), 1);
    assert!(out.join("report.json").is_file());
}

#[test]
fn parse_errors_name_line_and_key() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.conf");
    fs::write(&cfg, "task = minimize\nproblem.a.family = constant\nproblem.a.alpha = 2\n").unwrap();
    let out = tmp.path().join("out");
    let o = oddsym().arg("run").arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("problem.a.alpha"), "{err}");
    assert!(!out.exists());
}
