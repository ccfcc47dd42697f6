use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn latinsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latinsq"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn census_reports_classes() {
    let o = latinsq(&["census", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2 main classes"));
    assert!(stdout(&o).contains("576 latin squares"));
}

#[test]
fn table_check_prints_the_totals() {
    let o = latinsq(&["verify-paper", "--tables", "data/paper_tables"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    for v in ["2036029552582883134196099", "6108088657705958932053657", "12216177315369229261482540"] {
        assert!(s.contains(v), "missing {v}");
    }
    assert!(!s.contains("FAIL"));
}

#[test]
fn table_check_flags_a_corrupted_table() {
    let dir = tempfile::tempdir().unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/paper_tables");
    for e in fs::read_dir(&src).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), dir.path().join(e.file_name())).unwrap();
    }
    let t7 = fs::read_to_string(dir.path().join("t7_ord2.tsv")).unwrap();
    fs::write(dir.path().join("t7_ord2.tsv"), t7.replace("3567419044431", "3567419044432")).unwrap();
    let o = latinsq(&["verify-paper", "--tables", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_passes_at_four() {
    let o = latinsq(&["check", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn bad_input_exit_code() {
    assert_eq!(latinsq(&["check", "--order", "9"]).status.code(), Some(3));
    assert_eq!(latinsq(&["lf", "--order", "5", "--type", "99"]).status.code(), Some(3));
    assert_eq!(latinsq(&["classes", "--order", "5", "--type", "nope"]).status.code(), Some(3));
    assert_eq!(latinsq(&["verify-paper", "--tables", "no/such/dir"]).status.code(), Some(3));
}

#[test]
fn classes_resume_after_budget_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let full = dir.path().join("full.json");
    let resumed = dir.path().join("resumed.json");
    let o = latinsq(&["classes", "--order", "5", "--out", full.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = latinsq(&["classes", "--order", "5", "--budget-nodes", "1", "--checkpoint-dir", ck.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = latinsq(&[
        "classes",
        "--order",
        "5",
        "--checkpoint-dir",
        ck.to_str().unwrap(),
        "--out",
        resumed.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(&full).unwrap(), fs::read(&resumed).unwrap());
}

#[test]
fn lf_resumes_from_a_stage_file() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let args = |out: &Path| {
        vec![
            "lf".to_string(),
            "--order".into(),
            "5".into(),
            "--type".into(),
            "1".into(),
            "--checkpoint-dir".into(),
            ck.to_str().unwrap().into(),
            "--out".into(),
            out.to_str().unwrap().into(),
        ]
    };
    let run = |out: &Path| {
        let v = args(out);
        latinsq(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(run(&a).status.code(), Some(0));
    let mut stages: Vec<_> = fs::read_dir(&ck).unwrap().map(|e| e.unwrap().path()).collect();
    stages.sort();
    assert!(stages.len() >= 3);
    for p in &stages[stages.len() - 2..] {
        fs::remove_file(p).unwrap();
    }
    let o = run(&b);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("resumed at stage"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn lf_without_symmetry_gives_the_square_count() {
    let o = latinsq(&["lf", "--order", "4", "--type", "0", "--addition-order", "dec"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("LF = 24"));
    assert!(stdout(&o).contains("|L_Pi| = 576"));
}
