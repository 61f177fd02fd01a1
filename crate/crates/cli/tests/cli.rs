use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn indcalc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_indcalc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn with_s1() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("s1.json"),
        r#"{"n":3,"closed_sets":[0,3,4,7],"group_generators":[[1,0,2]]}"#,
    )
    .unwrap();
    dir
}

#[test]
fn validate_ok_and_invalid() {
    let dir = with_s1();
    let o = indcalc(dir.path(), &["validate", "s1.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "OK\n");

    fs::write(
        dir.path().join("bad.json"),
        r#"{"n":3,"closed_sets":[0,1,7],"group_generators":[[1,0,2]]}"#,
    )
    .unwrap();
    let o = indcalc(dir.path(), &["validate", "--site", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not closed"));
}

#[test]
fn file_and_usage_errors_exit_2() {
    let dir = with_s1();
    assert_eq!(
        indcalc(dir.path(), &["validate", "missing.json"]).status.code(),
        Some(2)
    );
    assert_eq!(
        indcalc(dir.path(), &["axioms", "--relation", "full"]).status.code(),
        Some(2)
    );
    assert_eq!(
        indcalc(dir.path(), &["claim", "C42", "--site", "s1.json", "--relation", "full"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(indcalc(dir.path(), &["acfg-demo", "--p", "4"]).status.code(), Some(2));
    assert_eq!(indcalc(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        indcalc(
            dir.path(),
            &["apply", "--site", "s1.json", "--relation", "full", "--op", "m(R"]
        )
        .status
        .code(),
        Some(2)
    );
    // --n outside the caps
    assert_eq!(
        indcalc(dir.path(), &["claim", "C9", "--search", "--n", "3..7"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn apply_round_trips_through_claim() {
    let dir = with_s1();
    let o = indcalc(
        dir.path(),
        &[
            "apply",
            "--site",
            "s1.json",
            "--relation",
            "a-indep",
            "--op",
            "M(R)",
            "--out",
            "m.json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = indcalc(dir.path(), &["claim", "C8", "--relation", "m.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("C8 on M(a-indep): confirmed"));

    let o = indcalc(dir.path(), &["axioms", "--relation", "m.json", "--out", "profile.json"]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("profile.json")).unwrap()).unwrap();
    assert!(json.is_object());
}

#[test]
fn claim_search_c9() {
    let dir = with_s1();
    let o = indcalc(
        dir.path(),
        &["claim", "C9", "--search", "--n", "3", "--samples", "20", "--seed", "7"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("C9   instances="));
    assert!(stdout(&o).contains("refuted=0"));
}

#[test]
fn search_output_is_byte_identical_across_jobs() {
    let dir = with_s1();
    let args = |jobs: &'static str, out: &'static str| {
        vec![
            "claim",
            "all",
            "--search",
            "--n",
            "2..3",
            "--samples",
            "4",
            "--seed",
            "11",
            "--jobs",
            jobs,
            "--out",
            out,
        ]
    };
    let a = indcalc(dir.path(), &args("1", "a"));
    let b = indcalc(dir.path(), &args("3", "b"));
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let ra = fs::read(dir.path().join("a/report.json")).unwrap();
    let rb = fs::read(dir.path().join("b/report.json")).unwrap();
    assert_eq!(ra, rb);
}

#[test]
fn acfg_demo_reports_witness() {
    let dir = with_s1();
    for p in ["2", "3"] {
        let o = indcalc(dir.path(), &["acfg-demo", "--p", p]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        assert!(
            text.contains("base: U=span{a} V=span{d1, d2} W=0\n  kim_indep holds"),
            "{text}"
        );
        let witness = if p == "2" { "ad2 + d1" } else { "ad2 - d1" };
        assert!(text.contains(&format!("witness {witness}")), "{text}");
    }
}

#[test]
fn diagram_is_dot() {
    let dir = with_s1();
    let o = indcalc(dir.path(), &["diagram", "--site", "s1.json", "--relation", "full"]);
    assert_eq!(o.status.code(), Some(0));
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph implications {"));
    assert!(dot.trim_end().ends_with('}'));
    assert_eq!(dot.matches(" [label=").count(), 1);
    let again = indcalc(dir.path(), &["diagram", "--site", "s1.json", "--relation", "full"]);
    assert_eq!(o.stdout, again.stdout);
}
