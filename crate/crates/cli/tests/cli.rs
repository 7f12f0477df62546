use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn okapain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_okapain"))
        .args(args)
        .current_dir(root())
        .env_remove("OKAPAIN_SOLVER_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(root().join("data/golden").join(name)).unwrap()
}

#[test]
fn verify_shipped_atlases() {
    let o = okapain(&["verify-atlas", "data/e7.atlas"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = okapain(&["verify-atlas", "data/a8.atlas", "--twist", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn corrupted_atlas_is_a_parse_error_with_position() {
    let dir = std::env::temp_dir().join(format!("okapain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = std::fs::read_to_string(root().join("data/e7.atlas")).unwrap();
    let bad = dir.join("bad.atlas");
    std::fs::write(&bad, text.replacen("U1 = (x1, y1)", "U1 = (x1, y1", 1)).unwrap();
    let o = okapain(&["verify-atlas", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("line") && e.contains("column"), "{e}");
}

#[test]
fn perturbed_transition_fails_verification() {
    let dir = std::env::temp_dir().join(format!("okapain-cli-p-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let text = std::fs::read_to_string(root().join("data/e7.atlas")).unwrap();
    let bad = dir.join("perturbed.atlas");
    std::fs::write(&bad, text.replacen("U6 -> U5: x5 = x6*y6;", "U6 -> U5: x5 = x6*y6^2;", 1)).unwrap();
    let o = okapain(&["verify-atlas", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stderr(&o).contains("first failing check"), "{}", stderr(&o));
    let out = stdout(&o);
    let transitions = out.lines().next().unwrap();
    assert!(transitions.contains("FAIL"), "{transitions}");
    let findings: Vec<&str> = out
        .lines()
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .collect();
    assert!(!findings.is_empty());
    assert!(findings.iter().all(|l| l.contains("U6 -> U5")), "{findings:?}");
}

#[test]
fn compute_delta_matches_goldens() {
    for (atlas, n, file) in [
        ("data/e7.atlas", "1", "e7_n1.delta"),
        ("data/a8.atlas", "1", "a8_n1.delta"),
        ("data/a8.atlas", "2", "a8_n2.delta"),
    ] {
        let o = okapain(&["compute-delta", atlas, "--twist", n, "--format", "structured"]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), golden(file), "{file}");
    }
}

#[test]
fn output_file_and_determinism() {
    let dir = std::env::temp_dir().join(format!("okapain-cli-o-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("a8.delta");
    let args = ["compute-delta", "data/a8.atlas", "--format", "structured", "--output", out.to_str().unwrap()];
    assert_eq!(okapain(&args).status.code(), Some(0));
    let first = std::fs::read(&out).unwrap();
    assert_eq!(okapain(&args).status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), first);
    assert_eq!(String::from_utf8(first).unwrap(), golden("a8_n1.delta"));
}

#[test]
fn text_delta_compares_against_the_library() {
    let o = okapain(&["compute-delta", "data/e7.atlas"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("delta of e7 against E7~: pass"), "{s}");
    assert!(s.contains("kernel = (1, 2, 3, 4, 2, 3, 2, 1)"));
}

#[test]
fn twist_guards() {
    let o = okapain(&["compute-delta", "data/a8.atlas", "--twist", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = okapain(&["compute-delta", "data/e7.atlas", "--twist", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fixed twist"));
}

#[test]
fn kernel_command() {
    let o = okapain(&["kernel", "data/e7.atlas", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("rank = 7\n"));
    assert!(s.contains("kernel_dimension = 1\n"));
}

#[test]
fn vanishing_scan_exit_codes() {
    let o = okapain(&["vanishing-scan", "data/a8.atlas", "--n-max", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("n = ")).count(), 5);

    let o = okapain(&["vanishing-scan", "data/a8.atlas", "--n-max", "1"]);
    let rows: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("n = ")).map(str::to_string).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].contains("t = -1 (rank 8)"), "{}", rows[0]);

    let o = okapain(&["vanishing-scan", "data/e7.atlas"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("additive"));
}

#[test]
fn cartan_roster() {
    let o = okapain(&["cartan", "E7~"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("P_II") && s.contains("rank 7") && s.contains("kernel (1, 2, 3, 4, 2, 3, 2, 1)"), "{s}");

    let o = okapain(&["cartan", "--type", "D4~", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("rank = 4\n") && s.contains("painleve = P_VI"), "{s}");

    assert_eq!(okapain(&["cartan", "Z9~"]).status.code(), Some(2));
}
