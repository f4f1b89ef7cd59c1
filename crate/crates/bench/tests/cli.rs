use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bench(args: &[&str], cwd: &Path, env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_plof-bench"));
    cmd.args(args).current_dir(cwd).env_remove("PLOF_OUTPUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("PLOF_OUTPUT_DIR", dir);
    }
    cmd.output().unwrap()
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).unwrap();
}

#[test]
fn synth_then_score_then_project() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = bench(
        &["synth", "--n-inliers", "120", "--n-outliers", "6", "--dims", "3", "--seed", "4", "--out", "data/blobs.csv"],
        d,
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("data/blobs.csv")).unwrap();
    assert!(csv.starts_with("x0,x1,x2,label\n"));
    assert_eq!(csv.lines().count(), 127);

    write(
        &d.join("blobs.toml"),
        "path = \"data/blobs.csv\"\ndelimiter = \",\"\nheader = true\nlabel_column = \"label\"\noutlier_classes = [\"1\"]\n",
    );
    let out = bench(&["score", "--dataset", "blobs.toml", "--detector", "plof", "--out", "s.csv"], d, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let scores = fs::read_to_string(d.join("s.csv")).unwrap();
    let lines: Vec<&str> = scores.lines().collect();
    assert_eq!(lines[0], "id,score");
    assert_eq!(lines.len(), 127);
    assert!(lines[1..].iter().enumerate().all(|(i, l)| {
        let (id, s) = l.split_once(',').unwrap();
        id == i.to_string() && s.parse::<f64>().unwrap() >= 0.0
    }));

    let env_dir = d.join("from-env");
    let out = bench(&["project", "--dataset", "blobs.toml"], d, Some(&env_dir));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let proj = fs::read_to_string(env_dir.join("blobs.pca.csv")).unwrap();
    assert!(proj.starts_with("id,pc1,pc2,label\n"));
}

const GOOD: &str = r#"
detectors = ["plof", "lof"]
repetitions = 1

[[datasets]]
name = "Blobs"
kind = "synthetic"
n_inliers = 100
n_outliers = 5
dims = 2
"#;

#[test]
fn run_writes_every_format_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("exp.toml"), GOOD);
    let out_dir = dir.path().join("env-out");
    let out = bench(&["run", "--config", "exp.toml"], dir.path(), Some(&out_dir));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["tables.txt", "auc.csv", "execution_time.csv", "report.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("The execution time"));

    // flag beats env
    let flag_dir = dir.path().join("flag-out");
    let out = bench(
        &["run", "-c", "exp.toml", "-o", flag_dir.to_str().unwrap(), "-f", "structured", "--omit-timing"],
        dir.path(),
        Some(&out_dir),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = fs::read_to_string(flag_dir.join("report.json")).unwrap();
    assert!(!flag_dir.join("tables.txt").exists());
    assert!(report.contains("\"elapsed_seconds\""));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let partial = format!("{GOOD}\n[[datasets]]\nname = \"Gone\"\nkind = \"file\"\nspec = \"missing.toml\"\n");
    write(&d.join("partial.toml"), &partial);
    write(&d.join("empty.toml"), &GOOD.replace("[\"plof\", \"lof\"]", "[]"));
    write(&d.join("typo.toml"), &GOOD.replace("repetitions", "repetition"));

    let code = |args: &[&str]| bench(args, d, Some(&d.join("out"))).status.code();
    assert_eq!(code(&["run", "-c", "partial.toml"]), Some(2));
    assert_eq!(code(&["run", "-c", "empty.toml"]), Some(1));
    assert_eq!(code(&["run", "-c", "typo.toml"]), Some(1));
    assert_eq!(code(&["run", "-c", "nope.toml"]), Some(1));
    assert_eq!(code(&["run", "-c", "partial.toml", "--rule", "median"]), Some(1));
    assert_eq!(code(&["run", "--bogus"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
}
