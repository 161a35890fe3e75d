use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nctorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctorus")).args(args).output().expect("binary runs")
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_are_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("algebra.toml");
    fs::write(&cfg, "command = \"algebra\"\nseed = 7\nsamples = 300\nlaw_cases = 50\n").unwrap();
    let mut runs = Vec::new();
    for threads in ["1", "4"] {
        let out = tmp.path().join(format!("t{threads}"));
        let status = nctorus(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--threads", threads]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        runs.push(read_dir_sorted(&out));
    }
    assert!(runs[0].iter().any(|(name, _)| name == "algebra.csv"));
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn csv_and_summary_carry_seed_and_hash() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rates");
    let status = nctorus(&["rates", "--seed", "3", "--out", out.to_str().unwrap(), "--check"]);
    assert!(status.status.success());
    let csv = fs::read_to_string(out.join("rates.csv")).unwrap();
    let mut lines = csv.lines();
    let hash_line = lines.next().unwrap();
    assert!(hash_line.starts_with("# spec_sha256="));
    assert_eq!(lines.next().unwrap(), "# seed=3");
    assert_eq!(lines.next().unwrap(), "n,alpha,ell,t,l2_norm,witness_value,bracket_lower,bracket_upper,fitted_slope");
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "rates");
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["passed"], true);
    assert_eq!(format!("# spec_sha256={}", summary["spec_sha256"].as_str().unwrap()), hash_line);
}

#[test]
fn algebra_below_critical_order_is_a_clean_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    fs::write(&cfg, "command = \"algebra\"\ncases = [[2, 1]]\n").unwrap();
    let out = nctorus(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("k must exceed n/2"), "{stderr}");
}

#[test]
fn unknown_config_key_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("typo.toml");
    fs::write(&cfg, "command = \"rates\"\nj_mni = 4\n").unwrap();
    let out = nctorus(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("j_mni"));
}

#[test]
fn check_flag_sets_exit_code_on_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("strict.toml");
    fs::write(&cfg, "command = \"rates\"\ndims = [1]\ntolerance = 1e-9\n").unwrap();
    let dir = tmp.path().join("o");
    let out = nctorus(&["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap(), "--check"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).lines().any(|l| l.starts_with("FAIL slope")));
    let unchecked = nctorus(&["--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()]);
    assert!(unchecked.status.success());
}

#[test]
fn shipped_configs_pass() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let tmp = tempfile::tempdir().unwrap();
    for name in ["riccati_picard", "riccati_blowup", "convergence"] {
        let cfg = configs.join(format!("{name}.toml"));
        let out = nctorus(&["--config", cfg.to_str().unwrap(), "--out", tmp.path().join(name).to_str().unwrap(), "--check"]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}
