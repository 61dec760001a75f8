use std::path::Path;
use std::process::{Command, Output};

fn fbflow(args: &[&str], workers: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fbflow"));
    cmd.args(args).env_remove("FBFLOW_WORKERS");
    if let Some(w) = workers {
        cmd.env("FBFLOW_WORKERS", w);
    }
    cmd.output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn verify(dir: &Path, name: &str, workers: &str) -> Vec<u8> {
    let out = dir.join(name);
    let o = fbflow(
        &[
            "verify-bound", "--field", "sine", "--H", "0.75", "--T", "1", "--grid", "128",
            "--replications", "6", "--seed", "11", "--manifold", "circle:r=1,n=2", "--points", "64",
            "--out", out.to_str().unwrap(),
        ],
        Some(workers),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("violations=0"));
    std::fs::read(out).unwrap()
}

#[test]
fn verify_bound_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let one = verify(dir.path(), "a.csv", "1");
    let four = verify(dir.path(), "b.csv", "4");
    let again = verify(dir.path(), "c.csv", "4");
    assert_eq!(one, four);
    assert_eq!(four, again);
    assert!(!one.contains(&b'\r'));
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = fbflow(&["--config", "/definitely/not/here.toml", "selftest"], None);
    assert_eq!(o.status.code(), Some(2));
    let o = fbflow(&["flow", "--x0", "1,2,3"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_drives_verify_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let report = dir.path().join("report.csv");
    std::fs::write(
        &cfg,
        format!(
            "[experiment]\nfield = \"bump\"\nhurst = 0.8\nsteps = 64\nreplications = 3\nseed = 2\n\n\
             [manifold]\npoints = 32\n\n[output]\nreport = {:?}\n",
            report.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = fbflow(&["--config", cfg.to_str().unwrap(), "verify-bound"], Some("2"));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(report).unwrap();
    assert!(text.contains("# field = \"bump\""));
    let rows = text.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 4);
}

#[test]
fn selftest_passes_and_tamper_fails() {
    let o = fbflow(&["selftest"], Some("2"));
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("[FAIL]"));
    let o = fbflow(&["selftest", "--tamper-k1"], Some("2"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL] k1_golden"));
}

#[test]
fn sample_fbm_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let o = fbflow(
        &["sample-fbm", "--H", "0.7", "--grid", "16", "--channels", "2", "--seed", "4", "--out", csv.to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("t,channel_0,channel_1\n"));
    assert_eq!(text.lines().count(), 18);
    let meta = std::fs::read_to_string(dir.path().join("p.csv.meta.toml")).unwrap();
    assert!(meta.contains("hurst = 0.7") && meta.contains("seed = 4"));
}

#[test]
fn fraccalc_integral_of_constant() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("f.csv");
    let mut s = String::from("t,one\n");
    for k in 0..=64 {
        s.push_str(&format!("{},1\n", k as f64 / 64.0));
    }
    std::fs::write(&input, s).unwrap();
    let o = fbflow(&["fraccalc", "--op", "integral", "--alpha", "0.5", "--in", input.to_str().unwrap()], None);
    assert!(o.status.success());
    let out = stdout(&o);
    let last: f64 = out.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    // I^{1/2} 1 at x = 1 is 1/Γ(3/2) = 2/√π
    assert!((last - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-10);
}

#[test]
fn flow_and_hausdorff_headers() {
    let o = fbflow(&["flow", "--field", "sine", "--x0", "0,0", "--grid", "8", "--seed", "1"], None);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("t,x_1,x_2,J_11,J_12,J_21,J_22\n"));
    assert_eq!(out.lines().count(), 10);
    let o = fbflow(&["hausdorff", "--points", "50", "--grid", "8", "--field", "zero:n=2"], None);
    let out = stdout(&o);
    assert!(out.starts_with("t,measure_estimate\n"));
    let v: f64 = out.lines().nth(5).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-12);
}
