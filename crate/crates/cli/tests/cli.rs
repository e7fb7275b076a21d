use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ecc_gof::distributions::{sample, DistributionSpec};
use ecc_gof::ecc::{euler_curve, StepCurve};
use ecc_gof::geometry::{alpha_filtration, PointCloud};
use ecc_gof::gof::TestReport;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ecc-gof"));
    c.env_remove("ECC_GOF_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/nine_points.csv")
}

fn write_sample(dir: &Path, name: &str, spec: &str, n: usize, seed: u64) -> String {
    let spec: DistributionSpec = spec.parse().unwrap();
    let path = dir.join(name);
    std::fs::write(&path, sample(&spec, n, seed).unwrap().to_csv()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stderr_line(o: &Output) -> String {
    let s = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(s.trim_end().lines().count(), 1, "stderr: {s}");
    s.trim_end().to_string()
}

#[test]
fn ecc_of_nine_point_cloud() {
    let o = run(&["ecc", "--input", fixture().to_str().unwrap(), "--complex", "alpha"]);
    assert!(o.status.success());
    let curve = StepCurve::read_csv(&o.stdout[..]).unwrap();
    assert_eq!(&curve.values()[..4], &[9.0, 8.0, 5.0, 4.0]);

    let cloud = PointCloud::from_csv_path(fixture()).unwrap();
    assert_eq!(curve, euler_curve(&alpha_filtration(&cloud).unwrap()));
}

#[test]
fn ecc_json_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.json");
    let o = run(&["ecc", "--input", fixture().to_str().unwrap(), "--format", "json", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let curve: StepCurve = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(curve.values()[0], 9.0);
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec![std::ffi::OsString::from("curve.json")]);
}

#[test]
fn ecc_with_rips_and_cech() {
    let f = fixture();
    // truncated at tetrahedra the full clique leaves 9 - 36 + 84 - 126
    for (complex, last) in [("rips", -69.0), ("cech", 1.0)] {
        let o = run(&["ecc", "--input", f.to_str().unwrap(), "--complex", complex]);
        assert!(o.status.success(), "{complex}");
        let curve = StepCurve::read_csv(&o.stdout[..]).unwrap();
        assert_eq!(curve.values()[0], 9.0);
        assert_eq!(curve.final_value(), last);
    }
}

#[test]
fn errors_are_single_lines_with_exit_1() {
    let o = run(&["ecc", "--input", "/nonexistent/pts.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_line(&o).starts_with("error: file_not_found: "));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,y\n1,2\n3,oops\n").unwrap();
    let o = run(&["ecc", "--input", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let line = stderr_line(&o);
    assert!(line.starts_with("error: parse_error: "), "{line}");
    assert!(line.contains("row 3, column 2"), "{line}");

    let o = run(&["prepare", "--null", "normal(0,", "--n", "50", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_line(&o).starts_with("error: invalid_spec: "));

    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_line(&o).starts_with("error: usage: "));
}

#[test]
fn stochastic_commands_require_seed() {
    let o = run(&["prepare", "--null", "normal(0,1)", "--n", "50"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_line(&o).contains("--seed"));
    let o = run(&["power", "--null", "normal(0,1)", "--alt", "cauchy(0,1)", "--n", "50"]);
    assert_eq!(o.status.code(), Some(1));
    let f = fixture();
    let o = run(&["test2", "--x", f.to_str().unwrap(), "--y", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn prepare_then_test1_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let model = d.join("model.json");
    let prep = |threads: &str, out: &Path| {
        let o = run(&[
            "prepare", "--null", "normal(0,1)", "--n", "60", "--M", "120", "--m", "150", "--seed", "11",
            "--threads", threads, "-o", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = prep("1", &model);
    let b = prep("8", &d.join("model8.json"));
    assert_eq!(a, b);
    let manifest = std::fs::read_to_string(d.join("model.json.manifest.json")).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["parameters"]["M"], 120);

    let x = write_sample(d, "x.csv", "normal(0,1)", 60, 5);
    let test = || {
        let o = run(&["test1", "--model", model.to_str().unwrap(), "--input", &x, "--alpha", "0.05"]);
        assert!(o.status.success());
        o.stdout
    };
    let first = test();
    assert_eq!(first, test());
    let report: TestReport = serde_json::from_slice(&first).unwrap();
    assert_eq!(report.schema, "ecc-gof-report-v1");
    assert_eq!(report.method, "topotest");

    let wrong = write_sample(d, "w.csv", "normal(0,1)", 61, 5);
    let o = run(&["test1", "--model", model.to_str().unwrap(), "--input", &wrong]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_line(&o).starts_with("error: size_mismatch: "));
}

#[test]
fn classical_one_sample_methods() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_sample(dir.path(), "x.csv", "cauchy(0,1)", 200, 3);
    for method in ["ks", "cvm"] {
        let o = run(&["test1", "--method", method, "--null", "normal(0,1)", "--input", &x, "--exit-status"]);
        assert_eq!(o.status.code(), Some(2), "{method}");
        let report: TestReport = serde_json::from_slice(&o.stdout).unwrap();
        assert!(report.reject);
    }
    let y = write_sample(dir.path(), "y.csv", "iid(normal(0,1),2)", 40, 3);
    let o = run(&["test1", "--method", "ks_multivariate", "--null", "iid(normal(0,1),2)", "--input", &y, "--m", "200"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "test1", "--method", "ks_multivariate", "--null", "iid(normal(0,1),2)", "--input", &y, "--m", "200", "--seed", "4",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn test2_identical_samples_do_not_reject() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_sample(dir.path(), "a.csv", "normal(0,1)", 100, 1);
    let o = run(&["test2", "--x", &a, "--y", &a, "--K", "1000", "--seed", "7", "--exit-status"]);
    assert_eq!(o.status.code(), Some(0));
    let r: TestReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!r.reject);
    assert_eq!(r.method, "topotest2");

    let b = write_sample(dir.path(), "b.csv", "normal(0,4)", 100, 2);
    let o = run(&["test2", "--x", &a, "--y", &b, "--K", "200", "--seed", "7", "--exit-status"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["test2", "--method", "ks2", "--x", &a, "--y", &a]);
    assert!(o.status.success());
}

#[test]
fn threads_env_fallback_gives_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_sample(dir.path(), "a.csv", "normal(0,1)", 50, 1);
    let b = write_sample(dir.path(), "b.csv", "laplace(0,1)", 50, 2);
    let go = |threads: &str| {
        let o = bin()
            .env("ECC_GOF_THREADS", threads)
            .args(["test2", "--x", &a, "--y", &b, "--K", "300", "--seed", "9"])
            .output()
            .unwrap();
        assert!(o.status.success());
        o.stdout
    };
    assert_eq!(go("1"), go("8"));
}

#[test]
fn power_and_matrix_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = d.join("power.csv");
    let args = [
        "power", "--null", "normal(0,1)", "--alt", "cauchy(0,1)", "--n", "40", "--K", "20", "--M", "100", "--m", "100",
        "--method", "ks", "--seed", "3", "-o", out.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("null,alt,n,K,method,power,ci\n"));
    assert!(d.join("power.csv.manifest.json").exists());

    let heat = d.join("heat");
    let long = d.join("long.csv");
    let o = run(&[
        "matrix", "--spec", "normal(0,1)", "--spec", "cauchy(0,1)", "--n", "40", "--K", "10", "--M", "100", "--m", "100",
        "--seed", "3", "--heatmap-dir", heat.to_str().unwrap(), "-o", long.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&long).unwrap().lines().count(), 9);
    for f in ["topotest.csv", "ks.csv", "topotest-ks.csv"] {
        assert_eq!(std::fs::read_to_string(heat.join(f)).unwrap().lines().count(), 3, "{f}");
    }
}

#[test]
fn power_vs_n_and_nulldist() {
    let o = run(&[
        "power-vs-n", "--null", "normal(0,1)", "--alt", "laplace(0,1)", "--n-list", "20,40", "--methods", "ks,cvm",
        "--K", "10", "--seed", "1", "--format", "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cells: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(cells.as_array().unwrap().len(), 4);

    let o = run(&["nulldist", "--null", "normal(0,1)", "--n-list", "30", "--m", "500", "--seed", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 501);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap() >= 0.0));

    let o = run(&["nulldist", "--null", "normal(0,1)", "--n-list", "30", "--m", "100", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(1));
}
