use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_curved-dirac");

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn config(omega: &str, params: &str) -> String {
    format!("[omega]\n{omega}\n\n[params]\n{params}\n")
}

const REFERENCE_PARAMS: &str = "mass = 1.5\nkv = 2.5\nky = 0.0\nlength = 6.283185307179586\nsigma = 1";

fn peak_density(csv: &str) -> f64 {
    let row = csv
        .lines()
        .skip(1)
        .find(|l| l.split(',').next().unwrap().parse::<f64>().unwrap() == 0.0)
        .expect("x = 0 row");
    row.split(',').last().unwrap().parse().unwrap()
}

#[test]
fn verify_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--out", "o"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = std::fs::read_to_string(dir.path().join("o/verify_report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let checks = v["checks"].as_array().unwrap();
    for k in 1..=8 {
        let hits = checks
            .iter()
            .filter(|c| c["name"].as_str().unwrap().starts_with(&format!("{k} ")))
            .count();
        assert_eq!(hits, 1, "criterion {k} listed once");
    }
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    assert!(dir.path().join("o/verify_metadata.json").exists());
}

#[test]
fn zero_tolerance_fails_and_names_quadrature_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failed: Vec<&str> = stdout.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert!(failed.iter().any(|l| l.contains("1 normalization")));
    assert!(failed.iter().any(|l| l.contains("2 normalization")));
    assert!(failed.iter().all(|l| l.contains("[Quadrature]")), "{failed:?}");
}

#[test]
fn degenerate_config_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let text = config(
        "family = \"cosh_power\"\nalpha = 1.0\nn = 1",
        "mass = 1.0\nkv = 1.0\nky = 0.0\nlength = 1.0\nsigma = 1",
    );
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let out = run(dir.path(), &["verify", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    let report = std::fs::read_to_string(dir.path().join("verify_report.json")).unwrap();
    assert_eq!(report.matches("skipped-degenerate").count(), 3);
}

#[test]
fn empty_config_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.toml"), "").unwrap();
    let out = run(dir.path(), &["geometry", "--config", "empty.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing field `omega`"));
}

#[test]
fn node_at_origin_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = config(
        "family = \"polynomial_even\"\nomega = 1.0\nc = 0.0\nn = 1",
        REFERENCE_PARAMS,
    );
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let out = run(dir.path(), &["geometry", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not nodeless"));
}

#[test]
fn inadmissible_ky_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = config(
        "family = \"cosh_power\"\nalpha = 1.0\nn = 1",
        &REFERENCE_PARAMS.replace("ky = 0.0", "ky = 2.5"),
    );
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    let out = run(dir.path(), &["zeromode", "--config", "c.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("k_v^2 = 6.25 < k_y^2 + M^2 = 8.5"), "{err}");
    assert!(!dir.path().join("zeromode.csv").exists());
}

#[test]
fn geometry_report_for_cosh() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["geometry"]);
    assert_eq!(out.status.code(), Some(0));
    let report = std::fs::read_to_string(dir.path().join("geometry_report.json")).unwrap();
    assert_eq!(report.matches("\"pass\"").count(), 2);
}

#[test]
fn density_peaks_increase_with_n() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("polynomial_even\"\nomega = 1.0\nc = 1.0\nn = 1", 1.0 / PI),
        ("polynomial_even\"\nomega = 1.0\nc = 1.0\nn = 2", 2f64.sqrt() / PI),
        ("polynomial_even\"\nomega = 1.0\nc = 1.0\nn = 3", 1.5 / PI),
        ("cosh_power\"\nalpha = 1.0\nn = 1", 1.0 / PI),
        ("cosh_power\"\nalpha = 1.0\nn = 2", 0.5),
        ("cosh_power\"\nalpha = 1.0\nn = 3", 2.0 / PI),
    ];
    let mut peaks = Vec::new();
    for (k, (omega, expected)) in cases.iter().enumerate() {
        let name = format!("c{k}.toml");
        std::fs::write(dir.path().join(&name), config(&format!("family = \"{omega}"), REFERENCE_PARAMS)).unwrap();
        let out_dir = format!("out{k}");
        let out = run(dir.path(), &["zeromode", "--config", &name, "--out", &out_dir]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(dir.path().join(&out_dir).join("zeromode.csv")).unwrap();
        assert_eq!(csv.lines().next(), Some("x,re_psi1,im_psi1,re_psi2,im_psi2,P"));
        assert_eq!(csv.lines().count(), 1002);
        let p0 = peak_density(&csv);
        assert!((p0 - expected).abs() < 1e-12, "case {k}: {p0} vs {expected}");
        peaks.push(p0);
    }
    assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2]);
    assert!(peaks[3] < peaks[4] && peaks[4] < peaks[5]);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "{}\n[grid]\nx_min = -2.0\nx_max = 2.0\nn_points = 41\n\n[options]\neigen_count = 3\n",
        config(
            "family = \"polynomial_even\"\nomega = 1.0\nc = 1.0\nn = 2",
            "mass = 0.5\nkv = 2.0\nky = -1.0\nlength = 3.0\nsigma = -1"
        )
    );
    std::fs::write(dir.path().join("c.toml"), text).unwrap();
    for out in ["a", "b"] {
        let o = run(dir.path(), &["zeromode", "--config", "c.toml", "--out", out]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = run(dir.path(), &["geometry", "--config", "c.toml", "--out", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    for file in ["zeromode.csv", "zeromode.json", "geometry_report.json"] {
        let a = std::fs::read(dir.path().join("a").join(file)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file}");
    }
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/zeromode.json")).unwrap()).unwrap();
    assert_eq!(json["near_zero_eigenvalues"].as_array().unwrap().len(), 3);
    for key in ["lambda", "chi", "N", "degeneracy", "ky_range"] {
        assert!(json.get(key).is_some(), "{key}");
    }
}

#[test]
fn grid_n_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["zeromode", "--grid-n", "21"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("zeromode.csv")).unwrap();
    assert_eq!(csv.lines().count(), 22);
    let out = run(dir.path(), &["zeromode", "--grid-n", "20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["plot"]).status.code(), Some(2));
}
