use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fasris_cli::sweep::run_sweep;
use fasris_cli::{Axis, Mode, SweepSpec};
use fasris_core::analytic::average_secure_bler;
use fasris_core::SystemParams;

fn fasris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fasris"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn shipped_configs() -> Vec<PathBuf> {
    let dir = manifest_dir().join("../../configs");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "conf"))
        .collect();
    files.sort();
    files
}

/// Data rows of a CSV as string fields, metadata and header dropped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn analytic_column(spec: &SweepSpec) -> Vec<(f64, f64)> {
    let spec = SweepSpec {
        mode: Mode::Analytic,
        ..spec.clone()
    };
    run_sweep(&spec)
        .unwrap()
        .iter()
        .map(|r| (r.value, r.analytic.expect("analytic row").total))
        .collect()
}

#[test]
fn golden_sweep_is_byte_stable() {
    let conf = manifest_dir().join("tests/golden/small.conf");
    let golden = std::fs::read_to_string(manifest_dir().join("tests/golden/small.csv")).unwrap();
    for _ in 0..2 {
        let out = fasris(&["sweep", "--config", conf.to_str().unwrap()]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
    }
}

#[test]
fn emitted_probabilities_are_bounded() {
    let golden = std::fs::read_to_string(manifest_dir().join("tests/golden/small.csv")).unwrap();
    for row in rows(&golden) {
        for cell in &row[1..7] {
            let v: f64 = cell.parse().unwrap();
            assert!((0.0..=1.0).contains(&v), "{row:?}");
        }
        assert!(row[7].is_empty());
    }
}

#[test]
fn single_value_sweep_equals_direct_call() {
    let spec = SweepSpec {
        values: vec![25.0],
        ..SweepSpec::default()
    };
    let got = run_sweep(&spec).unwrap();
    assert_eq!(got.len(), 1);
    let want = average_secure_bler(&SystemParams {
        p_mw: 25.0,
        ..SystemParams::default()
    })
    .unwrap();
    assert_eq!(got[0].analytic.unwrap(), want);
}

#[test]
fn every_shipped_config_is_valid() {
    let files = shipped_configs();
    assert!(files.len() >= 20);
    for f in files {
        let spec = SweepSpec::load(&f).unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        spec.check().unwrap();
        for v in spec.points() {
            spec.axis
                .apply(&spec.base, v)
                .unwrap()
                .validate()
                .unwrap_or_else(|e| panic!("{}: {e}", f.display()));
        }
    }
}

#[test]
fn power_allocation_has_an_interior_optimum() {
    for tag in ["a", "b", "c", "d"] {
        let spec =
            SweepSpec::load(&manifest_dir().join(format!("../../configs/allocation_{tag}.conf")))
                .unwrap();
        assert_eq!(spec.axis, Axis::AC);
        let col = analytic_column(&spec);
        let (i, &(a, _)) = col
            .iter()
            .enumerate()
            .min_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
            .unwrap();
        assert!(
            i > 0 && i + 1 < col.len(),
            "allocation_{tag}: minimum at the edge ({a})"
        );
        assert!((0.3..=0.6).contains(&a), "allocation_{tag}: minimum at {a}");
    }
}

#[test]
fn power_sweeps_do_not_increase() {
    for tag in ["a", "b", "c"] {
        let spec = SweepSpec::load(&manifest_dir().join(format!("../../configs/power_{tag}.conf")))
            .unwrap();
        let col = analytic_column(&spec);
        for w in col.windows(2) {
            assert!(
                w[1].1 <= w[0].1 * (1.0 + 1e-12),
                "power_{tag}: {:?} -> {:?}",
                w[0],
                w[1]
            );
        }
    }
}

#[test]
fn relaxed_scenario_is_flagged() {
    let out = fasris(&[
        "sweep",
        "--config",
        manifest_dir()
            .join("../../configs/power_b.conf")
            .to_str()
            .unwrap(),
        "--mode",
        "analytic",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# note = N_c = 250")));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let unknown = write("unknown.conf", "P = 10\nbogus = 1\n");
    let out = fasris(&["sweep", "--config", unknown.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let invalid = write("invalid.conf", "a_C = 0.6\na_E = 0.4\n");
    let out = fasris(&["sweep", "--config", invalid.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a_C"));

    let bad_axis = write("axis.conf", "axis = a_C\nvalues = 0.2, 0.55\n");
    assert_eq!(
        fasris(&["sweep", "--config", bad_axis.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );

    let missing = dir.path().join("missing.conf");
    assert_eq!(
        fasris(&["sweep", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(fasris(&["ceiling", "--order", "0"]).status.code(), Some(1));
    assert_eq!(fasris(&["ks", "--samples", "500"]).status.code(), Some(1));
}

#[test]
fn out_flag_and_timing_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = fasris(&["sweep", "--timing", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "P,analytic,e_phi,e_psi_phi,e_psi_xi,mc_mean,mc_std_error,time_ms,error"
    );
    let row = &rows(&text)[0];
    assert!(row[7].parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn validation_reports_every_point() {
    let out = fasris(&["validate", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let r = rows(&text);
    assert_eq!(r.len(), 1);
    assert!(r[0][5] == "PASS" || r[0][5] == "FAIL");
}

#[test]
fn ceiling_report_meets_the_limit() {
    let out = fasris(&["ceiling"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# gamma_CC ceiling = 4\n# gamma_EC ceiling = 4\n"));
    let r = rows(&text);
    assert_eq!(r[0][0], "1000000");
    assert!(r[0][3].parse::<f64>().unwrap() < 0.05);
}

#[test]
fn ks_report_reproduces_reference_values() {
    let out = fasris(&[
        "ks",
        "--config",
        manifest_dir()
            .join("../../configs/ks.conf")
            .to_str()
            .unwrap(),
    ]);
    assert!(out.status.success());
    let r = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(r.len(), 5);
    assert!(r.iter().all(|row| row[3] == "PASS"), "{r:?}");
}
