mod common;

use std::fs;
use std::path::Path;

use fvc_core::harness::{
    convergence_study, emit_artifacts, field_rows, find_benchmark, profile_csv, run_benchmark, Artifacts,
    PROFILE_HEADER,
};
use fvc_core::{SchemeConfig, SchemeKind};

const GOLDEN: &str = "tests/data/sod_sonic_fvc_200.csv";

fn sod_fvc_200_csv() -> String {
    let b = find_benchmark("sod_sonic").unwrap();
    let run = run_benchmark(&b, &SchemeConfig::fvc(), 200).unwrap();
    assert!(run.completed());
    let gas = run.config.gas().unwrap();
    profile_csv(&field_rows(&run.field, &gas, run.alpha.as_deref()).unwrap())
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

/// Set `FVC_UPDATE_GOLDEN=1` to rewrite the stored profile after an
/// intentional change to the scheme.
#[test]
fn sod_fvc_200_matches_golden_profile() {
    let csv = sod_fvc_200_csv();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN);
    if std::env::var_os("FVC_UPDATE_GOLDEN").is_some() {
        fs::write(&path, &csv).unwrap();
    }
    let golden = fs::read_to_string(&path).unwrap();
    if csv != golden {
        let got = column(&csv, "rho");
        let want = column(&golden, "rho");
        let worst = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        panic!("profile differs from {GOLDEN}; largest density change {worst:e}");
    }
}

#[test]
fn golden_profile_is_close_to_the_exact_solution() {
    // the stored profile itself must stay a sensible solution: its density
    // error against an independently bisected star state is ~4.5e-3
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN)).unwrap();
    let x = column(&golden, "x");
    let rho = column(&golden, "rho");
    let b = find_benchmark("sod_sonic").unwrap();
    let gas = fvc_core::GasModel::default();
    let exact = b.exact(&b.mesh(200).unwrap(), &gas).unwrap();
    let (p, _) = common::bisect_star((1.0, 0.75, 1.0), (0.125, 0.0, 0.1));
    // plateau between contact and shock
    let plateau: Vec<_> = exact.iter().filter(|q| common::rel(q.p, p) < 1e-9).collect();
    assert!(plateau.len() > 10);
    let l1: f64 = rho.iter().zip(&exact).map(|(a, e)| (a - e.rho).abs()).sum::<f64>() / 200.0;
    assert!(l1 > 3e-3 && l1 < 6e-3, "{l1}");
    assert!((x[0] - 0.0025).abs() < 1e-15);
}

#[test]
fn profile_csv_follows_the_schema() {
    let csv = sod_fvc_200_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), PROFILE_HEADER);
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 200);
    for r in rows {
        let fields: Vec<_> = r.split(',').collect();
        assert_eq!(fields.len(), 7);
        for f in fields {
            // 17 significant digits in scientific notation
            let mantissa = f.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.len(), 18, "{f}");
        }
    }

    let b = find_benchmark("sod_sonic").unwrap();
    let run = run_benchmark(&b, &SchemeConfig::of(SchemeKind::Hll), 50).unwrap();
    let gas = run.config.gas().unwrap();
    let hll = profile_csv(&field_rows(&run.field, &gas, None).unwrap());
    assert!(hll.lines().skip(1).all(|l| l.ends_with(',')));
}

fn emit_small(dir: &Path) -> Vec<String> {
    let b = find_benchmark("sod_sonic").unwrap();
    let runs: Vec<_> = SchemeKind::ALL
        .iter()
        .map(|&k| run_benchmark(&b, &b.scheme(k), 200).unwrap())
        .collect();
    let configs: Vec<_> = SchemeKind::ALL.iter().map(|&k| b.scheme(k)).collect();
    let conv = convergence_study(&b, &configs, &[50, 100], 1).unwrap();
    let artifacts = Artifacts {
        runs: runs.iter().collect(),
        convergence: Some(&conv),
        timing: None,
        plot_scripts: true,
    };
    let mut names: Vec<_> = emit_artifacts(&artifacts, dir)
        .unwrap()
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn artifacts_are_complete_and_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let names = emit_small(a.path());
    assert_eq!(names, emit_small(b.path()));
    for required in [
        "table1_reproduction.csv",
        "alpha_profile.csv",
        "riemann_invariants.csv",
        "sod_sonic_fvc_200.csv",
        "sod_sonic_exact_200.csv",
        "runs_summary.csv",
    ] {
        assert!(names.iter().any(|n| n == required), "missing {required}");
    }
    assert!(names.iter().any(|n| n.ends_with(".gp")));
    for n in &names {
        let x = fs::read(a.path().join(n)).unwrap();
        let y = fs::read(b.path().join(n)).unwrap();
        assert!(x == y, "{n} differs between identical runs");
    }
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join(GOLDEN)).unwrap();
    assert_eq!(fs::read_to_string(a.path().join("sod_sonic_fvc_200.csv")).unwrap(), golden);

    let table = fs::read_to_string(a.path().join("table1_reproduction.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "cells,rusanov,roe,hll,fvc");
    assert_eq!(table.lines().count(), 3);
}
