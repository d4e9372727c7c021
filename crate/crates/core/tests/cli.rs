use std::fs;
use std::process::Command;

use clap::Parser;
use damped_search::cli::{check_table, fmt_f64, read_table, GridSpec, PhiArg, RunConfig, Table};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_damped-search"))
}

fn run_to_file(args: &[&str]) -> (i32, Vec<u8>, String) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = bin().args(args).arg("--out").arg(&path).output().unwrap();
    let bytes = fs::read(&path).unwrap_or_default();
    (
        out.status.code().unwrap(),
        bytes,
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

const COMMANDS: &[&[&str]] = &[
    &[
        "eigencurve",
        "--n",
        "10000",
        "--m",
        "1",
        "--grid",
        "0:1.2:40",
    ],
    &[
        "cost-surface",
        "--n-list",
        "64,256",
        "--m",
        "1",
        "--grid",
        "0:1.5:5",
    ],
    &[
        "trajectory",
        "--n",
        "10000",
        "--m",
        "40",
        "--phi",
        "critical-m1",
        "--steps",
        "50",
    ],
    &[
        "trajectory",
        "--n",
        "500",
        "--m",
        "3",
        "--phi",
        "schedule",
        "--steps",
        "20",
    ],
    &["ratio", "--n", "1000", "--m-list", "1,5,250"],
    &[
        "validate", "--n", "64", "--m", "4", "--phi", "critical", "--steps", "30", "--seed", "11",
    ],
    &[
        "lindblad", "--n", "100", "--m", "1", "--c", "2", "--time", "1", "--dt", "0.01",
    ],
];

#[test]
fn output_is_deterministic() {
    for args in COMMANDS {
        let (code_a, a, _) = run_to_file(args);
        let (code_b, b, _) = run_to_file(args);
        assert_eq!(code_a, 0, "{args:?}");
        assert_eq!(code_b, 0);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn output_round_trips() {
    for args in COMMANDS {
        let (_, bytes, _) = run_to_file(args);
        assert!(!bytes.contains(&b'\r'));
        let table = read_table(bytes.as_slice()).unwrap();
        assert!(!table.rows.is_empty());
        for row in &table.rows {
            assert_eq!(row.len(), table.header.len());
            for cell in row {
                let v: f64 = cell.parse().unwrap();
                assert!(v.is_finite());
            }
        }
    }
}

#[test]
fn headers_follow_the_documented_columns() {
    let header = |args: &[&str]| {
        read_table(run_to_file(args).1.as_slice())
            .unwrap()
            .header
            .join(",")
    };
    assert_eq!(header(COMMANDS[0]), "phi,re1,im1,re2,im2,re3,im3");
    assert_eq!(header(COMMANDS[1]), "n,phi,expected_calls,best_r");
    assert_eq!(header(COMMANDS[2]), "iter,x,z,t");
    assert_eq!(header(COMMANDS[4]), "m,scheduled,baseline,ratio");
    assert_eq!(header(COMMANDS[6]), "time,x,z,t");
}

#[test]
fn eigencurve_rows_follow_the_grid() {
    let (_, bytes, _) = run_to_file(COMMANDS[0]);
    let table = read_table(bytes.as_slice()).unwrap();
    let phis = table.column_f64("phi").unwrap();
    assert_eq!(phis.len(), 40);
    assert_eq!(phis[0], 0.0);
    assert_eq!(phis[39], 1.2);
    assert!(phis.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn floats_round_trip_exactly() {
    for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e17, 0.0] {
        assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
    }
}

#[test]
fn critical_m1_uses_single_target_angle() {
    // cos φ = (√9999 − 1)² / (√9999 + 1)²
    let space = damped_search::SearchSpace::new(10_000, 40).unwrap();
    let phi = PhiArg::CriticalM1.resolve(&space, 10).unwrap();
    let r = 9999f64.sqrt();
    assert_eq!(phi.len(), 1);
    assert!((phi[0].cos() - ((r - 1.0) / (r + 1.0)).powi(2)).abs() < 1e-15);
}

#[test]
fn grid_spec_validation() {
    assert_eq!(
        GridSpec {
            min: 0.0,
            max: 1.0,
            points: 3
        }
        .values(),
        vec![0.0, 0.5, 1.0]
    );
    for bad in ["1:0:5", "0:1:1", "0:1", "a:1:3", "0:inf:3", "0:1:-2"] {
        assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
    }
}

#[test]
fn bad_arguments_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["eigencurve", "--n", "100", "--m", "1", "--grid", "1:0:5"],
        &[
            "trajectory",
            "--n",
            "100",
            "--m",
            "0",
            "--phi",
            "0.2",
            "--steps",
            "3",
        ],
        &[
            "trajectory",
            "--n",
            "100",
            "--m",
            "1",
            "--phi",
            "2.0",
            "--steps",
            "3",
        ],
        &[
            "trajectory",
            "--n",
            "100",
            "--m",
            "1",
            "--phi",
            "nan",
            "--steps",
            "3",
        ],
        &["ratio", "--n", "100", "--m-list", "1", "--eps", "0.5"],
    ] {
        let out = bin().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn oversized_simulation_is_an_argument_error() {
    let out = bin()
        .args([
            "validate", "--n", "5000", "--m", "1", "--phi", "0", "--steps", "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deviation_above_tolerance_fails_with_one() {
    let config = RunConfig::try_parse_from([
        "damped-search",
        "validate",
        "--n",
        "8",
        "--m",
        "1",
        "--phi",
        "0",
        "--steps",
        "1",
    ])
    .unwrap();
    let mut table = Table {
        header: vec!["iter".into(), "deviation".into()],
        rows: vec![
            vec!["0".into(), fmt_f64(0.0)],
            vec!["1".into(), fmt_f64(1e-15)],
        ],
    };
    assert!(check_table(&config, &table).is_ok());
    table.rows[1][1] = fmt_f64(3e-9);
    let err = check_table(&config, &table).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("invariant violated"));
}

#[test]
fn validate_reports_deviation_column() {
    let (code, bytes, stderr) = run_to_file(COMMANDS[5]);
    assert_eq!(code, 0, "{stderr}");
    let table = read_table(bytes.as_slice()).unwrap();
    let dev = table.column_f64("deviation").unwrap();
    assert_eq!(dev.len(), 31);
    assert!(dev.iter().all(|d| *d <= 1e-10));
}
