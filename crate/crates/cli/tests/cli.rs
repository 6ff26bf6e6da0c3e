//! End-to-end checks of the binary: output schemas, round-trips, exit
//! codes, and the golden-table comparison with an injected fault.

use std::path::Path;
use std::process::{Command, Output};

fn carlitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carlitz"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = carlitz(args);
    assert!(
        out.status.success(),
        "carlitz {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn data_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

#[test]
fn wtable_csv_schema() {
    let out = stdout_of(&["wtable", "--prime", "11"]);
    assert_eq!(out, "p,x,W\n11,2,3\n11,3,6\n11,4,10\n11,5,3\n11,6,1\n");
}

#[test]
fn wtable_json_round_trip() {
    let out = stdout_of(&["wtable", "--prime", "13", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["p"], 13);
    assert_eq!(v["L"], 5);
    let profile = v["profile"].as_object().unwrap();
    let csv = stdout_of(&["wtable", "--prime", "13"]);
    for line in csv.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(profile[f[1]].as_u64().unwrap().to_string(), f[2]);
    }
    assert_eq!(profile.len(), csv.lines().count() - 1);
    let sigma = v["sigma"].as_f64().unwrap();
    let g = v["g"].as_f64().unwrap();
    assert!(sigma.is_finite() && g > 0.0);
}

#[test]
fn csv_emit_parse_round_trip() {
    // every emitted row parses back to the same (p, x, W) triple
    let out = stdout_of(&["wtable", "--prime", "31"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("p,x,W"));
    let rows: Vec<(u64, u32, u64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].parse().unwrap(),
            )
        })
        .collect();
    let emitted: String = rows
        .iter()
        .map(|(p, x, w)| format!("{p},{x},{w}\n"))
        .collect();
    assert_eq!(format!("p,x,W\n{emitted}"), out);
    assert_eq!(rows.first(), Some(&(31, 2, 8)));
    assert_eq!(rows.last().map(|&(_, _, w)| w), Some(1));
}

#[test]
fn series_subcommands() {
    assert_eq!(
        stdout_of(&["lmin", "--primes", "5..13"]),
        "p,L\n5,3\n7,4\n11,6\n13,5\n"
    );
    assert_eq!(
        stdout_of(&["nres", "--primes", "5..13"]),
        "p,n\n5,2\n7,3\n11,2\n13,2\n"
    );
    let gauss = stdout_of(&["gauss", "--prime", "11"]);
    assert!(gauss.starts_with("p,sigma,g,discrepancy\n11,"));
}

#[test]
fn verify_exit_codes() {
    let ok = carlitz(&["verify", "--file", &data_path("ex4.seq")]);
    assert!(ok.status.success());
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "verdict true\n");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.seq");
    std::fs::write(&bad, "0\n1\n3\n").unwrap();
    let out = carlitz(&["verify", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "verdict false\n");
}

#[test]
fn error_record_is_machine_readable() {
    let out = carlitz(&["wtable", "--prime", "9"]);
    assert!(!out.status.success());
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert!(err["error"].as_str().unwrap().contains('9'));
}

#[test]
fn table_check_pass_and_fault_injection() {
    let reference = data_path("wtable_reference.csv");
    let out = stdout_of(&[
        "table-check",
        "--reference",
        &reference,
        "--min-p",
        "5",
        "--max-p",
        "31",
    ]);
    assert!(out.ends_with("# pass cells=180 mismatches=0\n"), "{out}");

    // identical reports across worker counts
    for workers in ["4", "8"] {
        let again = stdout_of(&[
            "table-check",
            "--reference",
            &reference,
            "--min-p",
            "5",
            "--max-p",
            "31",
            "--workers",
            workers,
        ]);
        assert_eq!(again, out);
    }

    // corrupt exactly one cell
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    let text = std::fs::read_to_string(&reference).unwrap();
    let corrupted = text.replacen("11,4,10", "11,4,11", 1);
    assert_ne!(corrupted, text);
    std::fs::write(&bad, corrupted).unwrap();
    let out = carlitz(&[
        "table-check",
        "--reference",
        bad.to_str().unwrap(),
        "--min-p",
        "5",
        "--max-p",
        "31",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let report = String::from_utf8(out.stdout).unwrap();
    assert_eq!(report.matches(",mismatch\n").count(), 1);
    assert!(report.contains("11,4,11,10,mismatch\n"));
    assert!(report.ends_with("# fail cells=180 mismatches=1\n"));
}

#[test]
fn plot_data_series_and_empty_range() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("plots");
    stdout_of(&[
        "plot-data",
        "--primes",
        "5..13",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let lseries = std::fs::read_to_string(out_dir.join("lseries.dat")).unwrap();
    assert!(lseries.starts_with("# figure:"));
    let points: Vec<&str> = lseries.lines().skip(1).collect();
    assert_eq!(points, vec!["3 3", "4 4", "5 6", "6 5"]);
    for name in ["sigma.dat", "discrepancy.dat"] {
        let series = std::fs::read_to_string(out_dir.join(name)).unwrap();
        assert!(series.starts_with("# figure:"));
        assert_eq!(series.lines().count(), 5);
    }
    let disc = std::fs::read_to_string(out_dir.join("discrepancy.dat")).unwrap();
    assert!(disc.lines().nth(1).unwrap().starts_with("3 "));

    let empty_dir = dir.path().join("empty");
    stdout_of(&[
        "plot-data",
        "--primes",
        "24..28",
        "--out-dir",
        empty_dir.to_str().unwrap(),
    ]);
    for name in ["lseries.dat", "sigma.dat", "discrepancy.dat"] {
        let series = std::fs::read_to_string(empty_dir.join(name)).unwrap();
        assert_eq!(series.lines().count(), 1, "{name} should be header-only");
        assert!(series.starts_with("# figure:"));
    }
}

#[test]
fn plot_data_budget_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("plots");
    stdout_of(&[
        "plot-data",
        "--primes",
        "5..31",
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--node-budget",
        "1",
    ]);
    let lseries = std::fs::read_to_string(out_dir.join("lseries.dat")).unwrap();
    assert!(lseries.contains("# truncated: node budget 1 exceeded after p=5"));
    assert_eq!(lseries.lines().count(), 3);
}

#[test]
fn workers_env_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_carlitz"))
        .args(["wtable", "--prime", "31"])
        .env("CARLITZ_WORKERS", "4")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        stdout_of(&["wtable", "--prime", "31", "--workers", "1"])
    );

    let bad = Command::new(env!("CARGO_BIN_EXE_carlitz"))
        .args(["wtable", "--prime", "31"])
        .env("CARLITZ_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn carlitz_and_paley_output() {
    let out = stdout_of(&["carlitz", "--order", "9"]);
    assert!(out.starts_with("# q=9 p=3 k=2 maps=81 expected=81\n"));
    assert_eq!(out.lines().count(), 2 + 81);
    let constants = out.lines().filter(|l| l.contains(",constant,")).count();
    assert_eq!(constants, 9);

    let paley = stdout_of(&["paley", "--order", "13"]);
    assert_eq!(paley, "q,simple\n13,true\n");
}

#[test]
fn curve_output() {
    let out = stdout_of(&["curve", "--s", "2", "--prime", "101"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("p,s,c4,c3,c2,c1,c0,disc,affine_count,trace,chi_c4")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "101");
    let trace: i64 = row[9].parse().unwrap();
    assert!(trace.abs() as f64 <= 2.0 * 101f64.sqrt());
}
