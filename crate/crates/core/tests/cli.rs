use std::path::Path;
use std::process::Command;

use churate::experiments::{builtin_scenarios, run, RunOptions, ScenarioKind};

fn churate() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_churate"));
    for var in ["CHURATE_SCENARIO", "CHURATE_SCENARIO_FILE", "CHURATE_CONFIG", "CHURATE_OUT", "CHURATE_SEED"] {
        cmd.env_remove(var);
    }
    cmd
}

fn read_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn list_names_every_builtin() {
    let out = churate().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in builtin_scenarios() {
        assert!(text.contains(&s.name), "{} missing from {text}", s.name);
    }
}

#[test]
fn run_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = churate()
        .args(["run", "--scenario", "fig9a", "--seed", "3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_rows(&dir.path().join("fig9a.csv"));
    assert_eq!(rows[0].join(","), "bw_over_fc,mode,rate_bps");
    assert_eq!(rows.len(), 1 + 20 * 3);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("fig9a.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["scenario"], "fig9a");
    for key in ["git_hash", "tolerances", "wall_time_s"] {
        assert!(meta.get(key).is_some(), "{key} missing");
    }
}

#[test]
fn scenario_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = churate()
        .args(["run", "--out"])
        .arg(dir.path())
        .env("CHURATE_SCENARIO", "fig7d")
        .env("CHURATE_JOBS", "1")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("fig7d.csv").exists());
}

#[test]
fn config_override_changes_the_link() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"distance_m": 2000.0}"#).unwrap();
    for (sub, extra) in [("a", None), ("b", Some(&cfg))] {
        let mut cmd = churate();
        cmd.args(["run", "--scenario", "fig9a", "--out"]).arg(dir.path().join(sub));
        if let Some(p) = extra {
            cmd.arg("--config").arg(p);
        }
        assert!(cmd.status().unwrap().success());
    }
    let a = read_rows(&dir.path().join("a/fig9a.csv"));
    let b = read_rows(&dir.path().join("b/fig9a.csv"));
    let rate = |r: &Vec<String>| r[2].parse::<f64>().unwrap();
    assert!(rate(&b[1]) < rate(&a[1]));
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = churate()
        .args(["run", "--scenario", "fig99", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    let tol = churate()
        .args(["run", "--scenario", "fig9a", "--rel-tol", "2", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(tol.status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"fc_hz": -1}"#).unwrap();
    let cfg = churate()
        .args(["run", "--scenario", "fig9a", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(cfg.status.code(), Some(2));
}

#[test]
fn scenario_file_runs() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.json");
    std::fs::write(
        &file,
        r#"{
  "name": "tiny",
  "description": "two sizes",
  "kind": "fraction_vs_size",
  "base": {"fc_hz": 1e9, "bw_hz": 2e8},
  "sweeps": [
    {"parameter": "lambda_over_a", "values": [8, 12]},
    {"parameter": "bw_over_fc", "values": [0.2]}
  ],
  "matching_modes": ["optimal", "none"]
}"#,
    )
    .unwrap();
    let out = churate()
        .args(["run", "--scenario-file"])
        .arg(&file)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_rows(&dir.path().join("tiny.csv"));
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r[4] == "ok"));
}

/// Headers the plotting side reads.
#[test]
fn csv_headers_are_fixed() {
    let expected = [
        (ScenarioKind::SnrProfile, "f_hz,lambda_over_a,mode,snr"),
        (ScenarioKind::FractionVsSize, "lambda_over_a,bw_over_fc,mode,fraction,status"),
        (ScenarioKind::RateVsBw, "bw_over_fc,mode,rate_bps"),
        (ScenarioKind::FractionVsPower, "lambda_over_a,power_w,mode,fraction"),
        (ScenarioKind::InterferenceVsDensity, "rho,lambda_over_a,mode,rate_ratio,status"),
    ];
    for (kind, header) in expected {
        assert_eq!(kind.header(), header);
    }
    for s in builtin_scenarios().into_iter().filter(|s| s.kind != ScenarioKind::InterferenceVsDensity) {
        let table = run(&s, &RunOptions::default()).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(s.kind.header()));
        let width = s.kind.header().split(',').count();
        for line in lines {
            let cells: Vec<&str> = line.split(',').collect();
            assert_eq!(cells.len(), width, "{line}");
            // numbers carry nine significant digits in scientific notation
            for c in cells.iter().filter(|c| c.parse::<f64>().is_ok()) {
                let mantissa = c.split('e').next().unwrap().trim_start_matches('-');
                assert_eq!(mantissa.len(), 10, "{c}");
            }
        }
    }
}

#[test]
fn snr_profile_matches_golden_file() {
    let s = builtin_scenarios().into_iter().find(|s| s.name == "fig7a").unwrap();
    let got = run(&s, &RunOptions::default()).unwrap().to_csv();
    let golden = include_str!("data/fig7a_snr.csv");
    let parse = |t: &str| -> Vec<Vec<String>> {
        t.lines().map(|l| l.split(',').map(str::to_owned).collect()).collect()
    };
    let (got, golden) = (parse(&got), parse(golden));
    assert_eq!(got.len(), golden.len());
    assert_eq!(got[0], golden[0]);
    for (g, w) in got[1..].iter().zip(&golden[1..]) {
        assert_eq!(g[2], w[2]);
        for col in [0, 1, 3] {
            let (a, b): (f64, f64) = (g[col].parse().unwrap(), w[col].parse().unwrap());
            assert!((a - b).abs() <= 1e-6 * b.abs(), "{g:?} vs {w:?}");
        }
    }
    // every profile is single-peaked over the band
    for ratio in ["2.00000000e1", "1.50000000e1", "1.00000000e1"] {
        for mode in ["optimal", "none"] {
            let snr: Vec<f64> = got[1..]
                .iter()
                .filter(|r| r[1] == ratio && r[2] == mode)
                .map(|r| r[3].parse().unwrap())
                .collect();
            assert_eq!(snr.len(), 512);
            let peak = snr.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
            assert!(snr[..=peak].windows(2).all(|w| w[0] <= w[1]));
            assert!(snr[peak..].windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
