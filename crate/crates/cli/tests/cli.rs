use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use anece_cli::commands::{cmd_compare, cmd_sweep, Axis, AxisRange};
use anece_cli::output::format_number;
use anece_cli::parse_scenario_str;
use proptest::prelude::*;
use tempfile::TempDir;

const ALL_USER: &str = r#"
schema = 1
scheme = "all_user"
seed = 7
mc_samples = 400

[network]
antennas = [2, 2, 2]
n_eve = 3
k2 = 2
"#;

const MODIFIED: &str = r#"
schema = 1
scheme = "modified_two_user"
seed = 3
mc_samples = 400

[two_user]
n1 = 2
n2 = 3
k = 7
n_eve = 6
"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn anece(args: &[&str], scenario: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anece"))
        .args(args)
        .arg("--scenario")
        .arg(scenario)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn formula_prints_one_json_object() {
    let dir = TempDir::new().unwrap();
    let o = anece(&["formula"], &write(&dir, "s.toml", ALL_USER));
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for (k, want) in [
        ("dof_phase1", 4),
        ("dof_phase2_lower", 4),
        ("dof_phase2_upper", 4),
        ("dof_gap", 0),
        ("dof_total", 8),
    ] {
        assert_eq!(v[k], want, "{k}");
    }
    let o = anece(&["formula"], &write(&dir, "m.toml", MODIFIED));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        (
            v["dof_phase1"].as_i64(),
            v["dof_phase2"].as_i64(),
            v["dof_total"].as_i64()
        ),
        (Some(6), Some(10), Some(16))
    );
}

#[test]
fn pairwise_formula_zero_when_eve_is_large() {
    let dir = TempDir::new().unwrap();
    let text = ALL_USER
        .replace("all_user", "pairwise")
        .replace("n_eve = 3", "n_eve = 4")
        .replace("k2 = 2", "k2 = 3");
    let o = anece(&["formula"], &write(&dir, "p.toml", &text));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["k2_session"], 1);
    assert_eq!(v["dof_phase2_upper"], 0);
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad_key = write(&dir, "a.toml", &ALL_USER.replace("n_eve", "n_eves"));
    let o = anece(&["formula"], &bad_key);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown key"));

    let short = write(&dir, "b.toml", &format!("{ALL_USER}k1 = 3\n"));
    let o = anece(&["formula"], &short);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).to_string();
    assert!(err.contains("k1") && err.contains("N_T−N_min"), "{err}");

    let missing = dir.path().join("nope.toml");
    assert_eq!(anece(&["formula"], &missing).status.code(), Some(2));
    let o = anece(
        &["pilots"],
        &write(&dir, "c.toml", &ALL_USER.replace("[2, 2, 2]", "[2]")),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_anece"))
        .arg("formula")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_anece"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_and_determinism() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "m.toml", MODIFIED);
    let a = anece(&["verify"], &s);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let csv = stdout(&a);
    assert!(csv.starts_with("name,measured,target,tolerance,passed\n"));
    assert!(csv.lines().count() > 10);
    assert!(csv.contains("negctl/slope_wrong_target") && csv.contains("negctl/identity_tampered"));
    assert_eq!(stdout(&anece(&["verify"], &s)), csv);

    assert_eq!(
        anece(&["verify", "--tamper", "gap_consistency"], &s)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        anece(&["verify", "--tamper", "no_such_identity"], &s)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        anece(&["verify", "--mc-samples", "1"], &s).status.code(),
        Some(2)
    );
    let low = anece(&["verify", "--mc-samples", "10", "--allow-low-samples"], &s);
    assert!(matches!(low.status.code(), Some(0 | 1)));

    let other_seed = stdout(&anece(&["verify", "--seed", "4"], &s));
    assert_ne!(other_seed, csv);
}

#[test]
fn verify_writes_out_file() {
    let dir = TempDir::new().unwrap();
    let s = write(&dir, "s.toml", ALL_USER);
    let out = dir.path().join("report.csv");
    let o = anece(&["verify", "--out", out.to_str().unwrap()], &s);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("rank/p_pair,100,100,0,true"));
    assert!(text.contains("eig/joint/1-2,12,12,0,true"));
}

#[test]
fn pilots_files_and_audit() {
    let dir = TempDir::new().unwrap();
    let s = write(
        &dir,
        "s.toml",
        &ALL_USER
            .replace("[2, 2, 2]", "[1, 1, 1]")
            .replace("n_eve = 3", "n_eve = 1"),
    );
    let out = dir.path().join("p.txt");
    let o = anece(&["pilots", "--out", out.to_str().unwrap()], &s);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank(P)=2 OK"));
    let m = anece_core::pilots::matrix_from_text(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(m.shape(), (3, 2));

    let s = write(&dir, "m.toml", MODIFIED);
    let o = anece(&["pilots", "--out", out.to_str().unwrap()], &s);
    assert_eq!(o.status.code(), Some(0));
    for (f, n) in [("p_p1.txt", 2), ("p_p2.txt", 3)] {
        let m = anece_core::pilots::matrix_from_text(
            &std::fs::read_to_string(dir.path().join(f)).unwrap(),
        )
        .unwrap();
        assert_eq!(m.shape(), (n, n));
    }
    assert_eq!(anece(&["pilots"], &s).status.code(), Some(2));
}

#[test]
fn sweep_examples() {
    let orig = parse_scenario_str(
        &ALL_USER
            .replace("[2, 2, 2]", "[2, 3]")
            .replace("k2 = 2", "k2 = 4"),
    )
    .unwrap();
    let csv = cmd_sweep(&orig, Axis::NEve, "0..8".parse().unwrap()).unwrap();
    assert_eq!(
        column(&csv, "dof_phase2_lower"),
        ["16", "16", "14", "12", "10", "8", "8", "8", "8"]
    );

    let modified = parse_scenario_str(MODIFIED).unwrap();
    let csv = cmd_sweep(&modified, Axis::K, "3..8".parse().unwrap()).unwrap();
    assert_eq!(
        column(&csv, "dof_phase2"),
        ["2", "6", "10", "10", "10", "10"]
    );

    let sym = parse_scenario_str(&ALL_USER.replace("n_eve = 3", "n_eve = 12")).unwrap();
    let csv = cmd_sweep(&sym, Axis::M, "2..6".parse().unwrap()).unwrap();
    assert_eq!(
        column(&csv, "dof_phase2_lower_plus"),
        ["8", "4", "0", "0", "0"]
    );

    assert!(cmd_sweep(&sym, Axis::K, "1..2".parse().unwrap()).is_err());
    assert!(cmd_sweep(&modified, Axis::M, "2..3".parse().unwrap()).is_err());
    assert!("3..1".parse::<AxisRange>().is_err());
    assert!("3-4".parse::<AxisRange>().is_err());
}

#[test]
fn compare_examples() {
    let pw = parse_scenario_str(
        &ALL_USER
            .replace("n_eve = 3", "n_eve = 7")
            .replace("k2 = 2", "k2 = 3"),
    )
    .unwrap();
    let csv = cmd_compare(&pw).unwrap();
    assert!(csv.contains("all_user,4,2,6,4,3\n"), "{csv}");
    assert!(csv.contains("pairwise,4,0,4,6,3\n"), "{csv}");

    let csv = cmd_compare(&parse_scenario_str(MODIFIED).unwrap()).unwrap();
    assert_eq!(column(&csv, "total_dof"), ["14", "16"]);

    let equal = parse_scenario_str(&MODIFIED.replace("n2 = 3", "n2 = 2")).unwrap();
    let csv = cmd_compare(&equal).unwrap();
    let totals = column(&csv, "total_dof");
    assert_eq!(totals[0], totals[1]);
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records()
        .map(|rec| rec.unwrap()[idx].to_string())
        .collect()
}

proptest! {
    #[test]
    fn csv_numbers_round_trip(x in prop::num::f64::NORMAL.prop_filter("moderate", |x| x.abs() > 1e-20 && x.abs() < 1e20)) {
        let text = format_number(x);
        let back: f64 = text.parse().unwrap();
        prop_assert_eq!(format_number(back), text.clone());
        prop_assert!(((back - x) / x).abs() <= 1e-11, "{x} -> {text}");
    }

    #[test]
    fn integers_round_trip_exactly(k in -1_000_000_000i64..1_000_000_000) {
        let text = format_number(k as f64);
        prop_assert_eq!(text.parse::<i64>().unwrap(), k);
    }
}
