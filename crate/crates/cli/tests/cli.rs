use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn eupgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eupgame")).args(args).output().expect("run eupgame")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn analyze_mixed_bell() {
    let v = json(&eupgame(&["analyze", "--state", "mixed-bell:0.01"]));
    assert!((v["I"].as_f64().unwrap() - 0.0100).abs() < 5e-4);
    assert_eq!(v["k_opt"], 52);
    assert!((v["ratio"].as_f64().unwrap() - 52.02).abs() < 0.01);
    for key in ["S_A", "S_B", "S_AB", "S_A_given_B", "C", "D", "opt_angles", "optimizer_evals", "measured_subsystem"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn analyze_werner_zero_has_no_correlations() {
    let v = json(&eupgame(&["analyze", "--state", "werner:0"]));
    for key in ["I", "C", "D"] {
        assert!(v[key].as_f64().unwrap().abs() < 1e-9, "{key} = {}", v[key]);
    }
    assert_eq!(v["k_opt"], "none");
    assert_eq!(v["ratio"], "nan");
}

#[test]
fn analyze_csv_has_one_row() {
    let o = eupgame(&["analyze", "--state", "werner:0.5", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

#[test]
fn non_psd_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    // diag(1.5, -0.5, 0, 0): Hermitian, unit trace, one negative eigenvalue
    let mut text = String::from("2 2\n");
    for i in 0..4 {
        for j in 0..4 {
            let v = match (i, j) {
                (0, 0) => 1.5,
                (1, 1) => -0.5,
                _ => 0.0,
            };
            text.push_str(&format!("{v} 0\n"));
        }
    }
    fs::write(&path, text).unwrap();
    let lit = format!("file:{}", path.display());
    let o = eupgame(&["analyze", "--state", &lit]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("positive semidefinite"), "{}", stderr(&o));
}

#[test]
fn file_state_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bell.txt");
    let rho = eupgame_core::mixed_bell(0.01).unwrap();
    fs::write(&path, eupgame_core::literal::format_state_text(&rho).unwrap()).unwrap();
    let from_file = json(&eupgame(&["analyze", "--state", &format!("file:{}", path.display())]));
    let direct = json(&eupgame(&["analyze", "--state", "mixed-bell:0.01"]));
    assert!((from_file["C"].as_f64().unwrap() - direct["C"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn bad_literals_exit_two() {
    for args in [
        vec!["analyze", "--state", "mixed-bell:1.5"],
        vec!["analyze", "--state", "nonsense"],
        vec!["analyze"],
        vec!["game", "--state", "mixed-bell:1", "--measure", "z"],
        vec!["game", "--state", "mixed-bell:1", "--measure", "z", "q"],
        vec!["sweep", "--range", "0.5", "0.1", "3"],
        vec!["sweep", "--range", "0", "1", "1"],
        vec!["analyze", "--state", "werner:0.5", "--grid", "10by10"],
    ] {
        let o = eupgame(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
}

#[test]
fn unwritable_output_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let o = eupgame(&["sweep", "--range", "0.1", "0.2", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn sweep_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = eupgame(&["sweep", "--range", "0", "1", "5", "--out", p.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "a,S_A,S_B,S_AB,S_A_given_B,I,C,D,ratio,k_opt");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "0,0,0,0,0,0,0,0,nan,none");
    assert!(lines[5].starts_with("1,1,1,0,-1,2,1,1,2,2"), "{}", lines[5]);
}

#[test]
fn game_reports_tightening() {
    let v = json(&eupgame(&["game", "--state", "mixed-bell:0.01", "--measure", "z", "x", "y"]));
    assert_eq!(v["tightened"], true);
    assert!((v["correlation_gap"].as_f64().unwrap() - 0.0094).abs() < 1e-4);
    assert_eq!(v["players"].as_array().unwrap().len(), 3);
    let v = json(&eupgame(&["game", "--state", "mixed-bell:1", "--measure", "z", "--measure", "x"]));
    assert!(v["slack"].as_f64().unwrap().abs() < 1e-6);
}

#[test]
fn game_shots_are_seeded() {
    let args = ["game", "--state", "werner:0.3", "--measure", "z", "x", "--shots", "1000", "--seed", "9"];
    let a = eupgame(&args);
    let b = eupgame(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let counts = v["sampled"][0]["counts"].as_array().unwrap();
    assert_eq!(counts.iter().map(|c| c.as_u64().unwrap()).sum::<u64>(), 1000);
}

#[test]
fn bound_reports_overlap_for_pairs() {
    let v = json(&eupgame(&["bound", "--measure", "z", "x"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((v["minus_log2_c"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let v = json(&eupgame(&["bound", "--measure", "z", "x", "y", "--state", "mixed-bell:0.01"]));
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 0.01);
    assert!(v.get("state_bound_term").is_some());
}
