use std::collections::BTreeSet;
use std::process::{Command, Output};

use proptest::prelude::*;
use surfspec::asymptotics::fixture_specs;
use surfspec::catalog::Ratio;
use surfspec::{RectBc, SurfaceSpec};
use surfspec_cli::conjecture::{Check, Report, Status};
use surfspec_cli::grammar::FAMILIES;
use surfspec_cli::{main_with, parse_spec, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfspec")).args(args).output().expect("run surfspec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("surfspec").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn labels_round_trip_for_every_reference_surface() {
    for spec in fixture_specs() {
        let label = spec.label();
        let back = parse_spec(&label).unwrap_or_else(|e| panic!("{}: {}", label, e));
        assert_eq!(back, spec);
        assert_eq!(back.label(), label);
    }
}

#[test]
fn grammar_covers_every_family() {
    let seen: BTreeSet<&str> = fixture_specs().iter().map(|s| s.family_name()).collect();
    let known: BTreeSet<&str> = FAMILIES.iter().copied().collect();
    assert_eq!(seen, known);
}

#[test]
fn count_sphere_example() {
    let o = bin(&["count", "sphere", "--at", "6"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    assert_eq!(stdout(&o), "t,count,closed_form\n6,9,9\n");
}

#[test]
fn asymptotics_example() {
    let (code, out, _) = in_process(&["asymptotics", "tri306090:bc=ND"]);
    assert_eq!(code, EXIT_PASS);
    let c = out.lines().find(|l| l.starts_with("C,")).unwrap();
    assert!(c.starts_with("C,-1/12,-0.0833333333333333"), "{}", c);
    let (_, sphere, _) = in_process(&["asymptotics", "gluedlune:m=2"]);
    assert!(sphere.contains("\nC,5/12,"), "{}", sphere);
    assert!(sphere.contains("sqrt(t+1/4)"));
}

#[test]
fn verify_example() {
    let o = bin(&["verify", "lune:m=2,bc=N", "--max-t", "100000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(EXIT_PASS));
    assert_eq!(stdout(&o), "pass\n");
    assert!(String::from_utf8(o.stderr).unwrap().contains(" s\n"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["count", "rect:a=1,bc=N", "--at", "1"][..],
        &["count", "sphere"],
        &["spectrum", "sphere", "--max-t", "-1"],
        &["avg", "sphere", "--grid", "5:1:10"],
        &["avg", "sphere", "--grid", "1:5:0"],
        &["avg", "sphere", "--grid", "0:5:3", "--log"],
        &["gprofile", "torus:a=1,b=1", "--grid", "10:20:5", "--order", "2"],
        &["freq", "sphere", "--window", "10:20", "--omega", "0.5:5:3"],
        &["proportions", "cube", "--max-t", "10"],
        &["conjecture", "sphere", "--max-t", "100"],
        &["frobnicate"],
    ] {
        let (code, _, err) = in_process(args);
        assert_eq!(code, EXIT_USAGE, "{:?}", args);
        assert!(!err.is_empty(), "{:?}", args);
    }
}

#[test]
fn spectrum_matches_count() {
    let (code, out, _) = in_process(&["spectrum", "hemisphere:bc=N", "--max-t", "1000"]);
    assert_eq!(code, EXIT_PASS);
    let total: u64 = out.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    let (_, count, _) = in_process(&["count", "hemisphere:bc=N", "--at", "1000"]);
    assert_eq!(count.lines().nth(1).unwrap(), format!("1000,{},{}", total, total));
}

#[test]
fn json_mirrors_csv() {
    let (_, csv, _) = in_process(&["count", "lune:m=3,bc=D", "--at", "2,12,30.5"]);
    let (_, json, _) = in_process(&["--format", "json", "count", "lune:m=3,bc=D", "--at", "2,12,30.5"]);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    for (line, row) in csv.lines().skip(1).zip(&rows) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<f64>().unwrap(), row["t"].as_f64().unwrap());
        assert_eq!(f[1], row["count"].to_string());
        let keys: Vec<&String> = row.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["t", "count", "closed_form"]);
    }
    assert_eq!(rows.len(), 3);
}

#[test]
fn reals_read_back_exactly() {
    let (_, out, _) = in_process(&["avg", "sphere", "--grid", "1:1000:7", "--log"]);
    for line in out.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(v.to_string(), field);
        }
    }
    let first = out.lines().nth(1).unwrap();
    assert!(first.starts_with("1,"));
    assert!(out.lines().last().unwrap().starts_with("1000,"));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["avg", "torus:a=1,b=1", "--grid", "10:5000:301"][..],
        &["freq", "sphere", "--window", "50:150", "--omega", "5:7:201", "--peaks"],
        &["proportions", "hextorus", "--max-t", "5000"],
        &["verify", "gluedlune:m=3", "--max-t", "20000", "--seed", "3"],
        &["--format", "json", "conjecture", "projsphere", "--max-t", "100000"],
    ] {
        let a = bin(args);
        let b = bin(args);
        assert_eq!(a.status.code(), Some(EXIT_PASS), "{:?}: {}", args, String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{:?}", args);
    }
}

#[test]
fn sphere_frequency_peaks_are_geodesics() {
    let (code, out, _) = in_process(&["freq", "sphere", "--window", "100:200", "--omega", "0.5:14:2701", "--peaks"]);
    assert_eq!(code, EXIT_PASS);
    let top: Vec<Vec<f64>> =
        out.lines().skip(1).take(2).map(|l| l.split(',').map(|f| f.parse().unwrap()).collect()).collect();
    for row in top {
        assert!((row[0] - row[3]).abs() < 0.05, "{:?}", row);
    }
}

#[test]
fn conjecture_summary_line() {
    let (code, out, _) = in_process(&["conjecture", "sphere", "--max-t", "100000"]);
    assert_eq!(code, EXIT_PASS, "{}", out);
    assert!(out.lines().last().unwrap().starts_with("conjecture,PASS,"));
    let failing = Report {
        spec: SurfaceSpec::Sphere,
        t_max: 1.0,
        checks: vec![
            Check { name: "mean", status: Status::Pass, detail: String::new() },
            Check { name: "frequencies", status: Status::Fail, detail: String::new() },
        ],
    };
    assert!(!failing.passed());
    assert_ne!(EXIT_FAIL, EXIT_PASS);
}

#[test]
fn list_shows_labels() {
    let (code, out, _) = in_process(&["list"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.starts_with("label,family,spherical,boundary\n"));
    assert!(out.contains("\"rect:a=3/2,b=1,bc=N\",rect,no,yes\n"));
    assert_eq!(out.lines().count(), fixture_specs().len() + 1);
}

#[test]
fn heat_reports_difference() {
    let (code, out, _) = in_process(&["heat", "sphere", "--at", "1"]);
    assert_eq!(code, EXIT_PASS);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert!((row[1] - 1.4184426386310551).abs() < 1e-12);
    assert!((row[3] - (row[1] - row[2])).abs() < 1e-15);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = in_process(&["--help"]);
    assert_eq!(code, EXIT_PASS);
    assert!(out.contains("conjecture"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rectangle_labels_round_trip(p in 1i64..500, q in 1i64..500, r in 1i64..500, s in 1i64..500, k in 0usize..6) {
        let bc = [RectBc::N, RectBc::D, RectBc::ND, RectBc::NM, RectBc::DM, RectBc::MM][k];
        let spec = SurfaceSpec::Rectangle { a: Ratio::new(p, q), b: Ratio::new(r, s), bc };
        prop_assert_eq!(parse_spec(&spec.label()).unwrap(), spec);
    }

    #[test]
    fn lune_labels_round_trip(m in 1u32..10_000, side in 0usize..2, eq in 0usize..2) {
        let bc = [surfspec::Bc::N, surfspec::Bc::D];
        for spec in [
            SurfaceSpec::Lune { m, bc: bc[side] },
            SurfaceSpec::HalfLune { m, side: bc[side], equator: bc[eq] },
            SurfaceSpec::GluedLune { m },
        ] {
            prop_assert_eq!(parse_spec(&spec.label()).unwrap(), spec);
        }
    }
}
