use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mob-rkhs"))
        .args(args)
        .env_remove("MOB_RKHS_LOG")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Parameters of the non-empty summands, in ladder order.
fn ladder(out: &str) -> Vec<f64> {
    out.lines()
        .skip_while(|l| !l.trim_start().starts_with("m "))
        .skip(1)
        .take_while(|l| !l.starts_with("check,"))
        .filter_map(|l| l.split_whitespace().nth(2)?.parse().ok())
        .collect()
}

fn csv_rows(out: &str) -> Vec<Vec<String>> {
    out.lines()
        .skip_while(|l| *l != "check,residual,tolerance,pass")
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn decompose_prints_the_even_ladder() {
    let o = run(&["decompose", "--lambdas", "1,1", "--degree", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let l = ladder(&stdout(&o));
    assert_eq!(l.len(), 11);
    for (m, p) in l.iter().enumerate() {
        assert!((p - 2.0 - 2.0 * m as f64).abs() < 1e-6, "{l:?}");
    }
}

#[test]
fn symmetric_part_keeps_every_other_step() {
    let o = run(&["decompose", "--lambdas", "1,1", "--parity", "symmetric"]);
    assert_eq!(o.status.code(), Some(0));
    let l = ladder(&stdout(&o));
    for (want, got) in [2.0, 6.0, 10.0].iter().zip(&l) {
        assert!((want - got).abs() < 1e-6, "{l:?}");
    }
}

#[test]
fn invalid_configuration_exits_with_two() {
    for args in [
        &["decompose", "--lambdas", "0,1"][..],
        &["decompose", "--lambdas", "1,1", "--degree", "30"],
        &["verify", "--lambdas", "1,2", "--parity", "symmetric"],
        &["verify", "--lambdas", "1,1", "--tol", "bogus=1"],
        &["verify", "--lambdas", "1,1", "--tol", "ladder"],
        &["verify", "--polydisc", "1,1"],
        &["verify", "--lambdas", "1,1", "--polydisc", "1,1,1"],
        &["verify"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_passes_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("checks.csv");
    let o = run(&[
        "verify",
        "--lambdas",
        "1,2",
        "--degree",
        "12",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let written = std::fs::read_to_string(&path).unwrap();
    let rows = csv_rows(&written);
    let names: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(
        names,
        [
            "cocycle_identity",
            "kernel_transform",
            "block_structure",
            "shift_equivalence",
            "intertwining"
        ]
    );
    for r in &rows {
        let residual: f64 = r[1].parse().unwrap();
        let tol: f64 = r[2].parse().unwrap();
        assert!(residual <= tol && r[3] == "true", "{r:?}");
    }
    assert_eq!(stdout(&o).lines().last(), written.lines().last());
}

#[test]
fn injected_noise_breaks_shift_equivalence() {
    let o = run(&["verify", "--lambdas", "1,1", "--inject-noise", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    let rows = csv_rows(&stdout(&o));
    let shift = rows.iter().find(|r| r[0] == "shift_equivalence").unwrap();
    assert!(shift[1].parse::<f64>().unwrap() > 1e-4);
    assert_eq!(shift[3], "false");
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL shift_equivalence"));
    // loosening the tolerance turns the same run green
    let o = run(&[
        "verify",
        "--lambdas",
        "1,1",
        "--inject-noise",
        "1e-3",
        "--tol",
        "shift_equivalence=1e-2",
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn polydisc_multiplicities_count_up() {
    let o = run(&["verify", "--polydisc", "1,1,1", "--degree", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let counts: Vec<usize> = out
        .lines()
        .skip(1)
        .take_while(|l| !l.starts_with("check,"))
        .map(|l| l.split_whitespace().nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(&counts[..3], &[1, 2, 3]);
}

#[test]
fn json_reports_are_versioned_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&[
            "verify",
            "--lambdas",
            "0.5,1.5",
            "--degree",
            "8",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    assert_eq!(ta, std::fs::read_to_string(&b).unwrap());
    let v: serde_json::Value = serde_json::from_str(&ta).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 20240331);
    assert_eq!(v["checks"].as_array().unwrap().len(), 5);

    let d = dir.path().join("d.json");
    let o = run(&[
        "decompose",
        "--lambdas",
        "2,1",
        "--degree",
        "10",
        "--out",
        d.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&d).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["summands"].as_array().unwrap().len(), 11);
    assert!((v["lambda_hat"].as_f64().unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn seed_changes_samples_but_not_the_verdict() {
    let a = run(&["verify", "--lambdas", "1,2", "--degree", "8", "--seed", "7"]);
    let b = run(&["verify", "--lambdas", "1,2", "--degree", "8", "--seed", "8"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    assert_ne!(stdout(&a), stdout(&b));
}
