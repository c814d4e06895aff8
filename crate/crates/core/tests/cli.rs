use std::fs;
use std::process::{Command, Output};

use sigwaste::environment::{Environment, TypeDomain};
use sigwaste::equilibrium;

fn sigwaste(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigwaste"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn unit_waste_column_is_textually_constant() {
    let o = sigwaste(&["waste", "--grid-points", "128"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,waste"));
    let mut n = 0;
    for line in lines {
        assert_eq!(line.split(',').nth(1), Some("5.00000000000e-1"), "{line}");
        n += 1;
    }
    assert_eq!(n, 128);
}

#[test]
fn solve_csv_round_trips() {
    let o = sigwaste(&["solve", "--beta", "2", "--sigma", "0.5", "--gamma", "3", "--s", "4", "--grid-points", "200"]);
    assert!(o.status.success());
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["theta", "action", "cost", "waste"]);

    let env = Environment::isoelastic(4.0, 2.0, 0.5, 3.0).unwrap();
    let dom = TypeDomain::log_spaced(1.0, 200).unwrap();
    let s = equilibrium::solve(&env, &dom).unwrap();
    for (row, (t, a)) in rows.iter().zip(s.grid().iter().zip(s.actions())) {
        assert!((row[0] / t - 1.0).abs() <= 1e-11);
        assert!((row[1] / a - 1.0).abs() <= 1e-11);
        assert!((row[3] - 0.8).abs() <= 1e-11);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(sigwaste(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sigwaste(&["solve", "--beta", "oops"]).status.code(), Some(2));
    assert_eq!(sigwaste(&["solve", "--beta", "-1"]).status.code(), Some(2));
    assert_eq!(sigwaste(&["solve", "--grid-points", "3"]).status.code(), Some(2));
    assert_eq!(sigwaste(&["verify-ic", "--grid-points", "128"]).status.code(), Some(0));

    let bad = sigwaste(&["verify-ic", "--scale", "1.5", "--grid-points", "128"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("incentive compatibility"));
}

#[test]
fn config_file_runs_and_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("waste.csv");
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "[benefit]\nstakes = 3.0\nbeta = 1.0\n[cost]\nsigma = 3.0\ngamma = 2.0\n[domain]\ngrid_points = 64\n[output]\npath = {:?}\nprecision = 6\n",
            out.display().to_string()
        ),
    )
    .unwrap();
    let o = sigwaste(&["waste", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    let (_, rows) = parse_csv(&text);
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r[1] == 0.25));
    assert!(text.lines().nth(1).unwrap().ends_with(",2.50000e-1"));

    fs::write(&cfg, "[benefit]\n[cost]\nstrain = \"quartic\"\n").unwrap();
    assert_eq!(sigwaste(&["waste", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("absent.toml");
    assert_eq!(sigwaste(&["waste", "--config", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn monte_carlo_output_is_seeded() {
    let args = ["tournament", "--n", "3", "--trials", "5000", "--seed", "11"];
    let a = sigwaste(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, sigwaste(&args).stdout);
    let c = sigwaste(&["tournament", "--n", "3", "--trials", "5000", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn counterexample_tables() {
    let o = sigwaste(&["counterexample", "--family", "quadcubic", "--s", "5"]);
    let (_, rows) = parse_csv(&stdout(&o));
    assert!((rows[0][1] - 1.0).abs() <= 1e-11 && (rows[0][2] - 0.4).abs() <= 1e-11);

    let o = sigwaste(&[
        "counterexample", "--family", "mixed", "--s", "3", "--weights", "1,2", "--gammas", "1,2", "--sigmas", "0.5,1.5",
        "--beta", "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // equal γ across terms degenerates to the isoelastic case
    let o = sigwaste(&[
        "counterexample", "--family", "mixed", "--s", "3", "--weights", "1,1", "--gammas", "2,2", "--sigmas", "1,1",
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn reproduce_is_byte_identical() {
    let a = sigwaste(&["reproduce"]);
    let b = sigwaste(&["reproduce"]);
    assert!(a.status.success(), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("10/10 criteria passed"));
}

#[test]
fn shipped_configs_solve() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");
    let mut seen = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let o = sigwaste(&["waste", "--config", path.to_str().unwrap()]);
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
        let (_, rows) = parse_csv(&stdout(&o));
        assert!(rows.iter().all(|r| r[1] > 0.0 && r[1] < 1.0));
        seen += 1;
    }
    assert_eq!(seen, 5);
}

#[test]
fn sweep_reports_every_run() {
    let o = sigwaste(&["sweep", "--stakes", "0.5,10", "--gammas", "0.5,2", "--grid-points", "64"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = parse_csv(&stdout(&o));
    assert_eq!(header, ["s", "gamma", "theta", "action", "cost", "waste"]);
    assert_eq!(rows.len(), 4 * 64);
    assert!(rows.iter().all(|r| (r[5] - 0.5).abs() <= 1e-11));
}
