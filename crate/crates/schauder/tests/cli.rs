use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use schauder::io;
use schauder_core::harness::GaussianSource;
use schauder_core::ops::DiffOperator;
use schauder_core::{Germ, LatticeWindow, Scaling, C64};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schauder")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    serde_json::from_str(stdout(o).trim()).expect("valid JSON")
}

fn zero_germ(dir: &Path) -> String {
    let w = LatticeWindow::centered(Scaling::isotropic(2), 1.0, 3).unwrap();
    let path = dir.join("zero.csv");
    io::write_germ(&path, &Germ::zeros(w.clone(), Germ::all_bases(&w))).unwrap();
    path.display().to_string()
}

#[test]
fn ellipticity_examples() {
    let o = run(&["ellipticity", "--preset", "laplacian", "--eps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("verdict: elliptic"), "{}", stdout(&o));
    assert!(stdout(&o).contains("margin"));

    let o = run(&["ellipticity", "--preset", "eps-degenerate", "--eps", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("verdict: not-elliptic"), "{text}");
    assert!(text.contains("continuum symbol vanishes"), "{text}");

    let v = json(&run(&["ellipticity", "--preset", "heat", "--json"]));
    assert_eq!(v["verdict"], "elliptic");
}

#[test]
fn norm_of_zero_germ_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let germ = zero_germ(dir.path());
    let o = run(&["norm", "--kind", "G-eta", "--eta", "1.5", "--germ", &germ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("= 0e0"), "{}", stdout(&o));
    let v = json(&run(&["norm", "--kind", "g-eta-alpha", "--eta", "1.5", "--alpha", "0.5", "--germ", &germ, "--json"]));
    assert_eq!(v["value"], 0.0);
    assert_eq!(v["window"]["label"], "window-restricted");
    let v = json(&run(&["norm", "--kind", "G-gamma", "--gamma", "-0.5", "--germ", &germ, "--json"]));
    assert_eq!(v["value"], 0.0);
}

#[test]
fn every_subcommand_has_help_and_json() {
    for sub in ["norm", "symbol", "ellipticity", "liouville", "weights", "probe", "extend"] {
        let o = run(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(stdout(&o).contains("--json"), "{sub} help lacks --json");
    }
    let v = json(&run(&["symbol", "--preset", "laplacian", "--theta", "0.5,-1", "--json"]));
    assert!(v["discrete"][0].as_f64().unwrap() < 0.0);
    let v = json(&run(&["liouville", "--preset", "laplacian", "--dim", "1", "--eta", "1.5", "--json"]));
    assert_eq!(v["kernel"]["dim"], 2);
    assert_eq!(v["zeros"].as_array().unwrap().len(), 0);
    let v = json(&run(&["weights", "--scaling", "2,1", "--eta", "3.5", "--json"]));
    assert_eq!(v["verified"], true);
}

#[test]
fn exit_codes() {
    let o = run(&["norm", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["ellipticity", "--preset", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nonsense"), "{}", stderr(&o));
    let o = run(&["probe", "--preset", "laplacian", "--eta", "2.5", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(1), "eta above the operator order");

    let dir = tempfile::tempdir().unwrap();
    let germ = zero_germ(dir.path());
    // Every probe point of this weight system lies far outside a 7 x 7 window.
    let o = run(&["weights", "--scaling", "1,1", "--eta", "1.5", "--germ", &germ, "--x", "1,1", "--y", "0,0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("window too small"));
}

#[test]
fn malformed_operator_file_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.txt");
    std::fs::write(&path, "d=2 s=1,1 m=2\ngamma=1,0 delta=1 re=1\n").unwrap();
    let o = run(&["ellipticity", "--operator-file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("op.txt:2") && err.contains("delta"), "{err}");
    assert_eq!(err.trim().lines().count(), 1);

    io::write_text(&path, &io::operator_to_string(&DiffOperator::cauchy_riemann())).unwrap();
    let v = json(&run(&["ellipticity", "--operator-file", path.to_str().unwrap(), "--json"]));
    assert_eq!(v["continuum"]["verdict"], "elliptic");
}

#[test]
fn probe_config_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# small run\npreset = laplacian\ndim = 1\neta = 1.5\nalpha = 0.5\nwindow = 6\nensemble = 2\neps = 1, 0.5\nseed = 3\n")
        .unwrap();
    let csv = dir.path().join("out.csv");
    let args = ["probe", "--config", cfg.to_str().unwrap(), "--ensemble", "3", "--out", csv.to_str().unwrap(), "--json"];
    let v = json(&run(&args));
    assert_eq!(v["label"], "window-restricted");
    let summary = v["summary"].as_array().unwrap();
    assert_eq!(summary.len(), 2);
    assert_eq!(summary[0]["count"], 3, "flag must win over the config file");
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 1 + 6);

    let again = json(&run(&["--threads", "1", "probe", "--config", cfg.to_str().unwrap(), "--ensemble", "3", "--json"]));
    assert_eq!(again["summary"], v["summary"]);

    std::fs::write(&cfg, "preset = laplacian\netaa = 1.5\n").unwrap();
    let o = run(&["probe", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("etaa"));
}

#[test]
fn extend_keeps_data() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("f.csv");
    std::fs::write(&field, "# d=1 s=1 eps=1 lo=0 hi=4\nk1,re,im\n0,0,0\n4,2,0\n").unwrap();
    let out = dir.path().join("g.csv");
    let v = json(&run(&["extend", "--field", field.to_str().unwrap(), "--alpha", "0.5", "--out", out.to_str().unwrap(), "--json"]));
    assert_eq!(v["bound"], 1.0);
    assert!(v["extended_constant"].as_f64().unwrap() <= 1.0 + 1e-9);
    let (g, mask) = io::read_field(&out).unwrap();
    assert!(mask.iter().all(|b| *b));
    assert_eq!(g.values()[0], C64::new(0.0, 0.0));
    assert_eq!(g.values()[4], C64::new(2.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn germ_files_round_trip_bit_for_bit(seed in any::<u64>(), aniso in any::<bool>(), eps in prop::sample::select(vec![1.0, 0.5, 0.1])) {
        let s = Scaling::new(if aniso { vec![2, 1] } else { vec![1, 1] }).unwrap();
        let w = LatticeWindow::new(s, eps, vec![-2, -1], vec![1, 2]).unwrap();
        let bases: Vec<Vec<i64>> = w.indices().step_by(3).collect();
        let mut g = GaussianSource::new(seed, 0, 0);
        let values = (0..bases.len() * w.len()).map(|_| C64::new(g.next() * 1e3, g.next() * 1e-7)).collect();
        let u = Germ::new(w, bases, values).unwrap();
        let back = io::germ_from_str(&io::germ_to_string(&u), Path::new("g")).unwrap();
        prop_assert_eq!(back, u);
    }
}
