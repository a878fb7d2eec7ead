use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mono-sgt"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run_in(dir, args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run_in(dir, args).status.code().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn bisect(mut a: f64, mut b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `w = 1/(1+z²)` with `P(z) = 5 + w`; `P` is increasing past its folds, so
/// both solves are plain bisections.
fn sec5_oracle() -> (f64, f64, f64) {
    let p = |z: f64| z * (2.0 * z * z - 9.0 * z + 12.0);
    let k2 = |y: f64| bisect(2.0, 10.0, |z| p(z) - y);
    let w = bisect(0.0, 1.0, |w| 1.0 / (1.0 + k2(5.0 + w).powi(2)) - w);
    (w, 5.0 + w, k2(5.0 + w))
}

#[test]
fn verify_sec5_original_passes_with_one_pair() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["verify", "sec5-original", "--report", "out.json"]);
    let r = read_json(&dir.path().join("out.json"));
    assert_eq!(r["artifact"], "verify");
    assert_eq!(r["verdict"], "pass");
    for k in ["condition1", "condition2", "condition3", "condition4", "loop_equilibria", "budgets"] {
        assert!(r.get(k).is_some(), "{k}");
    }
    let set = r["attractive_set"].as_array().unwrap();
    assert_eq!(set.len(), 1);
    let (w, x, z) = sec5_oracle();
    assert!((set[0]["w"].as_f64().unwrap() - 1.0 / (1.0 + z * z)).abs() < 1e-9);
    assert!((set[0]["x"].as_f64().unwrap() - x).abs() < 1e-9);
    assert!((set[0]["z_set"][0].as_f64().unwrap() - z).abs() < 1e-9);
    assert!((w - 0.13521830184997).abs() < 1e-12);
}

#[test]
fn iterate_zorro_finds_the_period_two_path() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["iterate", "zorro", "--w0", "0.3", "--depth", "40", "--out", "p.csv"]);
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("start,path,step,value,branch,class"));
    let mut paths: std::collections::BTreeMap<usize, (Vec<f64>, String)> = Default::default();
    for l in lines {
        let c: Vec<&str> = l.split(',').collect();
        let e = paths.entry(c[1].parse().unwrap()).or_default();
        e.0.push(c[3].parse().unwrap());
        e.1 = c[5].to_string();
    }
    let periodic = paths
        .values()
        .find(|(v, class)| class == "periodic-2" && v.len() >= 3 && v[..3] == [0.3, 0.45, 0.3])
        .expect("a 0.3, 0.45, 0.3 path");
    for (k, v) in periodic.0.iter().enumerate() {
        assert_eq!(*v, if k % 2 == 0 { 0.3 } else { 0.45 });
    }
}

#[test]
fn char_sec5_z_profile_has_folds_at_four_and_five() {
    let dir = tempfile::tempdir().unwrap();
    let stdout = ok(dir.path(), &["char", "sec5-z", "--u", "0:6:601", "--samples-csv", "s.csv"]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    let folds: Vec<f64> = v["profile"]["folds"].as_array().unwrap().iter().map(|f| f.as_f64().unwrap()).collect();
    assert_eq!(folds.len(), 2);
    assert!((folds[0] - 4.0).abs() < 1e-6 && (folds[1] - 5.0).abs() < 1e-6, "{folds:?}");
    let wide: Vec<u64> = v["profile"]["intervals"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t[1].as_f64().unwrap() - t[0].as_f64().unwrap() > 1e-6)
        .map(|t| t[2].as_u64().unwrap())
        .collect();
    assert_eq!(wide, [1, 3, 1]);
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert!(csv.starts_with("u,branch_index,value\n"));
    assert!(csv.lines().any(|l| l.starts_with("4.5,2,")), "three branches at u = 4.5");
}

#[test]
fn fixed_points_of_zorro() {
    let dir = tempfile::tempdir().unwrap();
    let v: Value = serde_json::from_str(&ok(dir.path(), &["fixed-points", "zorro", "--range", "0:1"])).unwrap();
    let fp: Vec<f64> = v["fixed_points"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    // A–B: w/2 = w; B–C: 3/4 - w = w; C–D: 1/2 + 2(w - 1/4)/3 = w.
    let want = [0.0, 0.375, 1.0];
    assert_eq!(fp.len(), 3);
    for (a, b) in fp.iter().zip(want) {
        assert!((a - b).abs() < 1e-9, "{fp:?}");
    }
}

#[test]
fn simulate_system_and_closed_loop() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["simulate", "sec5-x", "--x0", "0", "--input", "const:1", "--t-final", "5"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,x1,u,y"));
    let last: Vec<f64> = out.lines().last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    assert!((last[1] - 6.0 * (1.0 - (-5f64).exp())).abs() < 1e-7);
    assert_eq!(last[2], 1.0);

    std::fs::write(dir.path().join("u.txt"), "0 0\n1 2\n").unwrap();
    let out = ok(dir.path(), &["simulate", "sec5-x", "--x0", "0", "--input", "pwc:u.txt", "--t-final", "2"]);
    let last: Vec<f64> = out.lines().last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    // 5 + u: x(1) = 5(1 - e^-1), then relaxes towards 7.
    let x1 = 5.0 * (1.0 - (-1f64).exp());
    assert!((last[1] - (7.0 + (x1 - 7.0) * (-1f64).exp())).abs() < 1e-7);

    let out = ok(dir.path(), &["simulate", "sec5-original", "--x0", "1,1", "--t-final", "60", "--out", "cl.csv"]);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(dir.path().join("cl.csv")).unwrap();
    assert!(text.starts_with("t,x1,x2,u,y\n"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    let (w, x, z) = sec5_oracle();
    assert!((last[1] - x).abs() < 1e-6 && (last[2] - z).abs() < 1e-6 && (last[3] - w).abs() < 1e-6);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec!["verify", "multiequil"],
        vec!["char", "sec5-z", "--u", "0:6:121"],
        vec!["iterate", "zorro", "--w0", "0.3,0.7", "--depth", "30"],
        vec!["fixed-points", "sec5-loop-original"],
    ];
    for args in &runs {
        let outs: Vec<Vec<u8>> = ["1", "4", "0"]
            .iter()
            .map(|t| bin().current_dir(dir.path()).env("MONO_SGT_THREADS", t).args(args).output().unwrap().stdout)
            .collect();
        assert!(!outs[0].is_empty(), "{args:?}");
        assert!(outs.iter().all(|o| *o == outs[0]), "{args:?}");
    }
}

#[test]
fn emitted_examples_parse_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let listing = ok(dir.path(), &["examples", "--emit", "ex"]);
    assert!(listing.lines().any(|l| l.starts_with("sec5-original\tinterconnection\t")));
    let mut files: Vec<PathBuf> =
        std::fs::read_dir(dir.path().join("ex")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(files.len() >= 11, "{files:?}");
    for f in &files {
        let once = ok(dir.path(), &["parse", f.to_str().unwrap()]);
        assert_eq!(once, std::fs::read_to_string(f).unwrap(), "{}", f.display());
    }
    // The emitted interconnection file carries its ranges and verifies like the builtin.
    ok(dir.path(), &["verify", "ex/sec5-original.cfg", "--report", "file.json"]);
    ok(dir.path(), &["verify", "sec5-original", "--report", "builtin.json"]);
    let (a, b) = (read_json(&dir.path().join("file.json")), read_json(&dir.path().join("builtin.json")));
    assert_eq!(a["attractive_set"], b["attractive_set"]);
    assert_eq!(a["verdict"], "pass");
}

#[test]
fn plot_accepts_every_artifact_and_recipe() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "sec5-original", "--x0", "1,1", "--out", "sim.csv"]);
    ok(d, &["simulate", "sec5-z", "--input", "const:4.5", "--out", "open.csv"]);
    ok(d, &["iterate", "zorro", "--w0", "0.3", "--depth", "20", "--out", "paths.csv", "--json", "paths.json"]);
    ok(d, &["char", "sec5-z", "--u", "0:6:61", "--out", "char.json", "--samples-csv", "samples.csv"]);
    ok(d, &["fixed-points", "zorro-eps(1.5)", "--out", "fp.json"]);
    ok(d, &["verify", "sec5-original", "--report", "verify.json"]);
    for (i, art) in
        ["sim.csv", "open.csv", "paths.csv", "paths.json", "char.json", "samples.csv", "fp.json", "verify.json"]
            .iter()
            .enumerate()
    {
        let script = format!("p{i}.gp");
        ok(d, &["plot", art, "--script", &script]);
        let text = std::fs::read_to_string(d.join(&script)).unwrap();
        assert!(text.contains("\nplot '"), "{art}: {text}");
        for name in text.split('\'').filter(|s| s.ends_with(".dat")) {
            let data = std::fs::read_to_string(d.join(name)).unwrap();
            assert!(!data.trim().is_empty(), "{art}: {name} is empty");
        }
    }
    ok(d, &["plot", "paths.csv", "--script", "cob.gp", "--map", "zorro"]);
    assert!(std::fs::read_to_string(d.join("cob-graph.dat")).unwrap().starts_with("0 0\n0.5 0.25\n"));
    for r in ["zorro", "characteristics"] {
        ok(d, &["plot", "--recipe", r, "--script", &format!("{r}.gp")]);
    }
    let abed = std::fs::read_to_string(d.join("zorro-abed.dat")).unwrap();
    assert_eq!(abed, "0 0\n0.5 0.25\n0.40000000000000002 0.5\n1 1\n");
}

#[test]
fn usage_and_parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("bad.cfg"), "system s\ndim 1\nrhs1 = -x1 + \noutput = x1\n").unwrap();
    for args in [
        vec![],
        vec!["bogus"],
        vec!["char", "sec5-z", "--frobnicate"],
        vec!["char", "nope"],
        vec!["char", "sec5-z", "--u", "6:0:10"],
        vec!["parse", "missing.cfg"],
        vec!["parse", "bad.cfg"],
        vec!["verify", "zorro"],
        vec!["verify", "sec5-original", "--grid", "0x3"],
        vec!["verify", "sec5-original", "--grid", "2x2x2"],
        vec!["verify", "sec5-original", "--budget", "{\"bogus\": 1}"],
        vec!["iterate", "zorro", "--w0", "2"],
        vec!["simulate", "sec5-x", "--input", "ramp:1"],
        vec!["plot", "--script", "x.gp"],
    ] {
        assert_eq!(code(d, &args), 2, "{args:?}");
    }
    let out = run_in(d, &["parse", "bad.cfg"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.cfg") && err.contains("3:"), "{err}");
}

#[test]
fn positive_feedback_file_fails_verification_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = "\
loop w_range 0:1 y_range 0:12 box 0:10,0:5
system x
dim 1
state_domain 0..inf
rhs1 = -x1 + 5 + u
output = x1
system z
dim 1
state_domain 0..inf
rhs1 = -x1*(2*x1^2 - 9*x1 + 12) + u
output = 1/(1+x1^2)
";
    std::fs::write(d.join("wired.cfg"), cfg).unwrap();
    let out = run_in(d, &["verify", "wired.cfg", "--report", "r.json", "--text", "r.txt"]);
    assert_eq!(out.status.code(), Some(1));
    let r = read_json(&d.join("r.json"));
    assert_eq!(r["verdict"], "fail");
    assert!(r["blocking"].as_str().unwrap().starts_with("condition2"), "{}", r["blocking"]);
    assert!(std::fs::read_to_string(d.join("r.txt")).unwrap().contains("FAIL"));
}

#[test]
fn grid_and_budget_flags_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "verify",
            "sec5-original",
            "--grid",
            "3x4",
            "--t-final",
            "40",
            "--budget",
            "{\"dist_tol\": 0.01}",
            "--report",
            "r.json",
        ],
    );
    let r = read_json(&d.join("r.json"));
    assert_eq!(r["budgets"]["sweep_grid"], serde_json::json!([3, 4]));
    assert_eq!(r["budgets"]["t_final"], 40);
    assert_eq!(r["budgets"]["dist_tol"], 0.01);
    assert_eq!(r["condition4"]["sweep"].as_array().unwrap().len(), 12);
}
