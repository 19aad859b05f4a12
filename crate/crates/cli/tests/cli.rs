use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("QWALK_OUT_DIR")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = qwalk(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn line_walk_writes_one_row_per_step_and_a_two_peaked_distribution() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["walk", "--graph", "line:1001", "--coin", "hadamard", "--steps", "500", "--obs", "entropy,dist"]);
    let text = fs::read_to_string(dir.path().join("walk.csv")).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# qwalk "));
    assert_eq!(lines.next(), Some("t,entropy"));
    assert_eq!(lines.count(), 501);
    assert!(text.ends_with('\n') && !text.contains('\r'));

    let dist = rows(&dir.path().join("walk_dist.csv"));
    assert_eq!(dist.len(), 501);
    let last: Vec<f64> = dist[500][1..].iter().map(|x| x.parse().unwrap()).collect();
    assert_eq!(last.len(), 1001);
    assert!((last.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    for (i, p) in last.iter().enumerate() {
        if i % 2 == 1 {
            assert_eq!(*p, 0.0, "site {i}");
        }
    }
    let (left, right) = last.split_at(500);
    let peak = |v: &[f64]| v.iter().cloned().enumerate().fold((0, 0.0), |m, (i, p)| if p > m.1 { (i, p) } else { m });
    let (l, r) = (peak(left), peak(right));
    assert!(l.0 < 200 && r.0 > 300, "peaks at {} and {}", l.0, 500 + r.0);
    assert!(last[500] < l.1 / 10.0 && last[500] < r.1 / 10.0);
}

#[test]
fn metadata_line_records_the_resolved_parameters() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["walk", "--graph", "line:21", "--coin", "bias:0.3", "--steps", "5"]);
    let text = fs::read_to_string(dir.path().join("walk.csv")).unwrap();
    let meta = text.lines().next().unwrap();
    assert!(meta.starts_with(&format!("# qwalk {} walk ", env!("CARGO_PKG_VERSION"))), "{meta}");
    for key in ["graph=line:21", "coin=", "steps=5", "init=sym"] {
        assert!(meta.contains(key), "{meta} lacks {key}");
    }
    let t: Vec<String> = rows(&dir.path().join("walk.csv")).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(t, ["0", "1", "2", "3", "4", "5"]);
}

#[test]
fn bipartite_period_reports_four_for_grover() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["analyze", "bipartite-period", "--d", "3"]);
    assert!(out.contains("period=4"), "{out}");
    let data = rows(&dir.path().join("bipartite_period.csv"));
    let f4: f64 = data[4][1].parse().unwrap();
    assert!((f4 - 1.0).abs() < 1e-10);
}

#[test]
fn depth_sweep_writes_peaks_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["sweep", "depth", "--coin", "ct", "--N", "20:60:5"]);
    assert!(out.contains("exponent="), "{out}");
    let peaks = rows(&dir.path().join("depth.csv"));
    assert_eq!(peaks.len(), 9);
    assert!(peaks.iter().all(|r| r.len() == 3));
    let text = fs::read_to_string(dir.path().join("depth_fit.csv")).unwrap();
    assert_eq!(text.lines().nth(1), Some("exponent,prefactor,residual,used,points"));
    let exponent: f64 = rows(&dir.path().join("depth_fit.csv"))[0][0].parse().unwrap();
    assert!((-1.0..-0.4).contains(&exponent), "{exponent}");
}

#[test]
fn exit_codes_separate_input_errors_from_missing_peaks() {
    let dir = tempfile::tempdir().unwrap();
    let bad_coin = qwalk(dir.path(), &["walk", "--graph", "line:11", "--coin", "nonsense", "--steps", "3"]);
    assert_eq!(bad_coin.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_coin.stderr).starts_with("qwalk: "));
    let bad_line = qwalk(dir.path(), &["walk", "--graph", "line:10", "--coin", "hadamard", "--steps", "3"]);
    assert_eq!(bad_line.status.code(), Some(1));
    let no_peak = qwalk(dir.path(), &["sweep", "depth", "--coin", "grover", "--B", "3", "--N", "1:5"]);
    assert_eq!(no_peak.status.code(), Some(3));
    let zero_workers = qwalk(dir.path(), &["--workers", "0", "analyze", "fourier-blocks", "--d", "3"]);
    assert_eq!(zero_workers.status.code(), Some(1));
}

#[test]
fn flags_override_config_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "output = \"from_file\"\n\n[walk]\ngraph = \"line:41\"\ncoin = \"hadamard\"\nsteps = 7\n").unwrap();
    let config = config.to_str().unwrap();
    ok(dir.path(), &["--config", config, "walk"]);
    assert_eq!(rows(&dir.path().join("from_file.csv")).len(), 8);
    ok(dir.path(), &["--config", config, "--output", "from_flag", "walk", "--steps", "3"]);
    assert_eq!(rows(&dir.path().join("from_flag.csv")).len(), 4);

    fs::write(dir.path().join("bad.toml"), "[walk]\nstep = 3\n").unwrap();
    let bad = qwalk(dir.path(), &["--config", dir.path().join("bad.toml").to_str().unwrap(), "walk"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn output_directory_falls_back_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(["analyze", "fourier-blocks", "--d", "2"])
        .env("QWALK_OUT_DIR", dir.path().join("nested"))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(rows(&dir.path().join("nested/fourier_blocks.csv")).len(), 4);
}

#[test]
fn sweeps_are_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 3] = [
        &["sweep", "phases", "--lattice", "tri6", "--coin", "grover", "--t", "6"],
        &["sweep", "branching", "--coin", "grover", "--N", "8", "--B", "2:9"],
        &["walk", "--graph", "gluedtrees:B=3,N=3", "--seed", "5", "--coin", "grover:4", "--steps", "20", "--obs", "exit,dist"],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for workers in ["1", "3"] {
            let sub = dir.path().join(workers);
            let mut full = vec!["--workers", workers];
            full.extend_from_slice(args);
            ok(&sub, &full);
            let mut files: Vec<_> = fs::read_dir(&sub).unwrap().map(|e| e.unwrap().path()).collect();
            files.sort();
            outputs.push(files.iter().map(|f| fs::read(f).unwrap()).collect::<Vec<_>>());
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{args:?}");
    }
}

#[test]
fn mapped_walk_and_continuous_chain_run() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["walk", "--graph", "mapped:B=2,N=10", "--coin", "dft", "--steps", "40"]);
    let walk = rows(&dir.path().join("walk.csv"));
    assert_eq!(walk.len(), 41);
    ok(dir.path(), &["ct-walk", "--graph", "mapped:B=2,N=10", "--steps", "30", "--dt", "0.5"]);
    let ct = rows(&dir.path().join("ct_walk.csv"));
    assert_eq!(ct.len(), 31);
    let t: f64 = ct[30][0].parse().unwrap();
    assert!((t - 15.0).abs() < 1e-12);
}
