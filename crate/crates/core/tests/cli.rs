use std::path::{Path, PathBuf};
use std::process::Command;

use wqa::cli::main_with_args;
use wqa::config::Config;

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "conf"))
        .collect();
    v.sort();
    v
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("wqa").chain(args.iter().copied()))
}

/// Subcommand and cheap overrides for a fixture, keyed on its file name prefix.
fn smoke_args(name: &str) -> (&'static str, Vec<&'static str>) {
    match name.split('_').next().unwrap() {
        "scan" => ("scan2d", vec!["--res", "6", "-s", "max_iter=5000", "-s", "transient=500"]),
        "bifurcation" => ("scan1d", vec!["--res", "8", "-s", "max_iter=5000", "-s", "transient=500"]),
        "phase" => ("phase", vec!["--res", "10", "-s", "cloud_points=500"]),
        "boundary" => ("boundary", vec!["-s", "steps=20"]),
        "orbit" => ("orbit", vec![]),
        "lyapunov" => ("lyapunov", vec!["-s", "steps=20000"]),
        "segments" => ("segments", vec![]),
        other => panic!("no subcommand for fixture prefix '{other}'"),
    }
}

#[test]
fn every_fixture_runs() {
    let fx = fixtures();
    assert!(fx.len() >= 10);
    let dir = tempfile::tempdir().unwrap();
    for f in fx {
        let cfg = Config::load(&f).unwrap();
        assert!(cfg.contains("params"), "{}", f.display());
        let name = f.file_stem().unwrap().to_str().unwrap().to_string();
        let (cmd, extra) = smoke_args(&name);
        let out = dir.path().join(&name);
        let mut args = vec![cmd, "--config", f.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend(extra);
        assert_eq!(run(&args), 0, "{name}");
        let csv = out.with_extension("csv");
        assert!(csv.exists(), "{}", csv.display());
    }
}

#[test]
fn repeated_scans_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (k, threads) in ["1", "3"].into_iter().enumerate() {
        let out = dir.path().join(format!("run{k}"));
        let code = run(&[
            "scan2d",
            "--params",
            "0.9,0.7,0,0",
            "--window",
            "-3,3,-3,3",
            "--res",
            "12,9",
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
            "-s",
            "overlays=B_LRn1:5",
            "-s",
            "max_iter=20000",
        ]);
        assert_eq!(code, 0);
        let read = |ext: &str| std::fs::read(out.with_extension(ext)).unwrap();
        outputs.push((read("csv"), read("wqas"), read("curves.csv")));
    }
    assert!(outputs[0] == outputs[1]);
}

#[test]
fn orbit_output_follows_the_map() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit");
    let code = run(&[
        "orbit",
        "--params",
        "0.9,0.7,-2,1.16",
        "--out",
        out.to_str().unwrap(),
        "-s",
        "p0=-1,0.5",
        "-s",
        "steps=50",
    ]);
    assert_eq!(code, 0);
    let q = wqa::MapParams::new(0.9, 0.7, -2.0, 1.16).unwrap();
    let mut r = csv::Reader::from_path(out.with_extension("csv")).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["n", "x", "y", "partition"]);
    let rows: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 51);
    let pt = |r: &csv::StringRecord| wqa::Point2::new(r[1].parse().unwrap(), r[2].parse().unwrap());
    // the start sits on the border, which belongs to R
    assert_eq!(&rows[0][3], "R");
    for w in rows.windows(2) {
        assert_eq!(wqa::map::step(&q, pt(&w[0])), pt(&w[1]));
    }
}

fn exe(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_wqa")).args(args).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stderr).into_owned())
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let out = out.to_str().unwrap();
    assert_eq!(exe(&["--help"]).0, 0);
    assert_eq!(exe(&[]).0, 2);
    assert_eq!(exe(&["orbit", "--bogus"]).0, 2);
    assert_eq!(exe(&["orbit", "--out", out]).0, 2, "missing params");
    assert_eq!(exe(&["orbit", "--params", "1,2,3", "--out", out]).0, 2);
    assert_eq!(exe(&["segments", "--params", "0.9,0.7,0,0", "-s", "sigma=LXR", "--out", out]).0, 2);
    assert_eq!(exe(&["phase", "--config", "/nonexistent/wqa.conf"]).0, 1);
    let (code, err) = exe(&[
        "segments",
        "--params",
        "0.9,0.7,-3,0.5656",
        "-s",
        "sigma=LR^4",
        "-s",
        "snap=tau_R",
        "--out",
        out,
    ]);
    assert_eq!(code, 3, "{err}");
    let (code, _) = exe(&[
        "segments",
        "--params",
        "0.9,0.7,-1.125,1.0405",
        "-s",
        "sigma=LR^4",
        "-s",
        "snap=tau_R",
        "--out",
        out,
    ]);
    assert_eq!(code, 0);
}
