use std::fs;
use std::path::Path;
use std::process::Command;

use qwalk::fieldio::read_field;
use qwalk::walk::evolve;
use qwalk::{make_state, StateKind, WalkParams};

fn qwalk(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn without_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with("# start:"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn selftest_passes() {
    let (code, out, _) = qwalk(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn decay_ends_with_slope_comment() {
    let (code, out, err) = qwalk(&[
        "decay", "--delta", "1", "--mass", "1", "--lambda", "1", "--tmax", "1024", "--sites",
        "4096",
    ]);
    assert_eq!(code, 0, "{err}");
    let last = out.lines().last().unwrap();
    let v: f64 = last
        .strip_prefix("# slope=")
        .expect("slope line")
        .parse()
        .unwrap();
    assert!(v.is_finite() && v < 0.0);
    let rows = data_rows(&out);
    assert_eq!(rows[0], qwalk::harness::CSV_HEADER);
    assert!(rows.len() > 8);
}

#[test]
fn energy_pair_ratio_column_is_one() {
    for (delta, state) in [("1", "gaussian"), ("0.25", "random")] {
        let (code, out, err) = qwalk(&[
            "strichartz",
            "--p",
            "inf",
            "--q",
            "2",
            "--delta",
            delta,
            "--state",
            state,
            "--radius",
            "8",
            "--sites",
            "1024",
            "--horizon",
            "32",
            "--seed",
            "4",
        ]);
        assert_eq!(code, 0, "{err}");
        let row = data_rows(&out)[1];
        let ratio: f64 = row.split(',').nth(10).unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-12, "{row}");
    }
}

#[test]
fn json_lines_share_the_csv_keys() {
    let (code, out, _) = qwalk(&[
        "strichartz",
        "--p",
        "6",
        "--q",
        "inf",
        "--sites",
        "512",
        "--horizon",
        "16",
        "--json",
    ]);
    assert_eq!(code, 0);
    let line = data_rows(&out)[0];
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    for k in qwalk::harness::CSV_HEADER.split(',') {
        assert!(v.get(k).is_some(), "{k}");
    }
}

#[test]
fn evolve_writes_a_readable_field_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.txt");
    let p = path.to_str().unwrap();
    let (code, _, err) = qwalk(&[
        "evolve", "--delta", "0.5", "--sites", "64", "--t", "4", "--out", p,
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# qwalk "));
    let got = read_field(text.as_bytes()).unwrap();
    let params = WalkParams::new(0.5, 1.0).unwrap();
    let u = make_state(StateKind::Impulse { site: 0 }, params, 64).unwrap();
    let want = evolve(&u, 4.0).unwrap().field;
    for (a, b) in got.values().iter().zip(want.values()) {
        assert!((a[0] - b[0]).norm() < 1e-15 && (a[1] - b[1]).norm() < 1e-15);
    }

    // feed it back through lp
    let out2 = dir.path().join("pu.txt");
    let (code, _, err) = qwalk(&[
        "lp",
        "--input",
        p,
        "--lambda",
        "1",
        "--out",
        out2.to_str().unwrap(),
        "--delta",
        "0.5",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        read_field(fs::read_to_string(out2).unwrap().as_bytes())
            .unwrap()
            .sites(),
        64
    );
}

#[test]
fn spectrum_lists_degeneracies() {
    let (code, out, _) = qwalk(&["spectrum", "--delta", "0.5", "--sites", "64"]);
    assert_eq!(code, 0);
    assert!(out.contains("# degenerate_pdprime=-3.14159"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[1].split(',').count(), 22);
}

#[test]
fn exit_codes() {
    assert_eq!(qwalk(&["nonsense"]).0, 2);
    assert_eq!(
        qwalk(&["decay", "--lambda", "1", "--tmax", "64", "--frobnicate"]).0,
        2
    );
    assert_eq!(qwalk(&["strichartz", "--p", "8", "--q", "4"]).0, 3);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "delta_ladder = 1, 2\nmass = 1\n").unwrap();
    let (code, _, err) = qwalk(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("delta = 2"));
    fs::write(&cfg, "mass = 1\nmass = 1\n").unwrap();
    let (code, _, err) = qwalk(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("line 2"), "{err}");
}

fn sweep_to(dir: &Path, name: &str, cfg: &Path, jobs: &str) -> String {
    let out = dir.join(name);
    let (code, _, err) = qwalk(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        jobs,
    ]);
    assert_eq!(code, 0, "{err}");
    fs::read_to_string(out).unwrap()
}

#[test]
fn sweep_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    fs::write(
        &cfg,
        "delta_ladder = 1, 0.5, 0.25\nlambda_ladder = 0.5, 1\nt_max = 16\nring_size = 1024\nseeds = 1, 2\nstate = random\nwidth = 3\n",
    )
    .unwrap();
    let a = sweep_to(dir.path(), "a.csv", &cfg, "1");
    let b = sweep_to(dir.path(), "b.csv", &cfg, "3");
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    assert_eq!(a.lines().filter(|l| l.starts_with("# start:")).count(), 1);
    assert!(a.lines().any(|l| l.starts_with("# config-hash: ")));
}
