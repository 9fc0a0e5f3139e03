use std::fs;
use std::process::{Command, Output};

fn grkhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grkhs"))
        .args(args)
        .env_remove("GRKHS_MAX_EIGS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV with `#` header lines, column names dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn decay_matches_the_geometric_law() {
    let o = grkhs(&["decay", "--shape", "iso:1", "--d", "1", "--N", "50"]);
    assert!(o.status.success());
    let omega = (3.0 - 5f64.sqrt()) / 2.0;
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 51);
    for r in rows {
        let n: i32 = r[0].parse().unwrap();
        let e: f64 = r[1].parse().unwrap();
        let exact = (1.0 - omega).sqrt() * omega.powf(n as f64 / 2.0);
        assert!((e - exact).abs() <= 1e-12 * exact.max(1e-300), "n={n}: {e} vs {exact}");
    }
}

#[test]
fn output_carries_a_header() {
    let text = stdout(&grkhs(&["eigs", "--n", "3"]));
    let header: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(header[0].starts_with("# grkhs "));
    assert!(header.iter().any(|l| l.starts_with("# seed: ")));
    assert!(header.iter().any(|l| l.starts_with("# config: {")));
    assert!(text.lines().any(|l| l == "rank,value,log_value,index"));
}

#[test]
fn powerlaw_complexity_table_is_monotone() {
    let o = grkhs(&[
        "complexity",
        "--shape",
        "powerlaw:1:2",
        "--eps",
        "0.5,0.25,0.125,0.0625,0.03125,0.015625",
        "--d",
        "1,2,4,8,16",
        "--criterion",
        "abs",
    ]);
    assert!(o.status.success());
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 30);
    let n = |d: &str, eps: &str| -> u64 {
        rows.iter().find(|r| r[0] == d && r[1] == eps).unwrap()[2].parse().unwrap()
    };
    let eps = ["0.5", "0.25", "0.125", "0.0625", "0.03125", "0.015625"];
    let dims = ["1", "2", "4", "8", "16"];
    for d in dims {
        for w in eps.windows(2) {
            assert!(n(d, w[0]) <= n(d, w[1]));
        }
    }
    for e in eps {
        for w in dims.windows(2) {
            assert!(n(w[0], e) <= n(w[1], e));
        }
    }
    assert!(rows.iter().all(|r| r[3] == "abs"));
    let summary = String::from_utf8(o.stderr).unwrap();
    assert!(summary.contains("p_hat: "));
}

#[test]
fn exit_codes() {
    assert_eq!(grkhs(&["decay", "--shape", "bogus:1"]).status.code(), Some(1));
    assert_eq!(grkhs(&["complexity", "--eps", "1.5"]).status.code(), Some(1));
    assert_eq!(grkhs(&["rates", "--N", "50"]).status.code(), Some(1));
    assert_eq!(grkhs(&["complexity", "--class", "std"]).status.code(), Some(1));
    assert_eq!(grkhs(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(grkhs(&["--help"]).status.code(), Some(0));

    let limited = |v: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_grkhs"))
            .args(args)
            .env("GRKHS_MAX_EIGS", v)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(limited("10", &["eigs", "--n", "20"]), Some(2));
    assert_eq!(limited("5", &["complexity", "--shape", "powerlaw:1:1", "--d", "12", "--eps", "0.001"]), Some(2));
    assert_eq!(limited("zero", &["eigs"]), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"command": "decay", "shape": "iso:1", "d": [1, 2], "N": 4}"#).unwrap();
    let out = dir.path().join("decay.csv");
    let o = grkhs(&[
        "decay",
        "--config",
        cfg.to_str().unwrap(),
        "--N",
        "3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for d in [1, 2] {
        let text = fs::read_to_string(dir.path().join(format!("decay_d{d}.csv"))).unwrap();
        assert!(text.contains(&format!("# d: {d}")));
        assert_eq!(rows(&text).len(), 4);
    }

    fs::write(&cfg, r#"{"shape": "iso:1", "typo": 3}"#).unwrap();
    assert_eq!(grkhs(&["decay", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cases: [&[&str]; 4] = [
        &["spline-bench", "--d", "1,2", "--n", "3", "--designs", "2"],
        &["decay", "--class", "std", "--d", "1", "--N", "6", "--seed", "9"],
        &["complexity", "--shape", "explicit:1,0.5,0.25", "--d", "1,2,3"],
        &["spectrum", "--k", "5", "--m", "80"],
    ];
    for args in cases {
        let a = grkhs(args);
        let b = grkhs(args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn std_decay_stays_above_the_optimal_errors() {
    let all = rows(&stdout(&grkhs(&["decay", "--d", "1", "--N", "8"])));
    let std = rows(&stdout(&grkhs(&["decay", "--class", "std", "--d", "1", "--N", "8"])));
    for (a, s) in all.iter().zip(&std) {
        let a: f64 = a[1].parse().unwrap();
        let s: f64 = s[1].parse().unwrap();
        assert!(s >= a - 1e-9);
    }
}

#[test]
fn spline_bench_reads_a_design_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pts.csv");
    fs::write(&path, "# two points in the plane\n0.0, 0.5\n-1.0, 1.0\n").unwrap();
    let o = grkhs(&["spline-bench", "--design-file", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..2], ["2", "2"]);
    let ratio: f64 = rows[0][7].parse().unwrap();
    assert!(ratio >= 1.0 - 1e-9);
}
