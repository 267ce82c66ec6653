use std::path::Path;
use std::process::Command;

fn sumprod(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sumprod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = sumprod(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn cf_commands() {
    assert_eq!(
        stdout(&["cf", "expand", "5", "7"]),
        "a,q,s,quotients,max_quotient\n5,7,3,1 2 2,2\n"
    );
    assert_eq!(
        stdout(&["cf", "value", "1", "2", "1"]),
        "quotients,canonical,numer,denom\n1 3,false,3,4\n"
    );
    let conv = stdout(&["cf", "convergents", "3", "7"]);
    assert_eq!(
        conv.lines().skip(1).collect::<Vec<_>>(),
        ["3,7,0,0,1", "3,7,1,1,2", "3,7,2,3,7"]
    );
}

#[test]
fn zaremba_singleton_grid() {
    let out = stdout(&["zaremba", "--p", "7", "--M", "2"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("p,M,z_len,a_len,a_next_len,w_hhd"));
    assert!(lines.next().unwrap().starts_with("7,2,1,"));
    assert_eq!(lines.next(), None);
}

#[test]
fn runs_are_byte_identical() {
    for args in [
        &["incidence", "--p", "7,11", "--samples", "6", "--seed", "42"][..],
        &[
            "popprod",
            "--p",
            "101",
            "--samples",
            "20",
            "--seed",
            "7",
            "--format",
            "json",
        ],
        &["sumprod", "--p", "101", "--M", "3", "--rho", "1,2", "--seed", "3"],
        &["girth", "--p", "11,101", "--N", "3,5", "--depth-cap", "5"],
        &["covering", "--p", "101", "--M", "2,3", "--beta", "0.3,0.5"],
    ] {
        assert_eq!(stdout(args), stdout(args), "{args:?}");
    }
    let with_threads = stdout(&[
        "incidence",
        "--p",
        "7",
        "--samples",
        "6",
        "--seed",
        "42",
        "--threads",
        "1",
    ]);
    assert_eq!(
        with_threads,
        stdout(&["incidence", "--p", "7", "--samples", "6", "--seed", "42"])
    );
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# fmq grid\nM = 2,3\nq = 10,100\nformat = json\n").unwrap();
    let path = cfg.to_str().unwrap();
    let json: serde_json::Value = serde_json::from_str(&stdout(&["fmq", "--config", path])).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
    assert_eq!(json[0]["M"], 2);
    let csv = stdout(&["fmq", "--config", path, "--M", "2", "--format", "csv"]);
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn out_file_and_fits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    stdout(&[
        "zaremba",
        "--p-range",
        "1000..1200",
        "--M",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = std::fs::read_to_string(&out).unwrap();
    assert!(rows.lines().count() > 10);
    let fits = std::fs::read_to_string(Path::new(dir.path()).join("z_fits.csv")).unwrap();
    assert_eq!(fits.lines().count(), 2);
}

#[test]
fn rejected_inputs() {
    for args in [
        &["zaremba", "--p", "7", "--M", "0"][..],
        &["zaremba", "--p", "8"],
        &["covering", "--p", "101", "--beta", "0.7"],
        &["fmq", "--q", ""],
    ] {
        let out = sumprod(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(
        sumprod(&["fmq", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
