use std::path::Path;
use std::process::{Command, Output};

fn exprk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exprk"))
        .args(args)
        .env("EXPRK_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sod_run_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sod.csv");
    let res = exprk(&[
        "--scenario", "sod", "--scheme", "exprk-f", "--tableau", "midpoint2", "--nx", "100", "--tfinal", "0.02",
        "--out", path_arg(&out),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,rho,u_x,u_y,T"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r.len() == 5 && r[1] > 0.0 && r[4] > 0.0));
    assert!((rows[0][1] - 1.0).abs() < 1e-6 && (rows[99][1] - 0.125).abs() < 1e-6);

    let meta = std::fs::read_to_string(dir.path().join("sod.csv.meta")).unwrap();
    assert!(meta.contains("scenario = sod"));
    assert!(meta.contains("# steps = "));
}

#[test]
fn runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let res = exprk(&[
            "--scenario", "smooth", "--scheme", "exprk-v", "--tableau", "heun3", "--nx", "16", "--tfinal", "0.02",
            "--out", path_arg(&out),
        ]);
        assert!(res.status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("mix.csv");
    std::fs::write(&cfg, format!("# mixing, coarse\nscenario = mixing\nscheme = exprk-v\nnx = 50\ntfinal = 0.01\nout = {}\n", out.display())).unwrap();
    let res = exprk(&["--config", path_arg(&cfg), "--nx", "20"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 21);
    let meta = std::fs::read_to_string(dir.path().join("mix.csv.meta")).unwrap();
    assert!(meta.contains("nx = 20") && meta.contains("scheme = exprk-v"));
}

#[test]
fn configuration_errors_exit_with_one() {
    let res = exprk(&["--scheme", "exprk-f"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("scenario"));

    let res = exprk(&["--scenario", "sod", "--scheme", "exprk-f", "--collision", "spectral", "--nv", "33", "--nx", "8"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("power-of-two"));

    let res = exprk(&["--scenario", "sod", "--scheme", "exprk-f", "--tableau", "rk4"]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("--tableau"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let res = Command::new(env!("CARGO_BIN_EXE_exprk"))
        .args(["--scenario", "sod", "--scheme", "exprk-f"])
        .env("EXPRK_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn overflowing_exponent_exits_with_two() {
    // SSPRK3 has a decreasing abscissa; at eps = 1e-8 its stage exponent overflows
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let res = exprk(&[
        "--scenario", "sod", "--scheme", "exprk-f", "--tableau", "ssprk3", "--eps", "1e-8", "--nx", "8", "--tfinal",
        "0.01", "--out", path_arg(&out),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("overflows"));
    assert!(!out.exists());
}
