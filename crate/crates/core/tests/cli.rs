use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const SMALL: &str = r#"
name = "small"

[tradeoff]
kind = "power_law"
c = 0.5
p = 1.0
theta_min = 1.0

[grid]
x_min = -10.0
x_max = X_MAX
theta_max = 11.0
nx = 201
ntheta = 41

[sim]
t_final = 6.0
snapshot_interval = 0.5
plot_times = [2.0, 6.0]
"#;

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("canetoad-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, x_max: f64) -> PathBuf {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL.replace("X_MAX", &format!("{x_max:?}"))).unwrap();
    path
}

fn canetoad(args: &[&str]) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_canetoad"))
        .args(args)
        .output()
        .unwrap()
        .status;
    status.code().unwrap()
}

#[test]
fn simulate_is_deterministic() {
    let dir = scratch("det");
    let cfg = write_config(&dir, 40.0);
    let cfg = cfg.to_str().unwrap();
    let (a, b) = (dir.join("a"), dir.join("b"));
    assert_eq!(canetoad(&["fronts", "--config", cfg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(canetoad(&["fronts", "--config", cfg, "--out", b.to_str().unwrap()]), 0);
    for file in ["fronts.csv", "monitor.csv", "fits.csv", "rho_t6.csv"] {
        let (x, y) = (fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap());
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs between runs");
    }
    let text = fs::read_to_string(a.join("fronts.csv")).unwrap();
    assert!(text.starts_with("# canetoad "));
    assert!(text.lines().nth(1).unwrap().contains("sha256="));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let bad = dir.join("bad.toml");
    fs::write(&bad, "name = \"bad\"\n[tradeoff]\nkind = \"nope\"\n").unwrap();
    assert_eq!(canetoad(&["spectrum", "--config", bad.to_str().unwrap()]), 2);
    assert_eq!(
        canetoad(&["spectrum", "--config", dir.join("missing.toml").to_str().unwrap()]),
        2
    );

    // the front reaches x_max within the run
    let cfg = write_config(&dir, 8.0);
    let out = dir.join("edge");
    assert_eq!(
        canetoad(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        3
    );

    let cfg = write_config(&dir, 40.0);
    let out = dir.join("spec");
    assert_eq!(
        canetoad(&[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        0
    );
    assert!(out.join("spectrum.csv").exists());
    fs::remove_dir_all(&dir).unwrap();
}
