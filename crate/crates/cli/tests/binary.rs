//! Smoke tests of the compiled binary: subcommands, flags, exit codes.

use std::process::Command;

fn apids() -> Command {
    Command::new(env!("CARGO_BIN_EXE_apids"))
}

fn write_cfg(dir: &std::path::Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

const FREE_1D: &str = r#"
[operator]
d = 1
w = 1.0
frequencies = [["0"]]

[scales]
rho_n = 50.0

[ids]
lambdas = [2500.0, 10000.0]
engines = ["gauge", "free"]
nodes = 64
"#;

#[test]
fn ids_and_validate_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), FREE_1D);

    let out = apids()
        .args(["validate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS parameter-chain"), "{text}");

    let out = apids()
        .args(["ids", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("ids.csv").exists());
}

#[test]
fn parse_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "this is not toml [");
    let out = apids()
        .args(["ids", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn broken_chain_fails_validation_with_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        &FREE_1D.replace("rho_n = 50.0", "rho_n = 50.0\nbeta = 0.3"),
    );
    let out = apids()
        .args(["validate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("beta"), "{err}");
}

#[test]
fn window_violation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    // λ far outside [ρ_n, 4ρ_n]^{2w}
    let cfg = write_cfg(dir.path(), &FREE_1D.replace("[2500.0, 10000.0]", "[10.0]"));
    let out = apids()
        .args(["ids", "--config"])
        .arg(&cfg)
        .args(["--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn shipped_configs_parse_and_validate() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join("configs");
    for name in ["free2d.toml", "mathieu1d.toml", "lift2d.toml", "axis2d.toml"] {
        let out = apids()
            .args(["validate", "--config"])
            .arg(root.join(name))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
