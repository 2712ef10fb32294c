use std::process::{Command, Output};

fn coordcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coordcap"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn success_exits_zero() {
    let o = coordcap(&["region", "--network", "two-node", "--fixture", "TA2:2"]);
    assert!(o.status.success());
    assert_eq!(
        String::from_utf8_lossy(&o.stdout),
        "min_rate 1.000000 bits\n"
    );
    assert!(o.stderr.is_empty());
}

#[test]
fn usage_errors_exit_two() {
    for (args, kind) in [
        (
            &["scaling", "--topology", "extended-cascade", "--bogus"][..],
            "kind=unknown-flag key=bogus",
        ),
        (
            &["scaling", "--topology", "extended-cascade"][..],
            "kind=missing-required key=k",
        ),
        (
            &["scaling", "--topology", "extended-cascade", "--k", "x"][..],
            "kind=invalid-value",
        ),
    ] {
        let o = coordcap(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert!(err.starts_with("error ") && err.contains(kind), "{err}");
        assert_eq!(err.lines().count(), 1);
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn malformed_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(
        &cfg,
        r#"{"command": "scaling", "topology": "extended-cascade", "k": [1]}"#,
    )
    .unwrap();
    let o = coordcap(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("kind=malformed-file key=k"));
}

#[test]
fn runtime_errors_exit_one() {
    let o = coordcap(&[
        "region",
        "--network",
        "two-node",
        "--source",
        "/nonexistent/source.json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kind=io"));
}

#[test]
fn help_exits_zero() {
    let o = coordcap(&["--help"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("--fixture"));
}
