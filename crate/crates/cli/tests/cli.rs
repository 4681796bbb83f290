use std::process::Command;

fn sgap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sgap"))
}

#[test]
fn presets_are_listed() {
    let out = sgap().arg("presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["test1", "test2", "test3", "test4"] {
        assert!(text.contains(name));
    }
}

#[test]
fn run_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.cfg");
    std::fs::write(&cfg, "problem = rht\ndx = 0.05\nlambda = 0.035\nsigma = 1 + 0.5*z\ndegree = 2\ntimes = 0.01, 0.02\n").unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let st = sgap().arg("run").arg(&cfg).arg("--out").arg(out).args(["--modes", "--quiet"]).status().unwrap();
        assert!(st.success());
    }
    let head = std::fs::read_to_string(a.join("snapshot_000.csv")).unwrap();
    assert!(head.starts_with("x,mean,std,mode_1,mode_2,mode_3\n"));
    let out = sgap().arg("compare").arg(&a).arg(&b).args(["--norm", "l2"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "eps = -1\n").unwrap();
    let out = sgap().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1: eps must be positive"));

    let missing = dir.path().join("missing.cfg");
    assert_eq!(sgap().arg("run").arg(&missing).status().unwrap().code(), Some(3));

    let cold = dir.path().join("cold.cfg");
    std::fs::write(&cold, "problem = rht\nnx = 10\ninitial = 0 - 1\nfloor = -0.5\ntimes = 0.01\n").unwrap();
    let st = sgap().arg("run").arg(&cold).arg("--out").arg(dir.path().join("o")).arg("--quiet").status().unwrap();
    assert_eq!(st.code(), Some(2));

    let other = dir.path().join("o2");
    let st = sgap().args(["compare", "/nonexistent/a"]).arg(&other).status().unwrap();
    assert_eq!(st.code(), Some(3));
}
