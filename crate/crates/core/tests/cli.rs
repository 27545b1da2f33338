use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_twisted-xxx"));
    c.env_remove("TWISTED_XXX_SEED");
    c
}

fn run(c: &mut Command) -> (Output, String) {
    let out = c.output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout.clone()).unwrap();
    (out, stdout)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twisted-xxx-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn ybe_json_report_passes() {
    let (out, stdout) = run(bin().args(["verify", "ybe"]));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let pos: Vec<usize> = ["\"version\"", "\"seed\"", "\"config\"", "\"reports\""]
        .iter()
        .map(|k| stdout.find(k).unwrap())
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "top-level key order {pos:?}");
    assert_eq!(v["reports"].as_array().unwrap().len(), 100);
    assert_eq!(v["config"]["suite"], "ybe");
}

#[test]
fn csv_format_has_fixed_header() {
    let (out, stdout) = run(bin().args(["verify", "ybe", "--samples", "3", "--format", "csv"]));
    assert!(out.status.success());
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "check_id,param_summary,residual,tolerance,pass");
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn seed_precedence_env_then_config_then_flag() {
    let seed_of = |c: &mut Command| -> u64 {
        let (_, s) = run(c);
        serde_json::from_str::<serde_json::Value>(&s).unwrap()["seed"].as_u64().unwrap()
    };
    let base = ["verify", "ybe", "--samples", "1"];
    assert_eq!(seed_of(bin().args(base).env("TWISTED_XXX_SEED", "11")), 11);
    let cfg = tmp("seed.cfg");
    std::fs::write(&cfg, "seed = 22\nsamples = 2 # comment\n").unwrap();
    let cfg_arg = cfg.to_str().unwrap();
    assert_eq!(
        seed_of(bin().args(["verify", "ybe", "--config", cfg_arg]).env("TWISTED_XXX_SEED", "11")),
        22
    );
    assert_eq!(
        seed_of(bin().args(["verify", "ybe", "--config", cfg_arg, "--seed", "33"]).env("TWISTED_XXX_SEED", "11")),
        33
    );
}

#[test]
fn out_path_and_determinism() {
    let (a, b) = (tmp("a.json"), tmp("b.json"));
    for p in [&a, &b] {
        let (out, _) = run(bin().args(["verify", "twist", "--seed", "5", "--out", p.to_str().unwrap()]));
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn failing_check_gives_nonzero_exit() {
    // the fit against the displayed Hamiltonian fails at xi != 0
    let (out, _) = run(bin().args(["verify", "spectrum", "--xi", "0.5", "--n-sites", "3", "--samples", "1"]));
    assert_eq!(out.status.code(), Some(1));
    let (out, _) = run(bin().args(["verify", "spectrum", "--xi", "0", "--n-sites", "3", "--samples", "1"]));
    assert!(out.status.success());
}

#[test]
fn invalid_input_is_rejected() {
    let (out, _) = run(bin().args(["verify", "ybe", "--n-sites", "99"]));
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = run(bin().args(["verify", "ybe", "--xi", "1+"]));
    assert_eq!(out.status.code(), Some(2));
    let bad = tmp("bad.cfg");
    std::fs::write(&bad, "colour = blue\n").unwrap();
    let (out, _) = run(bin().args(["verify", "ybe", "--config", bad.to_str().unwrap()]));
    assert_eq!(out.status.code(), Some(2));
    let (out, _) = run(bin().args(["verify", "nothing"]));
    assert!(!out.status.success());
}

#[test]
fn complex_and_open_flags() {
    let (out, stdout) = run(bin().args([
        "verify", "spectrum", "--xi", "0.3-0.2i", "--boundary", "open", "--n-sites", "3", "--samples", "1",
    ]));
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["config"]["xi"], "0.3-0.2i");
    assert_eq!(v["config"]["boundary"], "open");
    let ham = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["check_id"] == "spectrum.hamiltonian")
        .all(|r| r["pass"] == true);
    assert!(ham);
    // hamiltonian.fit at complex xi fails, as at real xi != 0
    assert_eq!(out.status.code(), Some(1));
}
