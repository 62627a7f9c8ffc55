use std::process::{Command, Output};

fn asmlam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asmlam"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/machines"))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_euclid() {
    let o = asmlam(&["run", "euclid.asm", "--input", "a0=12", "--input", "b0=8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("output a = 4"), "{out}");
    assert!(out.contains("steps: 2"), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("step=")).count(), 3);
}

#[test]
fn verify_euclid_grid() {
    let o = asmlam(&["verify", "euclid.asm", "--grid", "20"]);
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("verify ")).count(), 400);
    assert!(out.lines().filter(|l| l.starts_with("verify ")).all(|l| l.ends_with("verdict=pass")));
    let kl: Vec<&str> = out.lines().filter(|l| l.starts_with("(K,L) = ")).collect();
    assert_eq!(kl.len(), 1, "{out}");
    assert!(out.contains("verdict: pass"));
}

#[test]
fn verify_with_headroom_changes_k_only() {
    let base = stdout(&asmlam(&["compile", "euclid.asm", "--no-theta"]));
    let more = stdout(&asmlam(&["verify", "euclid.asm", "--grid", "4", "--headroom-K", "5", "--headroom-L", "2"]));
    let k_min: u64 = base
        .lines()
        .find_map(|l| l.strip_prefix("K = "))
        .and_then(|r| r.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(more.contains(&format!("(K,L) = ({},", k_min + 5)), "{more}");
    assert!(more.contains("verdict: pass"));
}

#[test]
fn compile_manifest_and_theta() {
    let out = stdout(&asmlam(&["compile", "unary.asm"]));
    for key in ["slots:", "x1 = i (value, I)", "x2 = f (delta", "K = ", "L = ", "exits:", "theta = "] {
        assert!(out.contains(key), "missing {key}: {out}");
    }
}

#[test]
fn exits_and_diagnostics() {
    for f in ["fail.asm", "clash.asm", "unary.asm"] {
        let o = asmlam(&["verify", f]);
        assert!(o.status.success(), "{f}: {}", stdout(&o));
    }
    let o = asmlam(&["run", "missing.asm"]);
    assert_eq!(o.status.code(), Some(2));
    let o = asmlam(&["run", "euclid.asm", "--input", "zz=1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not an input"));
}

#[test]
fn encode_decode_round_trip() {
    let code = stdout(&asmlam(&["encode", "(3, False)"]));
    let back = stdout(&asmlam(&["decode", code.trim()]));
    assert_eq!(back.trim(), "(3, False)");
    let nat = stdout(&asmlam(&["encode", "2", "--sort", "Nat"]));
    let back = stdout(&asmlam(&["decode", nat.trim(), "--sort", "Nat"]));
    assert_eq!(back.trim(), "2");
}

#[test]
fn trace_and_audit() {
    let out = stdout(&asmlam(&["trace", r"#not ((\x. x) [True])"]));
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[1].starts_with("1 beta"), "{out}");
    assert!(lines[2].starts_with("2 F"), "{out}");
    assert!(out.contains("beta=1 F=1 total=2"));
    let audit = stdout(&asmlam(&["audit"]));
    assert!(audit.lines().count() > 10);
    assert!(audit.contains("curry"));
}

#[test]
fn normalize_reparses_as_program_text() {
    let out = stdout(&asmlam(&["normalize", "unary.asm"]));
    assert!(out.contains("if eq_I(i, four) then"), "{out}");
    let printed = stdout(&asmlam(&["parse", "euclid.asm"]));
    assert!(printed.contains("program"));
}

#[test]
fn deterministic_output() {
    let a = asmlam(&["verify", "euclid.asm", "--grid", "5"]);
    let b = asmlam(&["verify", "euclid.asm", "--grid", "5"]);
    assert_eq!(a.stdout, b.stdout);
}
