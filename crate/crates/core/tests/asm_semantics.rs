mod common;

use asmlam::asm::{successor, RunOutcome, StepOutcome};
use asmlam::value::Value;
use common::{euclid, gcd, load, nat_inputs};

fn nat(n: u64) -> Value {
    Value::Nat(n)
}

#[test]
fn euclid_steps_read_old_values() {
    let m = euclid();
    let s = m.initial_state(&nat_inputs(&[("a0", 12), ("b0", 8)])).unwrap();
    match successor(&s, &m.program) {
        StepOutcome::Continue(t) => assert_eq!(t.digest(), "a=8 b=4"),
        o => panic!("{o:?}"),
    }
    let s = m.initial_state(&nat_inputs(&[("a0", 4), ("b0", 0)])).unwrap();
    assert_eq!(successor(&s, &m.program), StepOutcome::ImplicitHalt(vec![nat(4)]));
}

#[test]
fn euclid_runs() {
    let m = euclid();
    let r = m.run(&nat_inputs(&[("a0", 12), ("b0", 8)]), 100).unwrap();
    assert_eq!(r.steps, 2);
    let digests: Vec<String> = r.trajectory.iter().map(|s| s.digest()).collect();
    assert_eq!(digests, ["a=12 b=8", "a=8 b=4", "a=4 b=0"]);
    assert_eq!(r.outcome, RunOutcome::Success { outputs: vec![nat(4)], explicit_halt: false });
    let r = m.run(&nat_inputs(&[("a0", 7), ("b0", 0)]), 100).unwrap();
    assert_eq!(r.steps, 0);
    assert_eq!(r.outcome, RunOutcome::Success { outputs: vec![nat(7)], explicit_halt: false });
}

#[test]
fn euclid_matches_gcd() {
    let m = euclid();
    for a in 1..=50 {
        for b in 1..=50 {
            let r = m.run(&nat_inputs(&[("a0", a), ("b0", b)]), 200).unwrap();
            assert_eq!(r.outcome, RunOutcome::Success { outputs: vec![nat(gcd(a, b))], explicit_halt: false });
        }
    }
}

#[test]
fn clash_fail_and_halt_priority() {
    let m = load("sort N = 0..3; dynamic c : N output; init c = 0; program par { c := 1; c := 2; }");
    let r = m.run(&Default::default(), 10).unwrap();
    assert!(matches!(r.outcome, RunOutcome::Clash(_)), "{:?}", r.outcome);
    let m = load("sort N = 0..3; dynamic c : N output; init c = 0; program par { halt; fail; }");
    let r = m.run(&Default::default(), 10).unwrap();
    assert!(matches!(r.outcome, RunOutcome::Fail(_)), "{:?}", r.outcome);
    let m = load("sort N = 0..3; dynamic c : N output; init c = 0; program par { c := 1; c := 1; halt; }");
    let r = m.run(&Default::default(), 10).unwrap();
    assert_eq!(r.outcome, RunOutcome::Success { outputs: vec![nat(0)], explicit_halt: true });
}

#[test]
fn unary_table_fills() {
    let m = common::unary();
    let r = m.run(&Default::default(), 20).unwrap();
    assert_eq!(r.steps, 4);
    let rows: Vec<Vec<Value>> = (0..5).map(|i| vec![nat(i), nat(if i < 4 { 2 * i } else { 0 })]).collect();
    assert_eq!(r.outcome, RunOutcome::Success { outputs: vec![Value::Seq(rows)], explicit_halt: true });
}
