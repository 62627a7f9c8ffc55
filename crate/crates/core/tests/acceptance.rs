//! The twelve acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line (visible with `--nocapture`).

mod common;

use std::time::{Duration, Instant};

use asmlam::asm::{Inputs, RunOutcome};
use asmlam::combinators::{curry_fixpoint, pad, PadSpec};
use asmlam::compiler::{compile, compile_general, compile_type0, CompileOptions, Decoded};
use asmlam::cosim::{decoration_audit, lockstep, AUDIT_HEADER};
use asmlam::encodings::projection_cost;
use asmlam::fsig::FSignature;
use asmlam::normalize::{check_equivalence, normalize_machine};
use asmlam::reduce::{check_confluence_bounded, reduce_leftmost_f, step, Confluence, StepKind, StepResult};
use asmlam::value::Value;
use asmlam::Term;
use common::{euclid, gcd, load, nat_inputs, rng};

fn report(n: u32, ok: bool, detail: String) {
    println!("criterion {n:>2}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

#[test]
fn criterion_01_euclid_end_to_end() {
    let m = euclid();
    let start = Instant::now();
    let mut bad = Vec::new();
    for a in 1..=50 {
        for b in 1..=50 {
            let r = m.run(&nat_inputs(&[("a0", a), ("b0", b)]), 500).unwrap();
            let want = RunOutcome::Success { outputs: vec![Value::Nat(gcd(a, b))], explicit_halt: false };
            if r.outcome != want {
                bad.push((a, b));
            }
        }
    }
    let t = start.elapsed();
    report(1, bad.is_empty() && t < Duration::from_secs(5), format!("2500 runs, {} wrong, {t:?}", bad.len()));
}

#[test]
fn criterion_02_euclid_lockstep() {
    let m = euclid();
    let start = Instant::now();
    let cm = compile_type0(&m, &CompileOptions::default()).unwrap();
    let mut failures = Vec::new();
    let mut rounds = 0;
    for a in 1..=20 {
        for b in 1..=20 {
            let rep = lockstep(&cm, &nat_inputs(&[("a0", a), ("b0", b)]), 100).unwrap();
            rounds += rep.rounds.len();
            let ends = rep.term_outcome == Some(Decoded::Success(vec![Value::Nat(gcd(a, b))]));
            let costs = rep.rounds.iter().all(|r| (r.beta, r.f) == (cm.k(), cm.l()));
            if !rep.agrees() || !ends || !costs {
                failures.push(format!("({a},{b}): {:?}", rep.verdict));
            }
        }
    }
    let t = start.elapsed();
    report(
        2,
        failures.is_empty() && t < Duration::from_secs(60),
        format!("400 inputs, {rounds} rounds at (K,L)=({},{}), {} failures, {t:?}", cm.k(), cm.l(), failures.len()),
    );
}

#[test]
fn criterion_03_exit_rows() {
    let mut notes = Vec::new();
    let mut ok = true;
    for (file, want, code) in [
        (include_str!("../machines/fail.asm"), Decoded::Fail, 2),
        (include_str!("../machines/clash.asm"), Decoded::Clash, 3),
    ] {
        let cm = compile_type0(&load(file), &CompileOptions::default()).unwrap();
        let t = cm.initial_term(&Inputs::new()).unwrap();
        let r = reduce_leftmost_f(&t, &cm.sig, cm.k() + cm.l() + 5);
        let normal = r.outcome == asmlam::reduce::Outcome::Normal;
        let exact = (r.trace.beta_count, r.trace.f_count) == (cm.k(), cm.l());
        let is_code = r.term == Term::code(Value::Nat(code));
        let decoded = cm.decode(&r.term).ok() == Some(want.clone());
        ok &= normal && exact && is_code && decoded;
        notes.push(format!("{want} -> [{code}] in {}+{} steps", r.trace.beta_count, r.trace.f_count));
    }
    report(3, ok, notes.join("; "));
}

#[test]
fn criterion_04_unary_delta_lockstep() {
    let m = common::unary();
    let start = Instant::now();
    let cm = compile_general(&m, &CompileOptions::default()).unwrap();
    let rep = lockstep(&cm, &Inputs::new(), 50).unwrap();
    let rows: Vec<Vec<Value>> = (0..5).map(|i| vec![Value::Nat(i), Value::Nat(if i < 4 { 2 * i } else { 0 })]).collect();
    let ends = rep.term_outcome == Some(Decoded::Success(vec![Value::Seq(rows)]));
    let costs = rep.rounds.iter().all(|r| (r.beta, r.f) == (cm.k(), cm.l()));
    let t = start.elapsed();
    report(
        4,
        rep.agrees() && ends && costs && t < Duration::from_secs(60),
        format!("{} rounds at (K,L)=({},{}), delta fidelity on every round, {t:?}", rep.rounds.len(), cm.k(), cm.l()),
    );
}

#[test]
fn criterion_05_padding() {
    let sig = FSignature::boolean();
    let (th, x) = (Term::var("theta"), Term::var("t"));
    let mut bad = Vec::new();
    for k in 3..=8 {
        for l in 0..=4 {
            let p = pad(&PadSpec::new(k, l)).unwrap();
            let r = reduce_leftmost_f(&Term::apps(p, [th.clone(), x.clone()]), &sig, 100);
            let kinds = r.trace.kinds();
            let order = kinds.iter().take(l as usize).all(|k| *k == StepKind::F)
                && kinds.iter().skip(l as usize).all(|k| *k == StepKind::Beta);
            let ok = r.term == Term::app(th.clone(), x.clone()) && order && (r.trace.beta_count, r.trace.f_count) == (k, l);
            if !ok {
                bad.push((k, l));
            }
        }
    }
    report(5, bad.is_empty(), format!("30 (K,L) pairs, F strictly before beta; bad: {bad:?}"));
}

#[test]
fn criterion_06_curry() {
    let mut r = rng(6);
    let mut ok = 0;
    for _ in 0..25 {
        let f = common::random_closed_term(&mut r, 10);
        let th = curry_fixpoint(&f);
        if let StepResult::Reduced { term, kind: StepKind::Beta, .. } = step(&th, None) {
            if term == Term::app(f, th) {
                ok += 1;
            }
        }
    }
    report(6, ok == 25, format!("{ok}/25 random closed F unfold in exactly one step"));
}

#[test]
fn criterion_07_projections() {
    let mut bad = Vec::new();
    for k in 1..=5 {
        for i in 1..=k {
            let c = projection_cost(k, i);
            if (c.beta_count, c.f_count) != (1 + k as u64, 0) {
                bad.push((k, i, c.beta_count));
            }
        }
    }
    report(7, bad.is_empty(), format!("k <= 5, all i: cost 1+k; bad: {bad:?}"));
}

#[test]
fn criterion_08_normalizer() {
    let mut r = rng(8);
    let mut matched = 0;
    let mut first_bad = None;
    for _ in 0..100 {
        let (src, m) = common::random_machine(&mut r, 4);
        let g = normalize_machine(&m);
        let states: Vec<_> = (0..20).map(|_| m.initial_state(&common::random_inputs(&mut r)).unwrap()).collect();
        if check_equivalence(&m.program, &g, &states, 50) {
            matched += 1;
        } else if first_bad.is_none() {
            first_bad = Some(src);
        }
    }
    report(8, matched == 100, format!("{matched}/100 programs x 20 states run-equivalent {first_bad:?}"));
}

#[test]
fn criterion_09_confluence() {
    let mut r = rng(9);
    let sig = FSignature::boolean();
    let (mut confluent, mut cut, mut divergent) = (0, 0, 0);
    for _ in 0..200 {
        let t = common::random_closed_term(&mut r, 12);
        match check_confluence_bounded(&t, Some(&sig), 6) {
            Confluence::Confluent(_) => confluent += 1,
            Confluence::Inconclusive => cut += 1,
            Confluence::Divergent(..) => divergent += 1,
        }
    }
    report(
        9,
        divergent == 0,
        format!("200 terms: {confluent} confluent, {cut} hit the size guard, {divergent} divergent"),
    );
}

#[test]
fn criterion_10_good_term_costs() {
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in [euclid(), common::unary()] {
        let cm = compile(&m, &CompileOptions::default()).unwrap();
        assert!(cm.probes.len() >= 3);
        let terms = cm.rho.iter().chain(cm.phi.iter().flatten()).chain(cm.gamma.iter());
        for t in terms {
            let t = t.fold_ground(&cm.sig);
            checked += 1;
            match t.reduce_cost(&cm.sig, &cm.probes) {
                Ok(c) if c == t.node_count() as u64 => {}
                other => bad.push(format!("{t}: {other:?}")),
            }
        }
    }
    report(10, bad.is_empty(), format!("{checked} guard/update/exit terms value-independent; bad: {bad:?}"));
}

#[test]
fn criterion_11_decoration_audit() {
    let rows = decoration_audit();
    println!("{AUDIT_HEADER}");
    for r in &rows {
        println!("{r}");
    }
    let exact = rows
        .iter()
        .filter(|r| r.name == "curry" || r.name.starts_with("proj"))
        .all(|r| r.matches_nominal() == Some(true));
    let present = ["ite", "case", "zero", "succ", "pred", "curry", "proj", "pad"]
        .iter()
        .all(|k| rows.iter().any(|r| r.name.starts_with(k)));
    let designed = rows.iter().all(|r| r.ok());
    let mismatches = rows.iter().filter(|r| r.matches_nominal() == Some(false)).count();
    report(
        11,
        exact && present && designed,
        format!("{} rows; curry and projections exact; {mismatches} documented convention mismatches", rows.len()),
    );
}

/// A machine whose normal form has `n + 1` clauses: a chain of `n` range
/// tests on a counter, each bumping a different register.
fn family(n: usize) -> String {
    let mut src = String::from("sort N = 0..15;\nstatic succ : N -> N = builtin succ;\nstatic lt : N, N -> Bool = builtin lt;\n");
    src.push_str("dynamic c : N output;\ninit c = 0;\n");
    for i in 0..n {
        src.push_str(&format!("dynamic r{i} : N;\ninit r{i} = 0;\n"));
    }
    let mut prog = String::from("halt");
    for i in (0..n).rev() {
        prog = format!("if lt(c, {}) then par {{ r{i} := succ(r{i}); c := succ(c); }} else {prog}", i + 1);
    }
    src.push_str(&format!("program {prog}\n"));
    src
}

#[test]
fn criterion_12_k_size() {
    let mut curve = Vec::new();
    for n in 1..=6 {
        let m = load(&family(n));
        let size = normalize_machine(&m).size() as u64;
        let cm = compile(&m, &CompileOptions::default()).unwrap();
        curve.push((size, cm.comb.k_min));
    }
    let monotone = curve.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1);
    let c = 4;
    let bounded = curve.iter().all(|(s, k)| *k <= c * s * s);
    report(12, monotone && bounded, format!("(size, K_min) = {curve:?}; K_min <= {c} * size^2"));
}
