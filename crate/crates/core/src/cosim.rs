//! Lockstep co-simulation of a machine and its compiled term, and an audit
//! of the step counts of the basic encodings.

use std::fmt;

use std::collections::BTreeMap;

use crate::asm::{successor, Inputs, State, StepOutcome};
use crate::combinators::{apply_pad, curry_fixpoint, run_round, Boundary, CombError, PadSpec};
use crate::compiler::{CompileError, CompiledMachine, Decoded, SlotKind};
use crate::encodings::{
    boolean, case_cost, case_n_cost, if_then_else, nat_variant, neg, pred, projection_cost, succ, zero_test,
    CostCertificate,
};
use crate::fsig::FSignature;
use crate::term::Term;
use crate::value::{grid, Value};

/// One round of the co-simulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    /// The machine state before the step.
    pub state: String,
    /// The term's boundary after the round (`None`: unrecognized).
    pub decoded: Option<Decoded>,
    pub beta: u64,
    pub f: u64,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    /// The machine was still running when the round budget ran out.
    Inconclusive(String),
}

#[derive(Clone, Debug)]
pub struct LockstepReport {
    pub rounds: Vec<RoundRecord>,
    /// The machine's final verdict, rendered (`None` while running).
    pub machine_outcome: Option<String>,
    pub term_outcome: Option<Decoded>,
    pub verdict: Verdict,
    pub k: u64,
    pub l: u64,
}

impl LockstepReport {
    pub fn agrees(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Total reduction steps taken by the term.
    pub fn total_steps(&self) -> u64 {
        self.rounds.iter().map(|r| r.beta + r.f).sum()
    }
}

impl fmt::Display for LockstepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rounds.iter().enumerate() {
            let d = r.decoded.as_ref().map_or("unrecognized".to_string(), Decoded::to_string);
            let ok = if r.matched { "ok" } else { "MISMATCH" };
            writeln!(f, "round {i}: [{}] beta={} F={} -> {d} {ok}", r.state, r.beta, r.f)?;
        }
        writeln!(f, "machine: {}", self.machine_outcome.as_deref().unwrap_or("running"))?;
        match &self.verdict {
            Verdict::Pass => write!(f, "pass: every round took K={} beta and L={} F steps", self.k, self.l),
            Verdict::Fail(m) => write!(f, "FAIL: {m}"),
            Verdict::Inconclusive(m) => write!(f, "inconclusive: {m}"),
        }
    }
}

/// Checks the delta slots of `vals` against `state`: each list, read as a
/// map, differs from the initial interpretation exactly where the state
/// does, and selection agrees with the state on the whole argument grid.
pub fn delta_fidelity(cm: &CompiledMachine, vals: &[Value], state: &State) -> Result<(), String> {
    let inputs: Inputs = cm
        .slots
        .iter()
        .zip(vals)
        .filter(|(s, _)| s.kind == SlotKind::Input)
        .map(|(s, v)| (s.name.to_string(), v.clone()))
        .collect();
    let init = cm.machine.initial_state(&inputs).map_err(|e| e.to_string())?;
    for (slot, v) in cm.slots.iter().zip(vals) {
        if slot.kind != SlotKind::Delta {
            continue;
        }
        let Value::Seq(rows) = v else {
            return Err(format!("slot {} is not a list", slot.name));
        };
        let sym = cm.machine.vocab.symbol(slot.sym);
        let m = sym.arity();
        let mut map: BTreeMap<&[Value], &Value> = BTreeMap::new();
        for r in rows {
            if let Some(old) = map.insert(&r[..m], &r[m]) {
                if old != &r[m] {
                    return Err(format!("{}: list is not functional", slot.name));
                }
            }
        }
        let carriers: Vec<Vec<Value>> = sym.args.iter().map(|s| s.carrier().unwrap_or_default()).collect();
        for args in grid(&carriers) {
            let now = state.apply(slot.sym, &args);
            let before = init.apply(slot.sym, &args);
            let sel = map.get(&args[..]).map(|v| (*v).clone()).or_else(|| before.clone());
            if sel != now {
                return Err(format!("{}({:?}): list selects {:?}, state has {:?}", slot.name, args, sel, now));
            }
            let listed_change = map.get(&args[..]).is_some_and(|v| Some((*v).clone()) != before);
            if listed_change != (now != before) {
                return Err(format!("{}({:?}): difference not recorded", slot.name, args));
            }
        }
    }
    Ok(())
}

/// Runs the machine and the term side by side for at most `max_rounds`
/// machine steps, checking after every round that the term encodes the
/// machine's state and that the round cost exactly `(K, L)`.
pub fn lockstep(cm: &CompiledMachine, inputs: &Inputs, max_rounds: usize) -> Result<LockstepReport, CompileError> {
    let mut s = cm.machine.initial_state(inputs)?;
    let mut t = cm.initial_term(inputs)?;
    let (k, l) = (cm.k(), cm.l());
    let mut rep = LockstepReport {
        rounds: Vec::new(),
        machine_outcome: None,
        term_outcome: None,
        verdict: Verdict::Inconclusive(format!("still running after {max_rounds} rounds")),
        k,
        l,
    };
    for _ in 0..max_rounds {
        let before = s.digest();
        let outcome = successor(&s, &cm.machine.program);
        let (next, boundary, trace) = match run_round(&t, cm.theta(), cm.slots.len(), &cm.sig, k + l + 1) {
            Ok(r) => r,
            Err(CombError::NoBoundary(n)) => {
                rep.verdict = Verdict::Fail(format!("round did not end within {n} steps"));
                return Ok(rep);
            }
            Err(e) => return Err(e.into()),
        };
        let decoded = match &boundary {
            Boundary::Theta(vals) => Some(Decoded::StillRunning(vals.clone())),
            Boundary::Normal(nf) => cm.decode(nf).ok(),
        };
        let mut problem = None;
        if (trace.beta_count, trace.f_count) != (k, l) {
            problem = Some(format!("round cost beta={} F={}, expected {k}/{l}", trace.beta_count, trace.f_count));
        }
        let mut next_state = None;
        if problem.is_none() {
            problem = match (&outcome, &decoded) {
                (StepOutcome::Continue(s2), Some(Decoded::StillRunning(vals))) => match cm.state_of(vals) {
                    Some(ts) if ts == *s2 => {
                        next_state = Some(s2.clone());
                        delta_fidelity(cm, vals, s2).err()
                    }
                    Some(ts) => Some(format!("state {} but term encodes {}", s2.digest(), ts.digest())),
                    None => Some("term slots do not denote a state".into()),
                },
                (StepOutcome::HaltSuccess(o) | StepOutcome::ImplicitHalt(o), Some(Decoded::Success(p))) if o == p => None,
                (StepOutcome::Fail(_), Some(Decoded::Fail)) | (StepOutcome::Clash(_), Some(Decoded::Clash)) => None,
                (o, Some(d)) => Some(format!("machine {} vs term {d}", describe(o))),
                (o, None) => Some(format!("machine {} vs unrecognized term", describe(o))),
            };
        }
        rep.rounds.push(RoundRecord {
            state: before,
            decoded: decoded.clone(),
            beta: trace.beta_count,
            f: trace.f_count,
            matched: problem.is_none(),
        });
        rep.term_outcome = decoded;
        if let Some(p) = problem {
            rep.machine_outcome = Some(describe(&outcome));
            rep.verdict = Verdict::Fail(format!("round {}: {p}", rep.rounds.len() - 1));
            return Ok(rep);
        }
        match next_state {
            Some(s2) => {
                s = s2;
                t = next;
            }
            None => {
                rep.machine_outcome = Some(describe(&outcome));
                rep.verdict = Verdict::Pass;
                return Ok(rep);
            }
        }
    }
    Ok(rep)
}

fn describe(o: &StepOutcome) -> String {
    match o {
        StepOutcome::Continue(s) => format!("continue [{}]", s.digest()),
        StepOutcome::HaltSuccess(vs) | StepOutcome::ImplicitHalt(vs) => {
            let vs: Vec<String> = vs.iter().map(|v| v.to_string()).collect();
            format!("success [{}]", vs.join(", "))
        }
        StepOutcome::Fail(_) => "fail".into(),
        StepOutcome::Clash(_) => "clash".into(),
    }
}

/// An audited step count: the nominal (published) count where there is
/// one, what this construction is designed to cost, and what leftmost
/// reduction actually took.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditRow {
    pub name: String,
    pub nominal: Option<(u64, u64)>,
    pub designed: (u64, u64),
    pub measured: (u64, u64),
    pub note: &'static str,
}

impl AuditRow {
    /// The measurement agrees with the design.
    pub fn ok(&self) -> bool {
        self.designed == self.measured
    }

    pub fn matches_nominal(&self) -> Option<bool> {
        self.nominal.map(|n| n == self.measured)
    }
}

impl fmt::Display for AuditRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pair = |p: (u64, u64)| format!("{}/{}", p.0, p.1);
        let nominal = self.nominal.map_or("-".to_string(), pair);
        let flag = match self.matches_nominal() {
            None => "n/a",
            Some(true) => "match",
            Some(false) => "MISMATCH",
        };
        write!(
            f,
            "{:<14} {:>8} {:>8} {:>8}  {:<8} {}",
            self.name,
            nominal,
            pair(self.designed),
            pair(self.measured),
            flag,
            self.note
        )
    }
}

/// Column header for [`AuditRow`]'s display (counts are beta/F).
pub const AUDIT_HEADER: &str = "name            nominal designed measured  vs-nom   note";

const NOTE_ITE: &str = "selector applied to both branches: the Boolean's own 2 steps plus the pair's";
const NOTE_NAT: &str = "pair-variant naturals; every β-step counted, including the selector's";
const NOTE_CASE: &str = "this Case_n takes a uniform 4n+1 on every branch";
const NOTE_EXACT: &str = "exact";

fn row(name: String, nominal: Option<(u64, u64)>, designed: (u64, u64), note: &'static str, c: &CostCertificate) -> AuditRow {
    AuditRow {
        name,
        nominal,
        designed,
        measured: (c.beta_count, c.f_count),
        note,
    }
}

fn cert(name: &str, t: &Term, expect: &Term, sig: Option<&FSignature>) -> CostCertificate {
    CostCertificate::measure(name, &[], t, expect, sig).expect("audited terms normalize")
}

/// Measures the basic encodings: selection, naturals, negation, the
/// fixed point, projections, case analysis and padding.
pub fn decoration_audit() -> Vec<AuditRow> {
    let mut out = Vec::new();
    let (m, n) = (Term::var("m"), Term::var("n"));
    for b in [true, false] {
        let t = Term::app(if_then_else(m.clone(), n.clone()), boolean(b));
        let want = if b { &m } else { &n };
        out.push(row(format!("ite[{b}]"), Some((2, 0)), (3, 0), NOTE_ITE, &cert("ite", &t, want, None)));
        let c = cert("neg", &Term::app(neg(), boolean(b)), &boolean(!b), None);
        out.push(row(format!("neg[{b}]"), None, (3, 0), NOTE_EXACT, &c));
    }
    for k in 0..3 {
        let z = cert("zero", &Term::app(zero_test(), nat_variant(k)), &boolean(k == 0), None);
        out.push(row(format!("zero[{k}]"), Some((3, 0)), (4, 0), NOTE_NAT, &z));
        let s = cert("succ", &Term::app(succ(), nat_variant(k)), &nat_variant(k + 1), None);
        out.push(row(format!("succ[{k}]"), Some((3, 0)), (1, 0), NOTE_NAT, &s));
        let p = cert("pred", &Term::app(pred(), nat_variant(k + 1)), &nat_variant(k), None);
        out.push(row(format!("pred[{}]", k + 1), Some((3, 0)), (4, 0), NOTE_NAT, &p));
    }
    {
        let f = Term::var("f");
        let th = curry_fixpoint(&f);
        let r = crate::reduce::reduce_leftmost(&th, 1);
        let ok = r.term == Term::app(f, th);
        out.push(AuditRow {
            name: "curry".into(),
            nominal: Some((1, 0)),
            designed: (1, 0),
            measured: (r.trace.beta_count, if ok { 0 } else { u64::MAX }),
            note: NOTE_EXACT,
        });
    }
    for k in 1..=5 {
        for i in 1..=k {
            let c = 1 + k as u64;
            out.push(row(format!("proj[{k},{i}]"), Some((c, 0)), (c, 0), NOTE_EXACT, &projection_cost(k, i)));
        }
    }
    for n in 1..=4 {
        for i in 1..=n {
            let nominal = Some((3 * n as u64, 0));
            out.push(row(format!("case[{n},{i}]"), nominal, (case_n_cost(n), 0), NOTE_CASE, &case_cost(n, i)));
        }
    }
    let sig = FSignature::boolean();
    let (th, x) = (Term::var("theta"), Term::var("t"));
    for (k, l) in [(3, 0), (3, 2), (4, 1), (6, 3)] {
        for rf in [false, true] {
            let spec = PadSpec::new(k, l);
            let t = Term::app(apply_pad(&spec, rf, th.clone()).unwrap(), x.clone());
            let c = cert("pad", &t, &Term::app(th.clone(), x.clone()), Some(&sig));
            let tag = if rf { "pad_rf" } else { "pad" };
            out.push(row(format!("{tag}[{k},{l}]"), Some((k, l)), (k, l), NOTE_EXACT, &c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn audit_is_clean() {
        let rows = decoration_audit();
        for r in &rows {
            assert!(r.ok(), "{r}");
        }
        for r in rows.iter().filter(|r| r.name == "curry" || r.name.starts_with("proj") || r.name.starts_with("pad")) {
            assert_eq!(r.matches_nominal(), Some(true), "{r}");
        }
        for kind in ["ite", "case", "zero", "succ", "pred"] {
            assert!(rows.iter().any(|r| r.name.starts_with(kind)), "{kind} row missing");
        }
    }
}
