use std::collections::BTreeMap;
use std::fmt;

use crate::asm::program::{Program, Update};
use crate::asm::state::State;
use crate::asm::vocab::SymId;
use crate::value::Value;

/// An update whose arguments and right-hand side have been evaluated.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EvalUpdate {
    pub sym: SymId,
    pub args: Vec<Value>,
    pub value: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailReason {
    Explicit,
    UndefinedEvaluation,
}

/// Two active updates writing different values to the same location.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClashWitness {
    pub sym: SymId,
    pub args: Vec<Value>,
    pub values: (Value, Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Continue(State),
    HaltSuccess(Vec<Value>),
    ImplicitHalt(Vec<Value>),
    Fail(FailReason),
    Clash(ClashWitness),
}

fn cond(s: &State, c: &crate::asm::term::AsmTerm) -> Option<bool> {
    s.eval_ground(c).and_then(|v| v.as_bool())
}

/// The active updates, in textual order.
pub fn active_updates<'a>(s: &State, p: &'a Program) -> Vec<&'a Update> {
    let mut out = Vec::new();
    collect_active(s, p, &mut out);
    out
}

fn collect_active<'a>(s: &State, p: &'a Program, out: &mut Vec<&'a Update>) {
    match p {
        Program::Skip | Program::Halt | Program::Fail => {}
        Program::Update(u) => out.push(u),
        Program::If(c, a, b) => match cond(s, c) {
            Some(true) => collect_active(s, a, out),
            Some(false) => collect_active(s, b, out),
            None => {}
        },
        Program::Par(ps) => ps.iter().for_each(|q| collect_active(s, q, out)),
    }
}

/// Evaluates updates; `None` if any argument or right-hand side is undefined.
pub fn evaluate_updates(s: &State, us: &[&Update]) -> Option<Vec<EvalUpdate>> {
    us.iter()
        .map(|u| {
            Some(EvalUpdate {
                sym: u.sym,
                args: u.args.iter().map(|a| s.eval_ground(a)).collect::<Option<Vec<_>>>()?,
                value: s.eval_ground(&u.rhs)?,
            })
        })
        .collect()
}

/// The least clashing location with its two least distinct values, so the
/// witness does not depend on the order of `updates`.
pub fn detect_clash(updates: &[EvalUpdate]) -> Option<ClashWitness> {
    let mut by_loc: BTreeMap<(SymId, &[Value]), Vec<&Value>> = BTreeMap::new();
    for u in updates {
        by_loc.entry((u.sym, &u.args)).or_default().push(&u.value);
    }
    by_loc.into_iter().find_map(|((sym, args), mut vals)| {
        vals.sort();
        vals.dedup();
        (vals.len() >= 2).then(|| ClashWitness {
            sym,
            args: args.to_vec(),
            values: (vals[0].clone(), vals[1].clone()),
        })
    })
}

/// `(halts, fails)`. A parallel block halts if some part halts and none
/// fails.
pub fn halts_or_fails(s: &State, p: &Program) -> (bool, bool) {
    match p {
        Program::Skip | Program::Update(_) => (false, false),
        Program::Halt => (true, false),
        Program::Fail => (false, true),
        Program::If(c, a, b) => match cond(s, c) {
            Some(true) => halts_or_fails(s, a),
            Some(false) => halts_or_fails(s, b),
            None => (false, false),
        },
        Program::Par(ps) => {
            let parts: Vec<_> = ps.iter().map(|q| halts_or_fails(s, q)).collect();
            let fails = parts.iter().any(|p| p.1);
            (!fails && parts.iter().any(|p| p.0), fails)
        }
    }
}

/// Successor computation shared by every program form.
pub fn successor_from(s: &State, active: &[&Update], halts: bool, fails: bool) -> StepOutcome {
    if fails {
        return StepOutcome::Fail(FailReason::Explicit);
    }
    let Some(evald) = evaluate_updates(s, active) else {
        return StepOutcome::Fail(FailReason::UndefinedEvaluation);
    };
    if let Some(w) = detect_clash(&evald) {
        return StepOutcome::Clash(w);
    }
    if halts {
        return StepOutcome::HaltSuccess(s.outputs());
    }
    if evald.is_empty() {
        return StepOutcome::ImplicitHalt(s.outputs());
    }
    let mut tables = s.tables.clone();
    for u in evald {
        let slot = s.env.slots[u.sym.0].expect("updates write dynamic symbols");
        tables[slot].insert(u.args, u.value);
    }
    StepOutcome::Continue(s.with_tables(tables))
}

pub fn successor(s: &State, p: &Program) -> StepOutcome {
    let active = active_updates(s, p);
    let (halts, fails) = halts_or_fails(s, p);
    successor_from(s, &active, halts, fails)
}

/// Anything with a one-step semantics over states.
pub trait StepProgram {
    fn step(&self, s: &State) -> StepOutcome;
}

impl StepProgram for Program {
    fn step(&self, s: &State) -> StepOutcome {
        successor(s, self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Success { outputs: Vec<Value>, explicit_halt: bool },
    Fail(FailReason),
    Clash(ClashWitness),
    Diverged,
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunOutcome::Success { outputs, explicit_halt } => {
                let vs: Vec<String> = outputs.iter().map(Value::to_string).collect();
                let how = if *explicit_halt { "halt" } else { "implicit halt" };
                write!(f, "success ({how}) outputs=[{}]", vs.join(", "))
            }
            RunOutcome::Fail(FailReason::Explicit) => write!(f, "fail (explicit)"),
            RunOutcome::Fail(FailReason::UndefinedEvaluation) => write!(f, "fail (undefined evaluation)"),
            RunOutcome::Clash(w) => {
                let args: Vec<String> = w.args.iter().map(Value::to_string).collect();
                write!(f, "clash at {}({}): {} vs {}", w.sym, args.join(", "), w.values.0, w.values.1)
            }
            RunOutcome::Diverged => write!(f, "diverged"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: RunOutcome,
    /// Every state visited, starting with the initial one.
    pub trajectory: Vec<State>,
    /// Number of transitions taken.
    pub steps: usize,
}

/// Iterates the successor from `initial`; more than `max_steps` transitions
/// count as divergence.
pub fn run_program(p: &dyn StepProgram, initial: State, max_steps: usize) -> RunResult {
    let mut trajectory = vec![initial];
    loop {
        let steps = trajectory.len() - 1;
        let outcome = match p.step(trajectory.last().unwrap()) {
            StepOutcome::Continue(next) => {
                if steps == max_steps {
                    RunOutcome::Diverged
                } else {
                    trajectory.push(next);
                    continue;
                }
            }
            StepOutcome::HaltSuccess(outputs) => RunOutcome::Success {
                outputs,
                explicit_halt: true,
            },
            StepOutcome::ImplicitHalt(outputs) => RunOutcome::Success {
                outputs,
                explicit_halt: false,
            },
            StepOutcome::Fail(r) => RunOutcome::Fail(r),
            StepOutcome::Clash(w) => RunOutcome::Clash(w),
        };
        return RunResult {
            outcome,
            trajectory,
            steps,
        };
    }
}
