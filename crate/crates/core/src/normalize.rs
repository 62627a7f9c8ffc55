//! Normal form of programs: a parallel block of guarded blocks with mutually
//! exclusive guards.
//!
//! A conditional distinguishes three cases — its condition is true, false, or
//! undefined (no branch fires) — so guards are conjunctions of three-valued
//! literals.

use std::fmt::{self, Write as _};

use crate::asm::{
    run_program, successor_from, AsmTerm, Machine, Program, RunResult, State, StaticDef, StepOutcome, StepProgram,
    Update, Vocabulary,
};
use crate::value::grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    True,
    False,
    Undef,
}

/// `cond` evaluates to `status` (`Undef`: has no value).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub cond: AsmTerm,
    pub status: Status,
}

impl Literal {
    pub fn holds(&self, s: &State) -> bool {
        let v = s.eval_ground(&self.cond).and_then(|v| v.as_bool());
        match self.status {
            Status::True => v == Some(true),
            Status::False => v == Some(false),
            Status::Undef => v.is_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    Update(Update),
    Halt,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    /// Conjunction; empty means `True`.
    pub guard: Vec<Literal>,
    pub instrs: Vec<Instr>,
}

impl Clause {
    pub fn fires(&self, s: &State) -> bool {
        self.guard.iter().all(|l| l.holds(s))
    }

    pub fn updates(&self) -> impl Iterator<Item = &Update> {
        self.instrs.iter().filter_map(|i| match i {
            Instr::Update(u) => Some(u),
            _ => None,
        })
    }

    pub fn has_halt(&self) -> bool {
        self.instrs.contains(&Instr::Halt)
    }

    pub fn has_fail(&self) -> bool {
        self.instrs.contains(&Instr::Fail)
    }
}

/// A parallel block of guarded blocks; at most one guard holds in any state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GuardedProgram {
    pub clauses: Vec<Clause>,
}

impl GuardedProgram {
    /// The clause whose guard holds, if any.
    pub fn active_clause(&self, s: &State) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.fires(s))
    }

    pub fn true_guards(&self, s: &State) -> usize {
        self.clauses.iter().filter(|c| c.fires(s)).count()
    }

    /// Number of nodes, counting guard and update terms.
    pub fn size(&self) -> usize {
        self.clauses
            .iter()
            .map(|c| {
                1 + c.guard.iter().map(|l| 1 + l.cond.size()).sum::<usize>()
                    + c.instrs
                        .iter()
                        .map(|i| match i {
                            Instr::Update(u) => u.size(),
                            _ => 1,
                        })
                        .sum::<usize>()
            })
            .sum()
    }

    /// An equivalent program in the ordinary syntax, when no guard needs an
    /// `Undef` literal.
    pub fn to_program(&self) -> Option<Program> {
        let mut blocks = Vec::new();
        for c in &self.clauses {
            let mut body = Program::Par(
                c.instrs
                    .iter()
                    .map(|i| match i {
                        Instr::Update(u) => Program::Update(u.clone()),
                        Instr::Halt => Program::Halt,
                        Instr::Fail => Program::Fail,
                    })
                    .collect(),
            );
            for l in c.guard.iter().rev() {
                body = match l.status {
                    Status::True => Program::if_then(l.cond.clone(), body),
                    Status::False => Program::if_else(l.cond.clone(), Program::Skip, body),
                    Status::Undef => return None,
                };
            }
            blocks.push(body);
        }
        Some(Program::Par(blocks))
    }

    pub fn display<'a>(&'a self, v: &'a Vocabulary) -> GuardedDisplay<'a> {
        GuardedDisplay { g: self, v }
    }
}

pub struct GuardedDisplay<'a> {
    g: &'a GuardedProgram,
    v: &'a Vocabulary,
}

impl fmt::Display for GuardedDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "par {{")?;
        for c in &self.g.clauses {
            let mut guard = String::new();
            for (i, l) in c.guard.iter().enumerate() {
                if i > 0 {
                    guard.push_str(" and ");
                }
                let t = l.cond.display(self.v);
                match l.status {
                    Status::True => write!(guard, "{t}")?,
                    Status::False => write!(guard, "not({t})")?,
                    Status::Undef => write!(guard, "undefined({t})")?,
                }
            }
            if guard.is_empty() {
                guard.push_str("True");
            }
            writeln!(f, "  if {guard} then par {{")?;
            for i in &c.instrs {
                match i {
                    Instr::Halt => writeln!(f, "    halt;")?,
                    Instr::Fail => writeln!(f, "    fail;")?,
                    Instr::Update(u) => {
                        write!(f, "    {}", self.v.name_of(u.sym))?;
                        if !u.args.is_empty() {
                            let a: Vec<String> = u.args.iter().map(|t| t.display(self.v).to_string()).collect();
                            write!(f, "({})", a.join(", "))?;
                        }
                        writeln!(f, " := {};", u.rhs.display(self.v))?;
                    }
                }
            }
            writeln!(f, "  }};")?;
        }
        write!(f, "}}")
    }
}

impl StepProgram for GuardedProgram {
    fn step(&self, s: &State) -> StepOutcome {
        match self.active_clause(s) {
            None => successor_from(s, &[], false, false),
            Some(c) => {
                let ups: Vec<&Update> = c.updates().collect();
                let fails = c.has_fail();
                successor_from(s, &ups, c.has_halt() && !fails, fails)
            }
        }
    }
}

/// Complete decision tree: every state reaches exactly one leaf.
#[derive(Clone, Debug)]
enum Tree {
    Leaf(Vec<Instr>),
    Node(AsmTerm, Box<Tree>, Box<Tree>, Option<Box<Tree>>),
}

fn build(p: &Program, may_undef: &dyn Fn(&AsmTerm) -> bool) -> Tree {
    match p {
        Program::Skip => Tree::Leaf(Vec::new()),
        Program::Halt => Tree::Leaf(vec![Instr::Halt]),
        Program::Fail => Tree::Leaf(vec![Instr::Fail]),
        Program::Update(u) => Tree::Leaf(vec![Instr::Update(u.clone())]),
        Program::If(c, a, b) => Tree::Node(
            c.clone(),
            Box::new(build(a, may_undef)),
            Box::new(build(b, may_undef)),
            may_undef(c).then(|| Box::new(Tree::Leaf(Vec::new()))),
        ),
        Program::Par(ps) => ps
            .iter()
            .fold(Tree::Leaf(Vec::new()), |acc, q| graft(acc, &build(q, may_undef), &mut Vec::new())),
    }
}

/// Runs `b` below every leaf of `a`, concatenating instructions. `path`
/// records the decisions taken so far, so a repeated condition follows its
/// known branch.
fn graft(a: Tree, b: &Tree, path: &mut Vec<(AsmTerm, Status)>) -> Tree {
    match a {
        Tree::Leaf(instrs) => prefix(instrs, b, path),
        Tree::Node(c, t, f, u) => {
            let go = |sub: Tree, st: Status, path: &mut Vec<(AsmTerm, Status)>| {
                path.push((c.clone(), st));
                let r = graft(sub, b, path);
                path.pop();
                Box::new(r)
            };
            let t = go(*t, Status::True, path);
            let f = go(*f, Status::False, path);
            let u = u.map(|u| go(*u, Status::Undef, path));
            Tree::Node(c, t, f, u)
        }
    }
}

fn prefix(instrs: Vec<Instr>, b: &Tree, path: &mut Vec<(AsmTerm, Status)>) -> Tree {
    match b {
        Tree::Leaf(more) => {
            let mut all = instrs;
            all.extend(more.iter().cloned());
            Tree::Leaf(all)
        }
        Tree::Node(c, t, f, u) => {
            if let Some((_, st)) = path.iter().find(|(d, _)| d == c) {
                let sub = match st {
                    Status::True => t,
                    Status::False => f,
                    Status::Undef => u.as_ref().expect("undefined branch recorded"),
                };
                return prefix(instrs, sub, path);
            }
            let go = |sub: &Tree, st: Status, path: &mut Vec<(AsmTerm, Status)>| {
                path.push((c.clone(), st));
                let r = prefix(instrs.clone(), sub, path);
                path.pop();
                Box::new(r)
            };
            let t2 = go(t, Status::True, path);
            let f2 = go(f, Status::False, path);
            let u2 = u.as_ref().map(|u| go(u, Status::Undef, path));
            Tree::Node(c.clone(), t2, f2, u2)
        }
    }
}

fn clauses(t: &Tree, path: &mut Vec<Literal>, out: &mut Vec<Clause>) {
    match t {
        Tree::Leaf(instrs) => {
            if !instrs.is_empty() {
                out.push(Clause {
                    guard: path.clone(),
                    instrs: instrs.clone(),
                });
            }
        }
        Tree::Node(c, tt, ff, uu) => {
            for (sub, status) in [(Some(tt), Status::True), (Some(ff), Status::False), (uu.as_ref(), Status::Undef)] {
                if let Some(sub) = sub {
                    path.push(Literal {
                        cond: c.clone(),
                        status,
                    });
                    clauses(sub, path, out);
                    path.pop();
                }
            }
        }
    }
}

/// Normal form assuming any condition may be undefined.
pub fn normalize(p: &Program) -> GuardedProgram {
    normalize_with(p, &|_| true)
}

/// Normal form where `may_undef` tells which conditions can lack a value;
/// conditions known to be defined get no `Undef` branch.
pub fn normalize_with(p: &Program, may_undef: &dyn Fn(&AsmTerm) -> bool) -> GuardedProgram {
    let tree = build(p, may_undef);
    let mut out = Vec::new();
    clauses(&tree, &mut Vec::new(), &mut out);
    GuardedProgram { clauses: out }
}

/// Normal form of a machine's program, dropping `Undef` branches for
/// conditions that are defined in every state.
pub fn normalize_machine(m: &Machine) -> GuardedProgram {
    normalize_with(&m.program, &|c| !always_defined(m, c))
}

/// Re-normalizes a guarded program (through its ordinary form when there is
/// one).
pub fn normalize_guarded(g: &GuardedProgram) -> GuardedProgram {
    match g.to_program() {
        Some(p) => normalize(&p),
        None => g.clone(),
    }
}

/// Whether a static is total on the grid of its argument carriers.
pub fn static_is_total(m: &Machine, f: crate::asm::SymId) -> bool {
    let sym = m.vocab.symbol(f);
    match m.statics.get(&f) {
        Some(StaticDef::Auto) | Some(StaticDef::Const(_)) | Some(StaticDef::Input) => true,
        Some(StaticDef::Builtin(_)) | Some(StaticDef::Table(_)) => {
            let Some(carriers) = sym.args.iter().map(|s| s.carrier()).collect::<Option<Vec<_>>>() else {
                return false;
            };
            if carriers.iter().map(Vec::len).product::<usize>() > 1 << 16 {
                return false;
            }
            grid(&carriers).iter().all(|args| {
                let out = match &m.statics[&f] {
                    StaticDef::Builtin(b) => crate::asm::builtin_apply(b, args),
                    StaticDef::Table(t) => t.get(args).cloned(),
                    _ => unreachable!(),
                };
                out.is_some_and(|v| sym.result.contains(&v))
            })
        }
        None => false,
    }
}

/// A term built from total statics and dynamic constants always has a
/// value (dynamic constants are defined in every reachable state).
pub fn always_defined(m: &Machine, t: &AsmTerm) -> bool {
    match t {
        AsmTerm::Var(_) | AsmTerm::Lit(_) => true,
        AsmTerm::App(f, args) => {
            let sym = m.vocab.symbol(*f);
            let head = if sym.is_dynamic() { sym.arity() == 0 } else { static_is_total(m, *f) };
            head && args.iter().all(|a| always_defined(m, a))
        }
    }
}

/// Runs `p` and `q` from every given state and compares full runs.
pub fn check_equivalence(
    p: &dyn StepProgram,
    q: &dyn StepProgram,
    states: &[State],
    max_steps: usize,
) -> bool {
    states.iter().all(|s| {
        let a: RunResult = run_program(p, s.clone(), max_steps);
        let b = run_program(q, s.clone(), max_steps);
        a == b
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asm::Machine;
    use crate::source::parse_machine;
    use crate::value::Value;

    const SRC: &str = "
        sort N = 0..20;
        static zero : N = 0;
        static a0 : N input;
        static b0 : N input;
        static lt : N, N -> Bool = builtin lt;
        static rem : N, N -> N = builtin rem;
        dynamic a : N output;
        dynamic b : N;
        init a = a0;
        init b = b0;
        program if lt(zero, b) then par { a := b; b := rem(a, b); }
    ";

    #[test]
    fn euclid_is_one_clause() {
        let m = parse_machine(SRC).unwrap();
        let g = normalize_machine(&m);
        assert_eq!(g.clauses.len(), 1);
        assert_eq!(g.clauses[0].guard.len(), 1);
        assert_eq!(g.clauses[0].guard[0].status, Status::True);
        assert_eq!(g.clauses[0].updates().count(), 2);
        // Without the totality analysis a third, undefined branch appears but
        // it is empty and dropped.
        assert_eq!(normalize(&m.program).clauses.len(), 1);
    }

    #[test]
    fn split_and_merge() {
        let m = parse_machine(SRC).unwrap();
        let c = match &m.program {
            Program::If(c, ..) => c.clone(),
            _ => unreachable!(),
        };
        let a = m.vocab.lookup("a").unwrap();
        let u = Program::update(a, vec![], AsmTerm::Lit(Value::Nat(1)));
        let w = Program::update(a, vec![], AsmTerm::Lit(Value::Nat(2)));
        let g = normalize_with(&Program::if_else(c.clone(), u.clone(), w.clone()), &|_| false);
        assert_eq!(g.clauses.len(), 2);
        assert_eq!(g.clauses[1].guard[0].status, Status::False);
        let g = normalize_with(&Program::Par(vec![Program::if_then(c.clone(), u), Program::if_then(c, w)]), &|_| false);
        assert_eq!(g.clauses.len(), 1);
        assert_eq!(g.clauses[0].instrs.len(), 2);
    }

    #[test]
    fn equivalent_on_grid() {
        let m: Machine = parse_machine(SRC).unwrap();
        let g = normalize_machine(&m);
        let states: Vec<State> = m
            .input_grid()
            .unwrap()
            .iter()
            .map(|i| m.initial_state(i).unwrap())
            .collect();
        assert!(check_equivalence(&m.program, &g, &states, 100));
        let mut bad = g.clone();
        bad.clauses[0].guard[0].status = Status::False;
        assert!(!check_equivalence(&m.program, &bad, &states, 100));
    }
}
