//! Redex search, single steps, and counted leftmost reduction.
//!
//! Pure β-reduction contracts the leftmost β-redex (first in preorder).
//! With a signature, reduction is F-first: the leftmost F-redex anywhere in
//! the term wins, otherwise the leftmost β-redex.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::fsig::FSignature;
use crate::term::{Dir, RedexAddress, Term, TermKind};
use crate::value::{Name, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepKind {
    Beta,
    F,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Beta => "beta",
            StepKind::F => "F",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub at: RedexAddress,
    pub after: Term,
}

/// A recorded reduction sequence with its double decoration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub beta_count: u64,
    pub f_count: u64,
}

impl Trace {
    pub fn new() -> Trace {
        Trace::default()
    }

    pub fn total(&self) -> u64 {
        self.beta_count + self.f_count
    }

    pub fn push(&mut self, step: Step) {
        self.count(step.kind);
        self.steps.push(step);
    }

    fn count(&mut self, kind: StepKind) {
        match kind {
            StepKind::Beta => self.beta_count += 1,
            StepKind::F => self.f_count += 1,
        }
    }

    /// Concatenation; counts add.
    pub fn extend(&mut self, other: Trace) {
        self.beta_count += other.beta_count;
        self.f_count += other.f_count;
        self.steps.extend(other.steps);
    }

    pub fn kinds(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.kind).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Normal,
    BudgetExhausted,
    /// The leftmost F-redex applies a function outside its domain.
    Undefined { at: RedexAddress, function: Name, args: Vec<Value> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub term: Term,
    pub trace: Trace,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no beta-redex at {0}")]
    NotBetaRedex(RedexAddress),
    #[error("no F-redex at {0}")]
    NotFRedex(RedexAddress),
    #[error("`{function}` is undefined on ({})", join(args))]
    Undefined { function: Name, args: Vec<Value> },
}

fn join(vs: &[Value]) -> String {
    vs.iter().map(Value::to_string).collect::<Vec<_>>().join(", ")
}

/// Result of one strategy step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Reduced { term: Term, kind: StepKind, at: RedexAddress },
    Normal,
    Undefined { at: RedexAddress, function: Name, args: Vec<Value> },
}

enum Found {
    No,
    Done(Term),
    Undef(Name, Vec<Value>),
}

enum FCheck {
    NotRedex,
    Value(Value),
    Undef(Name, Vec<Value>),
}

fn check_f(t: &Term, sig: &FSignature) -> FCheck {
    let Some(n) = t.const_spine() else {
        return FCheck::NotRedex;
    };
    let (head, args) = t.spine();
    let TermKind::Const(c) = head.kind() else {
        return FCheck::NotRedex;
    };
    let Some(f) = sig.get(c) else {
        return FCheck::NotRedex;
    };
    if f.arity() != n as usize {
        return FCheck::NotRedex;
    }
    let Some(vals) = args.iter().map(|a| a.as_value()).collect::<Option<Vec<_>>>() else {
        return FCheck::NotRedex;
    };
    if !f.accepts(&vals) {
        return FCheck::NotRedex;
    }
    match f.apply(&vals) {
        Some(v) => FCheck::Value(v),
        None => FCheck::Undef(f.name.clone(), vals),
    }
}

/// Whether `t` is itself an F-redex of `sig` (defined or not).
pub fn is_f_redex(t: &Term, sig: &FSignature) -> bool {
    !matches!(check_f(t, sig), FCheck::NotRedex)
}

fn may_contain_f(t: &Term, sig: &FSignature) -> bool {
    if sig.has_nullary() {
        t.has_const()
    } else {
        t.has_fcand()
    }
}

fn rewrite_f(t: &Term, sig: &FSignature, path: &mut Vec<Dir>) -> Found {
    if !may_contain_f(t, sig) {
        return Found::No;
    }
    match check_f(t, sig) {
        FCheck::Value(v) => return Found::Done(Term::code(v)),
        FCheck::Undef(f, args) => return Found::Undef(f, args),
        FCheck::NotRedex => {}
    }
    descend(t, path, &mut |c, p| rewrite_f(c, sig, p))
}

fn rewrite_beta(t: &Term, path: &mut Vec<Dir>) -> Found {
    if !t.has_beta_redex() {
        return Found::No;
    }
    if let TermKind::App(f, a) = t.kind() {
        if let TermKind::Abs(_, body) = f.kind() {
            return Found::Done(Term::instantiate(body, a));
        }
    }
    descend(t, path, &mut |c, p| rewrite_beta(c, p))
}

fn descend(t: &Term, path: &mut Vec<Dir>, go: &mut dyn FnMut(&Term, &mut Vec<Dir>) -> Found) -> Found {
    match t.kind() {
        TermKind::App(f, a) => {
            path.push(Dir::Fun);
            match go(f, path) {
                Found::Done(n) => return Found::Done(Term::app(n, a.clone())),
                Found::No => {}
                u => return u,
            }
            path.pop();
            path.push(Dir::Arg);
            match go(a, path) {
                Found::Done(n) => Found::Done(Term::app(f.clone(), n)),
                Found::No => {
                    path.pop();
                    Found::No
                }
                u => u,
            }
        }
        TermKind::Abs(h, b) => {
            path.push(Dir::Body);
            match go(b, path) {
                Found::Done(n) => Found::Done(Term::abs_raw(h.clone(), n)),
                Found::No => {
                    path.pop();
                    Found::No
                }
                u => u,
            }
        }
        _ => Found::No,
    }
}

/// One leftmost step; F-first when a signature is given.
pub fn step(t: &Term, sig: Option<&FSignature>) -> StepResult {
    let mut path = Vec::new();
    if let Some(sig) = sig {
        match rewrite_f(t, sig, &mut path) {
            Found::Done(term) => {
                return StepResult::Reduced {
                    term,
                    kind: StepKind::F,
                    at: RedexAddress(path),
                }
            }
            Found::Undef(function, args) => {
                return StepResult::Undefined {
                    at: RedexAddress(path),
                    function,
                    args,
                }
            }
            Found::No => {}
        }
    }
    match rewrite_beta(t, &mut path) {
        Found::Done(term) => StepResult::Reduced {
            term,
            kind: StepKind::Beta,
            at: RedexAddress(path),
        },
        _ => StepResult::Normal,
    }
}

fn drive(t: &Term, sig: Option<&FSignature>, max_steps: u64, record: bool) -> Reduction {
    let mut term = t.clone();
    let mut trace = Trace::new();
    loop {
        if trace.total() >= max_steps {
            let outcome = match step(&term, sig) {
                StepResult::Normal => Outcome::Normal,
                _ => Outcome::BudgetExhausted,
            };
            return Reduction { term, trace, outcome };
        }
        match step(&term, sig) {
            StepResult::Reduced { term: next, kind, at } => {
                if record {
                    trace.push(Step {
                        kind,
                        at,
                        after: next.clone(),
                    });
                } else {
                    trace.count(kind);
                }
                term = next;
            }
            StepResult::Normal => {
                return Reduction {
                    term,
                    trace,
                    outcome: Outcome::Normal,
                }
            }
            StepResult::Undefined { at, function, args } => {
                return Reduction {
                    term,
                    trace,
                    outcome: Outcome::Undefined { at, function, args },
                }
            }
        }
    }
}

/// Leftmost β-reduction until normal form or `max_steps` steps.
pub fn reduce_leftmost(t: &Term, max_steps: u64) -> Reduction {
    drive(t, None, max_steps, true)
}

/// F-first leftmost reduction in Λ_F.
pub fn reduce_leftmost_f(t: &Term, sig: &FSignature, max_steps: u64) -> Reduction {
    drive(t, Some(sig), max_steps, true)
}

/// Like the recording drivers, but keeps only the counts.
pub fn reduce_counting(t: &Term, sig: Option<&FSignature>, max_steps: u64) -> Reduction {
    drive(t, sig, max_steps, false)
}

fn collect(t: &Term, path: &mut Vec<Dir>, hit: &mut dyn FnMut(&Term) -> Option<bool>, out: &mut Vec<RedexAddress>) {
    // `hit` returns None to prune, Some(true) to record and stop, Some(false) to descend.
    match hit(t) {
        None => return,
        Some(true) => {
            out.push(RedexAddress(path.clone()));
            return;
        }
        Some(false) => {}
    }
    match t.kind() {
        TermKind::App(f, a) => {
            path.push(Dir::Fun);
            collect(f, path, hit, out);
            path.pop();
            path.push(Dir::Arg);
            collect(a, path, hit, out);
            path.pop();
        }
        TermKind::Abs(_, b) => {
            path.push(Dir::Body);
            collect(b, path, hit, out);
            path.pop();
        }
        _ => {}
    }
}

/// Every β-redex, in preorder.
pub fn beta_redexes(t: &Term) -> Vec<RedexAddress> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect_all_beta(t, &mut path, &mut out);
    out
}

fn collect_all_beta(t: &Term, path: &mut Vec<Dir>, out: &mut Vec<RedexAddress>) {
    if !t.has_beta_redex() {
        return;
    }
    if t.is_beta_redex() {
        out.push(RedexAddress(path.clone()));
    }
    match t.kind() {
        TermKind::App(f, a) => {
            path.push(Dir::Fun);
            collect_all_beta(f, path, out);
            path.pop();
            path.push(Dir::Arg);
            collect_all_beta(a, path, out);
            path.pop();
        }
        TermKind::Abs(_, b) => {
            path.push(Dir::Body);
            collect_all_beta(b, path, out);
            path.pop();
        }
        _ => {}
    }
}

/// The leftmost β-redex, or `None` in β-normal form.
pub fn leftmost_redex(t: &Term) -> Option<RedexAddress> {
    let mut path = Vec::new();
    match rewrite_beta(t, &mut path) {
        Found::Done(_) => Some(RedexAddress(path)),
        _ => None,
    }
}

/// Every F-redex, left to right. They are pairwise disjoint.
pub fn f_redexes(t: &Term, sig: &FSignature) -> Vec<RedexAddress> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    collect(
        t,
        &mut path,
        &mut |s| {
            if !may_contain_f(s, sig) {
                None
            } else {
                Some(is_f_redex(s, sig))
            }
        },
        &mut out,
    );
    out
}

pub fn beta_step(t: &Term, at: &RedexAddress) -> Result<Term, ReduceError> {
    let mut ok = false;
    let r = t.replace_at(&at.0, &mut |s| match s.kind() {
        TermKind::App(f, a) => match f.kind() {
            TermKind::Abs(_, body) => {
                ok = true;
                Term::instantiate(body, a)
            }
            _ => s.clone(),
        },
        _ => s.clone(),
    });
    match r {
        Some(r) if ok => Ok(r),
        _ => Err(ReduceError::NotBetaRedex(at.clone())),
    }
}

pub fn f_step(t: &Term, at: &RedexAddress, sig: &FSignature) -> Result<Term, ReduceError> {
    let sub = t.subterm(at).ok_or_else(|| ReduceError::NotFRedex(at.clone()))?;
    match check_f(sub, sig) {
        FCheck::NotRedex => Err(ReduceError::NotFRedex(at.clone())),
        FCheck::Undef(function, args) => Err(ReduceError::Undefined { function, args }),
        FCheck::Value(v) => {
            let code = Term::code(v);
            Ok(t.replace_at(&at.0, &mut |_| code.clone()).expect("address resolved above"))
        }
    }
}

/// All redexes of both kinds (F-redexes only with a signature).
pub fn all_redexes(t: &Term, sig: Option<&FSignature>) -> Vec<(StepKind, RedexAddress)> {
    let mut out: Vec<_> = beta_redexes(t).into_iter().map(|a| (StepKind::Beta, a)).collect();
    if let Some(sig) = sig {
        out.extend(f_redexes(t, sig).into_iter().map(|a| (StepKind::F, a)));
    }
    out
}

pub fn contract(t: &Term, kind: StepKind, at: &RedexAddress, sig: Option<&FSignature>) -> Result<Term, ReduceError> {
    match (kind, sig) {
        (StepKind::Beta, _) => beta_step(t, at),
        (StepKind::F, Some(sig)) => f_step(t, at, sig),
        (StepKind::F, None) => Err(ReduceError::NotFRedex(at.clone())),
    }
}

/// No β-redex and, with a signature, no F-redex.
pub fn is_normal(t: &Term, sig: Option<&FSignature>) -> bool {
    !t.has_beta_redex() && sig.is_none_or(|s| f_redexes(t, s).is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Confluence {
    /// All normal forms reached are α-equal (`None` when none was reached).
    Confluent(Option<Term>),
    Divergent(Term, Term),
    /// The exploration hit its size guard.
    Inconclusive,
}

impl Confluence {
    pub fn holds(&self) -> bool {
        matches!(self, Confluence::Confluent(_))
    }
}

pub const CONFLUENCE_FRONTIER_CAP: usize = 50_000;
pub const CONFLUENCE_SIZE_CAP: usize = 4_000;

/// Explores every reduction sequence of length at most `depth` and compares
/// the normal forms reached.
pub fn check_confluence_bounded(t: &Term, sig: Option<&FSignature>, depth: usize) -> Confluence {
    let mut seen: HashSet<Term> = HashSet::new();
    let mut frontier = vec![t.clone()];
    seen.insert(t.clone());
    let mut normal: Option<Term> = None;
    for level in 0..=depth {
        let mut next = Vec::new();
        for s in &frontier {
            let redexes = all_redexes(s, sig);
            let contracted: Vec<Term> = redexes
                .iter()
                .filter_map(|(k, a)| contract(s, *k, a, sig).ok())
                .collect();
            if redexes.is_empty() {
                match &normal {
                    None => normal = Some(s.clone()),
                    Some(n) if n != s => return Confluence::Divergent(n.clone(), s.clone()),
                    _ => {}
                }
                continue;
            }
            if level == depth {
                continue;
            }
            for c in contracted {
                if c.size() > CONFLUENCE_SIZE_CAP {
                    return Confluence::Inconclusive;
                }
                if seen.insert(c.clone()) {
                    next.push(c);
                }
            }
            if seen.len() > CONFLUENCE_FRONTIER_CAP {
                return Confluence::Inconclusive;
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Confluence::Confluent(normal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsig::FFunction;
    use crate::value::Sort;

    fn p(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    fn arith() -> FSignature {
        let mut s = FSignature::boolean();
        let n = Sort::nat;
        s.insert(FFunction::new("rem", vec![n(), n()], n(), |a| {
            let (x, y) = (a[0].as_nat()?, a[1].as_nat()?);
            (y != 0).then(|| Value::Nat(x % y))
        }))
        .unwrap();
        s.insert(FFunction::new("lt", vec![n(), n()], Sort::bool(), |a| {
            Some(Value::Bool(a[0].as_nat()? < a[1].as_nat()?))
        }))
        .unwrap();
        s
    }

    #[test]
    fn beta_step_examples() {
        assert_eq!(beta_step(&p("(\\x. x) z"), &RedexAddress::root()).unwrap(), p("z"));
        let omega = p("(\\x. x x) (\\x. x x)");
        assert_eq!(beta_step(&omega, &RedexAddress::root()).unwrap(), omega);
        let r = beta_step(&p("(\\z. z m n) [True]"), &RedexAddress::root()).unwrap();
        assert_eq!(r, p("[True] m n"));
        assert!(beta_step(&p("x y"), &RedexAddress::root()).is_err());
    }

    #[test]
    fn leftmost_redex_examples() {
        assert_eq!(leftmost_redex(&p("\\x. x")), None);
        assert_eq!(leftmost_redex(&p("(\\x. x) ((\\y. y) z)")), Some(RedexAddress::root()));
        let i = "(\\x. x)";
        let t = p(&format!("{i} {i} {i}"));
        assert_eq!(leftmost_redex(&t), Some(RedexAddress(vec![Dir::Fun])));
    }

    #[test]
    fn reduce_leftmost_examples() {
        let r = reduce_leftmost(&p("(\\z. z u v) (\\x y. x)"), 100);
        assert_eq!(r.term, p("u"));
        assert_eq!(r.trace.beta_count, 3);
        let r = reduce_leftmost(&p("\\x. x"), 10);
        assert_eq!((r.trace.beta_count, &r.outcome), (0, &Outcome::Normal));
        let r = reduce_leftmost(&p("(\\x. x x) (\\x. x x)"), 5);
        assert_eq!((r.trace.beta_count, &r.outcome), (5, &Outcome::BudgetExhausted));
    }

    #[test]
    fn f_redexes_and_steps() {
        let s = arith();
        assert_eq!(f_redexes(&p("#rem [12] [8]"), &s), vec![RedexAddress::root()]);
        assert!(f_redexes(&p("\\x. x"), &s).is_empty());
        assert!(f_redexes(&p("#rem [12] x"), &s).is_empty());
        assert_eq!(f_step(&p("#rem [12] [8]"), &RedexAddress::root(), &s).unwrap(), p("[4]"));
        assert_eq!(f_step(&p("#and [True] [False]"), &RedexAddress::root(), &s).unwrap(), p("[False]"));
        assert!(matches!(
            f_step(&p("#rem [3] [0]"), &RedexAddress::root(), &s),
            Err(ReduceError::Undefined { .. })
        ));
    }

    #[test]
    fn f_first_prefers_constants() {
        let s = arith();
        let r = reduce_leftmost_f(&p("#lt [0] [8]"), &s, 10);
        assert_eq!(r.term, p("[True]"));
        assert_eq!((r.trace.beta_count, r.trace.f_count), (0, 1));
        let r = reduce_leftmost_f(&p("(\\x. x) (#rem [12] [8])"), &s, 10);
        assert_eq!(r.trace.kinds(), vec![StepKind::F, StepKind::Beta]);
        assert_eq!(r.term, p("[4]"));
        let r = reduce_leftmost_f(&p("#rem [3] [0]"), &s, 10);
        assert!(matches!(r.outcome, Outcome::Undefined { .. }));
    }

    #[test]
    fn confluence_examples() {
        assert!(check_confluence_bounded(&p("(\\x. x) ((\\y. y) z)"), None, 3).holds());
        assert!(check_confluence_bounded(&p("\\x. x"), None, 3).holds());
        assert!(check_confluence_bounded(&p("(\\z. z m n) [False]"), None, 6).holds());
    }
}
