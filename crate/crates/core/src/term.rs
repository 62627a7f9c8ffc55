//! Untyped λ-terms with constants and value codes.
//!
//! Bound variables are de Bruijn indices, so structural equality is
//! α-equivalence. Binder names are kept only as printing hints. Free
//! variables are named. Every node caches a few facts (loose-index bound,
//! size, whether it contains a β-redex or a constant spine over codes) so
//! substitution and redex search can skip untouched subtrees.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::ParseError;
use crate::value::{name, Name, Value, ValueParser};

#[derive(Clone)]
pub struct Term(Arc<Node>);

struct Node {
    kind: TermKind,
    meta: Meta,
}

#[derive(Clone, Copy)]
struct Meta {
    /// One more than the largest loose de Bruijn index; 0 when locally closed.
    loose: u32,
    size: u32,
    has_beta: bool,
    /// Contains a constant applied to at least one code.
    has_fcand: bool,
    has_const: bool,
    has_free: bool,
    /// This node is the code of a value.
    code: bool,
    /// `Some(n)` when this node is a constant applied to `n` codes.
    const_spine: Option<u32>,
}

pub enum TermKind {
    /// Free variable.
    Var(Name),
    /// Bound variable as a de Bruijn index.
    Bound(u32),
    /// Abstraction; the name is a printing hint.
    Abs(Name, Term),
    App(Term, Term),
    /// Constant symbol `c_f`.
    Const(Name),
    /// Opaque code of a value. Never contains a redex.
    Code(Value),
}

/// One step from a node to a child.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Fun,
    Arg,
    Body,
}

/// Path from the root of a term to one of its subterms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RedexAddress(pub Vec<Dir>);

impl RedexAddress {
    pub fn root() -> Self {
        RedexAddress(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, d: Dir) -> Self {
        let mut p = self.0.clone();
        p.push(d);
        RedexAddress(p)
    }

    /// True when `self` is a prefix of `other` (or equal).
    pub fn contains(&self, other: &RedexAddress) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for RedexAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "root");
        }
        for d in &self.0 {
            let c = match d {
                Dir::Fun => 'f',
                Dir::Arg => 'a',
                Dir::Body => 'b',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Term {
    fn mk(kind: TermKind) -> Term {
        let meta = match &kind {
            TermKind::Var(_) => Meta {
                loose: 0,
                size: 1,
                has_beta: false,
                has_fcand: false,
                has_const: false,
                has_free: true,
                code: false,
                const_spine: None,
            },
            TermKind::Bound(i) => Meta {
                loose: i + 1,
                size: 1,
                has_beta: false,
                has_fcand: false,
                has_const: false,
                has_free: false,
                code: false,
                const_spine: None,
            },
            TermKind::Abs(_, b) => {
                let m = b.meta();
                Meta {
                    loose: m.loose.saturating_sub(1),
                    size: m.size.saturating_add(1),
                    has_beta: m.has_beta,
                    has_fcand: m.has_fcand,
                    has_const: m.has_const,
                    has_free: m.has_free,
                    code: abs_body_is_code(b),
                    const_spine: None,
                }
            }
            TermKind::App(f, a) => {
                let (mf, ma) = (f.meta(), a.meta());
                let const_spine = mf.const_spine.and_then(|n| ma.code.then_some(n + 1));
                Meta {
                    loose: mf.loose.max(ma.loose),
                    size: mf.size.saturating_add(ma.size).saturating_add(1),
                    has_beta: mf.has_beta || ma.has_beta || matches!(f.kind(), TermKind::Abs(..)),
                    has_fcand: mf.has_fcand || ma.has_fcand || const_spine.is_some_and(|n| n >= 1),
                    has_const: mf.has_const || ma.has_const,
                    has_free: mf.has_free || ma.has_free,
                    code: false,
                    const_spine,
                }
            }
            TermKind::Const(_) => Meta {
                loose: 0,
                size: 1,
                has_beta: false,
                has_fcand: false,
                has_const: true,
                has_free: false,
                code: false,
                const_spine: Some(0),
            },
            TermKind::Code(_) => Meta {
                loose: 0,
                size: 1,
                has_beta: false,
                has_fcand: false,
                has_const: false,
                has_free: false,
                code: true,
                const_spine: None,
            },
        };
        Term(Arc::new(Node { kind, meta }))
    }

    fn meta(&self) -> &Meta {
        &self.0.meta
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn var(x: &str) -> Term {
        Term::mk(TermKind::Var(name(x)))
    }

    pub fn bound(i: u32) -> Term {
        Term::mk(TermKind::Bound(i))
    }

    /// Abstraction over a body already expressed with de Bruijn indices.
    pub fn abs_raw(hint: Name, body: Term) -> Term {
        Term::mk(TermKind::Abs(hint, body))
    }

    /// `λx. body`, binding the free occurrences of `x` in `body`.
    pub fn lam(x: &str, body: Term) -> Term {
        let closed = close_name(&body, x, 0);
        Term::abs_raw(name(x), closed)
    }

    /// `λx₁…xₙ. body`.
    pub fn lams(xs: &[&str], body: Term) -> Term {
        xs.iter().rev().fold(body, |b, x| Term::lam(x, b))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::mk(TermKind::App(f, a))
    }

    /// Left-associated application `f a₁ … aₙ`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn constant(c: &str) -> Term {
        Term::mk(TermKind::Const(name(c)))
    }

    /// An opaque code node, without the canonical λ-form used for Booleans
    /// and tuples. Prefer [`Term::code`].
    pub fn code_atom(v: Value) -> Term {
        Term::mk(TermKind::Code(v))
    }

    /// The code `⌜v⌝` of a value.
    ///
    /// Booleans and non-empty tuples are given as their λ-terms
    /// (`λxy.x`, `λxy.y`, `λz.z u₁…uₖ`) because they must act as selectors
    /// and pairs under β-reduction. Every other value is an opaque code node.
    pub fn code(v: Value) -> Term {
        match v {
            Value::Bool(true) => Term::abs_raw(name("x"), Term::abs_raw(name("y"), Term::bound(1))),
            Value::Bool(false) => Term::abs_raw(name("x"), Term::abs_raw(name("y"), Term::bound(0))),
            Value::Tuple(vs) if !vs.is_empty() => {
                Term::abs_raw(name("z"), Term::apps(Term::bound(0), vs.into_iter().map(Term::code)))
            }
            v => Term::code_atom(v),
        }
    }

    pub fn size(&self) -> usize {
        self.meta().size as usize
    }

    pub fn is_closed(&self) -> bool {
        self.meta().loose == 0 && !self.meta().has_free
    }

    pub fn has_beta_redex(&self) -> bool {
        self.meta().has_beta
    }

    pub fn has_const(&self) -> bool {
        self.meta().has_const
    }

    pub(crate) fn has_fcand(&self) -> bool {
        self.meta().has_fcand
    }

    pub(crate) fn const_spine(&self) -> Option<u32> {
        self.meta().const_spine
    }

    pub fn is_code(&self) -> bool {
        self.meta().code
    }

    pub fn is_beta_redex(&self) -> bool {
        matches!(self.kind(), TermKind::App(f, _) if matches!(f.kind(), TermKind::Abs(..)))
    }

    /// Reads back the value a code denotes.
    pub fn as_value(&self) -> Option<Value> {
        if !self.is_code() {
            return None;
        }
        match self.kind() {
            TermKind::Code(v) => Some(v.clone()),
            TermKind::Abs(_, body) => {
                if let TermKind::Abs(_, inner) = body.kind() {
                    if let TermKind::Bound(i) = inner.kind() {
                        return Some(Value::Bool(*i == 1));
                    }
                }
                let (_, args) = body.spine();
                args.iter().map(|a| a.as_value()).collect::<Option<Vec<_>>>().map(Value::Tuple)
            }
            _ => None,
        }
    }

    /// Head and arguments of the application spine.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let TermKind::App(f, a) = t.kind() {
            args.push(a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    /// The head constant of a constant spine, if this node is one.
    pub fn head_const(&self) -> Option<&Name> {
        match self.spine().0.kind() {
            TermKind::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn subterm(&self, at: &RedexAddress) -> Option<&Term> {
        let mut t = self;
        for d in &at.0 {
            t = match (d, t.kind()) {
                (Dir::Fun, TermKind::App(f, _)) => f,
                (Dir::Arg, TermKind::App(_, a)) => a,
                (Dir::Body, TermKind::Abs(_, b)) => b,
                _ => return None,
            };
        }
        Some(t)
    }

    /// Rebuilds the path to `at`, putting `f(subterm)` there.
    pub fn replace_at(&self, at: &[Dir], f: &mut dyn FnMut(&Term) -> Term) -> Option<Term> {
        match at.split_first() {
            None => Some(f(self)),
            Some((d, rest)) => match (d, self.kind()) {
                (Dir::Fun, TermKind::App(g, a)) => Some(Term::app(g.replace_at(rest, f)?, a.clone())),
                (Dir::Arg, TermKind::App(g, a)) => Some(Term::app(g.clone(), a.replace_at(rest, f)?)),
                (Dir::Body, TermKind::Abs(h, b)) => Some(Term::abs_raw(h.clone(), b.replace_at(rest, f)?)),
                _ => None,
            },
        }
    }

    /// `self[replacement/x]` for a free variable `x`. Capture is impossible
    /// because bound variables are indices.
    pub fn substitute(&self, x: &str, replacement: &Term) -> Term {
        subst_name(self, x, replacement, 0)
    }

    /// Contracts `(λ.body) arg` into `body[arg/0]`.
    pub fn instantiate(body: &Term, arg: &Term) -> Term {
        subst_bound(body, 0, arg)
    }

    /// Shifts every loose de Bruijn index up by `d`, as needed when moving
    /// an open term under `d` new binders.
    pub fn lift(&self, d: u32) -> Term {
        shift(self, 0, d)
    }

    /// Names of the free variables.
    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut out);
        out
    }

    pub fn parse(src: &str) -> Result<Term, ParseError> {
        let mut p = TermParser {
            src,
            pos: 0,
            scope: Vec::new(),
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(ParseError::at_offset(src, p.pos, "unexpected input after term"));
        }
        Ok(t)
    }
}

fn abs_body_is_code(body: &Term) -> bool {
    if let TermKind::Abs(_, inner) = body.kind() {
        if matches!(inner.kind(), TermKind::Bound(0 | 1)) {
            return true;
        }
    }
    let (head, args) = body.spine();
    matches!(head.kind(), TermKind::Bound(0)) && !args.is_empty() && args.iter().all(|a| a.is_code())
}

fn close_name(t: &Term, x: &str, depth: u32) -> Term {
    if !t.meta().has_free && t.meta().loose <= depth {
        return t.clone();
    }
    match t.kind() {
        TermKind::Var(y) if &**y == x => Term::bound(depth),
        TermKind::Bound(i) if *i >= depth => Term::bound(i + 1),
        TermKind::Abs(h, b) => Term::abs_raw(h.clone(), close_name(b, x, depth + 1)),
        TermKind::App(f, a) => Term::app(close_name(f, x, depth), close_name(a, x, depth)),
        _ => t.clone(),
    }
}

fn shift(t: &Term, cutoff: u32, d: u32) -> Term {
    if d == 0 || t.meta().loose <= cutoff {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) => Term::bound(i + d),
        TermKind::Abs(h, b) => Term::abs_raw(h.clone(), shift(b, cutoff + 1, d)),
        TermKind::App(f, a) => Term::app(shift(f, cutoff, d), shift(a, cutoff, d)),
        _ => t.clone(),
    }
}

fn subst_bound(t: &Term, depth: u32, arg: &Term) -> Term {
    if t.meta().loose <= depth {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) => {
            if *i == depth {
                shift(arg, 0, depth)
            } else {
                Term::bound(i - 1)
            }
        }
        TermKind::Abs(h, b) => Term::abs_raw(h.clone(), subst_bound(b, depth + 1, arg)),
        TermKind::App(f, a) => Term::app(subst_bound(f, depth, arg), subst_bound(a, depth, arg)),
        _ => t.clone(),
    }
}

fn subst_name(t: &Term, x: &str, r: &Term, depth: u32) -> Term {
    if !t.meta().has_free {
        return t.clone();
    }
    match t.kind() {
        TermKind::Var(y) if &**y == x => shift(r, 0, depth),
        TermKind::Abs(h, b) => Term::abs_raw(h.clone(), subst_name(b, x, r, depth + 1)),
        TermKind::App(f, a) => Term::app(subst_name(f, x, r, depth), subst_name(a, x, r, depth)),
        _ => t.clone(),
    }
}

fn collect_free(t: &Term, out: &mut BTreeSet<Name>) {
    if !t.meta().has_free {
        return;
    }
    match t.kind() {
        TermKind::Var(x) => {
            out.insert(x.clone());
        }
        TermKind::Abs(_, b) => collect_free(b, out),
        TermKind::App(f, a) => {
            collect_free(f, out);
            collect_free(a, out);
        }
        _ => {}
    }
}

fn collect_loose(t: &Term, depth: u32, out: &mut BTreeSet<u32>) {
    if t.meta().loose <= depth {
        return;
    }
    match t.kind() {
        TermKind::Bound(i) => {
            out.insert(i - depth);
        }
        TermKind::Abs(_, b) => collect_loose(b, depth + 1, out),
        TermKind::App(f, a) => {
            collect_loose(f, depth, out);
            collect_loose(a, depth, out);
        }
        _ => {}
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if self.ptr_eq(other) {
            return true;
        }
        if self.meta().size != other.meta().size || self.meta().loose != other.meta().loose {
            return false;
        }
        match (self.kind(), other.kind()) {
            (TermKind::Var(x), TermKind::Var(y)) => x == y,
            (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
            (TermKind::Abs(_, b), TermKind::Abs(_, c)) => b == c,
            (TermKind::App(f, a), TermKind::App(g, b)) => f == g && a == b,
            (TermKind::Const(c), TermKind::Const(d)) => c == d,
            (TermKind::Code(v), TermKind::Code(w)) => v == w,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self.kind() {
            TermKind::Var(x) => {
                0u8.hash(state);
                x.hash(state);
            }
            TermKind::Bound(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            TermKind::Abs(_, b) => {
                2u8.hash(state);
                b.hash(state);
            }
            TermKind::App(f, a) => {
                3u8.hash(state);
                f.hash(state);
                a.hash(state);
            }
            TermKind::Const(c) => {
                4u8.hash(state);
                c.hash(state);
            }
            TermKind::Code(v) => {
                5u8.hash(state);
                v.hash(state);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

#[derive(Clone, Copy, PartialEq)]
enum Pos {
    Top,
    Fun,
    Arg,
}

struct Printer {
    out: String,
    scope: Vec<Name>,
}

impl Printer {
    fn fresh(&self, hint: &Name, body: &Term) -> Name {
        let free = body.free_vars();
        let mut loose = BTreeSet::new();
        collect_loose(body, 1, &mut loose);
        let used: BTreeSet<&str> = loose
            .iter()
            .filter_map(|&i| self.scope.len().checked_sub(i as usize + 1).map(|k| &*self.scope[k]))
            .collect();
        let mut candidate = hint.to_string();
        while free.iter().any(|f| **f == *candidate) || used.contains(candidate.as_str()) {
            candidate.push('\'');
        }
        name(&candidate)
    }

    fn term(&mut self, t: &Term, pos: Pos) {
        match t.kind() {
            TermKind::Var(x) => self.out.push_str(x),
            TermKind::Bound(i) => {
                let k = self.scope.len().checked_sub(1 + *i as usize);
                match k {
                    Some(k) => {
                        let n = self.scope[k].clone();
                        self.out.push_str(&n);
                    }
                    None => self.out.push_str(&format!("^{i}")),
                }
            }
            TermKind::Const(c) => {
                self.out.push('#');
                self.out.push_str(c);
            }
            TermKind::Code(v) => self.out.push_str(&format!("[{v}]")),
            TermKind::Abs(..) => {
                if pos != Pos::Top {
                    self.out.push('(');
                }
                self.out.push('\\');
                let mut t = t;
                let mut pushed = 0;
                while let TermKind::Abs(h, b) = t.kind() {
                    let n = self.fresh(h, b);
                    if pushed > 0 {
                        self.out.push(' ');
                    }
                    self.out.push_str(&n);
                    self.scope.push(n);
                    pushed += 1;
                    t = b;
                }
                self.out.push_str(". ");
                self.term(t, Pos::Top);
                self.scope.truncate(self.scope.len() - pushed);
                if pos != Pos::Top {
                    self.out.push(')');
                }
            }
            TermKind::App(f, a) => {
                if pos == Pos::Arg {
                    self.out.push('(');
                }
                self.term(f, Pos::Fun);
                self.out.push(' ');
                self.term(a, Pos::Arg);
                if pos == Pos::Arg {
                    self.out.push(')');
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer {
            out: String::new(),
            scope: Vec::new(),
        };
        p.term(self, Pos::Top);
        f.write_str(&p.out)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Parsing

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
    scope: Vec<Name>,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn is_const_char(c: char) -> bool {
    is_ident_char(c) || matches!(c, '.' | '!' | '?')
}

impl<'a> TermParser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::at_offset(self.src, self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn take_while(&mut self, pred: fn(char) -> bool) -> &'a str {
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !pred(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut head: Option<Term> = None;
        loop {
            let (t, is_lambda) = match self.peek() {
                Some('\\') | Some('λ') => (self.abstraction()?, true),
                Some(c) if c == '(' || c == '#' || c == '[' || is_ident_char(c) => (self.atom()?, false),
                _ => break,
            };
            head = Some(match head {
                None => t,
                Some(h) => Term::app(h, t),
            });
            // A bare abstraction extends as far right as possible.
            if is_lambda {
                break;
            }
        }
        head.ok_or_else(|| self.err("expected a term"))
    }

    fn abstraction(&mut self) -> Result<Term, ParseError> {
        let c = self.peek().unwrap();
        self.pos += c.len_utf8();
        let mut binders = Vec::new();
        loop {
            self.skip_ws();
            let id = self.take_while(is_ident_char);
            if id.is_empty() {
                break;
            }
            binders.push(name(id));
        }
        if binders.is_empty() {
            return Err(self.err("expected a binder"));
        }
        if self.peek() != Some('.') {
            return Err(self.err("expected `.` after binders"));
        }
        self.pos += 1;
        let n = binders.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.term();
        self.scope.truncate(self.scope.len() - n);
        let body = body?;
        Ok(binders.into_iter().rev().fold(body, |b, h| Term::abs_raw(h, b)))
    }

    fn atom(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let t = self.term()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                        Ok(t)
            }
            Some('#') => {
                self.pos += 1;
                let c = self.take_while(is_const_char);
                if c.is_empty() {
                    return Err(self.err("expected a constant name after `#`"));
                }
                Ok(Term::constant(c))
            }
            Some('[') => {
                self.pos += 1;
                let end = self.src[self.pos..]
                    .find(']')
                    .ok_or_else(|| self.err("unterminated code `[`"))?;
                let mut vp = ValueParser {
                    src: &self.src[..self.pos + end],
                    pos: self.pos,
                };
                let v = vp.value()?;
                vp.skip_ws();
                if vp.pos != self.pos + end {
                    return Err(ParseError::at_offset(self.src, vp.pos, "unexpected input in code"));
                }
                self.pos += end + 1;
                Ok(Term::code(v))
            }
            _ => {
                let id = self.take_while(is_ident_char);
                match self.scope.iter().rev().position(|b| &**b == id) {
                    Some(i) => Ok(Term::bound(i as u32)),
                    None => Ok(Term::var(id)),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        Term::parse(s).unwrap()
    }

    #[test]
    fn alpha_equivalence_ignores_binder_names() {
        assert_eq!(p("\\x. x"), p("\\y. y"));
        assert_eq!(p("\\x y. x y"), p("\\a b. a b"));
        assert_ne!(p("\\x y. x"), p("\\x y. y"));
        assert_ne!(p("\\x. y"), p("\\x. z"));
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(p("x").substitute("x", &p("\\y. y")), p("\\y. y"));
        assert_eq!(p("\\x. x").substitute("x", &p("z")), p("\\x. x"));
        let r = p("\\y. x y").substitute("x", &p("y"));
        assert_eq!(r, p("\\w. y w"));
        assert_eq!(r.to_string(), "\\y'. y y'");
    }

    #[test]
    fn printer_parser_round_trip() {
        for s in [
            "\\x. x",
            "(\\x. x x) (\\x. x x)",
            "#rem [12] [8]",
            "f (g x) \\y. y",
            "\\x y. x",
            "[<(1, 5)>]",
        ] {
            let t = p(s);
            assert_eq!(Term::parse(&t.to_string()).unwrap(), t, "{s} printed as {t}");
        }
    }

    #[test]
    fn lambda_extends_right_and_apps_associate_left() {
        assert_eq!(p("a b c"), Term::apps(Term::var("a"), [Term::var("b"), Term::var("c")]));
        assert_eq!(p("\\x. x y"), Term::lam("x", Term::app(Term::var("x"), Term::var("y"))));
        assert_eq!(p("f \\x. x"), Term::app(Term::var("f"), Term::lam("x", Term::var("x"))));
    }

    #[test]
    fn codes_of_booleans_and_tuples_are_lambda_terms() {
        assert_eq!(p("[True]"), p("\\x y. x"));
        assert_eq!(p("[(1, 4)]"), p("\\z. z [1] [4]"));
        assert_eq!(p("\\a b. b").as_value(), Some(Value::Bool(false)));
        assert_eq!(p("\\z. z [1] [4]").as_value(), Some(Value::Tuple(vec![Value::Nat(1), Value::Nat(4)])));
        assert_eq!(p("\\z. z").as_value(), None);
        assert_eq!(p("\\z. z x").as_value(), None);
    }

    #[test]
    fn constant_spines_track_code_arguments() {
        let t = p("#rem [12] [8]");
        assert_eq!(t.const_spine(), Some(2));
        assert!(t.has_fcand());
        let t = p("#rem [12] x");
        assert_eq!(t.const_spine(), None);
        assert!(t.has_fcand());
        assert!(!p("#rem x y").has_fcand());
    }

    #[test]
    fn replace_and_subterm_follow_paths() {
        let t = p("(\\x. x) ((\\y. y) z)");
        let at = RedexAddress(vec![Dir::Arg]);
        assert_eq!(t.subterm(&at).unwrap(), &p("(\\y. y) z"));
        let r = t.replace_at(&at.0, &mut |_| Term::var("w")).unwrap();
        assert_eq!(r, p("(\\x. x) w"));
    }
}
