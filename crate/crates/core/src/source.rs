//! The text format for machines: parser with positioned diagnostics and a
//! printer that round-trips.
//!
//! ```text
//! sort Nat = 0..8;
//! static a0 : Nat input;
//! static rem : Nat, Nat -> Nat = builtin rem;
//! dynamic a : Nat output;
//! init a = a0;
//! program if lt(zero, b) then par { a := b; b := rem(a, b); }
//! ```
//!
//! The complete grammar (EBNF) is in the repository README.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use crate::asm::{AsmError, AsmTerm, InitEntry, Machine, Program, StaticDef, SymId, Symbol, SymbolKind, Vocabulary};
use crate::encodings::{CtorDef, DatatypeDef};
use crate::error::{Diagnostics, ParseError};
use crate::value::{name, Domain, Sort, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Punct(&'static str),
    Eof,
}

const PUNCT: [&str; 21] = [
    ":=", "->", "..", "<=", ">=", "!=", ";", ":", ",", "=", "(", ")", "{", "}", "|", "<", ">", "+", "-", "*", "#",
];

const KEYWORDS: [&str; 16] = [
    "sort", "static", "dynamic", "init", "datatype", "program", "input", "output", "builtin", "table", "skip",
    "halt", "fail", "if", "then", "else",
];

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut i = 0;
    let bytes = src.as_bytes();
    'outer: while i < src.len() {
        let rest = &src[i..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if rest.starts_with("//") {
            i += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        if c.is_ascii_digit() {
            let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let n = rest[..len]
                .parse()
                .map_err(|_| ParseError::at_offset(src, i, "number out of range"))?;
            out.push((Tok::Num(n), i));
            i += len;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let len = rest
                .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '\''))
                .unwrap_or(rest.len());
            out.push((Tok::Ident(rest[..len].to_string()), i));
            i += len;
            continue;
        }
        for p in PUNCT {
            if rest.starts_with(p) {
                out.push((Tok::Punct(p), i));
                i += p.len();
                continue 'outer;
            }
        }
        let _ = bytes;
        return Err(ParseError::at_offset(src, i, format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

#[derive(Clone, Debug)]
enum Raw {
    Num(u64),
    Name(String, Option<Vec<RawT>>),
    Bin(&'static str, Box<RawT>, Box<RawT>),
}

#[derive(Clone, Debug)]
struct RawT {
    off: usize,
    raw: Raw,
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: Vocabulary,
    statics: BTreeMap<SymId, StaticDef>,
    init: BTreeMap<SymId, InitEntry>,
    init_seen: BTreeSet<SymId>,
    program: Option<(Program, usize)>,
    family: DatatypeDef,
    diags: Vec<ParseError>,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn off(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err_at(&self, off: usize, msg: impl Into<String>) -> ParseError {
        ParseError::at_offset(self.src, off, msg)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        self.err_at(self.off(), msg)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{p}`")))
        }
    }

    fn expect_kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{k}`")))
        }
    }

    fn ident(&mut self) -> PResult<(String, usize)> {
        let off = self.off();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((s, off))
            }
            _ => Err(self.err("expected an identifier")),
        }
    }

    fn num(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.err("expected a number")),
        }
    }

    // -- declarations ------------------------------------------------------

    fn file(&mut self) -> PResult<()> {
        loop {
            if matches!(self.peek(), Tok::Eof) {
                return Ok(());
            }
            let start = self.off();
            let r = if self.eat_kw("sort") {
                self.sort_decl()
            } else if self.eat_kw("datatype") {
                self.datatype_decl()
            } else if self.eat_kw("static") {
                self.symbol_decl(SymbolKind::Static)
            } else if self.eat_kw("dynamic") {
                self.symbol_decl(SymbolKind::Dynamic)
            } else if self.eat_kw("init") {
                self.init_decl()
            } else if self.eat_kw("program") {
                if self.program.is_some() {
                    return Err(self.err_at(start, "second `program` section"));
                }
                let p = self.stmt()?;
                self.eat_punct(";");
                self.program = Some((p, start));
                Ok(())
            } else {
                return Err(self.err("expected `sort`, `datatype`, `static`, `dynamic`, `init` or `program`"));
            };
            if let Err(e) = r {
                // Resolution errors are recoverable: skip to the next `;`.
                self.diags.push(e);
                let after_semi = self.pos > 0 && self.toks[self.pos - 1].0 == Tok::Punct(";");
                while !after_semi && !matches!(self.peek(), Tok::Eof) && !self.is_punct(";") {
                    self.bump();
                }
                if !after_semi {
                    self.eat_punct(";");
                }
            }
        }
    }

    fn sort_ref(&mut self) -> PResult<Sort> {
        let (n, off) = self.ident()?;
        self.vocab
            .sort(&n)
            .cloned()
            .ok_or_else(|| self.err_at(off, format!("unknown sort `{n}`")))
    }

    fn value(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Value::Nat(n))
            }
            Tok::Punct("(") => {
                self.bump();
                Ok(Value::Tuple(self.values_until(")")?))
            }
            Tok::Punct("<") => {
                self.bump();
                let mut rows = Vec::new();
                if !self.eat_punct(">") {
                    loop {
                        self.expect_punct("(")?;
                        rows.push(self.values_until(")")?);
                        if self.eat_punct(">") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
                Ok(Value::Seq(rows))
            }
            Tok::Ident(s) => {
                self.bump();
                match s.as_str() {
                    "True" => Ok(Value::Bool(true)),
                    "False" => Ok(Value::Bool(false)),
                    _ if self.eat_punct("(") => Ok(Value::Ctor(name(&s), self.values_until(")")?)),
                    _ => Ok(Value::Atom(name(&s))),
                }
            }
            _ => Err(self.err("expected a value")),
        }
    }

    fn values_until(&mut self, close: &str) -> PResult<Vec<Value>> {
        let mut out = Vec::new();
        if self.eat_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            if self.eat_punct(close) {
                return Ok(out);
            }
            self.expect_punct(",")?;
        }
    }

    fn sort_decl(&mut self) -> PResult<()> {
        let (n, off) = self.ident()?;
        self.expect_punct("=")?;
        let sort = if self.eat_punct("{") {
            let vals = self.values_until("}")?;
            Sort::finite(&n, vals)
        } else {
            let lo = self.num()?;
            self.expect_punct("..")?;
            let hi = self.num()?;
            if hi < lo {
                return Err(self.err_at(off, "empty range"));
            }
            Sort::nat_range(&n, lo, hi)
        };
        self.expect_punct(";")?;
        self.vocab.add_sort(sort).map_err(|e| self.err_at(off, e.to_string()))
    }

    fn datatype_decl(&mut self) -> PResult<()> {
        let (n, off) = self.ident()?;
        if self.vocab.sort(&n).is_some() {
            return Err(self.err_at(off, format!("duplicate sort `{n}`")));
        }
        self.expect_punct("=")?;
        let mut ctors = Vec::new();
        loop {
            let (c, coff) = self.ident()?;
            let mut args = Vec::new();
            if self.eat_punct("(") {
                loop {
                    let (a, aoff) = self.ident()?;
                    let ok = a == n || a == "Bool" || !self.family.ctors_of(&a).is_empty();
                    if !ok {
                        return Err(self.err_at(aoff, format!("constructor argument `{a}` must be a datatype or Bool")));
                    }
                    args.push(name(&a));
                    if self.eat_punct(")") {
                        break;
                    }
                    self.expect_punct(",")?;
                }
            }
            if self.family.ctors.iter().chain(&ctors).any(|k: &CtorDef| *k.name == *c) {
                return Err(self.err_at(coff, format!("duplicate constructor `{c}`")));
            }
            ctors.push(CtorDef {
                name: name(&c),
                args,
                result: name(&n),
            });
            if !self.eat_punct("|") {
                break;
            }
        }
        self.expect_punct(";")?;
        self.family.ctors.extend(ctors);
        let sort = Sort::new(&n, Domain::Inductive(Arc::new(self.family.clone())));
        self.vocab.add_sort(sort).map_err(|e| self.err_at(off, e.to_string()))
    }

    fn profile(&mut self) -> PResult<(Vec<Sort>, Sort)> {
        let mut sorts = vec![self.sort_ref()?];
        while self.eat_punct(",") {
            sorts.push(self.sort_ref()?);
        }
        if self.eat_punct("->") {
            let r = self.sort_ref()?;
            Ok((sorts, r))
        } else if sorts.len() == 1 {
            Ok((Vec::new(), sorts.pop().unwrap()))
        } else {
            Err(self.err("expected `->`"))
        }
    }

    fn symbol_decl(&mut self, kind: SymbolKind) -> PResult<()> {
        let (n, off) = self.ident()?;
        self.expect_punct(":")?;
        let (args, result) = self.profile()?;
        let mut sym = Symbol::new(&n, kind, args, result);
        let mut def = None;
        match kind {
            SymbolKind::Static => {
                sym.input = self.eat_kw("input");
                if self.eat_punct("=") {
                    let doff = self.off();
                    def = Some(if self.eat_kw("builtin") {
                        StaticDef::Builtin(self.ident()?.0)
                    } else if self.eat_kw("table") {
                        self.expect_punct("{")?;
                        let mut t = BTreeMap::new();
                        if !self.eat_punct("}") {
                            loop {
                                self.expect_punct("(")?;
                                let k = self.values_until(")")?;
                                self.expect_punct("->")?;
                                let v = self.value()?;
                                t.insert(k, v);
                                if self.eat_punct("}") {
                                    break;
                                }
                                self.expect_punct(",")?;
                            }
                        }
                        StaticDef::Table(t)
                    } else {
                        StaticDef::Const(self.value()?)
                    });
                    if sym.input {
                        return Err(self.err_at(doff, "an input has no fixed interpretation"));
                    }
                }
            }
            SymbolKind::Dynamic => sym.output = self.eat_kw("output"),
        }
        self.expect_punct(";")?;
        let arity = sym.arity();
        let result = sym.result.clone();
        let id = self.vocab.add_symbol(sym).map_err(|e| self.err_at(off, e.to_string()))?;
        if kind == SymbolKind::Static {
            match def {
                None if !self.vocab.symbol(id).input => {
                    return Err(self.err_at(off, format!("static `{n}` needs an interpretation")));
                }
                Some(StaticDef::Builtin(b)) if crate::asm::builtin_arity(&b) != Some(arity) => {
                    return Err(self.err_at(off, format!("unknown builtin `{b}` of arity {arity}")));
                }
                Some(StaticDef::Const(v)) if arity != 0 || !result.contains(&v) => {
                    return Err(self.err_at(off, format!("value `{v}` does not fit the profile of `{n}`")));
                }
                Some(d) => {
                    self.statics.insert(id, d);
                }
                None => {}
            }
        }
        Ok(())
    }

    fn init_decl(&mut self) -> PResult<()> {
        let (n, off) = self.ident()?;
        let id = self
            .vocab
            .lookup(&n)
            .ok_or_else(|| self.err_at(off, format!("unknown symbol `{n}`")))?;
        let sym = self.vocab.symbol(id).clone();
        if !sym.is_dynamic() {
            return Err(self.err_at(off, format!("`{n}` is not dynamic; only dynamic symbols are initialized")));
        }
        if !self.init_seen.insert(id) {
            return Err(self.err_at(off, format!("`{n}` is initialized twice")));
        }
        let mut params = Vec::new();
        if self.eat_punct("(") {
            loop {
                params.push(self.ident()?.0);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        if params.len() != sym.arity() {
            return Err(self.err_at(off, format!("`{n}` has arity {}, got {} parameters", sym.arity(), params.len())));
        }
        self.expect_punct("=")?;
        let raw = self.term()?;
        self.expect_punct(";")?;
        let vars: Vec<(String, Sort)> = params.into_iter().zip(sym.args.iter().cloned()).collect();
        let (t, _) = self.resolve(&raw, &vars, Some(&sym.result), true)?;
        self.init.insert(id, InitEntry::identity(sym.arity(), t));
        Ok(())
    }

    // -- statements --------------------------------------------------------

    fn stmt(&mut self) -> PResult<Program> {
        if self.eat_kw("skip") {
            return Ok(Program::Skip);
        }
        if self.eat_kw("halt") {
            return Ok(Program::Halt);
        }
        if self.eat_kw("fail") {
            return Ok(Program::Fail);
        }
        if self.eat_kw("if") {
            let raw = self.term()?;
            let (c, _) = self.resolve(&raw, &[], Some(&Sort::bool()), false)?;
            self.expect_kw("then")?;
            let a = self.stmt()?;
            let b = if self.eat_kw("else") { self.stmt()? } else { Program::Skip };
            return Ok(Program::If(c, Box::new(a), Box::new(b)));
        }
        if self.is_kw("par") {
            self.bump();
            self.expect_punct("{")?;
            let mut ps = Vec::new();
            while !self.eat_punct("}") {
                ps.push(self.stmt()?);
                if !self.eat_punct(";") {
                    self.expect_punct("}")?;
                    break;
                }
            }
            return Ok(Program::Par(ps));
        }
        let (n, off) = self.ident()?;
        let id = self
            .vocab
            .lookup(&n)
            .ok_or_else(|| self.err_at(off, format!("unknown symbol `{n}`")))?;
        let sym = self.vocab.symbol(id).clone();
        if !sym.is_dynamic() {
            return Err(self.err_at(off, format!("`{n}` is static; the left side of an update must be dynamic")));
        }
        let mut raw_args = Vec::new();
        if self.eat_punct("(") {
            raw_args = self.term_list(")")?;
        }
        if raw_args.len() != sym.arity() {
            return Err(self.err_at(off, format!("`{n}` expects {} arguments, got {}", sym.arity(), raw_args.len())));
        }
        let mut args = Vec::new();
        for (r, s) in raw_args.iter().zip(&sym.args) {
            args.push(self.resolve(r, &[], Some(s), false)?.0);
        }
        self.expect_punct(":=")?;
        let raw = self.term()?;
        let (rhs, _) = self.resolve(&raw, &[], Some(&sym.result), false)?;
        Ok(Program::update(id, args, rhs))
    }

    // -- terms -------------------------------------------------------------

    fn term(&mut self) -> PResult<RawT> {
        let lhs = self.additive()?;
        for op in ["<=", ">=", "!=", "<", ">", "="] {
            if self.is_punct(op) {
                let off = self.off();
                self.bump();
                let rhs = self.additive()?;
                let op = PUNCT.iter().find(|p| **p == op).unwrap();
                return Ok(RawT {
                    off,
                    raw: Raw::Bin(op, Box::new(lhs), Box::new(rhs)),
                });
            }
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> PResult<RawT> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = if self.is_punct("+") {
                "+"
            } else if self.is_punct("-") {
                "-"
            } else {
                return Ok(lhs);
            };
            let off = self.off();
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = RawT {
                off,
                raw: Raw::Bin(op, Box::new(lhs), Box::new(rhs)),
            };
        }
    }

    fn multiplicative(&mut self) -> PResult<RawT> {
        let mut lhs = self.atom()?;
        while self.is_punct("*") {
            let off = self.off();
            self.bump();
            let rhs = self.atom()?;
            lhs = RawT {
                off,
                raw: Raw::Bin("*", Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> PResult<RawT> {
        let off = self.off();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(RawT { off, raw: Raw::Num(n) })
            }
            Tok::Punct("(") => {
                self.bump();
                let t = self.term()?;
                self.expect_punct(")")?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let (n, _) = self.ident()?;
                let args = if self.eat_punct("(") { Some(self.term_list(")")?) } else { None };
                Ok(RawT {
                    off,
                    raw: Raw::Name(n, args),
                })
            }
            _ => Err(self.err("expected a term")),
        }
    }

    fn term_list(&mut self, close: &str) -> PResult<Vec<RawT>> {
        let mut out = Vec::new();
        if self.eat_punct(close) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.eat_punct(close) {
                return Ok(out);
            }
            self.expect_punct(",")?;
        }
    }

    fn atom_sort(&self, a: &str) -> Option<Sort> {
        let v = Value::Atom(name(a));
        let mut hits = self.vocab.sorts().iter().filter(|s| s.contains(&v));
        let first = hits.next()?;
        hits.next().is_none().then(|| first.clone())
    }

    fn infer(&self, r: &RawT, vars: &[(String, Sort)]) -> Option<Sort> {
        match &r.raw {
            Raw::Num(_) => None,
            Raw::Name(n, args) => {
                if args.is_none() {
                    if let Some((_, s)) = vars.iter().rev().find(|(v, _)| v == n) {
                        return Some(s.clone());
                    }
                }
                if n == "eq" {
                    return Some(Sort::bool());
                }
                match self.vocab.lookup(n) {
                    Some(id) => Some(self.vocab.symbol(id).result.clone()),
                    None if args.is_none() => self.atom_sort(n),
                    None => self.ctor_sort(n),
                }
            }
            Raw::Bin(op, ..) => match *op {
                "+" | "-" | "*" => self
                    .vocab
                    .lookup(op_symbol(op))
                    .map(|id| self.vocab.symbol(id).result.clone()),
                _ => Some(Sort::bool()),
            },
        }
    }

    fn ctor_sort(&self, c: &str) -> Option<Sort> {
        let k = self.family.ctors.iter().find(|k| &*k.name == c)?;
        self.vocab.sort(&k.result).cloned()
    }

    fn eq_term(
        &self,
        off: usize,
        l: &RawT,
        r: &RawT,
        vars: &[(String, Sort)],
        static_only: bool,
    ) -> PResult<AsmTerm> {
        let s = self
            .infer(l, vars)
            .or_else(|| self.infer(r, vars))
            .ok_or_else(|| self.err_at(off, "cannot infer the sort of this equality"))?;
        let (a, _) = self.resolve(l, vars, Some(&s), static_only)?;
        let (b, _) = self.resolve(r, vars, Some(&s), static_only)?;
        Ok(AsmTerm::app(self.vocab.eq_symbol(&s), vec![a, b]))
    }

    fn resolve(
        &self,
        r: &RawT,
        vars: &[(String, Sort)],
        expected: Option<&Sort>,
        static_only: bool,
    ) -> PResult<(AsmTerm, Sort)> {
        let (t, s) = match &r.raw {
            Raw::Num(n) => {
                let v = Value::Nat(*n);
                let s = expected
                    .cloned()
                    .ok_or_else(|| self.err_at(r.off, format!("cannot infer the sort of `{n}`")))?;
                if !s.contains(&v) {
                    return Err(self.err_at(r.off, format!("`{n}` is not in sort `{}`", s.name())));
                }
                (AsmTerm::Lit(v), s)
            }
            Raw::Bin(op, l, rr) => match *op {
                "=" => (self.eq_term(r.off, l, rr, vars, static_only)?, Sort::bool()),
                "!=" => {
                    let eq = self.eq_term(r.off, l, rr, vars, static_only)?;
                    let not = self.vocab.lookup("not").expect("auto static");
                    (AsmTerm::app(not, vec![eq]), Sort::bool())
                }
                _ => {
                    let sym_name = op_symbol(op);
                    let call = RawT {
                        off: r.off,
                        raw: Raw::Name(sym_name.to_string(), Some(vec![(**l).clone(), (**rr).clone()])),
                    };
                    if self.vocab.lookup(sym_name).is_none() {
                        return Err(self.err_at(r.off, format!("operator `{op}` needs a static symbol `{sym_name}`")));
                    }
                    return self.resolve(&call, vars, expected, static_only);
                }
            },
            Raw::Name(n, args) => {
                let var = args
                    .is_none()
                    .then(|| vars.iter().rposition(|(v, _)| v == n))
                    .flatten();
                if let Some(j) = var {
                    (AsmTerm::Var(j), vars[j].1.clone())
                } else if let (Some(id), _) = (self.vocab.lookup(n), ()) {
                    let sym = self.vocab.symbol(id);
                    if static_only && sym.is_dynamic() {
                        return Err(self.err_at(r.off, format!("`{n}` is dynamic; initialization terms may use static symbols only")));
                    }
                    let raw_args = args.as_deref().unwrap_or(&[]);
                    if raw_args.len() != sym.arity() {
                        return Err(self.err_at(
                            r.off,
                            format!("`{n}` expects {} arguments, got {}", sym.arity(), raw_args.len()),
                        ));
                    }
                    let mut out = Vec::new();
                    for (a, s) in raw_args.iter().zip(&sym.args) {
                        out.push(self.resolve(a, vars, Some(s), static_only)?.0);
                    }
                    (AsmTerm::app(id, out), sym.result.clone())
                } else if n == "eq" && args.as_ref().is_some_and(|a| a.len() == 2) {
                    let a = args.as_ref().unwrap();
                    (self.eq_term(r.off, &a[0], &a[1], vars, static_only)?, Sort::bool())
                } else {
                    let s = expected
                        .cloned()
                        .or_else(|| self.infer(r, vars))
                        .ok_or_else(|| self.err_at(r.off, format!("unknown symbol `{n}`")))?;
                    let v = self.literal(r, &s)?;
                    (AsmTerm::Lit(v), s)
                }
            }
        };
        if let Some(e) = expected {
            if *e != s {
                return Err(self.err_at(
                    r.off,
                    format!("expected sort `{}`, found `{}`", e.name(), s.name()),
                ));
            }
        }
        Ok((t, s))
    }

    /// Reads a raw term as a constant of sort `s` (atoms and constructor
    /// trees).
    fn literal(&self, r: &RawT, s: &Sort) -> PResult<Value> {
        let v = self.literal_value(r)?;
        if s.contains(&v) {
            Ok(v)
        } else {
            let shown = match &r.raw {
                Raw::Name(n, _) => n.clone(),
                _ => v.to_string(),
            };
            Err(self.err_at(r.off, format!("unknown symbol `{shown}`")))
        }
    }

    fn literal_value(&self, r: &RawT) -> PResult<Value> {
        match &r.raw {
            Raw::Num(n) => Ok(Value::Nat(*n)),
            Raw::Name(n, None) => Ok(Value::Atom(name(n))),
            Raw::Name(n, Some(args)) => Ok(Value::Ctor(
                name(n),
                args.iter().map(|a| self.literal_value(a)).collect::<PResult<_>>()?,
            )),
            Raw::Bin(..) => Err(self.err_at(r.off, "expected a constant")),
        }
    }
}

fn op_symbol(op: &str) -> &'static str {
    match op {
        "+" => "plus",
        "-" => "minus",
        "*" => "times",
        "<" => "lt",
        "<=" => "le",
        ">" => "gt",
        ">=" => "ge",
        _ => "eq",
    }
}

fn asm_diag(src: &str, off: usize, e: AsmError) -> ParseError {
    ParseError::at_offset(src, off, e.to_string())
}

/// Parses a machine. A file without `program` gets the program `skip`.
pub fn parse_machine(src: &str) -> Result<Machine, Diagnostics> {
    let toks = lex(src)?;
    let mut p = Parser {
        src,
        toks,
        pos: 0,
        vocab: Vocabulary::new(),
        statics: BTreeMap::new(),
        init: BTreeMap::new(),
        init_seen: BTreeSet::new(),
        program: None,
        family: DatatypeDef::default(),
        diags: Vec::new(),
    };
    if let Err(e) = p.file() {
        p.diags.push(e);
        return Err(Diagnostics(p.diags));
    }
    for f in p.vocab.dynamic_symbols() {
        if !p.init.contains_key(&f) && !p.init_seen.contains(&f) {
            p.diags.push(ParseError::at_offset(
                src,
                src.len(),
                format!("dynamic symbol `{}` has no `init`", p.vocab.name_of(f)),
            ));
        }
    }
    if !p.diags.is_empty() {
        return Err(Diagnostics(p.diags));
    }
    let (program, poff) = p.program.take().unwrap_or((Program::Skip, 0));
    let family = p.family.clone();
    let mut m = Machine::new(p.vocab, p.statics, p.init, program).map_err(|e| asm_diag(src, poff, e))?;
    m.datatypes = family;
    Ok(m)
}

// ---------------------------------------------------------------------------
// Printing

fn print_sort_decl(out: &mut String, s: &Sort, family: &DatatypeDef) {
    match s.domain() {
        Domain::Inductive(_) => {
            let ctors: Vec<String> = family
                .ctors_of(s.name())
                .iter()
                .map(|c| {
                    if c.args.is_empty() {
                        c.name.to_string()
                    } else {
                        let a: Vec<&str> = c.args.iter().map(|x| &**x).collect();
                        format!("{}({})", c.name, a.join(", "))
                    }
                })
                .collect();
            writeln!(out, "datatype {} = {};", s.name(), ctors.join(" | ")).unwrap();
        }
        Domain::Finite(set) => {
            let nats: Option<Vec<u64>> = set.iter().map(Value::as_nat).collect();
            match nats {
                Some(ns) if !ns.is_empty() && ns.windows(2).all(|w| w[1] == w[0] + 1) => {
                    writeln!(out, "sort {} = {}..{};", s.name(), ns[0], ns[ns.len() - 1]).unwrap();
                }
                _ => {
                    let vs: Vec<String> = set.iter().map(Value::to_string).collect();
                    writeln!(out, "sort {} = {{{}}};", s.name(), vs.join(", ")).unwrap();
                }
            }
        }
        _ => writeln!(out, "// sort {} has no source form", s.name()).unwrap(),
    }
}

fn profile(sym: &Symbol) -> String {
    if sym.args.is_empty() {
        sym.result.name().to_string()
    } else {
        let a: Vec<&str> = sym.args.iter().map(Sort::name).collect();
        format!("{} -> {}", a.join(", "), sym.result.name())
    }
}

/// Source text that parses back to the same machine.
pub fn print_machine(m: &Machine) -> String {
    let v = &*m.vocab;
    let mut out = String::new();
    for (id, sym) in v.symbols() {
        if v.is_auto(id) {
            if let Some(sname) = sym.name.strip_prefix("eq_") {
                if sname != "Bool" {
                    print_sort_decl(&mut out, v.sort(sname).unwrap(), &m.datatypes);
                }
            }
            continue;
        }
        match sym.kind {
            SymbolKind::Static => {
                write!(out, "static {} : {}", sym.name, profile(sym)).unwrap();
                if sym.input {
                    out.push_str(" input");
                }
                match m.statics.get(&id) {
                    Some(StaticDef::Builtin(b)) => write!(out, " = builtin {b}").unwrap(),
                    Some(StaticDef::Const(c)) => write!(out, " = {c}").unwrap(),
                    Some(StaticDef::Table(t)) => {
                        let rows: Vec<String> = t
                            .iter()
                            .map(|(k, val)| {
                                let ks: Vec<String> = k.iter().map(Value::to_string).collect();
                                format!("({}) -> {val}", ks.join(", "))
                            })
                            .collect();
                        write!(out, " = table {{ {} }}", rows.join(", ")).unwrap();
                    }
                    _ => {}
                }
                out.push_str(";\n");
            }
            SymbolKind::Dynamic => {
                write!(out, "dynamic {} : {}", sym.name, profile(sym)).unwrap();
                if sym.output {
                    out.push_str(" output");
                }
                out.push_str(";\n");
            }
        }
    }
    for f in v.dynamic_symbols() {
        let sym = v.symbol(f);
        let e = &m.init[&f];
        let params: Vec<String> = (1..=sym.arity()).map(|i| format!("x{i}")).collect();
        let names: Vec<String> = e.sigma.iter().map(|&i| params[i].clone()).collect();
        let head = if params.is_empty() {
            sym.name.to_string()
        } else {
            format!("{}({})", sym.name, params.join(", "))
        };
        writeln!(out, "init {head} = {};", e.term.display_with(v, &names)).unwrap();
    }
    out.push_str("program\n");
    print_stmt(&mut out, v, &m.program, 1, false);
    out.push('\n');
    out
}

pub fn print_program(v: &Vocabulary, p: &Program) -> String {
    let mut out = String::new();
    print_stmt(&mut out, v, p, 0, false);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn print_stmt(out: &mut String, v: &Vocabulary, p: &Program, depth: usize, force_else: bool) {
    indent(out, depth);
    print_stmt_inline(out, v, p, depth, force_else);
}

fn print_stmt_inline(out: &mut String, v: &Vocabulary, p: &Program, depth: usize, force_else: bool) {
    match p {
        Program::Skip => out.push_str("skip"),
        Program::Halt => out.push_str("halt"),
        Program::Fail => out.push_str("fail"),
        Program::Update(u) => {
            out.push_str(v.name_of(u.sym));
            if !u.args.is_empty() {
                let a: Vec<String> = u.args.iter().map(|t| t.display(v).to_string()).collect();
                write!(out, "({})", a.join(", ")).unwrap();
            }
            write!(out, " := {}", u.rhs.display(v)).unwrap();
        }
        Program::If(c, a, b) => {
            let has_else = force_else || **b != Program::Skip;
            writeln!(out, "if {} then", c.display(v)).unwrap();
            print_stmt(out, v, a, depth + 1, has_else);
            if has_else {
                out.push('\n');
                indent(out, depth);
                out.push_str("else\n");
                print_stmt(out, v, b, depth + 1, force_else);
            }
        }
        Program::Par(ps) => {
            out.push_str("par {\n");
            for q in ps {
                print_stmt(out, v, q, depth + 1, false);
                out.push_str(";\n");
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EUCLID: &str = "
        sort Nat = 0..50;
        static zero : Nat = 0;
        static a0 : Nat input;
        static b0 : Nat input;
        static lt : Nat, Nat -> Bool = builtin lt;
        static rem : Nat, Nat -> Nat = builtin rem;
        dynamic a : Nat output;
        dynamic b : Nat;
        init a = a0;
        init b = b0;
        program
          if lt(zero, b) then par { a := b; b := rem(a, b); }
    ";

    #[test]
    fn parses_and_round_trips() {
        let m = parse_machine(EUCLID).unwrap();
        let text = print_machine(&m);
        let m2 = parse_machine(&text).unwrap_or_else(|d| panic!("{d}\n{text}"));
        assert_eq!(*m.vocab, *m2.vocab);
        assert_eq!(m.program, m2.program);
        assert_eq!(m.init, m2.init);
        assert_eq!(m.statics, m2.statics);
    }

    #[test]
    fn infix_and_literals() {
        let src = "
            sort N = 0..8;
            static plus : N, N -> N = builtin plus;
            dynamic i : N;
            init i = 0;
            program if i = 4 then halt else i := i + 1
        ";
        let m = parse_machine(src).unwrap();
        assert_eq!(print_program(&m.vocab, &m.program).lines().next(), Some("if eq_N(i, 4) then"));
    }

    #[test]
    fn diagnostics_are_positioned() {
        let bad_init = "sort N = 0..3; dynamic a : N; dynamic b : N; init a = b; init b = 0; program skip";
        let d = parse_machine(bad_init).unwrap_err();
        assert_eq!(d.0.len(), 1);
        assert!(d.0[0].message.contains("static symbols only"), "{d}");
        assert_eq!((d.0[0].line, d.0[0].col), (1, 55));

        let static_lhs = "sort N = 0..3; static c : N = 1; program c := 2";
        let d = parse_machine(static_lhs).unwrap_err();
        assert!(d.0[0].message.contains("must be dynamic"), "{d}");

        let unknown = "sort N = 0..3; dynamic a : N; init a = 0; program a := g(a)";
        assert!(parse_machine(unknown).unwrap_err().0[0].message.contains("unknown symbol `g`"));

        let sort_err = "sort N = 0..3; dynamic a : N; init a = 0; program a := True";
        assert!(parse_machine(sort_err).unwrap_err().0[0].message.contains("expected sort `N`"));

        let syntax = "sort N = 0..3; dynamic a : N; init a = 0; program a = 1";
        assert!(parse_machine(syntax).unwrap_err().0[0].message.contains("expected `:=`"));
    }
}
