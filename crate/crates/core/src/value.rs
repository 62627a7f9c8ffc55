//! Values of datatypes and the sorts (datatypes) they inhabit.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::encodings::DatatypeDef;
use crate::error::ParseError;

/// Interned-ish identifier used for symbols, binders and constructor names.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// An element of some datatype.
///
/// Equality is structural. `Seq` holds the finite sequences of tuples used
/// by the delta-list datatypes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Nat(u64),
    /// Element of an enumerated sort.
    Atom(Name),
    /// Constructor tree of an inductive datatype.
    Ctor(Name, Vec<Value>),
    Tuple(Vec<Value>),
    Seq(Vec<Vec<Value>>),
}

impl Value {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Value::Nat(n) => Some(*n),
            _ => None,
        }
    }

    pub fn parse(src: &str) -> Result<Value, ParseError> {
        let mut p = ValueParser { src, pos: 0 };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != src.len() {
            return Err(p.err("trailing input after value"));
        }
        Ok(v)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(true) => write!(f, "True"),
            Value::Bool(false) => write!(f, "False"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Ctor(c, args) => {
                write!(f, "{c}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    write_list(f, args)?;
                    write!(f, ")")?;
                }
                Ok(())
            }
            Value::Tuple(vs) => {
                write!(f, "(")?;
                write_list(f, vs)?;
                write!(f, ")")
            }
            Value::Seq(items) => {
                write!(f, "<")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "(")?;
                    write_list(f, t)?;
                    write!(f, ")")?;
                }
                write!(f, ">")
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, vs: &[Value]) -> fmt::Result {
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Recursive-descent reader for the value literal syntax used inside `[..]`
/// codes and in source files.
pub(crate) struct ValueParser<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> ValueParser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError::at_offset(self.src, self.pos, msg)
    }

    pub fn skip_ws(&mut self) {
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

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_alphanumeric() || c == '_' || (i > 0 && c == '\'')))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 || rest.starts_with(|c: char| c.is_ascii_digit()) {
            return None;
        }
        self.pos += len;
        Some(&rest[..len])
    }

    fn values_until(&mut self, close: char) -> Result<Vec<Value>, ParseError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    pub fn value(&mut self) -> Result<Value, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let rest = &self.src[self.pos..];
                let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
                let n = rest[..len]
                    .parse::<u64>()
                    .map_err(|_| self.err("natural literal out of range"))?;
                self.pos += len;
                Ok(Value::Nat(n))
            }
            Some('(') => {
                self.pos += 1;
                Ok(Value::Tuple(self.values_until(')')?))
            }
            Some('<') => {
                self.pos += 1;
                let mut items = Vec::new();
                if self.eat('>') {
                    return Ok(Value::Seq(items));
                }
                loop {
                    self.expect('(')?;
                    items.push(self.values_until(')')?);
                    if self.eat('>') {
                        return Ok(Value::Seq(items));
                    }
                    self.expect(',')?;
                }
            }
            _ => {
                let id = self.ident().ok_or_else(|| self.err("expected a value"))?;
                match id {
                    "True" => Ok(Value::Bool(true)),
                    "False" => Ok(Value::Bool(false)),
                    _ if self.peek() == Some('(') => {
                        self.pos += 1;
                        Ok(Value::Ctor(name(id), self.values_until(')')?))
                    }
                    _ => Ok(Value::Atom(name(id))),
                }
            }
        }
    }
}

/// Membership predicate of a sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Domain {
    Bool,
    /// All naturals.
    Nat,
    /// A finite enumerated carrier.
    Finite(BTreeSet<Value>),
    /// Finite sequences of tuples whose components lie in the given sorts.
    Seq(Vec<Sort>),
    Tuple(Vec<Sort>),
    /// A free inductive sort whose constructors are in the family.
    Inductive(Arc<DatatypeDef>),
    Any,
}

#[derive(Debug, PartialEq, Eq)]
struct SortDef {
    name: Name,
    domain: Domain,
}

/// A named datatype. Cheap to clone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sort(Arc<SortDef>);

impl Sort {
    pub fn new(name_: &str, domain: Domain) -> Sort {
        Sort(Arc::new(SortDef {
            name: name(name_),
            domain,
        }))
    }

    pub fn bool() -> Sort {
        Sort::new("Bool", Domain::Bool)
    }

    pub fn nat() -> Sort {
        Sort::new("Nat", Domain::Nat)
    }

    pub fn any() -> Sort {
        Sort::new("Any", Domain::Any)
    }

    pub fn finite(name_: &str, values: impl IntoIterator<Item = Value>) -> Sort {
        Sort::new(name_, Domain::Finite(values.into_iter().collect()))
    }

    pub fn nat_range(name_: &str, lo: u64, hi: u64) -> Sort {
        Sort::finite(name_, (lo..=hi).map(Value::Nat))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn domain(&self) -> &Domain {
        &self.0.domain
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (&self.0.domain, v) {
            (Domain::Any, _) => true,
            (Domain::Bool, Value::Bool(_)) => true,
            (Domain::Nat, Value::Nat(_)) => true,
            (Domain::Finite(set), v) => set.contains(v),
            (Domain::Seq(comps), Value::Seq(items)) => items.iter().all(|t| {
                t.len() == comps.len() && t.iter().zip(comps).all(|(x, s)| s.contains(x))
            }),
            (Domain::Tuple(comps), Value::Tuple(vs)) => {
                vs.len() == comps.len() && vs.iter().zip(comps).all(|(x, s)| s.contains(x))
            }
            (Domain::Inductive(family), v) => family.contains(self.name(), v),
            _ => false,
        }
    }

    /// The enumerated carrier, if finite.
    pub fn carrier(&self) -> Option<Vec<Value>> {
        match &self.0.domain {
            Domain::Bool => Some(vec![Value::Bool(true), Value::Bool(false)]),
            Domain::Finite(set) => Some(set.iter().cloned().collect()),
            Domain::Inductive(family) => family.finite_carrier(self.name()),
            _ => None,
        }
    }

    /// A fixed inhabitant, used as the default result of totalized functions.
    pub fn default_value(&self) -> Value {
        match &self.0.domain {
            Domain::Bool => Value::Bool(false),
            Domain::Nat | Domain::Any => Value::Nat(0),
            Domain::Finite(set) => set.iter().next().cloned().unwrap_or(Value::Nat(0)),
            Domain::Seq(_) => Value::Seq(Vec::new()),
            Domain::Tuple(comps) => Value::Tuple(comps.iter().map(Sort::default_value).collect()),
            Domain::Inductive(family) => family.default_value(self.name()).unwrap_or(Value::Nat(0)),
        }
    }
}

/// Cartesian product of carriers, in lexicographic order.
pub fn grid(carriers: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let mut out = vec![Vec::new()];
    for c in carriers {
        let mut next = Vec::with_capacity(out.len() * c.len());
        for prefix in &out {
            for v in c {
                let mut t = prefix.clone();
                t.push(v.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_literals_round_trip() {
        for src in ["True", "12", "red", "Node(Leaf, Leaf)", "(3, 7)", "<(1, 5), (2, 6)>", "<>"] {
            let v = Value::parse(src).unwrap();
            assert_eq!(v.to_string(), src);
        }
    }

    #[test]
    fn seq_membership_checks_components() {
        let s = Sort::new("L", Domain::Seq(vec![Sort::nat(), Sort::bool()]));
        assert!(s.contains(&Value::parse("<(1, True)>").unwrap()));
        assert!(!s.contains(&Value::parse("<(1, 2)>").unwrap()));
        assert!(!s.contains(&Value::Nat(1)));
    }

    #[test]
    fn grid_is_lexicographic() {
        let g = grid(&[vec![Value::Nat(0), Value::Nat(1)], vec![Value::Bool(true)]]);
        assert_eq!(g.len(), 2);
        assert_eq!(g[1], vec![Value::Nat(1), Value::Bool(true)]);
        assert_eq!(grid(&[]), vec![Vec::<Value>::new()]);
    }
}
