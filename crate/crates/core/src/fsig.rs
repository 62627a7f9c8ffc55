//! Signatures of benign constants and the delta-list extension.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::value::{name, Domain, Name, Sort, Value};

pub type SemFn = Arc<dyn Fn(&[Value]) -> Option<Value> + Send + Sync>;

/// One function of the signature: `c_f ⌜a₁⌝…⌜aₖ⌝ → ⌜f(a₁,…,aₖ)⌝`.
#[derive(Clone)]
pub struct FFunction {
    pub name: Name,
    pub args: Vec<Sort>,
    pub result: Sort,
    pub sem: SemFn,
}

impl FFunction {
    pub fn new(
        name_: &str,
        args: Vec<Sort>,
        result: Sort,
        sem: impl Fn(&[Value]) -> Option<Value> + Send + Sync + 'static,
    ) -> FFunction {
        FFunction {
            name: name(name_),
            args,
            result,
            sem: Arc::new(sem),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Whether `args` lie in the declared argument sorts.
    pub fn accepts(&self, args: &[Value]) -> bool {
        args.len() == self.args.len() && args.iter().zip(&self.args).all(|(v, s)| s.contains(v))
    }

    /// The semantic value, or `None` when undefined. Results outside the
    /// declared result sort count as undefined.
    pub fn apply(&self, args: &[Value]) -> Option<Value> {
        (self.sem)(args).filter(|v| self.result.contains(v))
    }
}

impl fmt::Debug for FFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args: Vec<&str> = self.args.iter().map(Sort::name).collect();
        write!(f, "{} : {} -> {}", self.name, args.join(", "), self.result.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SigError {
    #[error("duplicate function `{0}` in signature")]
    Duplicate(Name),
}

/// A family F of functions over datatypes, each with its constant symbol.
#[derive(Clone, Debug, Default)]
pub struct FSignature {
    funcs: BTreeMap<Name, FFunction>,
    nullary: usize,
}

impl FSignature {
    pub fn new() -> FSignature {
        FSignature::default()
    }

    /// The Boolean connectives and Boolean equality.
    pub fn boolean() -> FSignature {
        let mut s = FSignature::new();
        for f in boolean_functions() {
            s.insert(f).expect("fresh signature");
        }
        s
    }

    pub fn insert(&mut self, f: FFunction) -> Result<(), SigError> {
        if self.funcs.contains_key(&f.name) {
            return Err(SigError::Duplicate(f.name));
        }
        if f.args.is_empty() {
            self.nullary += 1;
        }
        self.funcs.insert(f.name.clone(), f);
        Ok(())
    }

    /// Inserts unless a function of that name is already present.
    pub fn ensure(&mut self, f: FFunction) {
        if !self.funcs.contains_key(&f.name) {
            let _ = self.insert(f);
        }
    }

    pub fn get(&self, f: &str) -> Option<&FFunction> {
        self.funcs.get(f)
    }

    pub fn contains(&self, f: &str) -> bool {
        self.funcs.contains_key(f)
    }

    pub fn functions(&self) -> impl Iterator<Item = &FFunction> {
        self.funcs.values()
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub(crate) fn has_nullary(&self) -> bool {
        self.nullary > 0
    }

    /// Adds the five delta constants of `eps`.
    pub fn add_delta(&mut self, eps: &Epsilon) {
        for op in DeltaOp::ALL {
            self.ensure(eps.function(op));
        }
    }
}

fn boolean_functions() -> Vec<FFunction> {
    let b = Sort::bool;
    let bin = |n: &str, op: fn(bool, bool) -> bool| {
        FFunction::new(n, vec![b(), b()], b(), move |a| {
            Some(Value::Bool(op(a[0].as_bool()?, a[1].as_bool()?)))
        })
    };
    vec![
        FFunction::new("not", vec![b()], b(), |a| Some(Value::Bool(!a[0].as_bool()?))),
        bin("and", |x, y| x && y),
        bin("or", |x, y| x || y),
        bin("implies", |x, y| !x || y),
        bin("iff", |x, y| x == y),
        bin("eq_Bool", |x, y| x == y),
    ]
}

/// A dynamic-symbol profile `(A₁,…,Aₘ, A)` of the delta extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epsilon {
    pub args: Vec<Sort>,
    pub result: Sort,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaOp {
    /// Is the list functional in its first m components?
    F,
    /// Does some tuple extend the given prefix?
    B,
    /// The value stored for the given prefix.
    V,
    /// Append a tuple.
    Add,
    /// Remove every occurrence of a tuple.
    Del,
}

impl DeltaOp {
    pub const ALL: [DeltaOp; 5] = [DeltaOp::F, DeltaOp::B, DeltaOp::V, DeltaOp::Add, DeltaOp::Del];

    pub fn prefix(self) -> &'static str {
        match self {
            DeltaOp::F => "F",
            DeltaOp::B => "B",
            DeltaOp::V => "V",
            DeltaOp::Add => "Add",
            DeltaOp::Del => "Del",
        }
    }
}

impl Epsilon {
    pub fn new(args: Vec<Sort>, result: Sort) -> Epsilon {
        Epsilon { args, result }
    }

    /// `A₁.….Aₘ.A`, used to build constant names such as `V.Nat.Nat`.
    pub fn tag(&self) -> String {
        let mut parts: Vec<&str> = self.args.iter().map(Sort::name).collect();
        parts.push(self.result.name());
        parts.join(".")
    }

    pub fn op_name(&self, op: DeltaOp) -> String {
        format!("{}.{}", op.prefix(), self.tag())
    }

    /// The list datatype `L_ε` of finite sequences of (m+1)-tuples.
    pub fn list_sort(&self) -> Sort {
        let mut comps = self.args.clone();
        comps.push(self.result.clone());
        Sort::new(&format!("L.{}", self.tag()), Domain::Seq(comps))
    }

    /// The constant for `op`, with its arguments flattened: the list first,
    /// then the components of the tuple argument, if any.
    pub fn function(&self, op: DeltaOp) -> FFunction {
        let list = self.list_sort();
        let m = self.args.len();
        let mut args = vec![list.clone()];
        let result = match op {
            DeltaOp::F => Sort::bool(),
            DeltaOp::B => {
                args.extend(self.args.iter().cloned());
                Sort::bool()
            }
            DeltaOp::V => {
                args.extend(self.args.iter().cloned());
                self.result.clone()
            }
            DeltaOp::Add | DeltaOp::Del => {
                args.extend(self.args.iter().cloned());
                args.push(self.result.clone());
                list
            }
        };
        FFunction::new(&self.op_name(op), args, result, move |a| match &a[0] {
            Value::Seq(seq) => delta_semantics_m(op, m, seq, &a[1..]),
            _ => None,
        })
    }
}

/// A set of profiles ε, one per dynamic symbol type.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeltaSignature {
    pub entries: Vec<Epsilon>,
}

impl DeltaSignature {
    pub fn insert(&mut self, eps: Epsilon) -> usize {
        if let Some(i) = self.entries.iter().position(|e| *e == eps) {
            return i;
        }
        self.entries.push(eps);
        self.entries.len() - 1
    }
}

/// The mathematical semantics of a delta operation.
///
/// `tuple` is `ā` for `B` and `V`, the full tuple `(ā, v)` for `Add` and
/// `Del`, and ignored for `F`.
pub fn delta_semantics(op: DeltaOp, seq: &[Vec<Value>], tuple: &[Value]) -> Option<Value> {
    let m = match op {
        DeltaOp::F => seq.first().map_or(0, |t| t.len().saturating_sub(1)),
        DeltaOp::B | DeltaOp::V => tuple.len(),
        DeltaOp::Add | DeltaOp::Del => tuple.len().saturating_sub(1),
    };
    delta_semantics_m(op, m, seq, tuple)
}

fn functional(m: usize, seq: &[Vec<Value>]) -> bool {
    seq.iter().enumerate().all(|(i, s)| {
        seq[i + 1..]
            .iter()
            .all(|t| s.get(..m) != t.get(..m) || s.get(m) == t.get(m))
    })
}

fn delta_semantics_m(op: DeltaOp, m: usize, seq: &[Vec<Value>], tuple: &[Value]) -> Option<Value> {
    let has_prefix = |t: &Vec<Value>| t.len() == m + 1 && t[..m] == *tuple;
    match op {
        DeltaOp::F => Some(Value::Bool(functional(m, seq))),
        DeltaOp::B => Some(Value::Bool(seq.iter().any(has_prefix))),
        DeltaOp::V => {
            if !functional(m, seq) {
                return None;
            }
            seq.iter().find(|t| has_prefix(t)).map(|t| t[m].clone())
        }
        DeltaOp::Add => {
            let mut out = seq.to_vec();
            out.push(tuple.to_vec());
            Some(Value::Seq(out))
        }
        DeltaOp::Del => Some(Value::Seq(seq.iter().filter(|t| t.as_slice() != tuple).cloned().collect())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Vec<Vec<Value>> {
        match Value::parse(s).unwrap() {
            Value::Seq(v) => v,
            _ => panic!(),
        }
    }

    #[test]
    fn delta_examples() {
        let n = Value::Nat;
        assert_eq!(delta_semantics(DeltaOp::F, &seq("<(1, 5), (2, 6)>"), &[]), Some(Value::Bool(true)));
        assert_eq!(delta_semantics(DeltaOp::F, &seq("<(1, 5), (1, 6)>"), &[]), Some(Value::Bool(false)));
        assert_eq!(delta_semantics(DeltaOp::B, &seq("<(1, 5)>"), &[n(2)]), Some(Value::Bool(false)));
        assert_eq!(
            delta_semantics(DeltaOp::Del, &seq("<(1, 5), (1, 5), (2, 6)>"), &[n(1), n(5)]),
            Some(Value::parse("<(2, 6)>").unwrap())
        );
        assert_eq!(delta_semantics(DeltaOp::V, &seq("<(1, 5), (2, 6)>"), &[n(2)]), Some(n(6)));
        assert_eq!(delta_semantics(DeltaOp::V, &seq("<(1, 5), (1, 6)>"), &[n(1)]), None);
        assert_eq!(delta_semantics(DeltaOp::V, &seq("<(1, 5)>"), &[n(3)]), None);
        assert_eq!(
            delta_semantics(DeltaOp::Add, &[], &[n(3), n(7)]),
            Some(Value::parse("<(3, 7)>").unwrap())
        );
    }

    #[test]
    fn flattened_delta_constants_check_sorts() {
        let eps = Epsilon::new(vec![Sort::nat()], Sort::nat());
        let v = eps.function(DeltaOp::V);
        assert_eq!(&*v.name, "V.Nat.Nat");
        let s = Value::parse("<(1, 5)>").unwrap();
        assert!(v.accepts(&[s.clone(), Value::Nat(1)]));
        assert!(!v.accepts(&[s.clone(), Value::Bool(true)]));
        assert_eq!(v.apply(&[s, Value::Nat(1)]), Some(Value::Nat(5)));
    }

    #[test]
    fn boolean_signature_has_connectives() {
        let s = FSignature::boolean();
        let and = s.get("and").unwrap();
        assert_eq!(and.apply(&[Value::Bool(true), Value::Bool(false)]), Some(Value::Bool(false)));
        assert!(!s.has_nullary());
    }
}
