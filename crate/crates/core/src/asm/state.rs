use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::asm::term::AsmTerm;
use crate::asm::vocab::{SymId, Vocabulary};
use crate::value::Value;

/// A finite partial function: argument tuple ↦ value.
pub type Table = BTreeMap<Vec<Value>, Value>;

/// How a static symbol is interpreted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StaticDef {
    /// Boolean connectives, `True`, `False` and the equalities.
    Auto,
    /// A named arithmetic primitive on naturals, see [`BUILTINS`].
    Builtin(String),
    Const(Value),
    Table(Table),
    /// An arity-0 input, bound when a run starts.
    Input,
}

/// Built-in primitives and their arities.
pub const BUILTINS: &[(&str, usize)] = &[
    ("rem", 2),
    ("div", 2),
    ("lt", 2),
    ("le", 2),
    ("gt", 2),
    ("ge", 2),
    ("plus", 2),
    ("minus", 2),
    ("times", 2),
    ("max", 2),
    ("min", 2),
    ("succ", 1),
    ("pred", 1),
];

pub fn builtin_arity(name: &str) -> Option<usize> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

/// Semantics of a built-in. `rem`/`div` are undefined at divisor 0, `minus`
/// below zero and `pred` at 0.
pub fn builtin_apply(name: &str, args: &[Value]) -> Option<Value> {
    let n = |i: usize| args.get(i).and_then(Value::as_nat);
    let b = |x: bool| Some(Value::Bool(x));
    let v = |x: u64| Some(Value::Nat(x));
    match name {
        "rem" => n(0)?.checked_rem(n(1)?).map(Value::Nat),
        "div" => n(0)?.checked_div(n(1)?).map(Value::Nat),
        "lt" => b(n(0)? < n(1)?),
        "le" => b(n(0)? <= n(1)?),
        "gt" => b(n(0)? > n(1)?),
        "ge" => b(n(0)? >= n(1)?),
        "plus" => n(0)?.checked_add(n(1)?).map(Value::Nat),
        "minus" => n(0)?.checked_sub(n(1)?).map(Value::Nat),
        "times" => n(0)?.checked_mul(n(1)?).map(Value::Nat),
        "max" => v(n(0)?.max(n(1)?)),
        "min" => v(n(0)?.min(n(1)?)),
        "succ" => n(0)?.checked_add(1).map(Value::Nat),
        "pred" => n(0)?.checked_sub(1).map(Value::Nat),
        _ => None,
    }
}

/// Semantics of the automatic statics, by name.
pub fn auto_apply(name: &str, args: &[Value]) -> Option<Value> {
    let b = |i: usize| args.get(i).and_then(Value::as_bool);
    match name {
        "True" => Some(Value::Bool(true)),
        "False" => Some(Value::Bool(false)),
        "not" => Some(Value::Bool(!b(0)?)),
        "and" => Some(Value::Bool(b(0)? && b(1)?)),
        "or" => Some(Value::Bool(b(0)? || b(1)?)),
        _ if name.starts_with("eq_") && args.len() == 2 => Some(Value::Bool(args[0] == args[1])),
        _ => None,
    }
}

/// The fixed part of every state of one run: vocabulary, static
/// interpretations and bound inputs.
#[derive(Debug)]
pub(crate) struct Env {
    pub vocab: Arc<Vocabulary>,
    pub defs: Vec<Option<StaticDef>>,
    pub inputs: Vec<Option<Value>>,
    /// Dynamic symbol ↦ index into the state's tables.
    pub slots: Vec<Option<usize>>,
    pub dynamics: Vec<SymId>,
}

impl Env {
    pub fn apply_static(&self, f: SymId, args: &[Value]) -> Option<Value> {
        let sym = self.vocab.symbol(f);
        let out = match self.defs[f.0].as_ref()? {
            StaticDef::Auto => auto_apply(&sym.name, args),
            StaticDef::Builtin(b) => builtin_apply(b, args),
            StaticDef::Const(v) => Some(v.clone()),
            StaticDef::Table(t) => t.get(args).cloned(),
            StaticDef::Input => self.inputs[f.0].clone(),
        }?;
        sym.result.contains(&out).then_some(out)
    }
}

/// An ASM state: shared statics plus the tables of the dynamic symbols.
#[derive(Clone, Debug)]
pub struct State {
    pub(crate) env: Arc<Env>,
    pub(crate) tables: Vec<Table>,
}

impl PartialEq for State {
    fn eq(&self, other: &State) -> bool {
        self.tables == other.tables
    }
}

impl Eq for State {}

impl State {
    pub fn vocab(&self) -> &Vocabulary {
        &self.env.vocab
    }

    /// Dynamic symbols in slot order.
    pub fn dynamics(&self) -> &[SymId] {
        &self.env.dynamics
    }

    pub fn table(&self, f: SymId) -> Option<&Table> {
        self.env.slots[f.0].map(|i| &self.tables[i])
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    /// Interpretation of `f` at `args` (static or dynamic).
    pub fn apply(&self, f: SymId, args: &[Value]) -> Option<Value> {
        match self.env.slots[f.0] {
            Some(i) => self.tables[i].get(args).cloned(),
            None => self.env.apply_static(f, args),
        }
    }

    /// Strict bottom-up evaluation; `vars` binds `Var(j)`.
    pub fn eval(&self, t: &AsmTerm, vars: &[Value]) -> Option<Value> {
        match t {
            AsmTerm::Var(j) => vars.get(*j).cloned(),
            AsmTerm::Lit(v) => Some(v.clone()),
            AsmTerm::App(f, args) => {
                let vals = args.iter().map(|a| self.eval(a, vars)).collect::<Option<Vec<_>>>()?;
                self.apply(*f, &vals)
            }
        }
    }

    pub fn eval_ground(&self, t: &AsmTerm) -> Option<Value> {
        self.eval(t, &[])
    }

    /// `t^σ(a₁,…,aₚ) = t(a_σ(1),…,a_σ(ℓ))`.
    pub fn lift(&self, t: &AsmTerm, sigma: &[usize], args: &[Value]) -> Option<Value> {
        let env = sigma.iter().map(|&i| args.get(i).cloned()).collect::<Option<Vec<_>>>()?;
        self.eval(t, &env)
    }

    pub(crate) fn with_tables(&self, tables: Vec<Table>) -> State {
        State {
            env: self.env.clone(),
            tables,
        }
    }

    /// Value of an output symbol: the value itself for arity 0, otherwise
    /// the sequence of defined `(args…, value)` entries.
    pub fn output_value(&self, f: SymId) -> Option<Value> {
        let t = self.table(f)?;
        if self.vocab().symbol(f).arity() == 0 {
            t.get(&[][..]).cloned()
        } else {
            Some(table_to_seq(t))
        }
    }

    pub fn outputs(&self) -> Vec<Value> {
        self.vocab()
            .output_symbols()
            .into_iter()
            .filter_map(|f| self.output_value(f))
            .collect()
    }

    /// One-line rendering of the dynamic part, e.g. `a=8 b=4`.
    pub fn digest(&self) -> String {
        let mut out = String::new();
        for (i, f) in self.env.dynamics.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let sym = self.vocab().symbol(*f);
            let t = &self.tables[i];
            if sym.arity() == 0 {
                match t.get(&[][..]) {
                    Some(v) => write!(out, "{}={v}", sym.name).unwrap(),
                    None => write!(out, "{}=undef", sym.name).unwrap(),
                }
            } else {
                write!(out, "{}={}", sym.name, table_to_seq(t)).unwrap();
            }
        }
        out
    }
}

pub fn table_to_seq(t: &Table) -> Value {
    Value::Seq(
        t.iter()
            .map(|(k, v)| {
                let mut row = k.clone();
                row.push(v.clone());
                row
            })
            .collect(),
    )
}
