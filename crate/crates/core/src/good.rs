//! Good F-terms: abstraction-free compositions of constants over variables.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::asm::{auto_apply, builtin_apply, AsmTerm, Inputs, Machine, StaticDef, SymId};
use crate::fsig::{FFunction, FSignature};
use crate::reduce::{reduce_counting, Outcome};
use crate::term::Term;
use crate::value::{name, Name, Value};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GoodTerm {
    /// The j-th variable `x_j` (0-based).
    Var(usize),
    /// A code `⌜v⌝` placed directly in the term.
    Code(Value),
    /// `c_f t₁ … tₙ`.
    Node(Name, Vec<GoodTerm>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GoodError {
    #[error("dynamic symbol `{0}` has arity {1}; only dynamic constants become variables")]
    DynamicFunction(Name, usize),
    #[error("unknown function `{0}`")]
    UnknownFunction(Name),
    #[error("`{0}` applied to {1} arguments")]
    Arity(Name, usize),
    #[error("value undefined at this valuation")]
    Undefined,
    #[error("reduction did not reach a code: {0}")]
    NotCode(String),
    #[error("cost depends on the valuation: {0} vs {1}")]
    CostVaries(u64, u64),
    #[error("β-steps in a good term reduction")]
    BetaSteps,
}

/// Cost measured on one valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodCost {
    pub f_count: u64,
    pub value: Value,
}

impl GoodTerm {
    pub fn node(f: &str, args: Vec<GoodTerm>) -> GoodTerm {
        GoodTerm::Node(name(f), args)
    }

    /// Number of constant nodes.
    pub fn node_count(&self) -> usize {
        match self {
            GoodTerm::Var(_) | GoodTerm::Code(_) => 0,
            GoodTerm::Node(_, args) => 1 + args.iter().map(GoodTerm::node_count).sum::<usize>(),
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            GoodTerm::Var(j) => {
                out.insert(*j);
            }
            GoodTerm::Code(_) => {}
            GoodTerm::Node(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    /// The λ-term, with `var(j)` standing for `x_j`.
    pub fn to_term_with(&self, var: &dyn Fn(usize) -> Term) -> Term {
        match self {
            GoodTerm::Var(j) => var(*j),
            GoodTerm::Code(v) => Term::code(v.clone()),
            GoodTerm::Node(f, args) => Term::apps(Term::constant(f), args.iter().map(|a| a.to_term_with(var))),
        }
    }

    /// The λ-term over free variables `x1, x2, …`.
    pub fn to_term(&self) -> Term {
        self.to_term_with(&|j| Term::var(&format!("x{}", j + 1)))
    }

    /// `t[⌜a₁⌝/x₁, …]`.
    pub fn instantiate(&self, vals: &[Value]) -> Term {
        self.to_term_with(&|j| Term::code(vals[j].clone()))
    }

    /// `⟦t⟧(ā)` computed directly from the signature.
    pub fn eval(&self, sig: &FSignature, vals: &[Value]) -> Result<Value, GoodError> {
        match self {
            GoodTerm::Var(j) => vals.get(*j).cloned().ok_or(GoodError::Undefined),
            GoodTerm::Code(v) => Ok(v.clone()),
            GoodTerm::Node(f, args) => {
                let func = sig.get(f).ok_or_else(|| GoodError::UnknownFunction(f.clone()))?;
                if func.arity() != args.len() {
                    return Err(GoodError::Arity(f.clone(), args.len()));
                }
                let vs = args.iter().map(|a| a.eval(sig, vals)).collect::<Result<Vec<_>, _>>()?;
                if !func.accepts(&vs) {
                    return Err(GoodError::Undefined);
                }
                func.apply(&vs).ok_or(GoodError::Undefined)
            }
        }
    }

    /// Leftmost F-first reduction of `t[codes]`: its F-count and result.
    pub fn measure(&self, sig: &FSignature, vals: &[Value]) -> Result<GoodCost, GoodError> {
        let r = reduce_counting(&self.instantiate(vals), Some(sig), 1 + 4 * self.node_count() as u64);
        match r.outcome {
            Outcome::Normal => {}
            Outcome::Undefined { .. } => return Err(GoodError::Undefined),
            Outcome::BudgetExhausted => return Err(GoodError::NotCode(r.term.to_string())),
        }
        if r.trace.beta_count != 0 {
            return Err(GoodError::BetaSteps);
        }
        let value = r.term.as_value().ok_or_else(|| GoodError::NotCode(r.term.to_string()))?;
        Ok(GoodCost {
            f_count: r.trace.f_count,
            value,
        })
    }

    /// `L_t`, checked equal on every valuation given (and against
    /// [`GoodTerm::eval`]).
    pub fn reduce_cost(&self, sig: &FSignature, valuations: &[Vec<Value>]) -> Result<u64, GoodError> {
        let mut cost = None;
        for vals in valuations {
            let c = self.measure(sig, vals)?;
            let expect = self.eval(sig, vals)?;
            if c.value != expect {
                return Err(GoodError::NotCode(format!("{} ≠ {}", c.value, expect)));
            }
            match cost {
                None => cost = Some(c.f_count),
                Some(k) if k != c.f_count => return Err(GoodError::CostVaries(k, c.f_count)),
                _ => {}
            }
        }
        Ok(cost.unwrap_or(self.node_count() as u64))
    }

    /// Replaces every ground subtree by the code of its value.
    pub fn fold_ground(&self, sig: &FSignature) -> GoodTerm {
        match self {
            GoodTerm::Node(f, args) => {
                if self.is_ground() {
                    if let Ok(v) = self.eval(sig, &[]) {
                        return GoodTerm::Code(v);
                    }
                }
                GoodTerm::Node(f.clone(), args.iter().map(|a| a.fold_ground(sig)).collect())
            }
            t => t.clone(),
        }
    }

    /// Renames variables.
    pub fn map_vars(&self, f: &dyn Fn(usize) -> GoodTerm) -> GoodTerm {
        match self {
            GoodTerm::Var(j) => f(*j),
            GoodTerm::Code(v) => GoodTerm::Code(v.clone()),
            GoodTerm::Node(g, args) => GoodTerm::Node(g.clone(), args.iter().map(|a| a.map_vars(f)).collect()),
        }
    }
}

impl fmt::Display for GoodTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_term())
    }
}

/// Translates an ASM term over statics and dynamic constants: the i-th
/// dynamic symbol of the vocabulary becomes `x_i`; `Var(j)` of an
/// initialization term stays `x_j`.
pub fn from_asm_term(m: &Machine, t: &AsmTerm) -> Result<GoodTerm, GoodError> {
    let dynamics = m.dynamic_symbols();
    from_asm_term_with(m, t, &|f| dynamics.iter().position(|d| *d == f))
}

/// As [`from_asm_term`], with an explicit slot for each dynamic constant.
pub fn from_asm_term_with(m: &Machine, t: &AsmTerm, slot: &dyn Fn(SymId) -> Option<usize>) -> Result<GoodTerm, GoodError> {
    match t {
        AsmTerm::Var(j) => Ok(GoodTerm::Var(*j)),
        AsmTerm::Lit(v) => Ok(GoodTerm::Code(v.clone())),
        AsmTerm::App(f, args) => {
            let sym = m.vocab.symbol(*f);
            if sym.is_dynamic() {
                if sym.arity() > 0 {
                    return Err(GoodError::DynamicFunction(sym.name.clone(), sym.arity()));
                }
                return slot(*f).map(GoodTerm::Var).ok_or_else(|| GoodError::UnknownFunction(sym.name.clone()));
            }
            let args = args
                .iter()
                .map(|a| from_asm_term_with(m, a, slot))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(GoodTerm::Node(sym.name.clone(), args))
        }
    }
}

/// The semantics of a static symbol, given the bound inputs.
pub fn static_semantics(m: &Machine, f: SymId, inputs: &Inputs) -> Option<FFunction> {
    let sym = m.vocab.symbol(f).clone();
    let def = m.statics.get(&f)?.clone();
    let n = sym.name.clone();
    let sem: Box<dyn Fn(&[Value]) -> Option<Value> + Send + Sync> = match def {
        StaticDef::Auto => Box::new(move |a: &[Value]| auto_apply(&n, a)),
        StaticDef::Builtin(b) => Box::new(move |a: &[Value]| builtin_apply(&b, a)),
        StaticDef::Const(v) => Box::new(move |_: &[Value]| Some(v.clone())),
        StaticDef::Table(t) => Box::new(move |a: &[Value]| t.get(a).cloned()),
        StaticDef::Input => {
            let v = inputs.get(&*sym.name)?.clone();
            Box::new(move |_: &[Value]| Some(v.clone()))
        }
    };
    Some(FFunction::new(&sym.name, sym.args.clone(), sym.result.clone(), move |a| sem(a)))
}

/// Every static of `m` as an F-function (inputs need a binding to appear).
pub fn static_signature(m: &Machine, inputs: &Inputs) -> FSignature {
    let mut sig = FSignature::new();
    for f in m.vocab.static_symbols() {
        if let Some(func) = static_semantics(m, f, inputs) {
            sig.ensure(func);
        }
    }
    sig
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::parse_machine;
    use crate::value::Sort;

    const EUCLID: &str = "
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

    fn n(x: u64) -> Value {
        Value::Nat(x)
    }

    #[test]
    fn euclid_terms() {
        let m = parse_machine(EUCLID).unwrap();
        let sig = static_signature(&m, &Inputs::new());
        let (a, b, rem, lt, zero) = ["a", "b", "rem", "lt", "zero"].map(|s| m.vocab.lookup(s).unwrap()).into();
        let t = from_asm_term(&m, &AsmTerm::app(rem, vec![AsmTerm::constant(a), AsmTerm::constant(b)])).unwrap();
        assert_eq!(t.to_term().to_string(), "#rem x1 x2");
        assert_eq!(t.reduce_cost(&sig, &[vec![n(12), n(8)], vec![n(7), n(3)], vec![n(0), n(5)]]), Ok(1));
        assert_eq!(t.measure(&sig, &[n(12), n(8)]).unwrap().value, n(4));
        assert_eq!(t.measure(&sig, &[n(12), n(0)]), Err(GoodError::Undefined));

        let g = from_asm_term(&m, &AsmTerm::app(lt, vec![AsmTerm::constant(zero), AsmTerm::constant(b)])).unwrap();
        assert_eq!(g.to_term().to_string(), "#lt #zero x2");
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.reduce_cost(&sig, &[vec![n(0), n(0)], vec![n(0), n(8)], vec![n(3), n(20)]]), Ok(2));
        assert_eq!(g.fold_ground(&sig).node_count(), 1);
    }

    #[test]
    fn composition_tree() {
        let nat = Sort::nat();
        let mut sig = FSignature::new();
        sig.insert(FFunction::new("g", vec![nat.clone(); 3], nat.clone(), |a| {
            Some(Value::Nat(a[0].as_nat()? * 100 + a[1].as_nat()? * 10 + a[2].as_nat()?))
        }))
        .unwrap();
        sig.insert(FFunction::new("h", vec![nat.clone()], nat, |a| Some(Value::Nat(a[0].as_nat()? + 1))))
            .unwrap();
        // f(x, y, z) = g(h(y), x, g(z, z, x)) with x, y, z = x1, x2, x3.
        let (x, y, z) = (GoodTerm::Var(0), GoodTerm::Var(1), GoodTerm::Var(2));
        let t = GoodTerm::node(
            "g",
            vec![GoodTerm::node("h", vec![y]), x.clone(), GoodTerm::node("g", vec![z.clone(), z, x])],
        );
        assert_eq!(t.to_term().to_string(), "#g (#h x2) x1 (#g x3 x3 x1)");
        let vals = [vec![n(1), n(2), n(3)], vec![n(0), n(0), n(0)], vec![n(4), n(5), n(6)]];
        let internal = t.node_count() as u64;
        assert_eq!(internal, 3);
        assert_eq!(t.reduce_cost(&sig, &vals), Ok(internal));
        // g(3, 1, g(3, 3, 1)) = 300 + 10 + 331.
        assert_eq!(t.measure(&sig, &vals[0]).unwrap().value, n(641));
        assert_eq!(GoodTerm::Var(0).reduce_cost(&sig, &vals), Ok(0));
    }
}
