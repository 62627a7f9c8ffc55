//! λ-encodings of Booleans, tuples, naturals, case analysis and inductive
//! datatypes, with measured reduction costs.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fsig::FSignature;
use crate::reduce::{reduce_counting, Outcome};
use crate::term::{Term, TermKind};
use crate::value::{name, Name, Value};

pub fn tru() -> Term {
    Term::code(Value::Bool(true))
}

pub fn fls() -> Term {
    Term::code(Value::Bool(false))
}

pub fn boolean(b: bool) -> Term {
    Term::code(Value::Bool(b))
}

/// `I = λx.x`.
pub fn identity() -> Term {
    Term::lam("x", Term::var("x"))
}

/// `I (I (… (I t)))` with `m` copies of `I`; leftmost reduction reaches `t`
/// in exactly `m` steps when `t` is in head position.
pub fn ichain(m: usize, t: Term) -> Term {
    (0..m).fold(t, |acc, _| Term::app(identity(), acc))
}

/// `neg = λb. b ⌜False⌝ ⌜True⌝`.
pub fn neg() -> Term {
    Term::lam("b", Term::apps(Term::var("b"), [fls(), tru()]))
}

/// `and = λa b. a b ⌜False⌝`.
pub fn and() -> Term {
    Term::lams(&["a", "b"], Term::apps(Term::var("a"), [Term::var("b"), fls()]))
}

/// `or = λa b. a ⌜True⌝ b`.
pub fn or() -> Term {
    Term::lams(&["a", "b"], Term::apps(Term::var("a"), [tru(), Term::var("b")]))
}

/// `implies = λa b. a b ⌜True⌝`.
pub fn implies() -> Term {
    Term::lams(&["a", "b"], Term::apps(Term::var("a"), [Term::var("b"), tru()]))
}

/// `iff = λa b. a b (b ⌜False⌝ ⌜True⌝)`.
pub fn iff() -> Term {
    let nb = Term::apps(Term::var("b"), [fls(), tru()]);
    Term::lams(&["a", "b"], Term::apps(Term::var("a"), [Term::var("b"), nb]))
}

/// `⟨u₁,…,uₖ⟩ = λz. z u₁ … uₖ`. Capture-free for any components.
pub fn tuple(us: Vec<Term>) -> Term {
    let body = Term::apps(Term::bound(0), us.into_iter().map(|u| u.lift(1)));
    Term::abs_raw(name("z"), body)
}

/// `πᵏᵢ = λx₁…xₖ. xᵢ` (1-based `i`).
pub fn projection(k: usize, i: usize) -> Term {
    assert!(1 <= i && i <= k, "projection index out of range");
    let mut t = Term::bound((k - i) as u32);
    for j in (1..=k).rev() {
        t = Term::abs_raw(name(&format!("x{j}")), t);
    }
    t
}

/// `If M Then N = λz. z M N`.
pub fn if_then_else(m: Term, n: Term) -> Term {
    tuple(vec![m, n])
}

/// Naturals in the pair variant: `⌜0⌝ = λz. z ⌜True⌝ ⌜False⌝`,
/// `⌜n+1⌝ = ⟨⌜False⌝, ⌜n⌝⟩`.
pub fn nat_variant(n: u64) -> Term {
    let mut t = tuple(vec![tru(), fls()]);
    for _ in 0..n {
        t = tuple(vec![fls(), t]);
    }
    t
}

pub fn decode_nat_variant(t: &Term) -> Option<u64> {
    let mut n = 0;
    let mut t = t.clone();
    loop {
        let TermKind::Abs(_, body) = t.kind() else {
            return None;
        };
        let (head, args) = body.spine();
        if !matches!(head.kind(), TermKind::Bound(0)) || args.len() != 2 {
            return None;
        }
        match (args[0].as_value(), args[1].as_value()) {
            (Some(Value::Bool(true)), Some(Value::Bool(false))) => return Some(n),
            (Some(Value::Bool(false)), _) => {
                n += 1;
                let next = args[1].clone();
                t = next;
            }
            _ => return None,
        }
    }
}

/// `Zero = λx. x π²₁`.
pub fn zero_test() -> Term {
    Term::lam("x", Term::app(Term::var("x"), projection(2, 1)))
}

/// `Succ = λx. λz. z ⌜False⌝ x`.
pub fn succ() -> Term {
    Term::lam("x", tuple(vec![fls(), Term::var("x")]))
}

/// `Pred = λz. z ⌜False⌝`.
pub fn pred() -> Term {
    Term::lam("z", Term::app(Term::var("z"), fls()))
}

/// `Case_n = λy₁…yₙ z₁…zₙ. (z₁ A₁ (z₂ A₂ (… (zₙ Aₙ I)))) I` with
/// `Aᵢ = λw. w (w (… (w yᵢ)))`, `2(n−i)` copies of `w`.
///
/// Selecting branch `i` walks `2i` steps down the Boolean chain; `Aᵢ` then
/// takes the trailing `I` and unwinds `2(n−i)` identities, so every branch
/// costs `4n + 1` steps when all `Mᵢ` and `tᵢ` are normal. The term itself
/// is normal: the padding only becomes redexes once `I` is substituted.
pub fn case_n(n: usize) -> Term {
    assert!(n >= 1, "Case_n needs n >= 1");
    let ys: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let zs: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
    let mut body = identity();
    for i in (1..=n).rev() {
        let chain = (0..2 * (n - i)).fold(Term::var(&ys[i - 1]), |acc, _| Term::app(Term::var("w"), acc));
        body = Term::apps(Term::var(&zs[i - 1]), [Term::lam("w", chain), body]);
    }
    let binders: Vec<&str> = ys.iter().chain(zs.iter()).map(String::as_str).collect();
    Term::lams(&binders, Term::app(body, identity()))
}

/// The uniform leftmost cost of [`case_n`].
pub fn case_n_cost(n: usize) -> u64 {
    4 * n as u64 + 1
}

/// Exact leftmost cost of a decorated reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostCertificate {
    pub combinator: String,
    pub params: Vec<(String, u64)>,
    pub beta_count: u64,
    pub f_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("`{0}` did not reach a normal form within the budget")]
    NoNormalForm(String),
    #[error("`{0}` reached `{1}`, expected `{2}`")]
    WrongResult(String, Term, Term),
}

pub const CERTIFY_BUDGET: u64 = 100_000;

impl CostCertificate {
    /// Reduces `t` to normal form, checks it equals `expect`, and records
    /// the counts.
    pub fn measure(
        combinator: &str,
        params: &[(&str, u64)],
        t: &Term,
        expect: &Term,
        sig: Option<&FSignature>,
    ) -> Result<CostCertificate, CertifyError> {
        let r = reduce_counting(t, sig, CERTIFY_BUDGET);
        if r.outcome != Outcome::Normal {
            return Err(CertifyError::NoNormalForm(combinator.to_string()));
        }
        if r.term != *expect {
            return Err(CertifyError::WrongResult(combinator.to_string(), r.term, expect.clone()));
        }
        Ok(CostCertificate {
            combinator: combinator.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            beta_count: r.trace.beta_count,
            f_count: r.trace.f_count,
        })
    }

    pub fn total(&self) -> u64 {
        self.beta_count + self.f_count
    }
}

impl fmt::Display for CostCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({}): beta={} F={}", self.combinator, ps.join(","), self.beta_count, self.f_count)
    }
}

/// Cost of `⟨x₁,…,xₖ⟩ πᵏᵢ` over fresh variables.
pub fn projection_cost(k: usize, i: usize) -> CostCertificate {
    let xs: Vec<Term> = (1..=k).map(|j| Term::var(&format!("u{j}"))).collect();
    let t = Term::app(tuple(xs.clone()), projection(k, i));
    CostCertificate::measure("projection", &[("k", k as u64), ("i", i as u64)], &t, &xs[i - 1], None)
        .expect("projections always normalize")
}

/// Cost of `Case_n M₁…Mₙ t₁…tₙ` where `tᵢ` is the only `⌜True⌝`.
pub fn case_cost(n: usize, i: usize) -> CostCertificate {
    let ms: Vec<Term> = (1..=n).map(|j| Term::var(&format!("m{j}"))).collect();
    let ts = (1..=n).map(|j| boolean(j == i));
    let t = Term::apps(case_n(n), ms.iter().cloned().chain(ts));
    CostCertificate::measure("case", &[("n", n as u64), ("i", i as u64)], &t, &ms[i - 1], None)
        .expect("case analysis always normalizes")
}

/// One constructor of an inductive family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorDef {
    pub name: Name,
    pub args: Vec<Name>,
    pub result: Name,
}

/// A (possibly mutually) inductive family of free datatypes. Argument sorts
/// outside the family may be `Bool` or `Nat`; naturals use the pair variant.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatatypeDef {
    pub ctors: Vec<CtorDef>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("value `{0}` is not in datatype `{1}`")]
    NotInDatatype(Value, Name),
    #[error("unknown sort `{0}`")]
    UnknownSort(Name),
    #[error("duplicate constructor `{0}`")]
    DuplicateCtor(Name),
}

impl DatatypeDef {
    pub fn new(ctors: Vec<CtorDef>) -> Result<DatatypeDef, EncodeError> {
        let mut seen = BTreeMap::new();
        for c in &ctors {
            if seen.insert(c.name.clone(), ()).is_some() {
                return Err(EncodeError::DuplicateCtor(c.name.clone()));
            }
        }
        Ok(DatatypeDef { ctors })
    }

    /// Constructors with the given result sort, in declaration order.
    pub fn ctors_of(&self, sort: &str) -> Vec<&CtorDef> {
        self.ctors.iter().filter(|c| &*c.result == sort).collect()
    }

    pub fn sorts(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        for c in &self.ctors {
            if !out.contains(&c.result) {
                out.push(c.result.clone());
            }
        }
        out
    }

    /// Whether `v` is a constructor tree of `sort`.
    pub fn contains(&self, sort: &str, v: &Value) -> bool {
        let (c, args): (&str, &[Value]) = match v {
            Value::Atom(c) => (c, &[]),
            Value::Ctor(c, args) => (c, args),
            Value::Bool(_) if sort == "Bool" => return true,
            Value::Nat(_) if sort == "Nat" => return true,
            _ => return false,
        };
        self.ctors_of(sort).iter().any(|k| {
            &*k.name == c && k.args.len() == args.len() && k.args.iter().zip(args).all(|(s, a)| self.contains(s, a))
        })
    }

    /// All values of `sort` when every constructor is nullary.
    pub fn finite_carrier(&self, sort: &str) -> Option<Vec<Value>> {
        let ctors = self.ctors_of(sort);
        if ctors.is_empty() || ctors.iter().any(|c| !c.args.is_empty()) {
            return None;
        }
        Some(ctors.iter().map(|c| Value::Atom(c.name.clone())).collect())
    }

    /// Some value of `sort`: the first constructor whose arguments can be
    /// filled, recursively.
    pub fn default_value(&self, sort: &str) -> Option<Value> {
        self.default_bounded(sort, 8)
    }

    fn default_bounded(&self, sort: &str, fuel: usize) -> Option<Value> {
        match sort {
            "Bool" if self.ctors_of("Bool").is_empty() => return Some(Value::Bool(false)),
            "Nat" if self.ctors_of("Nat").is_empty() => return Some(Value::Nat(0)),
            _ => {}
        }
        let fuel = fuel.checked_sub(1)?;
        self.ctors_of(sort).iter().find_map(|c| {
            if c.args.is_empty() {
                return Some(Value::Atom(c.name.clone()));
            }
            let args = c.args.iter().map(|s| self.default_bounded(s, fuel)).collect::<Option<Vec<_>>>()?;
            Some(Value::Ctor(c.name.clone(), args))
        })
    }

    /// The Scott code `λα₁…αₚ. αᵢ ⌜v₁⌝…⌜vₖ⌝` of `ψᵢ(v₁,…,vₖ)`.
    pub fn encode(&self, sort: &str, v: &Value) -> Result<Term, EncodeError> {
        match sort {
            "Bool" if self.ctors_of("Bool").is_empty() => {
                return v
                    .as_bool()
                    .map(boolean)
                    .ok_or_else(|| EncodeError::NotInDatatype(v.clone(), name(sort)))
            }
            "Nat" if self.ctors_of("Nat").is_empty() => {
                return v
                    .as_nat()
                    .map(nat_variant)
                    .ok_or_else(|| EncodeError::NotInDatatype(v.clone(), name(sort)))
            }
            _ => {}
        }
        let ctors = self.ctors_of(sort);
        if ctors.is_empty() {
            return Err(EncodeError::UnknownSort(name(sort)));
        }
        let (cname, args): (&str, &[Value]) = match v {
            Value::Ctor(c, args) => (c, args),
            Value::Atom(c) => (c, &[]),
            _ => return Err(EncodeError::NotInDatatype(v.clone(), name(sort))),
        };
        let Some(i) = ctors.iter().position(|c| &*c.name == cname) else {
            return Err(EncodeError::NotInDatatype(v.clone(), name(sort)));
        };
        let ctor = ctors[i];
        if ctor.args.len() != args.len() {
            return Err(EncodeError::NotInDatatype(v.clone(), name(sort)));
        }
        let codes = ctor
            .args
            .iter()
            .zip(args)
            .map(|(s, a)| self.encode(s, a))
            .collect::<Result<Vec<_>, _>>()?;
        let p = ctors.len();
        let mut t = Term::apps(Term::bound((p - 1 - i) as u32), codes);
        for j in (1..=p).rev() {
            t = Term::abs_raw(name(&format!("a{j}")), t);
        }
        Ok(t)
    }

    /// Inverse of [`DatatypeDef::encode`] on normal codes.
    pub fn decode(&self, sort: &str, t: &Term) -> Option<Value> {
        match sort {
            "Bool" if self.ctors_of("Bool").is_empty() => return t.as_value().filter(|v| v.as_bool().is_some()),
            "Nat" if self.ctors_of("Nat").is_empty() => return decode_nat_variant(t).map(Value::Nat),
            _ => {}
        }
        let ctors = self.ctors_of(sort);
        let p = ctors.len();
        let mut body = t;
        for _ in 0..p {
            match body.kind() {
                TermKind::Abs(_, b) => body = b,
                _ => return None,
            }
        }
        let (head, args) = body.spine();
        let TermKind::Bound(j) = head.kind() else {
            return None;
        };
        let i = p.checked_sub(1 + *j as usize)?;
        let ctor = ctors[i];
        if ctor.args.len() != args.len() {
            return None;
        }
        let vals = ctor
            .args
            .iter()
            .zip(args)
            .map(|(s, a)| if a.is_closed() { self.decode(s, a) } else { None })
            .collect::<Option<Vec<_>>>()?;
        if vals.is_empty() {
            Some(Value::Atom(ctor.name.clone()))
        } else {
            Some(Value::Ctor(ctor.name.clone(), vals))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduce::reduce_leftmost;

    fn nf(t: Term) -> Term {
        let r = reduce_leftmost(&t, 10_000);
        assert_eq!(r.outcome, Outcome::Normal);
        r.term
    }

    #[test]
    fn catalog_terms_are_closed_and_normal() {
        for t in [tru(), fls(), neg(), and(), or(), implies(), iff(), projection(3, 2), zero_test(), succ(), pred(), case_n(4), nat_variant(3)] {
            assert!(t.is_closed(), "{t}");
            assert!(!t.has_beta_redex(), "{t}");
        }
    }

    #[test]
    fn boolean_tables() {
        for a in [true, false] {
            assert_eq!(nf(Term::app(neg(), boolean(a))), boolean(!a));
            for b in [true, false] {
                let ab = [boolean(a), boolean(b)];
                assert_eq!(nf(Term::apps(and(), ab.clone())), boolean(a && b));
                assert_eq!(nf(Term::apps(or(), ab.clone())), boolean(a || b));
                assert_eq!(nf(Term::apps(implies(), ab.clone())), boolean(!a || b));
                assert_eq!(nf(Term::apps(iff(), ab)), boolean(a == b));
            }
        }
    }

    #[test]
    fn projection_costs_are_one_plus_k() {
        assert_eq!(projection_cost(1, 1).beta_count, 2);
        assert_eq!(projection_cost(3, 2).beta_count, 4);
        for i in 1..=3 {
            assert_eq!(projection_cost(3, i).beta_count, 4);
        }
    }

    #[test]
    fn case_examples() {
        let m = Term::var("m");
        assert_eq!(nf(Term::apps(case_n(1), [m.clone(), tru()])), m);
        let (m1, m2) = (Term::var("m1"), Term::var("m2"));
        assert_eq!(nf(Term::apps(case_n(2), [m1.clone(), m2.clone(), fls(), tru()])), m2);
        assert_eq!(nf(Term::apps(case_n(2), [m1.clone(), m2, tru(), fls()])), m1);
        assert_eq!(case_cost(2, 1).beta_count, case_n_cost(2));
        assert_eq!(case_cost(2, 1).beta_count, case_cost(2, 2).beta_count);
    }

    #[test]
    fn naturals_variant() {
        assert_eq!(nat_variant(2), Term::parse("\\z. z [False] (\\z. z [False] (\\z. z [True] [False]))").unwrap());
        for n in 0..5 {
            assert_eq!(nf(Term::app(zero_test(), nat_variant(n))), boolean(n == 0));
            assert_eq!(nf(Term::app(succ(), nat_variant(n))), nat_variant(n + 1));
            assert_eq!(nf(Term::app(pred(), nat_variant(n + 1))), nat_variant(n));
            assert_eq!(decode_nat_variant(&nat_variant(n)), Some(n));
        }
    }

    #[test]
    fn scott_codes() {
        let three = DatatypeDef::new(vec![
            CtorDef { name: name("p1"), args: vec![], result: name("T") },
            CtorDef { name: name("p2"), args: vec![], result: name("T") },
            CtorDef { name: name("p3"), args: vec![], result: name("T") },
        ])
        .unwrap();
        let t = three.encode("T", &Value::Atom(name("p2"))).unwrap();
        assert_eq!(t, Term::parse("\\a b c. b").unwrap());
        let b = DatatypeDef::new(vec![
            CtorDef { name: name("T"), args: vec![], result: name("B") },
            CtorDef { name: name("F"), args: vec![], result: name("B") },
        ])
        .unwrap();
        assert_eq!(b.encode("B", &Value::Atom(name("T"))).unwrap(), tru());
        let tree = DatatypeDef::new(vec![
            CtorDef { name: name("Leaf"), args: vec![], result: name("Tree") },
            CtorDef { name: name("Node"), args: vec![name("Tree"), name("Tree")], result: name("Tree") },
        ])
        .unwrap();
        let v = Value::parse("Node(Leaf, Node(Leaf, Leaf))").unwrap();
        let code = tree.encode("Tree", &v).unwrap();
        assert!(code.is_closed() && !code.has_beta_redex());
        assert_eq!(tree.decode("Tree", &code), Some(v));
        assert!(tree.encode("Tree", &Value::Nat(3)).is_err());
    }
}
