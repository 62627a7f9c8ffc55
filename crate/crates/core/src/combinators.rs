//! Fixed points, padding, and constant-cost (conditional) update terms.

use thiserror::Error;

use crate::encodings::{case_n, identity};
use crate::fsig::FSignature;
use crate::good::GoodTerm;
use crate::reduce::{step, StepKind, StepResult, Trace};
use crate::term::{Term, TermKind};
use crate::value::Value;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("padding needs K >= {min} (got K = {k}, L = {l})")]
    PadTooShort { k: u64, l: u64, min: u64 },
    #[error("requested K = {k} is below the minimum {min}")]
    KBelowMin { k: u64, min: u64 },
    #[error("requested L = {l} is below the minimum {min}")]
    LBelowMin { l: u64, min: u64 },
    #[error("no probe valuation given")]
    NoProbe,
    #[error("one step did not reach a boundary within {0} reductions")]
    NoBoundary(u64),
    #[error("reduction hit an undefined function `{0}`")]
    Undefined(String),
    #[error("per-step cost differs between probes: {0:?} vs {1:?}")]
    CostMismatch((u64, u64), (u64, u64)),
    #[error("shape error: {0}")]
    Shape(String),
}

/// `θ_f = (λx. f (x x)) (λx. f (x x))`; one leftmost step gives `f θ_f`.
pub fn curry_fixpoint(f: &Term) -> Term {
    let half = Term::abs_raw(
        crate::value::name("x"),
        Term::app(f.lift(1), Term::app(Term::bound(0), Term::bound(0))),
    );
    Term::app(half.clone(), half)
}

/// `I I … I then` with `m` copies of `I`, left-nested: `m` β-steps
/// expose `then`.
fn i_power(m: u64, then: Term) -> Term {
    if m == 0 {
        return then;
    }
    Term::apps(identity(), (1..m).map(|_| identity()).chain(std::iter::once(then)))
}

/// `I^K` on its own (`K ≥ 1`).
fn i_standalone(k: u64) -> Term {
    i_power(k - 1, identity())
}

/// Padding parameters: the unary function `ω` and its argument `ν₁`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadSpec {
    pub k: u64,
    pub l: u64,
    pub omega: String,
    pub nu: Value,
}

impl PadSpec {
    /// `ω = not`, `ν₁ = True`, always present in the signature.
    pub fn new(k: u64, l: u64) -> PadSpec {
        PadSpec {
            k,
            l,
            omega: "not".into(),
            nu: Value::Bool(true),
        }
    }

    fn omega_chain(&self, inner: Term) -> Term {
        (0..self.l).fold(inner, |acc, _| Term::app(Term::constant(&self.omega), acc))
    }
}

/// `λx y. y`.
fn drop_first() -> Term {
    Term::abs_raw(crate::value::name("x"), Term::abs_raw(crate::value::name("y"), Term::bound(0)))
}

/// `pad_{K,0} = I^K`; for `L ≥ 1`, `I^{K−2} (λxy.y) (ω (… (ω ν₁)))`. The
/// leftmost reduction of `pad θ t̄` is `L` F-steps, then `K` β-steps.
pub fn pad(spec: &PadSpec) -> Result<Term, CombError> {
    if spec.l == 0 {
        return match spec.k {
            0 => Err(CombError::PadTooShort { k: 0, l: 0, min: 1 }),
            k => Ok(i_standalone(k)),
        };
    }
    if spec.k < 2 {
        return Err(CombError::PadTooShort {
            k: spec.k,
            l: spec.l,
            min: 2,
        });
    }
    let payload = spec.omega_chain(Term::code(spec.nu.clone()));
    Ok(Term::app(i_power(spec.k - 2, drop_first()), payload))
}

/// A padding term with no F-redex of its own:
/// `I^{K−3} ((λz. (λxy.y) (ω (… (ω z)))) ν₁)`. Leftmost reduction of
/// `pad θ t̄` takes `K−2` β-steps, then the `L` F-steps, then 2 β-steps.
pub fn pad_redex_free(spec: &PadSpec) -> Result<Term, CombError> {
    if spec.l == 0 {
        return match spec.k {
            0 => Err(CombError::PadTooShort { k: 0, l: 0, min: 1 }),
            k => Ok(i_standalone(k)),
        };
    }
    if spec.k < 3 {
        return Err(CombError::PadTooShort {
            k: spec.k,
            l: spec.l,
            min: 3,
        });
    }
    let body = Term::app(drop_first(), spec.omega_chain(Term::var("z")));
    let delayed = Term::app(Term::lam("z", body), Term::code(spec.nu.clone()));
    Ok(i_power(spec.k - 3, delayed))
}

/// `pad t` — with `K = L = 0` this is `t` itself.
pub fn apply_pad(spec: &PadSpec, redex_free: bool, t: Term) -> Result<Term, CombError> {
    if spec.k == 0 && spec.l == 0 {
        return Ok(t);
    }
    let p = if redex_free { pad_redex_free(spec)? } else { pad(spec)? };
    Ok(Term::app(p, t))
}

/// Peels exactly `k` trailing arguments off an application spine.
pub fn split_theta_app(t: &Term, k: usize) -> Option<(&Term, Vec<&Term>)> {
    let mut args = Vec::with_capacity(k);
    let mut cur = t;
    for _ in 0..k {
        match cur.kind() {
            TermKind::App(f, a) => {
                args.push(a);
                cur = f;
            }
            _ => return None,
        }
    }
    args.reverse();
    Some((cur, args))
}

/// `θ ⌜a₁⌝ … ⌜aₖ⌝` for a specific θ.
pub fn theta_app(theta: &Term, vals: &[Value]) -> Term {
    Term::apps(theta.clone(), vals.iter().cloned().map(Term::code))
}

/// Where one round of reduction ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// `θ ⌜ā'⌝` again.
    Theta(Vec<Value>),
    /// A normal form (an exit code).
    Normal(Term),
}

/// Reduces `t` until it is again `θ` applied to `k` codes (after at least
/// one step) or normal.
pub fn run_round(
    t: &Term,
    theta: &Term,
    k: usize,
    sig: &FSignature,
    max: u64,
) -> Result<(Term, Boundary, Trace), CombError> {
    let mut term = t.clone();
    let mut trace = Trace::new();
    loop {
        if trace.total() >= max {
            return Err(CombError::NoBoundary(max));
        }
        match step(&term, Some(sig)) {
            StepResult::Reduced { term: next, kind, .. } => {
                match kind {
                    StepKind::Beta => trace.beta_count += 1,
                    StepKind::F => trace.f_count += 1,
                }
                term = next;
            }
            StepResult::Normal => {
                let b = Boundary::Normal(term.clone());
                return Ok((term, b, trace));
            }
            StepResult::Undefined { function, .. } => return Err(CombError::Undefined(function.to_string())),
        }
        if let Some(vals) = theta_values(&term, theta, k) {
            return Ok((term, Boundary::Theta(vals), trace));
        }
    }
}

/// The slot values if `t` is `θ ⌜v₁⌝ … ⌜vₖ⌝`.
pub fn theta_values(t: &Term, theta: &Term, k: usize) -> Option<Vec<Value>> {
    let (head, args) = split_theta_app(t, k)?;
    if !(head.ptr_eq(theta) || head == theta) {
        return None;
    }
    args.iter().map(|a| a.as_value()).collect()
}

/// A θ with its per-step costs.
#[derive(Clone, Debug)]
pub struct CompiledCombinator {
    pub theta: Term,
    /// Number of slots.
    pub k: usize,
    /// β-steps per round.
    pub k_steps: u64,
    /// F-steps per round.
    pub l_steps: u64,
    /// Measured minima: the costs of the unpadded construction, plus the
    /// three β-steps a redex-free pad needs.
    pub k_min: u64,
    pub l_min: u64,
    /// Cost of one round without padding, per probe.
    pub unpadded: (u64, u64),
    pub branches: usize,
}

/// Shape of the body `G = λα x₁…xₖ. …`.
#[derive(Clone, Debug)]
pub enum Body {
    /// `α φ₁ … φₖ`.
    Update(Vec<GoodTerm>),
    /// `Case_{p+q} M₁…M_{p+q} ρ₁…ρ_{p+q}` with `Mᵢ = α φ_{i,1}…φ_{i,k}`
    /// for `i ≤ p` and `M_{p+ℓ} = γ_ℓ`.
    Conditional {
        rho: Vec<GoodTerm>,
        phi: Vec<Vec<GoodTerm>>,
        gamma: Vec<GoodTerm>,
    },
}

fn var_term(j: usize) -> Term {
    Term::var(&format!("x{}", j + 1))
}

fn body_term(body: &Body, k: usize, sig: &FSignature) -> Result<Term, CombError> {
    let g = |t: &GoodTerm| t.fold_ground(sig).to_term_with(&var_term);
    let alpha_row = |row: &[GoodTerm]| -> Result<Term, CombError> {
        if row.len() != k {
            return Err(CombError::Shape(format!("update row has {} entries, expected {k}", row.len())));
        }
        Ok(Term::apps(Term::var("alpha"), row.iter().map(g)))
    };
    let inner = match body {
        Body::Update(phis) => alpha_row(phis)?,
        Body::Conditional { rho, phi, gamma } => {
            let n = phi.len() + gamma.len();
            if rho.len() != n || n == 0 {
                return Err(CombError::Shape(format!("{} guards for {n} branches", rho.len())));
            }
            let mut ms = Vec::with_capacity(n);
            for row in phi {
                ms.push(alpha_row(row)?);
            }
            ms.extend(gamma.iter().map(g));
            Term::apps(Term::apps(case_n(n), ms), rho.iter().map(g))
        }
    };
    let mut binders = vec!["alpha".to_string()];
    binders.extend((0..k).map(|j| format!("x{}", j + 1)));
    let names: Vec<&str> = binders.iter().map(String::as_str).collect();
    let t = Term::lams(&names, inner);
    if !t.is_closed() {
        return Err(CombError::Shape("a good term uses a variable beyond the slots".into()));
    }
    Ok(t)
}

fn assemble(g: &Term, spec: &PadSpec) -> Result<Term, CombError> {
    Ok(curry_fixpoint(&apply_pad(spec, true, g.clone())?))
}

/// Builds θ for `body`, measuring the unpadded round on every probe
/// valuation and padding up to `(K, L)` (defaults: the minima).
pub fn build_combinator(
    body: &Body,
    k: usize,
    sig: &FSignature,
    probes: &[Vec<Value>],
    k_req: Option<u64>,
    l_req: Option<u64>,
) -> Result<CompiledCombinator, CombError> {
    let g = body_term(body, k, sig)?;
    let theta0 = assemble(&g, &PadSpec::new(0, 0))?;
    let mut unpadded = None;
    let budget = 100 * (theta0.size() as u64 + 10);
    if probes.is_empty() {
        return Err(CombError::NoProbe);
    }
    for vals in probes {
        let (_, _, tr) = run_round(&theta_app(&theta0, vals), &theta0, k, sig, budget)?;
        let c = (tr.beta_count, tr.f_count);
        match unpadded {
            None => unpadded = Some(c),
            Some(u) if u != c => return Err(CombError::CostMismatch(u, c)),
            _ => {}
        }
    }
    let (b0, f0) = unpadded.unwrap();
    let (k_min, l_min) = (b0 + 3, f0);
    let k_steps = k_req.unwrap_or(k_min);
    let l_steps = l_req.unwrap_or(l_min);
    if k_steps < k_min {
        return Err(CombError::KBelowMin { k: k_steps, min: k_min });
    }
    if l_steps < l_min {
        return Err(CombError::LBelowMin { l: l_steps, min: l_min });
    }
    let theta = assemble(&g, &PadSpec::new(k_steps - b0, l_steps - f0))?;
    let branches = match body {
        Body::Update(_) => 1,
        Body::Conditional { rho, .. } => rho.len(),
    };
    Ok(CompiledCombinator {
        theta,
        k,
        k_steps,
        l_steps,
        k_min,
        l_min,
        unpadded: (b0, f0),
        branches,
    })
}

/// `θ ⌜ā⌝ ↠ θ ⌜φ₁(ā)⌝ … ⌜φₖ(ā)⌝` in exactly `(K, L)` steps.
pub fn build_update_combinator(
    phis: &[GoodTerm],
    sig: &FSignature,
    probes: &[Vec<Value>],
    k_req: Option<u64>,
    l_req: Option<u64>,
) -> Result<CompiledCombinator, CombError> {
    build_combinator(&Body::Update(phis.to_vec()), phis.len(), sig, probes, k_req, l_req)
}

/// The first true guard `s` selects row `s` (continue) or exit `s − p`.
pub fn build_conditional_combinator(
    rho: &[GoodTerm],
    phi: &[Vec<GoodTerm>],
    gamma: &[GoodTerm],
    k: usize,
    sig: &FSignature,
    probes: &[Vec<Value>],
    k_req: Option<u64>,
    l_req: Option<u64>,
) -> Result<CompiledCombinator, CombError> {
    let body = Body::Conditional {
        rho: rho.to_vec(),
        phi: phi.to_vec(),
        gamma: gamma.to_vec(),
    };
    build_combinator(&body, k, sig, probes, k_req, l_req)
}

impl CompiledCombinator {
    /// One round from `θ ⌜ā⌝`, with its trace counts.
    pub fn round(&self, vals: &[Value], sig: &FSignature) -> Result<(Boundary, Trace), CombError> {
        let budget = self.k_steps + self.l_steps + 1;
        let (_, b, tr) = run_round(&theta_app(&self.theta, vals), &self.theta, self.k, sig, budget)?;
        Ok((b, tr))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fsig::FFunction;
    use crate::reduce::{reduce_leftmost, reduce_leftmost_f};
    use crate::value::Sort;

    fn nat_sig() -> FSignature {
        let mut sig = FSignature::boolean();
        let n = Sort::nat_range("N", 0, 9);
        sig.insert(FFunction::new("inc", vec![n.clone()], n.clone(), |a| Some(Value::Nat(a[0].as_nat()? + 1))))
            .unwrap();
        sig.insert(FFunction::new("lt", vec![n.clone(), n.clone()], Sort::bool(), |a| {
            Some(Value::Bool(a[0].as_nat()? < a[1].as_nat()?))
        }))
        .unwrap();
        sig
    }

    #[test]
    fn curry_examples() {
        let f = Term::parse(r"\y. z").unwrap();
        let th = curry_fixpoint(&f);
        let r = reduce_leftmost(&th, 10);
        assert_eq!(r.term, Term::var("z"));
        assert_eq!(r.trace.beta_count, 2);

        let i = identity();
        let th = curry_fixpoint(&i);
        let r = reduce_leftmost(&th, 2);
        assert_eq!(r.trace.steps[0].after, Term::app(i.clone(), th.clone()));
        assert_eq!(r.trace.steps[1].after, th);
    }

    #[test]
    fn pad_orders() {
        let sig = FSignature::boolean();
        let theta = Term::var("theta");
        let t = Term::var("t");
        for k in 3..=6 {
            for l in 0..=3 {
                let spec = PadSpec::new(k, l);
                let p = pad(&spec).unwrap();
                let r = reduce_leftmost_f(&Term::apps(p, [theta.clone(), t.clone()]), &sig, 100);
                assert_eq!(r.term, Term::app(theta.clone(), t.clone()));
                assert_eq!((r.trace.beta_count, r.trace.f_count), (k, l));
                let kinds = r.trace.kinds();
                assert!(kinds[..l as usize].iter().all(|s| *s == StepKind::F));

                let q = pad_redex_free(&spec).unwrap();
                assert!(crate::reduce::f_redexes(&q, &sig).is_empty());
                let r = reduce_leftmost_f(&Term::apps(q, [theta.clone(), t.clone()]), &sig, 100);
                assert_eq!(r.term, Term::app(theta.clone(), t.clone()));
                assert_eq!((r.trace.beta_count, r.trace.f_count), (k, l));
            }
        }
        assert!(pad(&PadSpec::new(1, 1)).is_err());
        assert!(pad_redex_free(&PadSpec::new(2, 1)).is_err());
    }

    #[test]
    fn update_combinator_constant_cost() {
        let sig = nat_sig();
        let inc = vec![GoodTerm::node("inc", vec![GoodTerm::Var(0)])];
        let probes: Vec<Vec<Value>> = (0..3).map(|n| vec![Value::Nat(n)]).collect();
        let c = build_update_combinator(&inc, &sig, &probes, None, None).unwrap();
        for n in 0..3 {
            let (b, tr) = c.round(&[Value::Nat(n)], &sig).unwrap();
            assert_eq!(b, Boundary::Theta(vec![Value::Nat(n + 1)]));
            assert_eq!((tr.beta_count, tr.f_count), (c.k_steps, c.l_steps));
        }
        // Unpadded: one Curry step plus k + 1 for G; one F-step for `inc`.
        assert_eq!(c.unpadded, (3, 1));

        let swap = vec![GoodTerm::Var(1), GoodTerm::Var(0)];
        let probes = vec![vec![Value::Nat(1), Value::Nat(2)]];
        let c = build_update_combinator(&swap, &sig, &probes, Some(12), Some(2)).unwrap();
        let (b, tr) = c.round(&[Value::Nat(4), Value::Nat(7)], &sig).unwrap();
        assert_eq!(b, Boundary::Theta(vec![Value::Nat(7), Value::Nat(4)]));
        assert_eq!((tr.beta_count, tr.f_count), (12, 2));
        assert!(build_update_combinator(&swap, &sig, &probes, Some(3), None).is_err());
    }

    #[test]
    fn identity_updates_and_plain_exit() {
        let sig = nat_sig();
        let probes: Vec<Vec<Value>> = (0..3).map(|n| vec![Value::Nat(n), Value::Nat(2 * n)]).collect();
        let id = vec![GoodTerm::Var(0), GoodTerm::Var(1)];
        let c = build_update_combinator(&id, &sig, &probes, None, None).unwrap();
        for v in &probes {
            let (b, tr) = c.round(v, &sig).unwrap();
            assert_eq!(b, Boundary::Theta(v.clone()));
            assert_eq!((tr.beta_count, tr.f_count), (c.k_steps, c.l_steps));
        }
        let exit = vec![GoodTerm::node("inc", vec![GoodTerm::Var(1)])];
        let c = build_conditional_combinator(&[GoodTerm::Code(Value::Bool(true))], &[], &exit, 2, &sig, &probes, Some(20), Some(3))
            .unwrap();
        for v in &probes {
            let (b, tr) = c.round(v, &sig).unwrap();
            let want = Value::Nat(v[1].as_nat().unwrap() + 1);
            assert_eq!(b, Boundary::Normal(Term::code(want)));
            assert_eq!((tr.beta_count, tr.f_count), (20, 3));
        }
    }

    #[test]
    fn conditional_branches_cost_the_same() {
        let sig = nat_sig();
        // while x1 < 5: x1 := inc(x1); then exit with x1.
        let guard = GoodTerm::node("lt", vec![GoodTerm::Var(0), GoodTerm::Code(Value::Nat(5))]);
        let rho = vec![guard, GoodTerm::Code(Value::Bool(true))];
        let phi = vec![vec![GoodTerm::node("inc", vec![GoodTerm::Var(0)])]];
        let gamma = vec![GoodTerm::Var(0)];
        let probes: Vec<Vec<Value>> = [0, 5].iter().map(|n| vec![Value::Nat(*n)]).collect();
        let c = build_conditional_combinator(&rho, &phi, &gamma, 1, &sig, &probes, None, None).unwrap();
        let mut costs = std::collections::BTreeSet::new();
        for n in 0..=7 {
            let (b, tr) = c.round(&[Value::Nat(n)], &sig).unwrap();
            costs.insert((tr.beta_count, tr.f_count));
            if n < 5 {
                assert_eq!(b, Boundary::Theta(vec![Value::Nat(n + 1)]));
            } else {
                assert_eq!(b, Boundary::Normal(Term::code(Value::Nat(n))));
            }
        }
        assert_eq!(costs.len(), 1);
        // Curry 1, G 2, Case_2 9; F: lt and inc.
        assert_eq!(c.unpadded, (1 + 2 + crate::encodings::case_n_cost(2), 2));
    }
}
