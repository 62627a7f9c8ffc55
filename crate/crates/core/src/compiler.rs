//! Compiling a machine into a single fixed-point term whose every round of
//! leftmost F-first reduction simulates one machine step in exactly `K`
//! β-steps and `L` F-steps.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::asm::{AsmError, AsmTerm, Inputs, Machine, State, StaticDef, SymId, Update};
use crate::combinators::{build_conditional_combinator, theta_app, theta_values, CombError, CompiledCombinator};
use crate::fsig::{DeltaOp, Epsilon, FFunction, FSignature};
use crate::good::{static_semantics, GoodTerm};
use crate::normalize::{normalize_machine, static_is_total, Clause, GuardedProgram, Status};
use crate::term::Term;
use crate::value::{Name, Sort, Value};

/// Exit code of a failing step.
pub const EXIT_FAIL: u64 = 2;
/// Exit code of a clashing step.
pub const EXIT_CLASH: u64 = 3;
/// First component of the tuple returned by a halting step.
pub const EXIT_HALT: u64 = 1;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(transparent)]
    Asm(#[from] AsmError),
    #[error(transparent)]
    Comb(#[from] CombError),
    #[error("`{0}` has an argument sort without a finite carrier")]
    InfiniteArgs(Name),
    #[error("no static interpretation for `{0}`")]
    MissingStatic(Name),
    #[error("dynamic symbol `{0}` has arity {1}; the type-0 pathway needs constants")]
    NotType0(Name, usize),
    #[error("the program is empty")]
    EmptyProgram,
    #[error("not a boundary term: {0}")]
    Unrecognized(String),
}

/// What a slot of the state tuple holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    /// The value of a dynamic constant.
    Value,
    /// The modification list of a dynamic function.
    Delta,
    /// A read-only input.
    Input,
}

#[derive(Clone, Debug)]
pub struct Slot {
    pub name: Name,
    pub sym: SymId,
    pub kind: SlotKind,
    pub sort: Sort,
}

#[derive(Clone, Debug, Default)]
pub struct CompileOptions {
    /// Exact β-steps per round (at least the minimum).
    pub k: Option<u64>,
    /// Exact F-steps per round (at least the minimum).
    pub l: Option<u64>,
    /// Added to the minimum when `k` is unset.
    pub headroom_k: u64,
    /// Added to the minimum when `l` is unset.
    pub headroom_l: u64,
    /// Input assignments used to measure the per-round cost; defaults to a
    /// prefix of the input grid.
    pub probe_inputs: Vec<Inputs>,
}

/// Result of compiling a machine.
#[derive(Clone, Debug)]
pub struct CompiledMachine {
    pub machine: Machine,
    pub slots: Vec<Slot>,
    pub sig: FSignature,
    pub comb: CompiledCombinator,
    pub normal_form: GuardedProgram,
    /// Number of continuing branches.
    pub p: usize,
    /// Guards in combinator order: continuing rows, then fail, clash, halt.
    pub rho: Vec<GoodTerm>,
    /// Update rows of the continuing branches.
    pub phi: Vec<Vec<GoodTerm>>,
    /// Exit terms: fail, clash, halt.
    pub gamma: Vec<GoodTerm>,
    /// Slot valuations the round cost was measured on.
    pub probes: Vec<Vec<Value>>,
}

/// What a boundary term says about the simulated run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded {
    StillRunning(Vec<Value>),
    Success(Vec<Value>),
    Fail,
    Clash,
}

impl fmt::Display for Decoded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |vs: &[Value]| vs.iter().map(Value::to_string).collect::<Vec<_>>().join(", ");
        match self {
            Decoded::StillRunning(vs) => write!(f, "running [{}]", list(vs)),
            Decoded::Success(vs) => write!(f, "success [{}]", list(vs)),
            Decoded::Fail => f.write_str("fail"),
            Decoded::Clash => f.write_str("clash"),
        }
    }
}

fn tt() -> GoodTerm {
    GoodTerm::Code(Value::Bool(true))
}

fn ff() -> GoodTerm {
    GoodTerm::Code(Value::Bool(false))
}

fn and_all(ts: impl IntoIterator<Item = GoodTerm>) -> GoodTerm {
    let mut acc: Option<GoodTerm> = None;
    for t in ts {
        if t == tt() {
            continue;
        }
        if t == ff() {
            return ff();
        }
        acc = Some(match acc {
            None => t,
            Some(a) => GoodTerm::node("and", vec![a, t]),
        });
    }
    acc.unwrap_or_else(tt)
}

fn or_all(ts: impl IntoIterator<Item = GoodTerm>) -> GoodTerm {
    let mut acc: Option<GoodTerm> = None;
    for t in ts {
        if t == ff() {
            continue;
        }
        if t == tt() {
            return tt();
        }
        acc = Some(match acc {
            None => t,
            Some(a) => GoodTerm::node("or", vec![a, t]),
        });
    }
    acc.unwrap_or_else(ff)
}

fn not(t: GoodTerm) -> GoodTerm {
    match t {
        GoodTerm::Code(Value::Bool(b)) => GoodTerm::Code(Value::Bool(!b)),
        t => GoodTerm::node("not", vec![t]),
    }
}

fn subst(t: &AsmTerm, args: &[AsmTerm]) -> AsmTerm {
    match t {
        AsmTerm::Var(j) => args[*j].clone(),
        AsmTerm::Lit(v) => AsmTerm::Lit(v.clone()),
        AsmTerm::App(f, xs) => AsmTerm::App(*f, xs.iter().map(|x| subst(x, args)).collect()),
    }
}

struct Ctx<'a> {
    m: &'a Machine,
    slot_of: BTreeMap<SymId, usize>,
    sig: FSignature,
    total: BTreeMap<SymId, bool>,
}

impl<'a> Ctx<'a> {
    fn is_total(&mut self, f: SymId) -> bool {
        let m = self.m;
        *self.total.entry(f).or_insert_with(|| static_is_total(m, f))
    }

    fn eps(&self, f: SymId) -> Epsilon {
        let sym = self.m.vocab.symbol(f);
        Epsilon::new(sym.args.clone(), sym.result.clone())
    }

    fn ite(&mut self, s: &Sort) -> String {
        let n = format!("ite.{}", s.name());
        self.sig.ensure(FFunction::new(&n, vec![Sort::bool(), s.clone(), s.clone()], s.clone(), |a| {
            Some(if a[0].as_bool()? { a[1].clone() } else { a[2].clone() })
        }));
        n
    }

    fn eq(&mut self, s: &Sort) -> String {
        let n = format!("eq.{}", s.name());
        self.sig.ensure(FFunction::new(&n, vec![s.clone(), s.clone()], Sort::bool(), |a| {
            Some(Value::Bool(a[0] == a[1]))
        }));
        n
    }

    fn static_fn(&self, f: SymId) -> Result<FFunction, CompileError> {
        static_semantics(self.m, f, &Inputs::new()).ok_or_else(|| CompileError::MissingStatic(self.m.symbol_name(f).clone()))
    }

    /// Name of the total version of `f` (`f` itself when already total).
    fn value_fn(&mut self, f: SymId) -> Result<String, CompileError> {
        let base = self.static_fn(f)?;
        let sym = self.m.vocab.symbol(f).clone();
        if self.is_total(f) {
            self.sig.ensure(base);
            return Ok(sym.name.to_string());
        }
        let n = format!("{}!", sym.name);
        let default = sym.result.default_value();
        self.sig.ensure(FFunction::new(&n, sym.args.clone(), sym.result.clone(), move |a| {
            Some(base.apply(a).unwrap_or_else(|| default.clone()))
        }));
        Ok(n)
    }

    fn def_fn(&mut self, f: SymId) -> Result<String, CompileError> {
        let base = self.static_fn(f)?;
        let sym = self.m.vocab.symbol(f).clone();
        let n = format!("{}?", sym.name);
        self.sig.ensure(FFunction::new(&n, sym.args.clone(), Sort::bool(), move |a| {
            Some(Value::Bool(base.apply(a).is_some()))
        }));
        Ok(n)
    }

    fn delta_value_fn(&mut self, f: SymId) -> String {
        let eps = self.eps(f);
        self.sig.add_delta(&eps);
        let base = eps.function(DeltaOp::V);
        let n = format!("{}!", eps.op_name(DeltaOp::V));
        let default = eps.result.default_value();
        self.sig.ensure(FFunction::new(&n, base.args.clone(), eps.result.clone(), move |a| {
            Some(base.apply(a).unwrap_or_else(|| default.clone()))
        }));
        n
    }

    fn init_instance(&self, f: SymId, args: &[AsmTerm]) -> AsmTerm {
        let e = &self.m.init[&f];
        let picked: Vec<AsmTerm> = e.sigma.iter().map(|&i| args[i].clone()).collect();
        subst(&e.term, &picked)
    }

    /// The total value term `t!`.
    fn value(&mut self, t: &AsmTerm) -> Result<GoodTerm, CompileError> {
        Ok(match t {
            AsmTerm::Var(j) => GoodTerm::Var(*j),
            AsmTerm::Lit(v) => GoodTerm::Code(v.clone()),
            AsmTerm::App(f, xs) => {
                let sym = self.m.vocab.symbol(*f).clone();
                if let Some(&j) = self.slot_of.get(f) {
                    if sym.arity() == 0 {
                        return Ok(GoodTerm::Var(j));
                    }
                    let mut args = vec![GoodTerm::Var(j)];
                    for x in xs {
                        args.push(self.value(x)?);
                    }
                    let eps = self.eps(*f);
                    let b = GoodTerm::node(&eps.op_name(DeltaOp::B), args.clone());
                    let v = GoodTerm::node(&self.delta_value_fn(*f), args);
                    let init = self.value(&self.init_instance(*f, xs))?;
                    let ite = self.ite(&sym.result);
                    return Ok(GoodTerm::node(&ite, vec![b, v, init]));
                }
                let name = self.value_fn(*f)?;
                let args = xs.iter().map(|x| self.value(x)).collect::<Result<Vec<_>, _>>()?;
                GoodTerm::node(&name, args)
            }
        })
    }

    /// `Def(t)`: true exactly where `t` has a value.
    fn def(&mut self, t: &AsmTerm) -> Result<GoodTerm, CompileError> {
        Ok(match t {
            AsmTerm::Var(_) | AsmTerm::Lit(_) => tt(),
            AsmTerm::App(f, xs) => {
                let mut parts = Vec::new();
                for x in xs {
                    parts.push(self.def(x)?);
                }
                let sym = self.m.vocab.symbol(*f).clone();
                if let Some(&j) = self.slot_of.get(f) {
                    if sym.arity() > 0 {
                        let mut args = vec![GoodTerm::Var(j)];
                        for x in xs {
                            args.push(self.value(x)?);
                        }
                        let b = GoodTerm::node(&self.eps(*f).op_name(DeltaOp::B), args);
                        let init_def = self.def(&self.init_instance(*f, xs))?;
                        parts.push(or_all([b, init_def]));
                    }
                } else if !self.is_total(*f) {
                    let name = self.def_fn(*f)?;
                    let args = xs.iter().map(|x| self.value(x)).collect::<Result<Vec<_>, _>>()?;
                    parts.push(GoodTerm::node(&name, args));
                }
                and_all(parts)
            }
        })
    }

    fn guard(&mut self, c: &Clause) -> Result<GoodTerm, CompileError> {
        let mut parts = Vec::new();
        for l in &c.guard {
            let d = self.def(&l.cond)?;
            parts.push(match l.status {
                Status::True => and_all([d, self.value(&l.cond)?]),
                Status::False => and_all([d, not(self.value(&l.cond)?)]),
                Status::Undef => not(d),
            });
        }
        Ok(and_all(parts))
    }

    fn updates_defined(&mut self, c: &Clause) -> Result<GoodTerm, CompileError> {
        let mut parts = Vec::new();
        for u in c.updates() {
            for a in &u.args {
                parts.push(self.def(a)?);
            }
            parts.push(self.def(&u.rhs)?);
        }
        Ok(and_all(parts))
    }

    fn clashes(&mut self, c: &Clause) -> Result<GoodTerm, CompileError> {
        let us: Vec<&Update> = c.updates().collect();
        let mut parts = Vec::new();
        for (i, u) in us.iter().enumerate() {
            for w in &us[i + 1..] {
                if u.sym != w.sym || (u.args == w.args && u.rhs == w.rhs) {
                    continue;
                }
                let sym = self.m.vocab.symbol(u.sym).clone();
                let mut same = Vec::new();
                for ((a, b), s) in u.args.iter().zip(&w.args).zip(&sym.args) {
                    let eq = self.eq(s);
                    same.push(GoodTerm::node(&eq, vec![self.value(a)?, self.value(b)?]));
                }
                let eq = self.eq(&sym.result);
                same.push(not(GoodTerm::node(&eq, vec![self.value(&u.rhs)?, self.value(&w.rhs)?])));
                parts.push(and_all(same));
            }
        }
        Ok(or_all(parts))
    }

    /// The new slot values after the clause's updates.
    fn row(&mut self, c: &Clause, slots: &[Slot]) -> Result<Vec<GoodTerm>, CompileError> {
        let mut row: Vec<GoodTerm> = (0..slots.len()).map(GoodTerm::Var).collect();
        for u in c.updates() {
            let j = self.slot_of[&u.sym];
            let v = self.value(&u.rhs)?;
            if slots[j].kind == SlotKind::Value {
                row[j] = v;
                continue;
            }
            let eps = self.eps(u.sym);
            let args = u.args.iter().map(|a| self.value(a)).collect::<Result<Vec<_>, _>>()?;
            let old = self.value(&AsmTerm::App(u.sym, u.args.clone()))?;
            let mut del = vec![row[j].clone()];
            del.extend(args.iter().cloned());
            del.push(old);
            let mut add = vec![GoodTerm::node(&eps.op_name(DeltaOp::Del), del)];
            add.extend(args);
            add.push(v);
            row[j] = GoodTerm::node(&eps.op_name(DeltaOp::Add), add);
        }
        Ok(row)
    }
}

/// Reads a boundary snapshot: `θ` applied to slot codes, or an exit code.
pub fn decode_result(t: &Term, cm: &CompiledMachine) -> Result<Decoded, CompileError> {
    if let Some(vals) = theta_values(t, cm.theta(), cm.slots.len()) {
        return Ok(Decoded::StillRunning(vals));
    }
    let exit = crate::reduce::is_normal(t, Some(&cm.sig)).then(|| t.as_value()).flatten();
    match exit {
        Some(Value::Nat(EXIT_FAIL)) => Ok(Decoded::Fail),
        Some(Value::Nat(EXIT_CLASH)) => Ok(Decoded::Clash),
        Some(Value::Tuple(vs)) if vs.first() == Some(&Value::Nat(EXIT_HALT)) => Ok(Decoded::Success(vs[1..].to_vec())),
        _ => {
            let mut shown = t.to_string();
            if shown.len() > 120 {
                shown.truncate(117);
                shown.push_str("...");
            }
            Err(CompileError::Unrecognized(shown))
        }
    }
}

/// Rebuilds the machine state denoted by slot values.
pub fn state_from_slots(m: &Machine, slots: &[Slot], vals: &[Value]) -> Option<State> {
    let inputs: Inputs = slots
        .iter()
        .zip(vals)
        .filter(|(s, _)| s.kind == SlotKind::Input)
        .map(|(s, v)| (s.name.to_string(), v.clone()))
        .collect();
    let init = m.initial_state(&inputs).ok()?;
    let mut tables = init.tables().to_vec();
    for (s, v) in slots.iter().zip(vals) {
        let Some(i) = init.dynamics().iter().position(|d| *d == s.sym) else {
            continue;
        };
        match (s.kind, v) {
            (SlotKind::Value, v) => {
                tables[i].insert(Vec::new(), v.clone());
            }
            (SlotKind::Delta, Value::Seq(rows)) => {
                for r in rows {
                    let (a, x) = r.split_at(r.len() - 1);
                    tables[i].insert(a.to_vec(), x[0].clone());
                }
            }
            _ => return None,
        }
    }
    Some(init.with_tables(tables))
}

fn slots_of(m: &Machine) -> Result<Vec<Slot>, CompileError> {
    let mut slots = Vec::new();
    for f in m.dynamic_symbols() {
        let sym = m.vocab.symbol(f);
        let (kind, sort) = if sym.arity() == 0 {
            (SlotKind::Value, sym.result.clone())
        } else {
            if sym.args.iter().any(|s| s.carrier().is_none()) {
                return Err(CompileError::InfiniteArgs(sym.name.clone()));
            }
            (SlotKind::Delta, Epsilon::new(sym.args.clone(), sym.result.clone()).list_sort())
        };
        slots.push(Slot { name: sym.name.clone(), sym: f, kind, sort });
    }
    for f in m.input_symbols() {
        let sym = m.vocab.symbol(f);
        slots.push(Slot {
            name: sym.name.clone(),
            sym: f,
            kind: SlotKind::Input,
            sort: sym.result.clone(),
        });
    }
    Ok(slots)
}

/// The pathway for machines whose dynamic symbols are all constants.
pub fn compile_type0(m: &Machine, opts: &CompileOptions) -> Result<CompiledMachine, CompileError> {
    for f in m.dynamic_symbols() {
        let sym = m.vocab.symbol(f);
        if sym.arity() > 0 {
            return Err(CompileError::NotType0(sym.name.clone(), sym.arity()));
        }
    }
    compile(m, opts)
}

/// The general pathway; identical to [`compile_type0`] on type-0 machines.
pub fn compile_general(m: &Machine, opts: &CompileOptions) -> Result<CompiledMachine, CompileError> {
    compile(m, opts)
}

/// Compiles any machine whose dynamic functions range over finite argument
/// sorts. Slots are the dynamic symbols in declaration order (a value for
/// constants, a delta list for functions), then the inputs, read-only.
pub fn compile(m: &Machine, opts: &CompileOptions) -> Result<CompiledMachine, CompileError> {
    if m.program == crate::asm::Program::Skip {
        return Err(CompileError::EmptyProgram);
    }
    let slots = slots_of(m)?;
    let mut sig = FSignature::boolean();
    for f in m.vocab.static_symbols() {
        if matches!(m.statics.get(&f), Some(StaticDef::Auto)) {
            if let Some(func) = static_semantics(m, f, &Inputs::new()) {
                sig.ensure(func);
            }
        }
    }
    for s in &slots {
        if s.kind == SlotKind::Delta {
            let sym = m.vocab.symbol(s.sym);
            sig.add_delta(&Epsilon::new(sym.args.clone(), sym.result.clone()));
        }
    }
    let mut cx = Ctx {
        m,
        slot_of: slots.iter().enumerate().map(|(j, s)| (s.sym, j)).collect(),
        sig,
        total: BTreeMap::new(),
    };
    let nf = normalize_machine(m);

    let mut fail = Vec::new();
    let mut clash = Vec::new();
    let mut cont_guards = Vec::new();
    let mut rows = Vec::new();
    for c in &nf.clauses {
        let g = cx.guard(c)?;
        let bad = if c.has_fail() { tt() } else { not(cx.updates_defined(c)?) };
        fail.push(and_all([g.clone(), bad]));
        clash.push(and_all([g.clone(), cx.clashes(c)?]));
        if c.updates().next().is_some() && !c.has_halt() && !c.has_fail() {
            cont_guards.push(g);
            rows.push(cx.row(c, &slots)?);
        }
    }

    let halt_fn = {
        let (mach, sl) = (m.clone(), slots.clone());
        let sorts: Vec<Sort> = slots.iter().map(|s| s.sort.clone()).collect();
        FFunction::new("halt!", sorts, Sort::any(), move |vals| {
            let s = state_from_slots(&mach, &sl, vals)?;
            let mut out = vec![Value::Nat(EXIT_HALT)];
            out.extend(s.outputs());
            Some(Value::Tuple(out))
        })
    };
    cx.sig.ensure(halt_fn);

    let mut rho = vec![or_all(fail), or_all(clash), not(or_all(cont_guards.iter().cloned()))];
    rho.extend(cont_guards);
    let gamma = vec![
        GoodTerm::Code(Value::Nat(EXIT_FAIL)),
        GoodTerm::Code(Value::Nat(EXIT_CLASH)),
        GoodTerm::node("halt!", (0..slots.len()).map(GoodTerm::Var).collect()),
    ];
    let p = rows.len();
    let sig = cx.sig;
    let probes = probe_valuations(m, &slots, opts)?;
    let (comb, rho) = build_exits_first(&rho, &rows, &gamma, slots.len(), &sig, &probes, opts)?;
    Ok(CompiledMachine {
        machine: m.clone(),
        slots,
        sig,
        comb,
        normal_form: nf,
        p,
        rho,
        phi: rows,
        gamma,
        probes,
    })
}

/// `rho` lists the exit guards first. The combinator takes continuing rows
/// before exits, so each continuing guard is conjoined with the negated exit
/// guards to keep their priority.
fn build_exits_first(
    rho: &[GoodTerm],
    phi: &[Vec<GoodTerm>],
    gamma: &[GoodTerm],
    k: usize,
    sig: &FSignature,
    probes: &[Vec<Value>],
    opts: &CompileOptions,
) -> Result<(CompiledCombinator, Vec<GoodTerm>), CompileError> {
    let exits = gamma.len();
    let no_exit = and_all(rho[..exits].iter().cloned().map(not));
    let mut guards: Vec<GoodTerm> = rho[exits..].iter().map(|g| and_all([no_exit.clone(), g.clone()])).collect();
    guards.extend(rho[..exits].iter().cloned());
    let measure = build_conditional_combinator(&guards, phi, gamma, k, sig, probes, None, None)?;
    let k_req = opts.k.unwrap_or(measure.k_min + opts.headroom_k);
    let l_req = opts.l.unwrap_or(measure.l_min + opts.headroom_l);
    let comb = build_conditional_combinator(&guards, phi, gamma, k, sig, probes, Some(k_req), Some(l_req))?;
    Ok((comb, guards))
}

fn probe_valuations(m: &Machine, slots: &[Slot], opts: &CompileOptions) -> Result<Vec<Vec<Value>>, CompileError> {
    let inputs = if opts.probe_inputs.is_empty() {
        match m.input_grid() {
            Ok(g) => g.into_iter().take(4).collect(),
            Err(_) => vec![Inputs::new()],
        }
    } else {
        opts.probe_inputs.clone()
    };
    let mut out = BTreeSet::new();
    for i in &inputs {
        let r = m.run(i, 3)?;
        for s in &r.trajectory {
            out.insert(encode_state(slots, s, i));
        }
    }
    Ok(out.into_iter().collect())
}

/// Slot values for a state reached with the given inputs.
pub fn encode_state(slots: &[Slot], s: &State, inputs: &Inputs) -> Vec<Value> {
    slots
        .iter()
        .map(|sl| match sl.kind {
            SlotKind::Value => s.apply(sl.sym, &[]).unwrap_or_else(|| sl.sort.default_value()),
            SlotKind::Delta => {
                let i = s.dynamics().iter().position(|d| *d == sl.sym).unwrap();
                crate::asm::table_to_seq(&s.tables()[i])
            }
            SlotKind::Input => inputs.get(&*sl.name).cloned().unwrap_or_else(|| sl.sort.default_value()),
        })
        .collect()
}

impl CompiledMachine {
    pub fn theta(&self) -> &Term {
        &self.comb.theta
    }

    /// β-steps per round.
    pub fn k(&self) -> u64 {
        self.comb.k_steps
    }

    /// F-steps per round.
    pub fn l(&self) -> u64 {
        self.comb.l_steps
    }

    /// Slot values of the initial state.
    pub fn initial_values(&self, inputs: &Inputs) -> Result<Vec<Value>, CompileError> {
        let s = self.machine.initial_state(inputs)?;
        Ok(self
            .slots
            .iter()
            .zip(encode_state(&self.slots, &s, inputs))
            .map(|(sl, v)| match sl.kind {
                SlotKind::Delta => Value::Seq(Vec::new()),
                _ => v,
            })
            .collect())
    }

    /// `θ ⌜c̄₀⌝`.
    pub fn initial_term(&self, inputs: &Inputs) -> Result<Term, CompileError> {
        Ok(theta_app(self.theta(), &self.initial_values(inputs)?))
    }

    pub fn decode(&self, t: &Term) -> Result<Decoded, CompileError> {
        decode_result(t, self)
    }

    /// The machine state behind slot values.
    pub fn state_of(&self, vals: &[Value]) -> Option<State> {
        state_from_slots(&self.machine, &self.slots, vals)
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            slots: self
                .slots
                .iter()
                .map(|s| {
                    let kind = match s.kind {
                        SlotKind::Value => "value",
                        SlotKind::Delta => "delta",
                        SlotKind::Input => "input",
                    };
                    (s.name.to_string(), kind.to_string(), s.sort.name().to_string())
                })
                .collect(),
            clauses: self.normal_form.clauses.len(),
            branches: self.comb.branches,
            continuing: self.p,
            k: self.k(),
            l: self.l(),
            k_min: self.comb.k_min,
            l_min: self.comb.l_min,
            theta_size: self.theta().size(),
            functions: self.sig.len(),
        }
    }
}

/// Summary of a compilation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    /// `(name, kind, sort)`.
    pub slots: Vec<(String, String, String)>,
    pub clauses: usize,
    pub branches: usize,
    pub continuing: usize,
    pub k: u64,
    pub l: u64,
    pub k_min: u64,
    pub l_min: u64,
    pub theta_size: usize,
    pub functions: usize,
}

impl fmt::Display for Manifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "slots:")?;
        for (i, (n, k, s)) in self.slots.iter().enumerate() {
            writeln!(f, "  x{} = {n} ({k}, {s})", i + 1)?;
        }
        writeln!(f, "clauses: {}", self.clauses)?;
        writeln!(f, "branches: {} ({} continuing)", self.branches, self.continuing)?;
        writeln!(f, "K = {} (min {})", self.k, self.k_min)?;
        writeln!(f, "L = {} (min {})", self.l, self.l_min)?;
        writeln!(f, "K+L = {}", self.k + self.l)?;
        writeln!(f, "exits: halt -> [({EXIT_HALT}, outputs..)], fail -> [{EXIT_FAIL}], clash -> [{EXIT_CLASH}]")?;
        writeln!(f, "theta size: {}", self.theta_size)?;
        write!(f, "F-functions: {}", self.functions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosim::lockstep;
    use crate::source::parse_machine;

    fn load(src: &str) -> Machine {
        parse_machine(src).unwrap_or_else(|d| panic!("{d}"))
    }

    fn nat_inputs(pairs: &[(&str, u64)]) -> Inputs {
        pairs.iter().map(|(k, v)| (k.to_string(), Value::Nat(*v))).collect()
    }

    #[test]
    fn euclid_lockstep() {
        let m = load(include_str!("../machines/euclid.asm"));
        let cm = compile(&m, &CompileOptions::default()).unwrap();
        let inputs = nat_inputs(&[("a0", 12), ("b0", 8)]);
        let rep = lockstep(&cm, &inputs, 50).unwrap();
        assert!(rep.agrees(), "{rep}");
        assert_eq!(rep.rounds.len(), 3);
        assert_eq!(rep.term_outcome, Some(Decoded::Success(vec![Value::Nat(4)])));
        assert_eq!(rep.total_steps(), 3 * (cm.k() + cm.l()));
    }

    #[test]
    fn other_machines_agree() {
        let cases: [(&str, Inputs, Decoded); 3] = [
            (include_str!("../machines/unary.asm"), Inputs::new(), Decoded::Success(vec![])),
            (include_str!("../machines/fail.asm"), Inputs::new(), Decoded::Fail),
            (include_str!("../machines/clash.asm"), Inputs::new(), Decoded::Clash),
        ];
        for (src, inputs, want) in cases {
            let m = load(src);
            let cm = compile(&m, &CompileOptions::default()).unwrap();
            let rep = lockstep(&cm, &inputs, 50).unwrap();
            assert!(rep.agrees(), "{rep}");
            if want != Decoded::Success(vec![]) {
                assert_eq!(rep.rounds.len(), 1);
            }
            if want != Decoded::Success(vec![]) {
                assert_eq!(rep.term_outcome, Some(want));
            } else {
                let Some(Decoded::Success(out)) = &rep.term_outcome else { panic!("{rep}") };
                let rows: Vec<Vec<Value>> = (0..5).map(|i| vec![Value::Nat(i), Value::Nat(if i < 4 { 2 * i } else { 0 })]).collect();
                assert_eq!(out, &vec![Value::Seq(rows)]);
            }
        }
    }

    #[test]
    fn delayed_exits() {
        let late_fail = "
            sort N = 0..9;
            static n0 : N input;
            static div : N, N -> N = builtin div;
            static pred : N -> N = builtin pred;
            dynamic n : N;
            dynamic q : N output;
            init n = n0;
            init q = 0;
            program par { q := div(9, n); n := pred(n); }
        ";
        let late_clash = "
            sort N = 0..3;
            static two : N = 2;
            static succ : N -> N = builtin succ;
            dynamic c : N output;
            init c = 0;
            program if c = two then par { c := 1; c := 2; } else c := succ(c);
        ";
        let two_f = "
            sort N = 0..3;
            dynamic f : N -> N output;
            init f(x) = 0;
            program par { f(0) := 1; f(0) := 2; }
        ";
        for (src, inputs, want, rounds) in [
            (late_fail, nat_inputs(&[("n0", 3)]), Decoded::Fail, 4),
            (late_clash, Inputs::new(), Decoded::Clash, 3),
            (two_f, Inputs::new(), Decoded::Clash, 1),
        ] {
            let cm = compile(&load(src), &CompileOptions::default()).unwrap();
            let rep = lockstep(&cm, &inputs, 20).unwrap();
            assert!(rep.agrees(), "{rep}");
            assert_eq!(rep.term_outcome, Some(want));
            assert_eq!(rep.rounds.len(), rounds);
        }
    }

    #[test]
    fn untouched_function_keeps_empty_delta() {
        let src = "
            sort N = 0..3;
            static succ : N -> N = builtin succ;
            static three : N = 3;
            dynamic i : N output;
            dynamic f : N -> N;
            init i = 0;
            init f(x) = x;
            program if i = three then skip else i := succ(i);
        ";
        let cm = compile_general(&load(src), &CompileOptions::default()).unwrap();
        assert!(compile_type0(&cm.machine, &CompileOptions::default()).is_err());
        let mut t = cm.initial_term(&Inputs::new()).unwrap();
        loop {
            let (next, b, _) = crate::combinators::run_round(&t, cm.theta(), cm.slots.len(), &cm.sig, 100_000).unwrap();
            match b {
                crate::combinators::Boundary::Theta(vals) => {
                    assert_eq!(vals[1], Value::Seq(vec![]));
                    t = next;
                }
                crate::combinators::Boundary::Normal(nf) => {
                    assert_eq!(cm.decode(&nf).unwrap(), Decoded::Success(vec![Value::Nat(3)]));
                    break;
                }
            }
        }
    }

    #[test]
    fn decode_snapshots() {
        let cm = compile_type0(&load(include_str!("../machines/euclid.asm")), &CompileOptions::default()).unwrap();
        let snap = crate::combinators::theta_app(cm.theta(), &[Value::Nat(8), Value::Nat(4), Value::Nat(12), Value::Nat(8)]);
        assert_eq!(
            cm.decode(&snap).unwrap(),
            Decoded::StillRunning(vec![Value::Nat(8), Value::Nat(4), Value::Nat(12), Value::Nat(8)])
        );
        let done = Term::code(Value::Tuple(vec![Value::Nat(1), Value::Nat(4)]));
        assert_eq!(cm.decode(&done).unwrap(), Decoded::Success(vec![Value::Nat(4)]));
        assert_eq!(cm.decode(&Term::code(Value::Nat(3))).unwrap(), Decoded::Clash);
        assert_eq!(cm.decode(&Term::code(Value::Nat(2))).unwrap(), Decoded::Fail);
        assert!(cm.decode(&Term::var("x")).is_err());
        assert!(compile(&load("sort N = 0..1; dynamic a : N; init a = 0;"), &CompileOptions::default()).is_err());
    }

    #[test]
    fn headroom_is_exact() {
        let m = load(include_str!("../machines/euclid.asm"));
        let base = compile(&m, &CompileOptions::default()).unwrap();
        let opts = CompileOptions { headroom_k: 5, headroom_l: 2, ..Default::default() };
        let cm = compile(&m, &opts).unwrap();
        assert_eq!((cm.k(), cm.l()), (base.k() + 5, base.l() + 2));
        let rep = lockstep(&cm, &nat_inputs(&[("a0", 9), ("b0", 6)]), 50).unwrap();
        assert!(rep.agrees(), "{rep}");
        let low = CompileOptions { k: Some(base.comb.k_min - 1), ..Default::default() };
        assert!(compile(&m, &low).is_err());
    }
}
