use std::collections::BTreeMap;
use std::sync::Arc;

use crate::asm::program::Program;
use crate::asm::semantics::{run_program, RunResult, StepProgram};
use crate::asm::state::{builtin_arity, Env, State, StaticDef, Table};
use crate::asm::term::AsmTerm;
use crate::asm::vocab::{SymId, Vocabulary};
use crate::asm::AsmError;
use crate::encodings::DatatypeDef;
use crate::value::{grid, Name, Sort, Value};

/// Initial interpretation of a dynamic symbol `α` of arity p:
/// `α(a₁,…,aₚ) = term(a_σ(1),…,a_σ(ℓ))`, where `term` uses only statics and
/// `Var(j)` stands for its j-th argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitEntry {
    pub sigma: Vec<usize>,
    pub term: AsmTerm,
}

impl InitEntry {
    /// The identity distribution: `Var(j)` is the j-th argument.
    pub fn identity(arity: usize, term: AsmTerm) -> InitEntry {
        InitEntry {
            sigma: (0..arity).collect(),
            term,
        }
    }
}

/// Bindings of the input constants.
pub type Inputs = BTreeMap<String, Value>;

/// A complete ASM: vocabulary, static interpretations, initialization map
/// and program.
#[derive(Clone, Debug)]
pub struct Machine {
    pub vocab: Arc<Vocabulary>,
    pub statics: BTreeMap<SymId, StaticDef>,
    pub init: BTreeMap<SymId, InitEntry>,
    pub program: Program,
    /// Inductive datatypes declared alongside the machine.
    pub datatypes: DatatypeDef,
}

impl Machine {
    /// Validates and assembles a machine. Automatic statics need no entry in
    /// `statics`; input symbols default to [`StaticDef::Input`].
    pub fn new(
        vocab: Vocabulary,
        mut statics: BTreeMap<SymId, StaticDef>,
        init: BTreeMap<SymId, InitEntry>,
        program: Program,
    ) -> Result<Machine, AsmError> {
        for (id, sym) in vocab.symbols() {
            if sym.is_dynamic() {
                let e = init.get(&id).ok_or_else(|| AsmError::MissingInit(sym.name.clone()))?;
                check_init(&vocab, id, e)?;
                continue;
            }
            if vocab.is_auto(id) {
                statics.insert(id, StaticDef::Auto);
                continue;
            }
            if sym.input {
                statics.insert(id, StaticDef::Input);
                continue;
            }
            let def = statics.get(&id).ok_or_else(|| AsmError::MissingStatic(sym.name.clone()))?;
            match def {
                StaticDef::Builtin(b) => {
                    if builtin_arity(b) != Some(sym.arity()) {
                        return Err(AsmError::UnknownBuiltin(b.clone(), sym.arity()));
                    }
                }
                StaticDef::Const(v) => {
                    if sym.arity() != 0 || !sym.result.contains(v) {
                        return Err(AsmError::BadStaticValue(sym.name.clone()));
                    }
                }
                StaticDef::Table(t) => {
                    for (k, v) in t {
                        let ok = k.len() == sym.arity()
                            && k.iter().zip(&sym.args).all(|(x, s)| s.contains(x))
                            && sym.result.contains(v);
                        if !ok {
                            return Err(AsmError::BadStaticValue(sym.name.clone()));
                        }
                    }
                }
                StaticDef::Input => return Err(AsmError::BadInputSymbol(sym.name.clone())),
                StaticDef::Auto => return Err(AsmError::MissingStatic(sym.name.clone())),
            }
        }
        for id in statics.keys() {
            if id.0 >= vocab.symbols().count() || vocab.symbol(*id).is_dynamic() {
                return Err(AsmError::NotStatic(vocab.name_of(*id).clone()));
            }
        }
        program.check(&vocab)?;
        Ok(Machine {
            vocab: Arc::new(vocab),
            statics,
            init,
            program,
            datatypes: DatatypeDef::default(),
        })
    }

    pub fn dynamic_symbols(&self) -> Vec<SymId> {
        self.vocab.dynamic_symbols()
    }

    pub fn input_symbols(&self) -> Vec<SymId> {
        self.vocab.input_symbols()
    }

    pub fn output_symbols(&self) -> Vec<SymId> {
        self.vocab.output_symbols()
    }

    /// Every dynamic symbol has arity zero.
    pub fn is_type0(&self) -> bool {
        self.dynamic_symbols().iter().all(|f| self.vocab.symbol(*f).arity() == 0)
    }

    pub fn size(&self) -> usize {
        self.program.size()
    }

    fn env(&self, inputs: &Inputs) -> Result<Arc<Env>, AsmError> {
        let n = self.vocab.symbols().count();
        let mut input_vals = vec![None; n];
        for (k, v) in inputs {
            let id = self
                .vocab
                .lookup(k)
                .filter(|id| self.vocab.symbol(*id).input)
                .ok_or_else(|| AsmError::UnknownInput(k.as_str().into()))?;
            let sym = self.vocab.symbol(id);
            if !sym.result.contains(v) {
                return Err(AsmError::LiteralNotInSort(v.clone(), sym.result.name().into()));
            }
            input_vals[id.0] = Some(v.clone());
        }
        for id in self.input_symbols() {
            if input_vals[id.0].is_none() {
                return Err(AsmError::MissingInput(self.vocab.name_of(id).clone()));
            }
        }
        let mut defs = vec![None; n];
        for (id, d) in &self.statics {
            defs[id.0] = Some(d.clone());
        }
        let dynamics = self.dynamic_symbols();
        let mut slots = vec![None; n];
        for (i, f) in dynamics.iter().enumerate() {
            slots[f.0] = Some(i);
        }
        Ok(Arc::new(Env {
            vocab: self.vocab.clone(),
            defs,
            inputs: input_vals,
            slots,
            dynamics,
        }))
    }

    fn initial_table(&self, probe: &State, f: SymId) -> Result<Table, AsmError> {
        let sym = self.vocab.symbol(f);
        let e = &self.init[&f];
        let carriers = sym
            .args
            .iter()
            .map(|s| s.carrier().ok_or_else(|| AsmError::InfiniteCarrier(s.name().into())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut t = Table::new();
        for args in grid(&carriers) {
            if let Some(v) = probe.lift(&e.term, &e.sigma, &args) {
                t.insert(args, v);
            }
        }
        if sym.arity() == 0 && t.is_empty() {
            return Err(AsmError::InitUndefined(sym.name.clone()));
        }
        Ok(t)
    }

    /// The ξ-initial state for the given inputs.
    pub fn initial_state(&self, inputs: &Inputs) -> Result<State, AsmError> {
        let env = self.env(inputs)?;
        let probe = State {
            env: env.clone(),
            tables: vec![Table::new(); env.dynamics.len()],
        };
        let tables = env
            .dynamics
            .iter()
            .map(|f| self.initial_table(&probe, *f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(State { env, tables })
    }

    /// Checks that every dynamic table equals its lifted initial term.
    pub fn check_xi_initial(&self, s: &State) -> Result<(), AsmError> {
        for (i, f) in s.env.dynamics.iter().enumerate() {
            if self.initial_table(s, *f)? != s.tables[i] {
                return Err(AsmError::NotXiInitial(self.vocab.name_of(*f).clone()));
            }
        }
        Ok(())
    }

    pub fn run(&self, inputs: &Inputs, max_steps: usize) -> Result<RunResult, AsmError> {
        let s = self.initial_state(inputs)?;
        Ok(run_program(&self.program, s, max_steps))
    }

    /// Runs `p` (e.g. a normalized form of the program) from a state that
    /// must be ξ-initial.
    pub fn run_from(&self, p: &dyn StepProgram, s: State, max_steps: usize) -> Result<RunResult, AsmError> {
        self.check_xi_initial(&s)?;
        Ok(run_program(p, s, max_steps))
    }

    /// Every assignment of the inputs drawn from their (finite) carriers.
    pub fn input_grid(&self) -> Result<Vec<Inputs>, AsmError> {
        let ids = self.input_symbols();
        let carriers = ids
            .iter()
            .map(|id| {
                let s = &self.vocab.symbol(*id).result;
                s.carrier().ok_or_else(|| AsmError::InfiniteCarrier(s.name().into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(grid(&carriers)
            .into_iter()
            .map(|vals| {
                ids.iter()
                    .zip(vals)
                    .map(|(id, v)| (self.vocab.name_of(*id).to_string(), v))
                    .collect()
            })
            .collect())
    }

    /// Helper for building inputs from `(name, value)` pairs.
    pub fn inputs(pairs: &[(&str, Value)]) -> Inputs {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    pub fn symbol_name(&self, f: SymId) -> &Name {
        self.vocab.name_of(f)
    }
}

fn check_init(vocab: &Vocabulary, f: SymId, e: &InitEntry) -> Result<(), AsmError> {
    let sym = vocab.symbol(f);
    let var_sorts: Vec<Sort> = e
        .sigma
        .iter()
        .map(|&i| sym.args.get(i).cloned().ok_or(AsmError::BadInitDistribution(sym.name.clone())))
        .collect::<Result<_, _>>()?;
    if e.term.mentions_dynamic(vocab) {
        return Err(AsmError::NonStaticInInit(sym.name.clone()));
    }
    e.term.check(vocab, &var_sorts, Some(&sym.result))?;
    Ok(())
}
