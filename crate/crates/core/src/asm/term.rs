use std::fmt;

use crate::asm::vocab::{SymId, Vocabulary};
use crate::asm::AsmError;
use crate::value::{Sort, Value};

/// A typed term over a vocabulary. `Var(j)` is the j-th variable of an
/// initialization term; program terms are ground.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AsmTerm {
    Var(usize),
    Lit(Value),
    App(SymId, Vec<AsmTerm>),
}

impl AsmTerm {
    pub fn app(f: SymId, args: Vec<AsmTerm>) -> AsmTerm {
        AsmTerm::App(f, args)
    }

    pub fn constant(f: SymId) -> AsmTerm {
        AsmTerm::App(f, Vec::new())
    }

    pub fn size(&self) -> usize {
        match self {
            AsmTerm::Var(_) | AsmTerm::Lit(_) => 1,
            AsmTerm::App(_, args) => 1 + args.iter().map(AsmTerm::size).sum::<usize>(),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            AsmTerm::Var(_) => false,
            AsmTerm::Lit(_) => true,
            AsmTerm::App(_, args) => args.iter().all(AsmTerm::is_ground),
        }
    }

    /// Every symbol occurrence, in preorder.
    pub fn symbols(&self, out: &mut Vec<SymId>) {
        if let AsmTerm::App(f, args) = self {
            out.push(*f);
            for a in args {
                a.symbols(out);
            }
        }
    }

    pub fn mentions_dynamic(&self, v: &Vocabulary) -> bool {
        let mut syms = Vec::new();
        self.symbols(&mut syms);
        syms.iter().any(|s| v.symbol(*s).is_dynamic())
    }

    /// Checks the term and returns its sort. `vars` gives the sorts of
    /// `Var(j)`; `expected` is needed to type bare literals.
    pub fn check(&self, v: &Vocabulary, vars: &[Sort], expected: Option<&Sort>) -> Result<Sort, AsmError> {
        let sort = match self {
            AsmTerm::Var(j) => vars.get(*j).cloned().ok_or(AsmError::UnboundVariable(*j))?,
            AsmTerm::Lit(val) => {
                let s = match (expected, val) {
                    (Some(s), _) => s.clone(),
                    (None, Value::Bool(_)) => Sort::bool(),
                    (None, _) => return Err(AsmError::UntypedLiteral(val.clone())),
                };
                if !s.contains(val) {
                    return Err(AsmError::LiteralNotInSort(val.clone(), s.name().into()));
                }
                s
            }
            AsmTerm::App(f, args) => {
                let sym = v.symbol(*f);
                if sym.arity() != args.len() {
                    return Err(AsmError::Arity {
                        symbol: sym.name.clone(),
                        expected: sym.arity(),
                        found: args.len(),
                    });
                }
                for (a, s) in args.iter().zip(&sym.args) {
                    a.check(v, vars, Some(s))?;
                }
                sym.result.clone()
            }
        };
        if let Some(e) = expected {
            if e != &sort {
                return Err(AsmError::SortMismatch {
                    expected: e.name().into(),
                    found: sort.name().into(),
                });
            }
        }
        Ok(sort)
    }

    pub fn display<'a>(&'a self, v: &'a Vocabulary) -> TermDisplay<'a> {
        TermDisplay { t: self, v, vars: None }
    }

    pub fn display_with<'a>(&'a self, v: &'a Vocabulary, vars: &'a [String]) -> TermDisplay<'a> {
        TermDisplay { t: self, v, vars: Some(vars) }
    }
}

pub struct TermDisplay<'a> {
    t: &'a AsmTerm,
    v: &'a Vocabulary,
    vars: Option<&'a [String]>,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.t {
            AsmTerm::Var(j) => match self.vars.and_then(|vs| vs.get(*j)) {
                Some(n) => write!(f, "{n}"),
                None => write!(f, "x{}", j + 1),
            },
            AsmTerm::Lit(v) => write!(f, "{v}"),
            AsmTerm::App(s, args) => {
                write!(f, "{}", self.v.name_of(*s))?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{}", TermDisplay { t: a, v: self.v, vars: self.vars })?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}
