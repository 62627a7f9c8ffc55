use crate::asm::term::AsmTerm;
use crate::asm::vocab::{SymId, Vocabulary};
use crate::asm::AsmError;
use crate::value::Sort;

/// `f(t₁,…,tₙ) := t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Update {
    pub sym: SymId,
    pub args: Vec<AsmTerm>,
    pub rhs: AsmTerm,
}

impl Update {
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(AsmTerm::size).sum::<usize>() + self.rhs.size()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Program {
    Skip,
    Halt,
    Fail,
    Update(Update),
    If(AsmTerm, Box<Program>, Box<Program>),
    Par(Vec<Program>),
}

impl Program {
    pub fn update(sym: SymId, args: Vec<AsmTerm>, rhs: AsmTerm) -> Program {
        Program::Update(Update { sym, args, rhs })
    }

    pub fn if_then(c: AsmTerm, then: Program) -> Program {
        Program::If(c, Box::new(then), Box::new(Program::Skip))
    }

    pub fn if_else(c: AsmTerm, then: Program, els: Program) -> Program {
        Program::If(c, Box::new(then), Box::new(els))
    }

    /// Number of AST nodes, counting term nodes.
    pub fn size(&self) -> usize {
        match self {
            Program::Skip | Program::Halt | Program::Fail => 1,
            Program::Update(u) => u.size(),
            Program::If(c, a, b) => 1 + c.size() + a.size() + b.size(),
            Program::Par(ps) => 1 + ps.iter().map(Program::size).sum::<usize>(),
        }
    }

    /// Checks sorts and that every update writes a dynamic symbol.
    pub fn check(&self, v: &Vocabulary) -> Result<(), AsmError> {
        match self {
            Program::Skip | Program::Halt | Program::Fail => Ok(()),
            Program::Update(u) => {
                let sym = v.symbol(u.sym);
                if !sym.is_dynamic() {
                    return Err(AsmError::StaticUpdate(sym.name.clone()));
                }
                AsmTerm::App(u.sym, u.args.clone()).check(v, &[], None)?;
                u.rhs.check(v, &[], Some(&sym.result))?;
                Ok(())
            }
            Program::If(c, a, b) => {
                c.check(v, &[], Some(&Sort::bool()))?;
                a.check(v)?;
                b.check(v)
            }
            Program::Par(ps) => ps.iter().try_for_each(|p| p.check(v)),
        }
    }
}
