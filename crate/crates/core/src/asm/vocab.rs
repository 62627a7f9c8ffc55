use std::collections::BTreeMap;
use std::fmt;

use crate::asm::AsmError;
use crate::value::{name, Name, Sort};

/// Index of a symbol in its vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Static,
    Dynamic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Symbol {
    pub name: Name,
    pub kind: SymbolKind,
    pub args: Vec<Sort>,
    pub result: Sort,
    pub input: bool,
    pub output: bool,
}

impl Symbol {
    pub fn new(name_: &str, kind: SymbolKind, args: Vec<Sort>, result: Sort) -> Symbol {
        Symbol {
            name: name(name_),
            kind,
            args,
            result,
            input: false,
            output: false,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_static(&self) -> bool {
        self.kind == SymbolKind::Static
    }

    pub fn is_dynamic(&self) -> bool {
        self.kind == SymbolKind::Dynamic
    }
}

/// Sorts and symbols of an ASM.
///
/// `Bool` with `True`, `False`, `not`, `and`, `or` is always present, and
/// every sort `S` gets its equality `eq_S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    sorts: Vec<Sort>,
    symbols: Vec<Symbol>,
    by_name: BTreeMap<Name, SymId>,
}

/// Symbols added to every vocabulary.
pub const AUTO_STATICS: [&str; 5] = ["True", "False", "not", "and", "or"];

impl Default for Vocabulary {
    fn default() -> Self {
        Vocabulary::new()
    }
}

impl Vocabulary {
    pub fn new() -> Vocabulary {
        let mut v = Vocabulary {
            sorts: Vec::new(),
            symbols: Vec::new(),
            by_name: BTreeMap::new(),
        };
        let b = Sort::bool();
        v.add_sort(b.clone()).expect("fresh vocabulary");
        let stat = |n: &str, args: Vec<Sort>| Symbol::new(n, SymbolKind::Static, args, Sort::bool());
        for s in [
            stat("True", vec![]),
            stat("False", vec![]),
            stat("not", vec![b.clone()]),
            stat("and", vec![b.clone(), b.clone()]),
            stat("or", vec![b.clone(), b]),
        ] {
            v.add_symbol(s).expect("fresh vocabulary");
        }
        v
    }

    /// Adds a sort and its equality symbol.
    pub fn add_sort(&mut self, s: Sort) -> Result<(), AsmError> {
        if self.sort(s.name()).is_some() {
            return Err(AsmError::DuplicateSort(name(s.name())));
        }
        self.sorts.push(s.clone());
        let eq = Symbol::new(&format!("eq_{}", s.name()), SymbolKind::Static, vec![s.clone(), s], Sort::bool());
        self.add_symbol(eq)?;
        Ok(())
    }

    pub fn add_symbol(&mut self, s: Symbol) -> Result<SymId, AsmError> {
        if self.by_name.contains_key(&s.name) {
            return Err(AsmError::DuplicateSymbol(s.name));
        }
        if s.input && (s.is_dynamic() || s.arity() > 0) {
            return Err(AsmError::BadInputSymbol(s.name));
        }
        if s.output && s.is_static() {
            return Err(AsmError::BadOutputSymbol(s.name));
        }
        let id = SymId(self.symbols.len());
        self.by_name.insert(s.name.clone(), id);
        self.symbols.push(s);
        Ok(id)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn sort(&self, n: &str) -> Option<&Sort> {
        self.sorts.iter().find(|s| s.name() == n)
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymId, &Symbol)> {
        self.symbols.iter().enumerate().map(|(i, s)| (SymId(i), s))
    }

    pub fn lookup(&self, n: &str) -> Option<SymId> {
        self.by_name.get(n).copied()
    }

    pub fn symbol(&self, id: SymId) -> &Symbol {
        &self.symbols[id.0]
    }

    pub fn name_of(&self, id: SymId) -> &Name {
        &self.symbols[id.0].name
    }

    pub fn eq_symbol(&self, s: &Sort) -> SymId {
        self.lookup(&format!("eq_{}", s.name())).expect("every sort has an equality")
    }

    /// Built in automatically (Boolean connectives and equalities).
    pub fn is_auto(&self, id: SymId) -> bool {
        let n = &*self.symbol(id).name;
        AUTO_STATICS.contains(&n) || (n.starts_with("eq_") && self.sort(&n[3..]).is_some())
    }

    pub fn dynamic_symbols(&self) -> Vec<SymId> {
        self.symbols().filter(|(_, s)| s.is_dynamic()).map(|(i, _)| i).collect()
    }

    pub fn static_symbols(&self) -> Vec<SymId> {
        self.symbols().filter(|(_, s)| s.is_static()).map(|(i, _)| i).collect()
    }

    pub fn input_symbols(&self) -> Vec<SymId> {
        self.symbols().filter(|(_, s)| s.input).map(|(i, _)| i).collect()
    }

    pub fn output_symbols(&self) -> Vec<SymId> {
        self.symbols().filter(|(_, s)| s.output).map(|(i, _)| i).collect()
    }
}

impl fmt::Display for SymId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
