//! Abstract state machines: vocabularies, states, programs and runs.

mod machine;
mod program;
mod semantics;
mod state;
mod term;
mod vocab;

use thiserror::Error;

use crate::value::{Name, Value};

pub use machine::{InitEntry, Inputs, Machine};
pub use program::{Program, Update};
pub use semantics::{
    active_updates, detect_clash, evaluate_updates, halts_or_fails, run_program, successor, successor_from,
    ClashWitness, EvalUpdate, FailReason, RunOutcome, RunResult, StepOutcome, StepProgram,
};
pub use state::{auto_apply, builtin_apply, builtin_arity, table_to_seq, State, StaticDef, Table, BUILTINS};
pub use term::{AsmTerm, TermDisplay};
pub use vocab::{SymId, Symbol, SymbolKind, Vocabulary, AUTO_STATICS};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AsmError {
    #[error("duplicate sort `{0}`")]
    DuplicateSort(Name),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(Name),
    #[error("input `{0}` must be a static constant")]
    BadInputSymbol(Name),
    #[error("output `{0}` must be dynamic")]
    BadOutputSymbol(Name),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Name),
    #[error("unknown sort `{0}`")]
    UnknownSort(Name),
    #[error("`{symbol}` expects {expected} arguments, got {found}")]
    Arity { symbol: Name, expected: usize, found: usize },
    #[error("expected sort `{expected}`, found `{found}`")]
    SortMismatch { expected: Name, found: Name },
    #[error("literal `{0}` needs a sort from context")]
    UntypedLiteral(Value),
    #[error("value `{0}` is not in sort `{1}`")]
    LiteralNotInSort(Value, Name),
    #[error("variable x{} is not bound", .0 + 1)]
    UnboundVariable(usize),
    #[error("update of static symbol `{0}`; the left side must be dynamic")]
    StaticUpdate(Name),
    #[error("`{0}` is not a static symbol")]
    NotStatic(Name),
    #[error("initialization of `{0}` may use static symbols only")]
    NonStaticInInit(Name),
    #[error("initialization of `{0}` refers to a missing argument")]
    BadInitDistribution(Name),
    #[error("dynamic symbol `{0}` has no initialization")]
    MissingInit(Name),
    #[error("static symbol `{0}` has no interpretation")]
    MissingStatic(Name),
    #[error("unknown builtin `{0}` of arity {1}")]
    UnknownBuiltin(String, usize),
    #[error("interpretation of `{0}` leaves its profile")]
    BadStaticValue(Name),
    #[error("no input named `{0}`")]
    UnknownInput(Name),
    #[error("missing value for input `{0}`")]
    MissingInput(Name),
    #[error("initial value of `{0}` is undefined")]
    InitUndefined(Name),
    #[error("sort `{0}` has no finite carrier")]
    InfiniteCarrier(Name),
    #[error("state is not initial: `{0}` differs from its initialization")]
    NotXiInitial(Name),
}
