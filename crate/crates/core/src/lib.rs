//! Abstract state machines compiled to an extended λ-calculus.

pub mod asm;
pub mod combinators;
pub mod compiler;
pub mod cosim;
pub mod encodings;
pub mod error;
pub mod fsig;
pub mod good;
pub mod normalize;
pub mod reduce;
pub mod source;
pub mod term;
pub mod value;

pub use error::{Diagnostics, ParseError};
pub use term::{Dir, RedexAddress, Term, TermKind};
pub use value::{grid, name, Domain, Name, Sort, Value};
