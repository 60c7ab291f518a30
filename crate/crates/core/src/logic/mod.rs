//! First-order queries over Fibonacci-automatic relations: syntax, parsing
//! and compilation to automata.

pub mod ast;
pub mod compile;
pub mod parser;

pub use ast::{CmpOp, Command, Formula, Term};
pub use compile::{Catalog, Engine};
pub use parser::{parse_formula, parse_script};
