//! Decision procedure for Fibonacci-synchronized sequences.

pub mod arith;
pub mod automata;
pub mod error;
pub mod linrep;
pub mod logic;
pub mod numeration;
pub mod reproduce;
pub mod seqs;
pub mod session;
pub mod synth;

pub use automata::{Automaton, Kind, Rel};
pub use error::{Error, Result};
pub use numeration::ZeckendorfString;
