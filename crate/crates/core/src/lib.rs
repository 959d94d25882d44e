//! Dependently typed Proto-Quipper: syntax, kinding and typing with usage
//! indices, lift/force elaboration, and a big-step evaluator that builds
//! quantum circuits.

pub mod check;
pub mod circuit;
pub mod eval;
pub mod front;
pub mod shape;
pub mod syntax;

pub use check::{check_program, CheckOptions, Checker, Program, TypeError, TypeErrorKind};
pub use circuit::{BoxedCircuit, Circuit, CircuitError, GateKind, Label, LabelSupply, Sort};
pub use eval::{EvalError, Evaluator, Globals};
pub use front::{parse_program, pretty_term, pretty_type, ParseError};
pub use syntax::{Context, Index, Term, Type};
