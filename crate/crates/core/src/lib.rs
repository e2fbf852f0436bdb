//! Interpreter core for timed Creol: syntax, evaluation, the configuration
//! model, the transition rules, scheduling and bounded exploration.

pub mod ast;
pub mod desugar;
pub mod eval;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod explore;
pub mod runtime;
pub mod schedule;
pub mod semantics;
pub mod validate;
pub mod value;

pub use ast::Program;
pub use parser::{parse, ParseError, SourceModel};
pub use runtime::{init_configuration, Configuration, Fault};
pub use semantics::{applicable, apply, apply_in_place, Rule, Subject, Transition};
pub use value::{FutId, ObjId, Value};
