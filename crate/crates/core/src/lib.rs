//! Simply-typed applicative term rewriting with cons-free analysis.
//!
//! The crate covers the whole pipeline: typed terms and rules, a text format,
//! syntactic class checks, bounded nondeterministic search, an exact solver
//! for the data normal forms of basic terms, and a compiler from Turing
//! machines to cons-free systems built from counting modules.

pub mod atrs;
pub mod engine;
pub mod format;
pub mod solver;
pub mod term;
pub mod tm;
pub mod types;
pub mod validator;

pub use atrs::{Atrs, AtrsError, Rule, Signature};
pub use engine::{accepts, decide, search, Acceptance, Decision, SearchBudget, SearchError, SearchResult, Strategy, Trace};
pub use format::{encode_input, parse_atrs, parse_term, print_atrs, print_term, ParseError, Span};
pub use solver::{solve, Mode, Repr, SolveError, Solution, Solver, SolverConfig};
pub use term::{match_term, Class, Head, Substitution, Symbol, SymbolKind, Term, Variable};
pub use types::Type;
pub use validator::{compute_b, is_b_safe, prune_ho_constructors, BSet, Verdict};
