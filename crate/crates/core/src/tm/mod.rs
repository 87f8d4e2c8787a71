//! Turing machines, their direct simulation and compilation to rewriting.

mod compile;
mod machine;
mod modules;
mod selftest;

use thiserror::Error;

pub use compile::{compile_tm, CompiledSystem, BLANK_CONS};
pub use machine::{simulate_tm, Dir, Outcome, SimResult, TMachine, TmError, Transition, BLANK};
pub use modules::{gen_module, GeneratedModule, Manifest, ModuleExpr};
pub use selftest::{module_selftest, Check, SelfTestReport};

use crate::solver::SolveError;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("module `{0}` uses pairs; enable pairing mode")]
    PairingRequired(String),
    #[error("bad module expression: {0}")]
    BadModuleExpr(String),
    #[error("name `{0}` collides with a generated symbol or rule variable")]
    NameClash(String),
    #[error("module self-test failed: {0}")]
    SelfTestFailure(Box<SelfTestReport>),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("generated system is malformed: {0}")]
    Internal(String),
}
