use std::fmt;

use thiserror::Error;

use super::contract_root;
use crate::atrs::Atrs;
use crate::term::Term;

/// One rewrite step: rule name and a 0-based argument path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceStep {
    pub rule: String,
    pub path: Vec<usize>,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.rule, path_string(&self.path))
    }
}

/// `root` or 1-based dot-separated argument positions.
pub fn path_string(path: &[usize]) -> String {
    if path.is_empty() {
        return "root".into();
    }
    let parts: Vec<String> = path.iter().map(|i| (i + 1).to_string()).collect();
    parts.join(".")
}

/// A reduction from `start`, as a list of steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub start: Term,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("line {line}: expected `rule @ path`, found `{text}`")]
    BadStep { line: usize, text: String },
    #[error("step {step}: no rule named `{rule}`")]
    UnknownRule { step: usize, rule: String },
    #[error("step {step}: rule `{rule}` does not apply at {path}")]
    NonReplayableTrace { step: usize, rule: String, path: String },
}

/// Parses the `rule @ path` lines printed by [`Trace`]'s Display. Blank lines
/// and `//` comments are skipped.
pub fn parse_trace(text: &str) -> Result<Vec<TraceStep>, ReplayError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        let bad = || ReplayError::BadStep { line: i + 1, text: line.to_string() };
        let (rule, path) = line.rsplit_once('@').ok_or_else(bad)?;
        let (rule, path) = (rule.trim(), path.trim());
        if rule.is_empty() {
            return Err(bad());
        }
        let path = if path == "root" {
            Vec::new()
        } else {
            path.split('.')
                .map(|p| p.parse::<usize>().ok().filter(|&n| n >= 1).map(|n| n - 1))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(bad)?
        };
        out.push(TraceStep { rule: rule.to_string(), path });
    }
    Ok(out)
}

/// Applies one step.
pub fn apply_step(atrs: &Atrs, t: &Term, step: &TraceStep, index: usize) -> Result<Term, ReplayError> {
    let (ri, _) = atrs
        .rule_by_name(&step.rule)
        .ok_or_else(|| ReplayError::UnknownRule { step: index + 1, rule: step.rule.clone() })?;
    let fail = || ReplayError::NonReplayableTrace {
        step: index + 1,
        rule: step.rule.clone(),
        path: path_string(&step.path),
    };
    let sub = t.at(&step.path).ok_or_else(fail)?;
    let u = contract_root(atrs, sub, ri).ok_or_else(fail)?;
    Ok(t.replace_at(&step.path, u))
}

/// Replays steps from `start`, returning every intermediate term
/// (`start` first).
pub fn replay(atrs: &Atrs, start: &Term, steps: &[TraceStep]) -> Result<Vec<Term>, ReplayError> {
    let mut terms = vec![start.clone()];
    for (i, s) in steps.iter().enumerate() {
        let next = apply_step(atrs, terms.last().unwrap(), s, i)?;
        terms.push(next);
    }
    Ok(terms)
}
