use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Name of the blank tape symbol in `.tm` files.
pub const BLANK: &str = "_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    L,
    R,
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dir::L => "L",
            Dir::R => "R",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub state: String,
    pub read: String,
    pub write: String,
    pub dir: Dir,
    pub next: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TmError {
    #[error("two transitions for state `{state}` reading `{read}`")]
    NonDeterministicTM { state: String, read: String },
    #[error("no transition for state `{state}` reading `{read}`")]
    MissingTransition { state: String, read: String },
    #[error("{0}")]
    Invalid(String),
}

/// A deterministic single-tape machine over a right-infinite tape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TMachine {
    pub input: Vec<String>,
    pub tape: Vec<String>,
    pub states: Vec<String>,
    pub start: String,
    pub transitions: Vec<Transition>,
    table: BTreeMap<(String, String), usize>,
}

impl TMachine {
    pub fn new(
        input: Vec<String>,
        tape: Vec<String>,
        states: Vec<String>,
        start: String,
        transitions: Vec<Transition>,
    ) -> Result<TMachine, TmError> {
        let invalid = |m: String| Err(TmError::Invalid(m));
        if !tape.iter().any(|t| t == BLANK) {
            return invalid("the tape alphabet must contain the blank `_`".into());
        }
        if input.iter().any(|t| t == BLANK) {
            return invalid("the blank may not be an input symbol".into());
        }
        if let Some(i) = input.iter().find(|i| !tape.contains(i)) {
            return invalid(format!("input symbol `{i}` is not a tape symbol"));
        }
        if let Some(i) = input.iter().find(|i| i.chars().count() != 1) {
            return invalid(format!("input symbol `{i}` must be a single character"));
        }
        for s in ["accept", "reject"] {
            if !states.iter().any(|q| q == s) {
                return invalid(format!("the states must include `{s}`"));
            }
        }
        if !states.contains(&start) {
            return invalid(format!("start state `{start}` is not declared"));
        }
        if start == "accept" || start == "reject" {
            return invalid("the start state may not be final".into());
        }
        for (list, what) in [(&input, "input"), (&tape, "tape"), (&states, "state")] {
            let mut seen = std::collections::HashSet::new();
            if let Some(d) = list.iter().find(|x| !seen.insert(*x)) {
                return invalid(format!("{what} symbol `{d}` listed twice"));
            }
        }
        let mut table = BTreeMap::new();
        for (k, t) in transitions.iter().enumerate() {
            if !states.contains(&t.state) || !states.contains(&t.next) {
                return invalid(format!("transition from `{}` uses an undeclared state", t.state));
            }
            if !tape.contains(&t.read) || !tape.contains(&t.write) {
                return invalid(format!("transition from `{}` uses an undeclared tape symbol", t.state));
            }
            if t.state == "accept" || t.state == "reject" {
                return invalid(format!("final state `{}` has an outgoing transition", t.state));
            }
            if table.insert((t.state.clone(), t.read.clone()), k).is_some() {
                return Err(TmError::NonDeterministicTM { state: t.state.clone(), read: t.read.clone() });
            }
        }
        for q in states.iter().filter(|q| *q != "accept" && *q != "reject") {
            for r in &tape {
                if !table.contains_key(&(q.clone(), r.clone())) {
                    return Err(TmError::MissingTransition { state: q.clone(), read: r.clone() });
                }
            }
        }
        Ok(TMachine { input, tape, states, start, transitions, table })
    }

    pub fn transition(&self, state: &str, read: &str) -> Option<&Transition> {
        self.table.get(&(state.to_string(), read.to_string())).map(|&k| &self.transitions[k])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    Reject,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimResult {
    pub outcome: Outcome,
    /// Transitions taken.
    pub steps: usize,
    pub state: String,
    pub head: usize,
    pub tape: Vec<String>,
}

/// Runs the machine with the head on a blank at position 0 and the input at
/// positions 1..=n. Moving left at position 0 leaves the head in place.
pub fn simulate_tm(tm: &TMachine, x: &str, max_steps: usize) -> Result<SimResult, TmError> {
    let mut tape: Vec<String> = vec![BLANK.to_string()];
    for c in x.chars() {
        let s = c.to_string();
        if !tm.input.contains(&s) {
            return Err(TmError::Invalid(format!("`{c}` is not an input symbol")));
        }
        tape.push(s);
    }
    let mut state = tm.start.clone();
    let mut head = 0usize;
    let mut steps = 0usize;
    loop {
        let outcome = match state.as_str() {
            "accept" => Some(Outcome::Accept),
            "reject" => Some(Outcome::Reject),
            _ if steps >= max_steps => Some(Outcome::Timeout),
            _ => None,
        };
        if let Some(outcome) = outcome {
            return Ok(SimResult { outcome, steps, state, head, tape });
        }
        if head >= tape.len() {
            tape.push(BLANK.to_string());
        }
        let t = tm.transition(&state, &tape[head]).expect("transition tables are total");
        tape[head] = t.write.clone();
        match t.dir {
            Dir::L => head = head.saturating_sub(1),
            Dir::R => head += 1,
        }
        state = t.next.clone();
        steps += 1;
    }
}
