//! One-step reduction, bounded breadth-first search and acceptance drivers.

mod semi;
mod trace;

pub use semi::validate_semi_outermost;
pub use trace::{apply_step, parse_trace, path_string, replay, ReplayError, Trace, TraceStep};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::atrs::Atrs;
use crate::format::{encode_input, EncodeError};
use crate::term::{match_args, Head, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Strategy {
    /// Any redex.
    #[default]
    Free,
    /// The arguments of the contracted redex are normal forms.
    Innermost,
    /// No redex strictly above the contracted one.
    Outermost,
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "free" => Ok(Strategy::Free),
            "innermost" => Ok(Strategy::Innermost),
            "outermost" => Ok(Strategy::Outermost),
            _ => Err(format!("unknown strategy `{s}` (expected free, innermost or outermost)")),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Free => "free",
            Strategy::Innermost => "innermost",
            Strategy::Outermost => "outermost",
        })
    }
}

/// A contraction site: rule `rule` applied at the node reached by `path`
/// (0-based argument indices), consuming the first `arity` arguments there.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Redex {
    pub path: Vec<usize>,
    pub rule: usize,
}

/// Contracts rule `ri` at the root of `t`, if it matches a prefix of the arguments.
pub fn contract_root(atrs: &Atrs, t: &Term, ri: usize) -> Option<Term> {
    let rule = &atrs.rules()[ri];
    match t.head() {
        Head::Sym(f) if f == rule.head() => {}
        _ => return None,
    }
    let k = rule.arity();
    let gamma = match_args(rule.lhs.args(), t.args())?;
    let r = gamma.apply(&rule.rhs);
    Some(r.apply(t.args()[k..].iter().cloned()).expect("rules preserve types"))
}

fn root_rules(atrs: &Atrs, t: &Term) -> Vec<(usize, Term)> {
    match t.head() {
        Head::Sym(f) => atrs.rules_for(f.name()).iter().filter_map(|&ri| contract_root(atrs, t, ri).map(|u| (ri, u))).collect(),
        _ => Vec::new(),
    }
}

fn has_root_redex(atrs: &Atrs, t: &Term) -> bool {
    match t.head() {
        Head::Sym(f) => atrs.rules_for(f.name()).iter().any(|&ri| {
            let rule = &atrs.rules()[ri];
            match_args(rule.lhs.args(), t.args()).is_some()
        }),
        _ => false,
    }
}

/// Normal form test with a memo table.
pub fn is_normal_form(atrs: &Atrs, t: &Term) -> bool {
    let mut memo = HashMap::new();
    nf_memo(atrs, t, &mut memo)
}

fn nf_memo(atrs: &Atrs, t: &Term, memo: &mut HashMap<Term, bool>) -> bool {
    if let Some(&b) = memo.get(t) {
        return b;
    }
    let b = !has_root_redex(atrs, t) && t.args().iter().all(|a| nf_memo(atrs, a, memo));
    memo.insert(t.clone(), b);
    b
}

fn collect(
    atrs: &Atrs,
    t: &Term,
    strategy: Strategy,
    memo: &mut HashMap<Term, bool>,
    out: &mut Vec<(Redex, Term)>,
) {
    let roots = root_rules(atrs, t);
    let mut explore_from = 0;
    match strategy {
        Strategy::Free => out.extend(roots.into_iter().map(|(ri, u)| (Redex { path: vec![], rule: ri }, u))),
        Strategy::Innermost => {
            for (ri, u) in roots {
                let k = atrs.rules()[ri].arity();
                if t.args()[..k].iter().all(|a| nf_memo(atrs, a, memo)) {
                    out.push((Redex { path: vec![], rule: ri }, u));
                }
            }
        }
        Strategy::Outermost => {
            if let Some(kmax) = roots.iter().map(|(ri, _)| atrs.rules()[*ri].arity()).max() {
                for (ri, u) in roots {
                    if atrs.rules()[ri].arity() == kmax {
                        out.push((Redex { path: vec![], rule: ri }, u));
                    }
                }
                explore_from = kmax;
            }
        }
    }
    for (i, a) in t.args().iter().enumerate().skip(explore_from) {
        let mut sub = Vec::new();
        collect(atrs, a, strategy, memo, &mut sub);
        for (mut rx, u) in sub {
            rx.path.insert(0, i);
            let mut args = t.args().to_vec();
            args[i] = u;
            out.push((rx, t.with_args(args)));
        }
    }
}

/// All one-step reducts permitted by the strategy, with their redexes, in a
/// fixed order (root first, then arguments left to right). Duplicated
/// results keep their first redex.
pub fn one_step_reducts(atrs: &Atrs, t: &Term, strategy: Strategy) -> Vec<(Redex, Term)> {
    let mut memo = HashMap::new();
    let mut out = Vec::new();
    collect(atrs, t, strategy, &mut memo, &mut out);
    let mut seen = std::collections::HashSet::new();
    out.retain(|(_, u)| seen.insert(u.clone()));
    out
}

/// Just the reduct terms.
pub fn reducts(atrs: &Atrs, t: &Term, strategy: Strategy) -> BTreeSet<Term> {
    one_step_reducts(atrs, t, strategy).into_iter().map(|(_, u)| u).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum derivation length explored.
    pub max_steps: usize,
    /// Maximum number of distinct terms visited.
    pub max_terms: usize,
    /// Maximum node count of any visited term.
    pub max_term_size: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_steps: 10_000, max_terms: 100_000, max_term_size: 10_000 }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("the start term has {size} nodes, above the size budget {budget}")]
    BudgetTooSmallForRoot { size: usize, budget: usize },
    #[error("all budgets must be positive")]
    ZeroBudget,
    #[error("the system has no `decide : list => bool` with constructors `true` and `false`")]
    MissingDecideSymbol,
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Clone, Debug, Default)]
pub struct SearchResult {
    /// Data normal forms reached, with one witness reduction each.
    pub normal_forms: BTreeMap<Term, Trace>,
    /// True when some budget cut the search short.
    pub exhausted: bool,
    pub visited: usize,
    /// Length of the longest derivation explored.
    pub depth: usize,
}

impl SearchResult {
    pub fn found(&self) -> BTreeSet<Term> {
        self.normal_forms.keys().cloned().collect()
    }
}

/// Breadth-first search over the reduct graph from `start`.
pub fn search(
    atrs: &Atrs,
    start: &Term,
    strategy: Strategy,
    budget: SearchBudget,
) -> Result<SearchResult, SearchError> {
    search_with_threads(atrs, start, strategy, budget, 1)
}

pub fn search_with_threads(
    atrs: &Atrs,
    start: &Term,
    strategy: Strategy,
    budget: SearchBudget,
    threads: usize,
) -> Result<SearchResult, SearchError> {
    if budget.max_steps == 0 || budget.max_terms == 0 || budget.max_term_size == 0 {
        return Err(SearchError::ZeroBudget);
    }
    if start.size() > budget.max_term_size {
        return Err(SearchError::BudgetTooSmallForRoot { size: start.size(), budget: budget.max_term_size });
    }
    let pool = if threads > 1 {
        Some(rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool"))
    } else {
        None
    };
    // node -> (term, parent, redex)
    let mut nodes: Vec<(Term, Option<(usize, Redex)>)> = vec![(start.clone(), None)];
    let mut index: HashMap<Term, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut level = vec![0usize];
    let mut result = SearchResult::default();
    let mut depth = 0;
    while !level.is_empty() {
        let terms: Vec<Term> = level.iter().map(|&i| nodes[i].0.clone()).collect();
        let expand = |t: &Term| one_step_reducts(atrs, t, strategy);
        let expansions: Vec<Vec<(Redex, Term)>> = match &pool {
            Some(p) => p.install(|| terms.par_iter().map(expand).collect()),
            None => terms.iter().map(expand).collect(),
        };
        let mut next = Vec::new();
        for (&ni, reds) in level.iter().zip(expansions) {
            if reds.is_empty() {
                let t = &nodes[ni].0;
                if t.is_data() {
                    let tr = trace_to(&nodes, ni, atrs);
                    result.normal_forms.entry(t.clone()).or_insert(tr);
                }
                continue;
            }
            if depth >= budget.max_steps {
                result.exhausted = true;
                continue;
            }
            for (rx, u) in reds {
                if index.contains_key(&u) {
                    continue;
                }
                if u.size() > budget.max_term_size || nodes.len() >= budget.max_terms {
                    result.exhausted = true;
                    continue;
                }
                index.insert(u.clone(), nodes.len());
                next.push(nodes.len());
                nodes.push((u, Some((ni, rx))));
            }
        }
        if !next.is_empty() {
            depth += 1;
        }
        level = next;
    }
    result.visited = nodes.len();
    result.depth = depth;
    Ok(result)
}

fn trace_to(nodes: &[(Term, Option<(usize, Redex)>)], mut i: usize, atrs: &Atrs) -> Trace {
    let mut steps = Vec::new();
    while let Some((p, rx)) = &nodes[i].1 {
        steps.push(TraceStep { rule: atrs.rules()[rx.rule].name.clone(), path: rx.path.clone() });
        i = *p;
    }
    steps.reverse();
    Trace { start: nodes[0].0.clone(), steps }
}

/// Data normal forms of `t` found within the budget.
pub fn search_data_normal_forms(
    atrs: &Atrs,
    t: &Term,
    strategy: Strategy,
    budget: SearchBudget,
) -> Result<SearchResult, SearchError> {
    search(atrs, t, strategy, budget)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acceptance {
    Yes(Trace),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    True(Trace),
    False(Trace),
    /// Both values are reachable: the system is not a decider for this input.
    Both { true_trace: Trace, false_trace: Trace },
    Unknown,
}

fn decide_term(atrs: &Atrs, x: &str) -> Result<Term, SearchError> {
    let decide = atrs.symbol("decide").filter(|s| s.is_defined()).ok_or(SearchError::MissingDecideSymbol)?;
    let ok_bool = ["true", "false"].iter().all(|b| atrs.symbol(b).is_some_and(|s| s.is_constructor()));
    let (args, res) = decide.ty().uncurry();
    if !ok_bool || args.len() != 1 || res.sort_name() != Some("bool") {
        return Err(SearchError::MissingDecideSymbol);
    }
    let input = encode_input(atrs, x)?;
    Term::app(decide, vec![input]).map_err(|_| SearchError::MissingDecideSymbol)
}

fn bool_of(atrs: &Atrs, name: &str) -> Term {
    Term::sym(atrs.symbol(name).expect("checked by decide_term"))
}

/// Whether `decide ⌜x⌝` reaches `true` within the budget.
pub fn accepts(atrs: &Atrs, x: &str, strategy: Strategy, budget: SearchBudget) -> Result<Acceptance, SearchError> {
    let t = decide_term(atrs, x)?;
    let r = search(atrs, &t, strategy, budget)?;
    Ok(match r.normal_forms.get(&bool_of(atrs, "true")) {
        Some(tr) => Acceptance::Yes(tr.clone()),
        None => Acceptance::Unknown,
    })
}

pub fn decide(atrs: &Atrs, x: &str, strategy: Strategy, budget: SearchBudget) -> Result<Decision, SearchError> {
    let t = decide_term(atrs, x)?;
    let r = search(atrs, &t, strategy, budget)?;
    let tt = r.normal_forms.get(&bool_of(atrs, "true")).cloned();
    let ff = r.normal_forms.get(&bool_of(atrs, "false")).cloned();
    Ok(match (tt, ff) {
        (Some(a), Some(b)) => Decision::Both { true_trace: a, false_trace: b },
        (Some(a), None) => Decision::True(a),
        (None, Some(b)) => Decision::False(b),
        (None, None) => Decision::Unknown,
    })
}
