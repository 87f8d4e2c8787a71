//! Exact data normal forms of basic terms in cons-free systems.
//!
//! The solver tabulates statements `f A1 .. Am ~> t`, where each `Aj` is an
//! element of the representation space of the `j`-th argument type, and
//! saturates the table: a statement becomes confirmed once some rule whose
//! patterns match members of the argument sets evaluates, under the previous
//! table, to a set containing `t`. Confirmed entries never revert.
//!
//! Two drivers compute the same fixpoint. [`Mode::Full`] evaluates every
//! statement in every step, which gives the exact step and statement counts
//! of the textbook iteration. [`Mode::Demand`] starts from the statements of
//! the input terms and only adds the statements they consult, re-evaluating
//! a statement when something it read has changed.

mod card;
mod space;

pub use card::{atom_count, cardinality_bound, repr_cardinality, Cardinality, HNum};
pub use space::{mask, Repr, Space, SpaceKind};

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::atrs::Atrs;
use crate::format::print_term;
use crate::term::{match_into, Head, Substitution, Symbol, Term};
use crate::types::{Type, TypeKind};
use crate::validator::{compute_b, prune_ho_constructors, BSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    /// Full when the statement count is at most the configured threshold.
    #[default]
    Auto,
    Full,
    Demand,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Auto => "auto",
            Mode::Full => "full",
            Mode::Demand => "demand",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Mode::Auto),
            "full" => Ok(Mode::Full),
            "demand" => Ok(Mode::Demand),
            _ => Err(format!("unknown solver mode `{s}` (expected auto, full or demand)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Every representation space may hold at most `2^repr_budget_log2` elements.
    pub repr_budget_log2: u32,
    pub mode: Mode,
    /// Largest statement count for which [`Mode::Auto`] picks full tabulation.
    pub full_threshold: u64,
    pub threads: usize,
    /// Keep every intermediate table (full mode only).
    pub keep_history: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { repr_budget_log2: 20, mode: Mode::Auto, full_threshold: 1 << 20, threads: 1, keep_history: false }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("the system is not cons-free (rules {})", .0.join(", "))]
    NotConsFree(Vec<String>),
    #[error("the system is not product-cons-free (rules {})", .0.join(", "))]
    NotProductConsFree(Vec<String>),
    #[error("`{0}` is not a basic term")]
    NotBasic(String),
    #[error("the representation space of `{ty}` has {cardinality} elements, above the budget 2^{budget_log2}")]
    ReprSpaceTooLarge { ty: String, cardinality: Cardinality, budget_log2: u32 },
    #[error("`{0}` has a product type with a functional component")]
    HigherOrderProduct(String),
    #[error("`{0}` is not B-safe")]
    NonBSafeTerm(String),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("full tabulation of `{0}` is too large; use demand mode")]
    TooManyStatements(String),
    #[error("{0}")]
    BadQuery(String),
}

struct DefInfo {
    sym: Symbol,
    args: Vec<Arc<Space>>,
    result: Arc<Space>,
    /// Space of `f` applied to `n` arguments, for `n = 0..=m`.
    tails: Vec<Result<Arc<Space>, SolveError>>,
    rules: Vec<usize>,
    /// Number of argument tuples, when it fits.
    tuples: Option<u64>,
}

impl DefInfo {
    fn arity(&self) -> usize {
        self.args.len()
    }

    fn decode_index(&self, mut idx: u64) -> Vec<u64> {
        let mut out = vec![0; self.args.len()];
        for j in (0..self.args.len()).rev() {
            let n = self.args[j].size();
            out[j] = idx % n;
            idx /= n;
        }
        out
    }

    fn encode_index(&self, args: &[u64]) -> u64 {
        args.iter().zip(&self.args).fold(0, |acc, (&a, sp)| acc * sp.size() + a)
    }
}

type Eta = Vec<(Arc<str>, u64)>;
type Key = (usize, Vec<u64>);
type Table = Vec<Vec<u64>>;

struct Env<'a> {
    gamma: &'a Substitution,
    eta: &'a [(Arc<str>, u64)],
}

/// One rule-and-substitution test made while deciding a statement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTest {
    pub rule: String,
    pub substitution: String,
    /// The representation the rule's right side evaluates to.
    pub value: Repr,
    pub success: bool,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Data normal forms of each input term, in input order.
    pub results: Vec<BTreeSet<Term>>,
    /// The index `I` of the final table.
    pub steps: usize,
    /// Statements considered in each step (full mode) or demanded in total.
    pub statements: u64,
    pub mode: Mode,
    /// True if no confirmed statement was ever withdrawn.
    pub monotone: bool,
    history: Option<Vec<Table>>,
}

impl Solution {
    pub fn normal_forms(&self) -> &BTreeSet<Term> {
        &self.results[0]
    }

    /// Number of steps with a kept table (`steps + 1`), if history was kept.
    pub fn history_len(&self) -> Option<usize> {
        self.history.as_ref().map(|h| h.len())
    }

    /// Number of confirmed statements after `step`.
    pub fn confirmed_count(&self, step: usize) -> Option<u64> {
        let t = self.history.as_ref()?.get(step)?;
        Some(t.iter().flatten().map(|v| v.count_ones() as u64).sum())
    }
}

pub struct Solver {
    atrs: Atrs,
    removed: Vec<Symbol>,
    b: BSet,
    config: SolverConfig,
    spaces: HashMap<Type, Arc<Space>>,
    defs: Vec<DefInfo>,
    def_index: HashMap<String, usize>,
    starts: Vec<Term>,
}

/// Builds `[[ty]]` over `b`, reusing `cache`.
pub fn build_space(
    ty: &Type,
    b: &BSet,
    budget_log2: u32,
    cache: &mut HashMap<Type, Arc<Space>>,
) -> Result<Arc<Space>, SolveError> {
    if let Some(s) = cache.get(ty) {
        return Ok(s.clone());
    }
    let too_large = || {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for t in b.iter() {
            if let Some(s) = t.ty().sort_name() {
                *counts.entry(s.to_string()).or_default() += 1;
            }
        }
        SolveError::ReprSpaceTooLarge {
            ty: ty.to_string(),
            cardinality: repr_cardinality(ty, &|s| counts.get(s).copied().unwrap_or(0)),
            budget_log2,
        }
    };
    let space = match ty.kind() {
        TypeKind::Sort(_) | TypeKind::Product(..) => {
            if !ty.is_base() {
                return Err(SolveError::HigherOrderProduct(ty.to_string()));
            }
            let atoms = atoms_of(ty, b);
            if atoms.len() as u64 > budget_log2 as u64 {
                return Err(too_large());
            }
            base_space(ty, atoms)
        }
        TypeKind::Arrow(a, c) => {
            let dom = build_space(a, b, budget_log2, cache)?;
            let cod = build_space(c, b, budget_log2, cache)?;
            let bits = if dom.bits >= 32 { None } else { (cod.bits as u64).checked_mul(1u64 << dom.bits) };
            match bits {
                Some(bits) if bits <= budget_log2 as u64 => {
                    Space { ty: ty.clone(), bits: bits as u32, kind: SpaceKind::Arrow { dom, cod } }
                }
                _ => return Err(too_large()),
            }
        }
    };
    let space = Arc::new(space);
    cache.insert(ty.clone(), space.clone());
    Ok(space)
}

/// Data terms of a sort in `b`, or tuples of them for a product, in a fixed
/// order: tuples are listed lexicographically by component index.
fn atoms_of(ty: &Type, b: &BSet) -> Vec<Term> {
    match ty.kind() {
        TypeKind::Product(l, r) => {
            let rs = atoms_of(r, b);
            let mut out = Vec::new();
            for x in atoms_of(l, b) {
                for y in &rs {
                    out.push(Term::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        _ => b.iter().filter(|t| t.ty() == ty).cloned().collect(),
    }
}

fn base_space(ty: &Type, atoms: Vec<Term>) -> Space {
    let index = atoms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Space { ty: ty.clone(), bits: atoms.len() as u32, kind: SpaceKind::Base { atoms, index } }
}

/// Every element of `[[ty]]` over `b`, in index order.
pub fn enumerate_reprs(ty: &Type, b: &BSet, budget_log2: u32) -> Result<Vec<Repr>, SolveError> {
    let sp = build_space(ty, b, budget_log2, &mut HashMap::new())?;
    Ok((0..sp.size()).map(|x| sp.decode(x)).collect())
}

fn bits_of(x: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| x >> i & 1 == 1)
}

fn closed_under(t: &Term, gamma: &Substitution) -> bool {
    let head_ok = match t.head() {
        Head::Var(v) => gamma.get(&v.name).is_some(),
        _ => true,
    };
    head_ok && t.args().iter().all(|a| closed_under(a, gamma))
}

impl Solver {
    /// Prepares a solver whose data set is the union of `B` over `starts`.
    pub fn new(atrs: &Atrs, starts: &[Term], config: SolverConfig) -> Result<Solver, SolveError> {
        let v = atrs.verdict();
        if !v.cons_free {
            let mut rules: Vec<String> = v.violating_rules().into_iter().map(String::from).collect();
            rules.dedup();
            return Err(SolveError::NotConsFree(rules));
        }
        if atrs.pairing() && v.product_cons_free == Some(false) {
            let mut rules: Vec<String> = v.violating_rules().into_iter().map(String::from).collect();
            rules.dedup();
            return Err(SolveError::NotProductConsFree(rules));
        }
        if starts.is_empty() {
            return Err(SolveError::BadQuery("no input terms".into()));
        }
        let (pruned, removed) = prune_ho_constructors(atrs);
        let mut b = BSet::default();
        for s in starts {
            let bs = compute_b(s, &pruned).map_err(|_| SolveError::NotBasic(print_term(s)))?;
            for t in bs.iter() {
                b.add_data_subterms(t, bs.origin(t).expect("member"));
            }
        }
        let budget = config.repr_budget_log2.min(63);
        let mut spaces = HashMap::new();
        let mut defs = Vec::new();
        let mut def_index = HashMap::new();
        for f in pruned.signature().defined() {
            let (args, res) = f.ty().uncurry();
            let args = args.iter().map(|a| build_space(a, &b, budget, &mut spaces)).collect::<Result<Vec<_>, _>>()?;
            let result = build_space(&res, &b, budget, &mut spaces)?;
            let tails = (0..=args.len())
                .map(|n| build_space(&f.ty().strip(n).expect("within arity"), &b, budget, &mut spaces))
                .collect();
            let tuples = args.iter().try_fold(1u64, |acc, s| acc.checked_mul(s.size()));
            def_index.insert(f.name().to_string(), defs.len());
            let rules = pruned.rules_for(f.name()).to_vec();
            defs.push(DefInfo { sym: f.clone(), args, result, tails, rules, tuples });
        }
        // Spaces consulted while evaluating right sides.
        let mut need = Vec::new();
        for r in pruned.rules() {
            for v in r.lhs.vars() {
                need.push(v.ty.clone());
            }
            for s in r.rhs.subterms() {
                need.push(s.ty().clone());
            }
        }
        for ty in need {
            build_space(&ty, &b, budget, &mut spaces)?;
        }
        Ok(Solver { atrs: pruned, removed, b, config, spaces, defs, def_index, starts: starts.to_vec() })
    }

    pub fn b(&self) -> &BSet {
        &self.b
    }

    /// The system after removing higher-order constructors.
    pub fn atrs(&self) -> &Atrs {
        &self.atrs
    }

    pub fn removed_constructors(&self) -> &[Symbol] {
        &self.removed
    }

    pub fn space(&self, ty: &Type) -> Result<Arc<Space>, SolveError> {
        let mut cache = self.spaces.clone();
        build_space(ty, &self.b, self.config.repr_budget_log2.min(63), &mut cache)
    }

    /// Statements considered in each step of a full tabulation, if countable.
    pub fn full_statement_count(&self) -> Option<u64> {
        self.defs.iter().try_fold(0u64, |acc, d| acc.checked_add(d.tuples?.checked_mul(d.result.atoms().len() as u64)?))
    }

    fn space_of(&self, ty: &Type) -> &Arc<Space> {
        self.spaces.get(ty).unwrap_or_else(|| panic!("space for `{ty}` was not prepared"))
    }

    fn atom_bit(&self, d: &Term) -> Result<u64, SolveError> {
        let sp = self.spaces.get(d.ty()).ok_or_else(|| SolveError::NonBSafeTerm(print_term(d)))?;
        sp.atom_index(d).map(|i| 1u64 << i).ok_or_else(|| SolveError::NonBSafeTerm(print_term(d)))
    }

    fn eval(
        &self,
        t: &Term,
        env: &Env,
        extra: &[u64],
        look: &mut dyn FnMut(usize, &[u64]) -> u64,
    ) -> Result<u64, SolveError> {
        match t.head() {
            Head::Var(x) => {
                if let Some(d) = env.gamma.get(&x.name) {
                    return self.atom_bit(d);
                }
                let mut v = env
                    .eta
                    .iter()
                    .find(|(n, _)| **n == *x.name)
                    .map(|(_, v)| *v)
                    .ok_or_else(|| SolveError::UnboundVariable(x.name.to_string()))?;
                let mut ty = x.ty.clone();
                let args: Vec<u64> =
                    t.args().iter().map(|a| self.eval(a, env, &[], look)).collect::<Result<_, _>>()?;
                for a in args.into_iter().chain(extra.iter().copied()) {
                    let sp = self.space_of(&ty);
                    v = sp.apply(v, a);
                    ty = ty.strip(1).expect("applied within arity");
                }
                Ok(v)
            }
            Head::Pair => {
                if closed_under(t, env.gamma) {
                    return self.atom_bit(&env.gamma.apply(t));
                }
                let l = self.eval(&t.args()[0], env, &[], look)?;
                let r = self.eval(&t.args()[1], env, &[], look)?;
                let nr = self.space_of(t.args()[1].ty()).atoms().len();
                let mut out = 0u64;
                for i in bits_of(l) {
                    for j in bits_of(r) {
                        out |= 1 << (i * nr + j);
                    }
                }
                Ok(out)
            }
            Head::Sym(c) if c.is_constructor() => {
                if t.is_pattern() && closed_under(t, env.gamma) {
                    self.atom_bit(&env.gamma.apply(t))
                } else {
                    Err(SolveError::NonBSafeTerm(print_term(t)))
                }
            }
            Head::Sym(f) => {
                let fid = self.def_index[f.name()];
                let mut args: Vec<u64> =
                    t.args().iter().map(|a| self.eval(a, env, &[], look)).collect::<Result<_, _>>()?;
                args.extend_from_slice(extra);
                self.tabulate(fid, &mut args, look)
            }
        }
    }

    /// The representation of `f` applied to `args`, tabulating over any
    /// missing arguments.
    fn tabulate(&self, fid: usize, args: &mut Vec<u64>, look: &mut dyn FnMut(usize, &[u64]) -> u64) -> Result<u64, SolveError> {
        let d = &self.defs[fid];
        let n = args.len();
        if n == d.arity() {
            return Ok(look(fid, args));
        }
        d.tails[n].as_ref().map_err(|e| e.clone())?;
        let w = d.tails[n + 1].as_ref().map_err(|e| e.clone())?.bits as u64;
        let mut out = 0u64;
        for a in 0..d.args[n].size() {
            args.push(a);
            let v = self.tabulate(fid, args, look)?;
            args.pop();
            out |= v << (a * w);
        }
        Ok(out)
    }

    /// The substitutions and variable bindings a rule admits for `f A1 .. Am`.
    fn matches(&self, ri: usize, args: &[u64]) -> Vec<(Substitution, Eta)> {
        let rule = &self.atrs.rules()[ri];
        let d = &self.defs[self.def_index[rule.head().name()]];
        let mut out = vec![(Substitution::new(), Vec::new())];
        for (j, pat) in rule.lhs.args().iter().enumerate() {
            if let Some(v) = pat.as_var() {
                for (_, eta) in out.iter_mut() {
                    eta.push((v.name.clone(), args[j]));
                }
                continue;
            }
            let atoms = d.args[j].atoms();
            let mut next = Vec::new();
            for (g, eta) in &out {
                for i in bits_of(args[j]) {
                    let mut g2 = g.clone();
                    if match_into(pat, &atoms[i], &mut g2) {
                        next.push((g2, eta.clone()));
                    }
                }
            }
            out = next;
        }
        out
    }

    fn eval_statement(&self, fid: usize, args: &[u64], look: &mut dyn FnMut(usize, &[u64]) -> u64) -> Result<u64, SolveError> {
        let mut acc = 0u64;
        for &ri in &self.defs[fid].rules {
            let k = self.atrs.rules()[ri].arity();
            for (gamma, eta) in self.matches(ri, args) {
                let env = Env { gamma: &gamma, eta: &eta };
                acc |= self.eval(&self.atrs.rules()[ri].rhs, &env, &args[k..], look)?;
            }
        }
        Ok(acc)
    }

    fn root_keys(&self) -> Result<Vec<Key>, SolveError> {
        self.starts
            .iter()
            .map(|s| {
                let f = s.head_symbol().ok_or_else(|| SolveError::NotBasic(print_term(s)))?;
                let fid = self.def_index[f.name()];
                let args = s.args().iter().map(|a| self.atom_bit(a)).collect::<Result<_, _>>()?;
                Ok((fid, args))
            })
            .collect()
    }

    fn decode_result(&self, fid: usize, v: u64) -> BTreeSet<Term> {
        let atoms = self.defs[fid].result.atoms();
        bits_of(v).map(|i| atoms[i].clone()).collect()
    }

    /// Runs the fixpoint for all input terms.
    pub fn solve(&self) -> Result<Solution, SolveError> {
        let mode = match self.config.mode {
            Mode::Auto => match self.full_statement_count() {
                Some(n) if n <= self.config.full_threshold => Mode::Full,
                _ => Mode::Demand,
            },
            m => m,
        };
        let run = || match mode {
            Mode::Full => self.solve_full(),
            _ => self.solve_demand(),
        };
        if self.config.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(self.config.threads).build().expect("thread pool");
            pool.install(run)
        } else {
            run()
        }
    }

    fn solve_full(&self) -> Result<Solution, SolveError> {
        let mut sizes = Vec::new();
        for d in &self.defs {
            match d.tuples {
                Some(n) if n <= self.config.full_threshold.max(1 << 24) => sizes.push(n as usize),
                _ => return Err(SolveError::TooManyStatements(d.sym.name().to_string())),
            }
        }
        let statements = self.full_statement_count().expect("sizes fit");
        let parallel = self.config.threads > 1;
        let mut prev: Table = sizes.iter().map(|&n| vec![0u64; n]).collect();
        let mut history = self.config.keep_history.then(|| vec![prev.clone()]);
        let mut monotone = true;
        let mut i = 0usize;
        loop {
            let step = |fid: usize, idx: usize| -> Result<u64, SolveError> {
                let d = &self.defs[fid];
                let args = d.decode_index(idx as u64);
                let mut look = |g: usize, a: &[u64]| prev[g][self.defs[g].encode_index(a) as usize];
                Ok(prev[fid][idx] | self.eval_statement(fid, &args, &mut look)?)
            };
            let mut next: Table = Vec::with_capacity(sizes.len());
            for (fid, &n) in sizes.iter().enumerate() {
                let col: Result<Vec<u64>, SolveError> = if parallel {
                    (0..n).into_par_iter().map(|idx| step(fid, idx)).collect()
                } else {
                    (0..n).map(|idx| step(fid, idx)).collect()
                };
                next.push(col?);
            }
            for (a, b) in prev.iter().flatten().zip(next.iter().flatten()) {
                monotone &= a & !b == 0;
            }
            if let Some(h) = history.as_mut() {
                h.push(next.clone());
            }
            i += 1;
            if next == prev {
                break;
            }
            prev = next;
        }
        let results = self
            .root_keys()?
            .into_iter()
            .map(|(fid, args)| self.decode_result(fid, prev[fid][self.defs[fid].encode_index(&args) as usize]))
            .collect();
        Ok(Solution { results, steps: i, statements, mode: Mode::Full, monotone, history })
    }

    fn solve_demand(&self) -> Result<Solution, SolveError> {
        let mut keys: Vec<Key> = Vec::new();
        let mut index: HashMap<Key, usize> = HashMap::new();
        let mut vals: Vec<u64> = Vec::new();
        let mut readers: Vec<HashSet<usize>> = Vec::new();
        let mut dirty: BTreeSet<usize> = BTreeSet::new();
        let roots = self.root_keys()?;
        for k in &roots {
            if !index.contains_key(k) {
                index.insert(k.clone(), keys.len());
                dirty.insert(keys.len());
                keys.push(k.clone());
                vals.push(0);
                readers.push(HashSet::new());
            }
        }
        let parallel = self.config.threads > 1;
        let mut monotone = true;
        let mut steps = 0usize;
        loop {
            steps += 1;
            if dirty.is_empty() {
                break;
            }
            let batch: Vec<usize> = std::mem::take(&mut dirty).into_iter().collect();
            let work = |&k: &usize| -> Result<(u64, Vec<usize>, Vec<Key>), SolveError> {
                let mut reads = Vec::new();
                let mut missing = Vec::new();
                let (fid, args) = &keys[k];
                let mut look = |g: usize, a: &[u64]| {
                    // Avoid allocating a key for the lookup in the common case.
                    match index.get(&(g, a.to_vec())) {
                        Some(&i) => {
                            reads.push(i);
                            vals[i]
                        }
                        None => {
                            missing.push((g, a.to_vec()));
                            0
                        }
                    }
                };
                let v = vals[k] | self.eval_statement(*fid, args, &mut look)?;
                Ok((v, reads, missing))
            };
            let results: Vec<(u64, Vec<usize>, Vec<Key>)> = if parallel {
                batch.par_iter().map(work).collect::<Result<_, _>>()?
            } else {
                batch.iter().map(work).collect::<Result<_, _>>()?
            };
            let mut updates = Vec::new();
            for (&k, (v, reads, missing)) in batch.iter().zip(results) {
                for r in reads {
                    readers[r].insert(k);
                }
                for m in missing {
                    let id = match index.get(&m) {
                        Some(&id) => id,
                        None => {
                            let id = keys.len();
                            index.insert(m.clone(), id);
                            keys.push(m);
                            vals.push(0);
                            readers.push(HashSet::new());
                            dirty.insert(id);
                            id
                        }
                    };
                    readers[id].insert(k);
                }
                if v != vals[k] {
                    monotone &= vals[k] & !v == 0;
                    updates.push((k, v));
                }
            }
            for (k, v) in updates {
                vals[k] = v;
                dirty.extend(readers[k].iter().copied());
            }
        }
        let statements = keys.iter().map(|(fid, _)| self.defs[*fid].result.atoms().len() as u64).sum();
        let results = roots.iter().map(|k| self.decode_result(k.0, vals[index[k]])).collect();
        Ok(Solution { results, steps, statements, mode: Mode::Demand, monotone, history: None })
    }

    fn key_of(&self, f: &str, args: &[Repr]) -> Result<(usize, Vec<u64>), SolveError> {
        let fid = *self.def_index.get(f).ok_or_else(|| SolveError::BadQuery(format!("`{f}` is not a defined symbol")))?;
        let d = &self.defs[fid];
        if args.len() != d.arity() {
            return Err(SolveError::BadQuery(format!("`{f}` takes {} arguments", d.arity())));
        }
        let enc = args
            .iter()
            .zip(&d.args)
            .map(|(r, sp)| sp.encode(r).ok_or_else(|| SolveError::BadQuery(format!("`{r}` is not in the space of `{}`", sp.ty))))
            .collect::<Result<_, _>>()?;
        Ok((fid, enc))
    }

    fn table_at<'a>(&self, sol: &'a Solution, step: usize) -> Result<&'a Table, SolveError> {
        sol.history
            .as_ref()
            .ok_or_else(|| SolveError::BadQuery("the solution kept no history".into()))?
            .get(step)
            .ok_or_else(|| SolveError::BadQuery(format!("no table for step {step}")))
    }

    /// Whether `f A1 .. Am ~> t` is confirmed in the table of `step`.
    pub fn confirmed(&self, sol: &Solution, step: usize, f: &str, args: &[Repr], t: &Term) -> Result<bool, SolveError> {
        let (fid, enc) = self.key_of(f, args)?;
        let table = self.table_at(sol, step)?;
        let v = table[fid][self.defs[fid].encode_index(&enc) as usize];
        Ok(self.decode_result(fid, v).contains(t))
    }

    /// Evaluates `t` under `eta` with the table of `step`.
    pub fn nf_eval(&self, sol: &Solution, step: usize, t: &Term, eta: &[(&str, Repr)]) -> Result<Repr, SolveError> {
        let table = self.table_at(sol, step)?;
        let mut enc: Eta = Vec::new();
        for (name, r) in eta {
            let v = t.vars().into_iter().find(|v| &*v.name == *name).ok_or_else(|| SolveError::UnboundVariable(name.to_string()))?;
            let sp = self.space(&v.ty)?;
            enc.push((v.name.clone(), sp.encode(r).ok_or_else(|| SolveError::BadQuery(format!("`{r}` is not in the space of `{}`", v.ty)))?));
        }
        let gamma = Substitution::new();
        let mut look = |g: usize, a: &[u64]| table[g][self.defs[g].encode_index(a) as usize];
        let v = self.eval(t, &Env { gamma: &gamma, eta: &enc }, &[], &mut look)?;
        Ok(self.space(t.ty())?.decode(v))
    }

    /// The substitutions a rule admits for `f A1 .. Am`, with the bindings
    /// of its variable patterns and padding arguments.
    pub fn substitutions(&self, rule: &str, args: &[Repr]) -> Result<Vec<(Substitution, Vec<(String, Repr)>)>, SolveError> {
        let (ri, r) = self.atrs.rule_by_name(rule).ok_or_else(|| SolveError::BadQuery(format!("no rule `{rule}`")))?;
        let (fid, enc) = self.key_of(r.head().name(), args)?;
        let d = &self.defs[fid];
        Ok(self
            .matches(ri, &enc)
            .into_iter()
            .map(|(g, eta)| {
                let mut named: Vec<(String, Repr)> = Vec::new();
                for (j, p) in r.lhs.args().iter().enumerate() {
                    if let Some(v) = p.as_var() {
                        named.push((v.name.to_string(), d.args[j].decode(enc[j])));
                    }
                }
                debug_assert_eq!(named.len(), eta.len());
                for (j, sp) in d.args.iter().enumerate().skip(r.arity()) {
                    named.push((format!("x{}", j + 1), sp.decode(enc[j])));
                }
                (g, named)
            })
            .collect())
    }

    /// Every rule test made when deciding `f A1 .. Am ~> t` in `step`
    /// (which reads the table of `step - 1`).
    pub fn explain(&self, sol: &Solution, step: usize, f: &str, args: &[Repr], t: &Term) -> Result<Vec<RuleTest>, SolveError> {
        if step == 0 {
            return Err(SolveError::BadQuery("step 0 has no tests".into()));
        }
        let (fid, enc) = self.key_of(f, args)?;
        let table = self.table_at(sol, step - 1)?;
        let mut look = |g: usize, a: &[u64]| table[g][self.defs[g].encode_index(a) as usize];
        let mut out = Vec::new();
        for &ri in &self.defs[fid].rules {
            let rule = &self.atrs.rules()[ri];
            for (gamma, eta) in self.matches(ri, &enc) {
                let v = self.eval(&rule.rhs, &Env { gamma: &gamma, eta: &eta }, &enc[rule.arity()..], &mut look)?;
                let value = self.defs[fid].result.decode(v);
                let success = matches!(&value, Repr::Set(s) if s.contains(t));
                let binds: Vec<String> = gamma.iter().map(|(n, v)| format!("{n}:={}", print_term(v))).collect();
                out.push(RuleTest { rule: rule.name.clone(), substitution: format!("[{}]", binds.join(", ")), value, success });
            }
        }
        Ok(out)
    }

    /// Per-sort counts of `B`, for cardinality reports.
    pub fn sort_counts(&self) -> BTreeMap<String, u64> {
        let mut counts = BTreeMap::new();
        for t in self.b.iter() {
            if let Some(s) = t.ty().sort_name() {
                *counts.entry(s.to_string()).or_default() += 1;
            }
        }
        counts
    }
}

/// Data normal forms of the basic term `s`.
pub fn solve(atrs: &Atrs, s: &Term, config: SolverConfig) -> Result<Solution, SolveError> {
    Solver::new(atrs, std::slice::from_ref(s), config)?.solve()
}
