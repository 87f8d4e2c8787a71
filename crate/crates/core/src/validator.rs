//! Syntactic class checks, the data set B_s and B-safety.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::atrs::{Atrs, Rule};
use crate::format::Span;
use crate::term::{Head, Symbol, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    /// Left side is not a defined symbol applied to patterns.
    NotConstructorRule,
    /// A variable occurs more than once on the left.
    NonLinear(String),
    /// A constructor-headed right-side subterm that is neither data nor a strict left subterm.
    ConsNotFree(Term),
    /// A pair component on the right that is a plain left argument or a non-data term.
    PairNotFree(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub span: Option<Span>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {}", self.rule)?;
        if let Some(sp) = self.span {
            write!(f, " ({sp})")?;
        }
        match &self.kind {
            ViolationKind::NotConstructorRule => write!(f, ": left side is not a defined symbol applied to patterns"),
            ViolationKind::NonLinear(v) => write!(f, ": variable `{v}` occurs more than once on the left"),
            ViolationKind::ConsNotFree(t) => write!(f, ": constructor term `{t}` is neither data nor a left subterm"),
            ViolationKind::PairNotFree(t) => write!(f, ": pair component `{t}` is not data-producing"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub constructor_system: bool,
    pub left_linear: bool,
    pub cons_free: bool,
    /// Only meaningful in pairing mode.
    pub product_cons_free: Option<bool>,
    pub type_order: usize,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn violations_of(&self, rule: &str) -> impl Iterator<Item = &Violation> {
        let rule = rule.to_string();
        self.violations.iter().filter(move |v| v.rule == rule)
    }

    /// Names of rules with at least one violation, in rule order.
    pub fn violating_rules(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for v in &self.violations {
            if !out.contains(&v.rule.as_str()) {
                out.push(&v.rule);
            }
        }
        out
    }
}

fn constructor_rule(r: &Rule) -> bool {
    r.head().is_defined() && r.lhs.args().iter().all(Term::is_pattern)
}

fn repeated_var(r: &Rule) -> Option<String> {
    let mut occ = Vec::new();
    r.lhs.var_occurrences(&mut occ);
    let mut seen = BTreeSet::new();
    occ.into_iter().find(|v| !seen.insert(v.name.clone())).map(|v| v.name.to_string())
}

fn collect_pairs(t: &Term, out: &mut Vec<Term>) {
    if t.is_pair() {
        out.push(t.clone());
    }
    for a in t.args() {
        collect_pairs(a, out);
    }
}

pub fn check(atrs: &Atrs) -> Verdict {
    let mut v = Verdict { type_order: atrs.order(), ..Verdict::default() };
    let mut cs = true;
    let mut ll = true;
    let mut cons_ok = true;
    let mut pair_ok = true;
    for r in atrs.rules() {
        let push = |v: &mut Verdict, kind| v.violations.push(Violation { rule: r.name.clone(), span: r.span, kind });
        if !constructor_rule(r) {
            cs = false;
            push(&mut v, ViolationKind::NotConstructorRule);
        }
        if let Some(x) = repeated_var(r) {
            ll = false;
            push(&mut v, ViolationKind::NonLinear(x));
        }
        for s in r.rhs.subterms() {
            if s.is_constructor_headed() && !s.is_data() && !r.lhs.has_strict_subterm(&s) {
                cons_ok = false;
                push(&mut v, ViolationKind::ConsNotFree(s));
            }
        }
        if atrs.pairing() {
            let mut pairs = Vec::new();
            collect_pairs(&r.rhs, &mut pairs);
            for p in pairs {
                for c in p.args() {
                    let fine = c.is_pair()
                        || c.is_constructor_headed()
                        || (c.is_var() && !r.lhs.args().contains(c));
                    if !fine {
                        pair_ok = false;
                        push(&mut v, ViolationKind::PairNotFree(c.clone()));
                    }
                }
            }
        }
    }
    v.constructor_system = cs;
    v.left_linear = ll;
    v.cons_free = cs && ll && cons_ok;
    v.product_cons_free = atrs.pairing().then_some(v.cons_free && pair_ok);
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Input,
    Rhs,
    Both,
}

/// The finite set of data terms available in reductions from a basic term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BSet {
    terms: BTreeMap<Term, Origin>,
}

impl BSet {
    pub fn contains(&self, t: &Term) -> bool {
        self.terms.contains_key(t)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Term> {
        self.terms.keys()
    }

    pub fn origin(&self, t: &Term) -> Option<Origin> {
        self.terms.get(t).copied()
    }

    pub fn terms(&self) -> BTreeSet<Term> {
        self.terms.keys().cloned().collect()
    }

    fn add(&mut self, t: Term, o: Origin) {
        let e = self.terms.entry(t).or_insert(o);
        if *e != o {
            *e = Origin::Both;
        }
    }

    /// Adds the data subterms of `t`.
    pub fn add_data_subterms(&mut self, t: &Term, o: Origin) {
        for s in t.subterms() {
            if s.is_data() {
                self.add(s, o);
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BError {
    #[error("`{0}` is not a basic term")]
    NotBasic(String),
}

/// Data subterms of the right sides only.
pub fn rhs_data(atrs: &Atrs) -> BSet {
    let mut b = BSet::default();
    for r in atrs.rules() {
        b.add_data_subterms(&r.rhs, Origin::Rhs);
    }
    b
}

pub fn compute_b(s: &Term, atrs: &Atrs) -> Result<BSet, BError> {
    if !s.is_basic() {
        return Err(BError::NotBasic(s.to_string()));
    }
    let mut b = BSet::default();
    b.add_data_subterms(s, Origin::Input);
    for r in atrs.rules() {
        b.add_data_subterms(&r.rhs, Origin::Rhs);
    }
    Ok(b)
}

/// Every constructor-headed subterm of `t` lies in `b`.
pub fn is_b_safe(t: &Term, b: &BSet) -> bool {
    if t.is_constructor_headed() && !b.contains(t) {
        return false;
    }
    t.args().iter().all(|a| is_b_safe(a, b))
}

fn mentions(t: &Term, syms: &[Symbol]) -> bool {
    matches!(t.head(), Head::Sym(s) if syms.contains(s)) || t.args().iter().any(|a| mentions(a, syms))
}

/// Removes constructors of declaration order above one, and every rule that mentions them.
pub fn prune_ho_constructors(atrs: &Atrs) -> (Atrs, Vec<Symbol>) {
    let removed: Vec<Symbol> =
        atrs.signature().constructors().filter(|c| c.ty().order() > 1).cloned().collect();
    if removed.is_empty() {
        return (atrs.clone(), removed);
    }
    let mut sig = atrs.signature().clone();
    sig.retain_symbols(|s| !removed.contains(s));
    let rules: Vec<Rule> = atrs
        .rules()
        .iter()
        .filter(|r| !mentions(&r.lhs, &removed) && !mentions(&r.rhs, &removed))
        .cloned()
        .collect();
    let pruned = Atrs::new(sig, atrs.var_decls().clone(), rules, atrs.pairing())
        .expect("removing rules keeps a system well formed");
    (pruned, removed)
}
