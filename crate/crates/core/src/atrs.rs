//! Signatures, rules and rewriting systems.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use crate::format::Span;
use crate::term::{Head, Symbol, SymbolKind, Term};
use crate::types::Type;
use crate::validator::{self, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AtrsError {
    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),
    #[error("sort `{0}` declared twice")]
    DuplicateSort(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("symbol `{0}` is not declared with this type")]
    UndeclaredSymbol(String),
    #[error("rule {rule}: left side has type {lhs}, right side has type {rhs}")]
    RuleTypeMismatch { rule: String, lhs: Type, rhs: Type },
    #[error("rule {rule}: left side must be headed by a function symbol")]
    BadLeftHead { rule: String },
    #[error("rule {rule}: variable `{var}` occurs on the right but not on the left")]
    UnboundRhsVariable { rule: String, var: String },
    #[error("product types and pairs need the `pairing` directive")]
    ProductsDisabled,
    #[error("rule name `{0}` used twice")]
    DuplicateRuleName(String),
}

/// Sorts plus constructor and defined symbols, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<Arc<str>>,
    symbols: IndexMap<Arc<str>, Symbol>,
}

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    pub fn add_sort(&mut self, name: &str) -> Result<(), AtrsError> {
        if self.has_sort(name) {
            return Err(AtrsError::DuplicateSort(name.to_string()));
        }
        self.sorts.push(Arc::from(name));
        Ok(())
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.iter().any(|s| &**s == name)
    }

    pub fn sorts(&self) -> &[Arc<str>] {
        &self.sorts
    }

    pub fn add_symbol(&mut self, name: &str, ty: Type, kind: SymbolKind) -> Result<Symbol, AtrsError> {
        if self.symbols.contains_key(name) {
            return Err(AtrsError::DuplicateSymbol(name.to_string()));
        }
        let mut used = Vec::new();
        ty.sorts(&mut used);
        if let Some(bad) = used.iter().find(|s| !self.has_sort(s)) {
            return Err(AtrsError::UnknownSort(bad.to_string()));
        }
        let sym = Symbol::new(name, ty, kind);
        self.symbols.insert(Arc::from(name), sym.clone());
        Ok(sym)
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn constructors(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values().filter(|s| s.is_constructor())
    }

    pub fn defined(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values().filter(|s| s.is_defined())
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty() && self.sorts.is_empty()
    }

    /// Highest order among declared symbol types.
    pub fn order(&self) -> usize {
        self.symbols.values().map(|s| s.ty().order()).max().unwrap_or(0)
    }

    pub(crate) fn retain_symbols(&mut self, keep: impl Fn(&Symbol) -> bool) {
        self.symbols.retain(|_, s| keep(s));
    }
}

#[derive(Clone, Debug)]
pub struct Rule {
    pub name: String,
    /// Whether the name was written in the source (auto names are not printed).
    pub labelled: bool,
    pub lhs: Term,
    pub rhs: Term,
    pub span: Option<Span>,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.labelled == other.labelled && self.lhs == other.lhs && self.rhs == other.rhs
    }
}
impl Eq for Rule {}

impl Rule {
    pub fn head(&self) -> &Symbol {
        self.lhs.head_symbol().expect("rule left sides are symbol-headed")
    }

    /// Number of argument patterns on the left.
    pub fn arity(&self) -> usize {
        self.lhs.args().len()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// An applicative term rewriting system with its cached verdict.
#[derive(Clone, Debug)]
pub struct Atrs {
    signature: Signature,
    var_decls: IndexMap<Arc<str>, Type>,
    rules: Vec<Rule>,
    pairing: bool,
    verdict: Verdict,
    by_head: HashMap<Arc<str>, Vec<usize>>,
}

impl PartialEq for Atrs {
    fn eq(&self, other: &Self) -> bool {
        self.signature == other.signature
            && self.var_decls == other.var_decls
            && self.rules == other.rules
            && self.pairing == other.pairing
    }
}
impl Eq for Atrs {}

impl Atrs {
    pub fn new(
        signature: Signature,
        var_decls: IndexMap<Arc<str>, Type>,
        rules: Vec<Rule>,
        pairing: bool,
    ) -> Result<Atrs, AtrsError> {
        if !pairing {
            let any_product = signature.symbols().any(|s| s.ty().contains_product())
                || var_decls.values().any(Type::contains_product);
            if any_product {
                return Err(AtrsError::ProductsDisabled);
            }
        }
        let mut names = std::collections::HashSet::new();
        for r in &rules {
            if !names.insert(r.name.clone()) {
                return Err(AtrsError::DuplicateRuleName(r.name.clone()));
            }
            check_declared(&signature, &r.lhs)?;
            check_declared(&signature, &r.rhs)?;
            if !pairing && (has_pair(&r.lhs) || has_pair(&r.rhs)) {
                return Err(AtrsError::ProductsDisabled);
            }
            if r.lhs.ty() != r.rhs.ty() {
                return Err(AtrsError::RuleTypeMismatch {
                    rule: r.name.clone(),
                    lhs: r.lhs.ty().clone(),
                    rhs: r.rhs.ty().clone(),
                });
            }
            if r.lhs.head_symbol().is_none() {
                return Err(AtrsError::BadLeftHead { rule: r.name.clone() });
            }
            let lv = r.lhs.vars();
            if let Some(v) = r.rhs.vars().into_iter().find(|v| !lv.contains(v)) {
                return Err(AtrsError::UnboundRhsVariable { rule: r.name.clone(), var: v.name.to_string() });
            }
        }
        let mut by_head: HashMap<Arc<str>, Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            by_head.entry(r.head().name_arc().clone()).or_default().push(i);
        }
        let mut atrs = Atrs { signature, var_decls, rules, pairing, verdict: Verdict::default(), by_head };
        atrs.verdict = validator::check(&atrs);
        Ok(atrs)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn var_decls(&self) -> &IndexMap<Arc<str>, Type> {
        &self.var_decls
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn pairing(&self) -> bool {
        self.pairing
    }

    pub fn verdict(&self) -> &Verdict {
        &self.verdict
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.signature.get(name)
    }

    /// Indices of the rules whose left side is headed by `name`.
    pub fn rules_for(&self, name: &str) -> &[usize] {
        self.by_head.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rule_by_name(&self, name: &str) -> Option<(usize, &Rule)> {
        self.rules.iter().enumerate().find(|(_, r)| r.name == name)
    }

    pub fn order(&self) -> usize {
        self.signature.order()
    }
}

fn has_pair(t: &Term) -> bool {
    t.is_pair() || t.args().iter().any(has_pair)
}

fn check_declared(sig: &Signature, t: &Term) -> Result<(), AtrsError> {
    if let Head::Sym(s) = t.head() {
        match sig.get(s.name()) {
            Some(d) if d.ty() == s.ty() && d.kind() == s.kind() => {}
            _ => return Err(AtrsError::UndeclaredSymbol(s.name().to_string())),
        }
    }
    t.args().iter().try_for_each(|a| check_declared(sig, a))
}
