//! Applicative terms over a typed signature.
//!
//! A term is a head (function symbol, variable or the pairing node) applied to
//! a flat list of arguments. Equality is structural and every node carries a
//! precomputed hash, so terms can be deduplicated cheaply.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::types::{Type, TypeKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Constructor,
    Defined,
}

#[derive(Debug)]
pub struct FuncSym {
    pub name: Arc<str>,
    pub ty: Type,
    pub kind: SymbolKind,
}

/// A declared function symbol. Two symbols are equal when their names are.
#[derive(Clone)]
pub struct Symbol(Arc<FuncSym>);

impl Symbol {
    pub fn new(name: &str, ty: Type, kind: SymbolKind) -> Symbol {
        Symbol(Arc::new(FuncSym { name: Arc::from(name), ty, kind }))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn name_arc(&self) -> &Arc<str> {
        &self.0.name
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn kind(&self) -> SymbolKind {
        self.0.kind
    }

    pub fn is_constructor(&self) -> bool {
        self.0.kind == SymbolKind::Constructor
    }

    pub fn is_defined(&self) -> bool {
        self.0.kind == SymbolKind::Defined
    }

    pub fn arity(&self) -> usize {
        self.0.ty.arity()
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}
impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state)
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.name.cmp(&other.0.name)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: Arc<str>,
    pub ty: Type,
}

impl Variable {
    pub fn new(name: &str, ty: Type) -> Variable {
        Variable { name: Arc::from(name), ty }
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Sym(Symbol),
    Var(Variable),
    Pair,
}

impl Head {
    fn rank(&self) -> u8 {
        match self {
            Head::Sym(_) => 0,
            Head::Var(_) => 1,
            Head::Pair => 2,
        }
    }
}

impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Head::Sym(a), Head::Sym(b)) => a.cmp(b),
            (Head::Var(a), Head::Var(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("cannot apply `{head}` of type {ty} to an argument of type {arg}")]
    BadApplication { head: String, ty: Type, arg: Type },
    #[error("substitution for `{var}` has type {found}, expected {expected}")]
    IllTypedBinding { var: String, expected: Type, found: Type },
    #[error("a pair has exactly two components")]
    PairArity,
}

struct Node {
    head: Head,
    args: Vec<Term>,
    ty: Type,
    hash: u64,
    size: usize,
    ground: bool,
}

/// An immutable, well-typed term.
#[derive(Clone)]
pub struct Term(Arc<Node>);

fn node_hash(head: &Head, args: &[Term]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    head.hash(&mut h);
    args.len().hash(&mut h);
    for a in args {
        a.0.hash.hash(&mut h);
    }
    h.finish()
}

impl Term {
    fn build(head: Head, args: Vec<Term>, ty: Type) -> Term {
        let hash = node_hash(&head, &args);
        let size = 1 + args.iter().map(|a| a.0.size).sum::<usize>();
        let ground = !matches!(head, Head::Var(_)) && args.iter().all(|a| a.0.ground);
        Term(Arc::new(Node { head, args, ty, hash, size, ground }))
    }

    pub fn sym(sym: &Symbol) -> Term {
        Term::build(Head::Sym(sym.clone()), Vec::new(), sym.ty().clone())
    }

    pub fn var(v: &Variable) -> Term {
        Term::build(Head::Var(v.clone()), Vec::new(), v.ty.clone())
    }

    pub fn pair(left: Term, right: Term) -> Term {
        let ty = Type::product(left.ty().clone(), right.ty().clone());
        Term::build(Head::Pair, vec![left, right], ty)
    }

    /// Applies `self` to further arguments, extending its spine.
    pub fn apply(&self, extra: impl IntoIterator<Item = Term>) -> Result<Term, TermError> {
        let mut ty = self.ty().clone();
        let mut args = self.0.args.clone();
        if matches!(self.0.head, Head::Pair) {
            let mut it = extra.into_iter().peekable();
            if it.peek().is_none() {
                return Ok(self.clone());
            }
            let arg = it.next().unwrap();
            return Err(TermError::BadApplication { head: self.to_string(), ty, arg: arg.ty().clone() });
        }
        for a in extra {
            let next = match ty.kind() {
                TypeKind::Arrow(d, c) if *d == *a.ty() => c.clone(),
                _ => {
                    return Err(TermError::BadApplication {
                        head: self.to_string(),
                        ty,
                        arg: a.ty().clone(),
                    })
                }
            };
            ty = next;
            args.push(a);
        }
        if args.len() == self.0.args.len() {
            return Ok(self.clone());
        }
        Ok(Term::build(self.0.head.clone(), args, ty))
    }

    /// Builds `head args` for a symbol head, checking types.
    pub fn app(sym: &Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        Term::sym(sym).apply(args)
    }

    /// Rebuilds this node with new arguments of identical types.
    pub(crate) fn with_args(&self, args: Vec<Term>) -> Term {
        debug_assert_eq!(args.len(), self.0.args.len());
        Term::build(self.0.head.clone(), args, self.0.ty.clone())
    }

    /// Same head, the first `k` arguments.
    pub fn prefix(&self, k: usize) -> Term {
        if k == self.0.args.len() {
            return self.clone();
        }
        let dropped: Vec<Type> = self.0.args[k..].iter().map(|a| a.ty().clone()).collect();
        let ty = Type::arrows(dropped, self.0.ty.clone());
        Term::build(self.0.head.clone(), self.0.args[..k].to_vec(), ty)
    }

    pub fn head(&self) -> &Head {
        &self.0.head
    }

    pub fn head_symbol(&self) -> Option<&Symbol> {
        match &self.0.head {
            Head::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match &self.0.head {
            Head::Var(v) if self.0.args.is_empty() => Some(v),
            _ => None,
        }
    }

    pub fn is_var(&self) -> bool {
        self.as_var().is_some()
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.0.head, Head::Pair)
    }

    pub fn args(&self) -> &[Term] {
        &self.0.args
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_ground(&self) -> bool {
        self.0.ground
    }

    pub fn hash_value(&self) -> u64 {
        self.0.hash
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_constructor_headed(&self) -> bool {
        matches!(&self.0.head, Head::Sym(s) if s.is_constructor())
    }

    /// Subterm at a path of 0-based argument indices.
    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        let mut cur = self;
        for &i in path {
            cur = cur.0.args.get(i)?;
        }
        Some(cur)
    }

    /// Replaces the subterm at `path`.
    pub fn replace_at(&self, path: &[usize], new: Term) -> Term {
        match path.split_first() {
            None => new,
            Some((&i, rest)) => {
                let mut args = self.0.args.clone();
                args[i] = args[i].replace_at(rest, new);
                self.with_args(args)
            }
        }
    }

    /// All subterms: the term itself plus the
    /// subterms of its arguments. Head portions are not subterms.
    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        if out.insert(self.clone()) {
            for a in &self.0.args {
                a.collect_subterms(out);
            }
        }
    }

    /// Strict subterm test.
    pub fn has_strict_subterm(&self, t: &Term) -> bool {
        self.0.args.iter().any(|a| a == t || a.has_strict_subterm(t))
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        if let Head::Var(v) = &self.0.head {
            out.insert(v.clone());
        }
        for a in &self.0.args {
            a.collect_vars(out);
        }
    }

    /// Variable occurrences in left-to-right order, with repetition.
    pub fn var_occurrences(&self, out: &mut Vec<Variable>) {
        if let Head::Var(v) = &self.0.head {
            out.push(v.clone());
        }
        for a in &self.0.args {
            a.var_occurrences(out);
        }
    }

    pub fn is_pattern(&self) -> bool {
        match &self.0.head {
            Head::Var(_) => self.0.args.is_empty(),
            Head::Sym(s) => {
                s.is_constructor() && self.0.ty.is_sort() && self.0.args.iter().all(Term::is_pattern)
            }
            Head::Pair => self.0.args.iter().all(Term::is_pattern),
        }
    }

    pub fn is_data(&self) -> bool {
        self.0.ground && self.is_pattern()
    }

    pub fn is_basic(&self) -> bool {
        match &self.0.head {
            Head::Sym(s) => s.is_defined() && self.0.ty.is_base() && self.0.args.iter().all(Term::is_data),
            _ => false,
        }
    }

    pub fn classify(&self) -> Class {
        if self.is_data() {
            Class::Data
        } else if self.is_pattern() {
            Class::Pattern
        } else if self.is_basic() {
            Class::Basic
        } else {
            Class::Other
        }
    }
}

/// Syntactic classes of Def. 2.9 style: data terms are also patterns, and
/// `classify` reports the most specific one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Class {
    Data,
    Pattern,
    Basic,
    Other,
}

impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.head == other.0.head
                && self.0.args == other.0.args)
    }
}
impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .head
            .cmp(&other.0.head)
            .then_with(|| self.0.args.len().cmp(&other.0.args.len()))
            .then_with(|| self.0.args.cmp(&other.0.args))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::print_term(self))
    }
}

/// A finite, type-preserving map from variables to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Arc<str>, Term>,
}

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn insert(&mut self, var: &Variable, t: Term) -> Result<(), TermError> {
        if *t.ty() != var.ty {
            return Err(TermError::IllTypedBinding {
                var: var.name.to_string(),
                expected: var.ty.clone(),
                found: t.ty().clone(),
            });
        }
        self.map.insert(var.name.clone(), t);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.map.get(name)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.map.iter().map(|(k, v)| (&**k, v))
    }

    /// Simultaneous replacement. A variable-headed application `x u` with
    /// `x := h v` becomes the flat spine `h v u`.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() || t.is_ground() {
            return t.clone();
        }
        let args: Vec<Term> = t.args().iter().map(|a| self.apply(a)).collect();
        match t.head() {
            Head::Var(v) => match self.map.get(&v.name) {
                Some(b) => b.apply(args).expect("type-preserving substitution"),
                None => t.with_args(args),
            },
            _ => t.with_args(args),
        }
    }
}

/// First-order syntactic matching of `pattern` against `t`. Repeated
/// variables must bind equal terms.
pub fn match_term(pattern: &Term, t: &Term) -> Option<Substitution> {
    let mut s = Substitution::new();
    if match_into(pattern, t, &mut s) {
        Some(s)
    } else {
        None
    }
}

pub fn match_into(p: &Term, t: &Term, s: &mut Substitution) -> bool {
    if p.ty() != t.ty() {
        return false;
    }
    match p.head() {
        Head::Var(v) if p.args().is_empty() => match s.map.get(&v.name) {
            Some(b) => b == t,
            None => {
                s.map.insert(v.name.clone(), t.clone());
                true
            }
        },
        Head::Var(_) => false,
        Head::Sym(f) => match t.head() {
            Head::Sym(g) if f == g && p.args().len() == t.args().len() => {
                p.args().iter().zip(t.args()).all(|(a, b)| match_into(a, b, s))
            }
            _ => false,
        },
        Head::Pair => t.is_pair() && p.args().iter().zip(t.args()).all(|(a, b)| match_into(a, b, s)),
    }
}

/// Matches the argument patterns of a rule against a prefix of arguments.
pub fn match_args(patterns: &[Term], args: &[Term]) -> Option<Substitution> {
    if patterns.len() > args.len() {
        return None;
    }
    let mut s = Substitution::new();
    for (p, a) in patterns.iter().zip(args) {
        if !match_into(p, a, &mut s) {
            return None;
        }
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn list_sig() -> (Symbol, Symbol, Symbol, Symbol, Symbol) {
        let symb = Type::sort("symb");
        let list = Type::sort("list");
        let zero = Symbol::new("0", symb.clone(), SymbolKind::Constructor);
        let one = Symbol::new("1", symb.clone(), SymbolKind::Constructor);
        let nil = Symbol::new("[]", list.clone(), SymbolKind::Constructor);
        let cons = Symbol::new(
            "cons",
            Type::arrows([symb.clone(), list.clone()], list.clone()),
            SymbolKind::Constructor,
        );
        let succ = Symbol::new("succ", Type::arrow(list.clone(), list), SymbolKind::Defined);
        (zero, one, nil, cons, succ)
    }

    fn cons(c: &Symbol, h: Term, t: Term) -> Term {
        Term::app(c, vec![h, t]).unwrap()
    }

    #[test]
    fn subterms_exclude_heads() {
        let (zero, one, nil, c, succ) = list_sig();
        let l = cons(&c, Term::sym(&zero), cons(&c, Term::sym(&one), Term::sym(&nil)));
        let t = Term::app(&succ, vec![l.clone()]).unwrap();
        let subs = t.subterms();
        assert!(subs.contains(&cons(&c, Term::sym(&one), Term::sym(&nil))));
        assert!(!subs.contains(&Term::sym(&succ)));
        assert!(subs.contains(&l));
        assert_eq!(t.classify(), Class::Basic);
        assert_eq!(l.classify(), Class::Data);
        let partial = Term::app(&c, vec![Term::sym(&zero)]).unwrap();
        assert_eq!(partial.classify(), Class::Other);
        assert_eq!(partial.ty().to_string(), "list => list");
    }

    #[test]
    fn match_then_apply_round_trips() {
        let (zero, one, nil, c, _) = list_sig();
        let x = Variable::new("x", Type::sort("symb"));
        let xs = Variable::new("xs", Type::sort("list"));
        let pat = cons(&c, Term::var(&x), Term::var(&xs));
        let t = cons(&c, Term::sym(&one), cons(&c, Term::sym(&zero), Term::sym(&nil)));
        let s = match_term(&pat, &t).unwrap();
        assert_eq!(s.get("x").unwrap(), &Term::sym(&one));
        assert_eq!(s.apply(&pat), t);
    }

    #[test]
    fn non_linear_match_checks_equality() {
        let (zero, one, nil, c, _) = list_sig();
        let list = Type::sort("list");
        let eq = Symbol::new("equal", Type::arrows([list.clone(), list.clone()], Type::sort("bool")), SymbolKind::Defined);
        let xl = Variable::new("xl", list);
        let pat = Term::app(&eq, vec![Term::var(&xl), Term::var(&xl)]).unwrap();
        let a = cons(&c, Term::sym(&zero), Term::sym(&nil));
        let b = cons(&c, Term::sym(&one), Term::sym(&nil));
        assert!(match_term(&pat, &Term::app(&eq, vec![a.clone(), b]).unwrap()).is_none());
        assert!(match_term(&pat, &Term::app(&eq, vec![a.clone(), a]).unwrap()).is_some());
    }

    #[test]
    fn substitution_flattens_variable_heads() {
        let (zero, _, _, c, _) = list_sig();
        let symb = Type::sort("symb");
        let list = Type::sort("list");
        let f = Variable::new("F", Type::arrow(list.clone(), list.clone()));
        let y = Variable::new("y", list.clone());
        let t = Term::var(&f).apply([Term::var(&y)]).unwrap();
        let mut s = Substitution::new();
        s.insert(&f, Term::app(&c, vec![Term::sym(&zero)]).unwrap()).unwrap();
        let out = s.apply(&t);
        assert_eq!(out.head_symbol().unwrap().name(), "cons");
        assert_eq!(out.args().len(), 2);
        assert_eq!(out.ty(), &list);
        let bad = s.insert(&y, Term::sym(&zero));
        assert!(bad.is_err());
        let _ = symb;
    }
}
