//! Recursive-descent parser and type elaboration for `.atrs` files.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use super::lexer::{tokenize, Span, Tok, Token};
use crate::atrs::{Atrs, AtrsError, Rule, Signature};
use crate::term::{Symbol, SymbolKind, Term, Variable};
use crate::types::Type;

pub const KEYWORDS: [&str; 5] = ["sort", "fun", "var", "pairing", "rule"];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    TypeMismatch { expected: String, found: String },
    #[error("the type of variable `{0}` is not determined")]
    AmbiguousVariableType(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("unknown sort `{0}`")]
    UnknownSort(String),
    #[error("products and pairs need the `pairing` directive")]
    ProductsDisabled,
    #[error("variable `{0}` does not occur on the left side")]
    UnboundVariable(String),
    #[error("left side must be headed by a function symbol")]
    BadLeftSide,
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.kind)
    }
}

fn err<T>(kind: ParseErrorKind, span: Span) -> Result<T, ParseError> {
    Err(ParseError { kind, span })
}

#[derive(Clone, Debug)]
pub enum RawType {
    Name(String, Span),
    Arrow(Box<RawType>, Box<RawType>),
    Product(Box<RawType>, Box<RawType>),
}

#[derive(Clone, Debug)]
pub enum RawTerm {
    Ident(String, Span),
    App(Box<RawTerm>, Vec<RawTerm>, Span),
    /// Two or more components, right-nested.
    Tuple(Vec<RawTerm>, Span),
    Cons(Box<RawTerm>, Box<RawTerm>, Span),
}

impl RawTerm {
    pub fn span(&self) -> Span {
        match self {
            RawTerm::Ident(_, s) | RawTerm::App(_, _, s) | RawTerm::Tuple(_, s) | RawTerm::Cons(_, _, s) => *s,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Item {
    Sort(Vec<(String, Span)>),
    Symbol { name: String, ty: RawType, kind: SymbolKind, span: Span },
    Var { name: String, ty: RawType, span: Span },
    Pairing(Span),
    Rule { label: Option<String>, lhs: RawTerm, rhs: RawTerm, span: Span },
}

/// The abstract syntax of a file before elaboration.
#[derive(Clone, Debug, Default)]
pub struct SourceFile {
    pub items: Vec<Item>,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Parser {
        Parser { toks: tokenize(src), pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        err(ParseErrorKind::Syntax { expected: expected.to_string(), found: self.peek().to_string() }, self.span())
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<Span, ParseError> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.to_string())
        }
    }

    pub(crate) fn ident(&mut self) -> Result<(String, Span), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let sp = self.bump().span;
                Ok((s, sp))
            }
            _ => self.unexpected("an identifier"),
        }
    }

    pub(crate) fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    fn name(&mut self) -> Result<(String, Span), ParseError> {
        let (n, sp) = self.ident()?;
        if KEYWORDS.contains(&n.as_str()) {
            return err(ParseErrorKind::Reserved(n), sp);
        }
        Ok((n, sp))
    }

    fn file(&mut self) -> Result<SourceFile, ParseError> {
        let mut items = Vec::new();
        while !self.at_eof() {
            items.push(self.item()?);
        }
        Ok(SourceFile { items })
    }

    fn item(&mut self) -> Result<Item, ParseError> {
        let span = self.span();
        let kw = match self.peek_ident() {
            Some(k) => k.to_string(),
            None => return self.unexpected("a declaration or rule"),
        };
        match kw.as_str() {
            "sort" => {
                self.bump();
                let mut names = vec![self.name()?];
                while *self.peek() != Tok::Semi {
                    names.push(self.name()?);
                }
                self.expect(Tok::Semi)?;
                Ok(Item::Sort(names))
            }
            "cons" | "fun" | "var" => {
                self.bump();
                let (name, _) = self.name()?;
                self.expect(Tok::Colon)?;
                let ty = self.ty()?;
                self.expect(Tok::Semi)?;
                Ok(match kw.as_str() {
                    "cons" => Item::Symbol { name, ty, kind: SymbolKind::Constructor, span },
                    "fun" => Item::Symbol { name, ty, kind: SymbolKind::Defined, span },
                    _ => Item::Var { name, ty, span },
                })
            }
            "pairing" => {
                self.bump();
                self.expect(Tok::Semi)?;
                Ok(Item::Pairing(span))
            }
            "rule" => {
                self.bump();
                let label = match (self.peek(), self.peek_at(1)) {
                    (Tok::Ident(_), Tok::Colon) => {
                        let (l, _) = self.name()?;
                        self.bump();
                        Some(l)
                    }
                    _ => None,
                };
                let lhs = self.term()?;
                self.expect(Tok::Arrow)?;
                let rhs = self.term()?;
                self.expect(Tok::Semi)?;
                Ok(Item::Rule { label, lhs, rhs, span })
            }
            _ => self.unexpected("a declaration or rule"),
        }
    }

    fn ty(&mut self) -> Result<RawType, ParseError> {
        let left = self.ty_product()?;
        if *self.peek() == Tok::FatArrow {
            self.bump();
            let right = self.ty()?;
            return Ok(RawType::Arrow(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn ty_product(&mut self) -> Result<RawType, ParseError> {
        let left = self.ty_atom()?;
        if *self.peek() == Tok::Star {
            self.bump();
            let right = self.ty_product()?;
            return Ok(RawType::Product(Box::new(left), Box::new(right)));
        }
        Ok(left)
    }

    fn ty_atom(&mut self) -> Result<RawType, ParseError> {
        match self.peek() {
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let (n, sp) = self.name()?;
                Ok(RawType::Name(n, sp))
            }
            _ => self.unexpected("a type"),
        }
    }

    /// Whether a `;` at the cursor ends the statement rather than building a list.
    fn semi_terminates(&self) -> bool {
        match self.peek_at(1) {
            Tok::Eof => true,
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => true,
            Tok::Ident(s) if s == "cons" => {
                matches!((self.peek_at(2), self.peek_at(3)), (Tok::Ident(_), Tok::Colon))
            }
            _ => false,
        }
    }

    pub(crate) fn term(&mut self) -> Result<RawTerm, ParseError> {
        let head = self.app()?;
        if *self.peek() == Tok::Semi && !self.semi_terminates() {
            let sp = self.bump().span;
            let tail = self.term()?;
            return Ok(RawTerm::Cons(Box::new(head), Box::new(tail), sp));
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => !KEYWORDS.contains(&s.as_str()),
            _ => false,
        }
    }

    fn app(&mut self) -> Result<RawTerm, ParseError> {
        let sp = self.span();
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        if args.is_empty() {
            Ok(head)
        } else {
            Ok(RawTerm::App(Box::new(head), args, sp))
        }
    }

    fn atom(&mut self) -> Result<RawTerm, ParseError> {
        match self.peek() {
            Tok::LParen => {
                let sp = self.bump().span;
                let first = self.term()?;
                if *self.peek() == Tok::Comma {
                    let mut parts = vec![first];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        parts.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                    return Ok(RawTerm::Tuple(parts, sp));
                }
                self.expect(Tok::RParen)?;
                Ok(first)
            }
            Tok::Ident(_) => {
                let (n, sp) = self.name()?;
                Ok(RawTerm::Ident(n, sp))
            }
            _ => self.unexpected("a term"),
        }
    }
}

pub fn parse_source(src: &str) -> Result<SourceFile, ParseError> {
    Parser::new(src).file()
}

// ---------------------------------------------------------------------------
// Type inference

#[derive(Clone, Debug, PartialEq, Eq)]
enum Ty {
    Meta(usize),
    Sort(Arc<str>),
    Arrow(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
}

impl Ty {
    fn from_type(t: &Type) -> Ty {
        use crate::types::TypeKind;
        match t.kind() {
            TypeKind::Sort(s) => Ty::Sort(s.clone()),
            TypeKind::Arrow(a, b) => Ty::Arrow(Box::new(Ty::from_type(a)), Box::new(Ty::from_type(b))),
            TypeKind::Product(a, b) => Ty::Prod(Box::new(Ty::from_type(a)), Box::new(Ty::from_type(b))),
        }
    }
}

#[derive(Default)]
struct Unifier {
    slots: Vec<Option<Ty>>,
}

impl Unifier {
    fn fresh(&mut self) -> Ty {
        self.slots.push(None);
        Ty::Meta(self.slots.len() - 1)
    }

    fn resolve(&self, t: &Ty) -> Ty {
        let mut cur = t.clone();
        while let Ty::Meta(m) = cur {
            match &self.slots[m] {
                Some(next) => cur = next.clone(),
                None => return Ty::Meta(m),
            }
        }
        cur
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.resolve(t) {
            Ty::Meta(n) => n == m,
            Ty::Sort(_) => false,
            Ty::Arrow(a, b) | Ty::Prod(a, b) => self.occurs(m, &a) || self.occurs(m, &b),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        let (a, b) = (self.resolve(a), self.resolve(b));
        match (&a, &b) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => true,
            (Ty::Meta(m), other) | (other, Ty::Meta(m)) => {
                if self.occurs(*m, other) {
                    return false;
                }
                self.slots[*m] = Some(other.clone());
                true
            }
            (Ty::Sort(x), Ty::Sort(y)) => x == y,
            (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) | (Ty::Prod(a1, b1), Ty::Prod(a2, b2)) => {
                self.unify(a1, a2) && self.unify(b1, b2)
            }
            _ => false,
        }
    }

    fn zonk(&self, t: &Ty) -> Option<Type> {
        match self.resolve(t) {
            Ty::Meta(_) => None,
            Ty::Sort(s) => Some(Type::sort(&s)),
            Ty::Arrow(a, b) => Some(Type::arrow(self.zonk(&a)?, self.zonk(&b)?)),
            Ty::Prod(a, b) => Some(Type::product(self.zonk(&a)?, self.zonk(&b)?)),
        }
    }

    fn show(&self, t: &Ty) -> String {
        match self.resolve(t) {
            Ty::Meta(m) => format!("?{m}"),
            Ty::Sort(s) => s.to_string(),
            Ty::Arrow(a, b) => {
                let l = self.show(&a);
                let l = if matches!(self.resolve(&a), Ty::Arrow(..)) { format!("({l})") } else { l };
                format!("{l} => {}", self.show(&b))
            }
            Ty::Prod(a, b) => {
                let l = self.show(&a);
                let l = if matches!(self.resolve(&a), Ty::Arrow(..) | Ty::Prod(..)) { format!("({l})") } else { l };
                let r = self.show(&b);
                let r = if matches!(self.resolve(&b), Ty::Arrow(..)) { format!("({r})") } else { r };
                format!("{l} * {r}")
            }
        }
    }
}

enum EHead {
    Sym(Symbol),
    Var(String),
    Pair,
}

struct ETerm {
    head: EHead,
    args: Vec<ETerm>,
    ty: Ty,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarMode {
    /// Unknown identifiers become variables (rule left sides, free-standing terms).
    Introduce,
    /// Only variables already introduced may be used (rule right sides).
    Closed,
    /// No variables at all (ground command-line terms).
    Ground,
}

/// Context for typing terms against a signature.
pub struct Elaborator<'a> {
    sig: &'a Signature,
    var_decls: &'a IndexMap<Arc<str>, Type>,
    pairing: bool,
    uni: Unifier,
    vars: HashMap<String, (Ty, Span)>,
    var_order: Vec<String>,
}

impl<'a> Elaborator<'a> {
    pub fn new(sig: &'a Signature, var_decls: &'a IndexMap<Arc<str>, Type>, pairing: bool) -> Elaborator<'a> {
        Elaborator { sig, var_decls, pairing, uni: Unifier::default(), vars: HashMap::new(), var_order: Vec::new() }
    }

    fn reset(&mut self) {
        self.uni = Unifier::default();
        self.vars.clear();
        self.var_order.clear();
    }

    fn infer(&mut self, t: &RawTerm, mode: VarMode) -> Result<ETerm, ParseError> {
        match t {
            RawTerm::Ident(name, sp) => {
                if let Some(sym) = self.sig.get(name) {
                    return Ok(ETerm { head: EHead::Sym(sym.clone()), args: vec![], ty: Ty::from_type(sym.ty()) });
                }
                if let Some((ty, _)) = self.vars.get(name) {
                    return Ok(ETerm { head: EHead::Var(name.clone()), args: vec![], ty: ty.clone() });
                }
                match mode {
                    VarMode::Introduce => {
                        let ty = match self.var_decls.get(name.as_str()) {
                            Some(t) => Ty::from_type(t),
                            None => self.uni.fresh(),
                        };
                        self.vars.insert(name.clone(), (ty.clone(), *sp));
                        self.var_order.push(name.clone());
                        Ok(ETerm { head: EHead::Var(name.clone()), args: vec![], ty })
                    }
                    VarMode::Closed if self.var_decls.contains_key(name.as_str()) => {
                        err(ParseErrorKind::UnboundVariable(name.clone()), *sp)
                    }
                    _ => err(ParseErrorKind::UndeclaredSymbol(name.clone()), *sp),
                }
            }
            RawTerm::App(head, args, _) => {
                let mut h = self.infer(head, mode)?;
                for a in args {
                    let ea = self.infer(a, mode)?;
                    let fty = self.uni.resolve(&h.ty);
                    let res = match fty {
                        Ty::Arrow(d, c) => {
                            if !self.uni.unify(&d, &ea.ty) {
                                return err(
                                    ParseErrorKind::TypeMismatch { expected: self.uni.show(&d), found: self.uni.show(&ea.ty) },
                                    a.span(),
                                );
                            }
                            *c
                        }
                        Ty::Meta(_) => {
                            let c = self.uni.fresh();
                            let want = Ty::Arrow(Box::new(ea.ty.clone()), Box::new(c.clone()));
                            self.uni.unify(&fty, &want);
                            c
                        }
                        other => {
                            return err(
                                ParseErrorKind::TypeMismatch {
                                    expected: "a function".to_string(),
                                    found: self.uni.show(&other),
                                },
                                a.span(),
                            )
                        }
                    };
                    h.args.push(ea);
                    h.ty = res;
                }
                Ok(h)
            }
            RawTerm::Tuple(parts, sp) => {
                if !self.pairing {
                    return err(ParseErrorKind::ProductsDisabled, *sp);
                }
                let mut items = parts.iter().map(|p| self.infer(p, mode)).collect::<Result<Vec<_>, _>>()?;
                let mut acc = items.pop().expect("tuples have two or more parts");
                while let Some(l) = items.pop() {
                    let ty = Ty::Prod(Box::new(l.ty.clone()), Box::new(acc.ty.clone()));
                    acc = ETerm { head: EHead::Pair, args: vec![l, acc], ty };
                }
                Ok(acc)
            }
            RawTerm::Cons(h, tl, sp) => {
                let cons = RawTerm::Ident("cons".to_string(), *sp);
                if self.sig.get("cons").is_none() {
                    return err(ParseErrorKind::UndeclaredSymbol("cons".into()), *sp);
                }
                let app = RawTerm::App(Box::new(cons), vec![(**h).clone(), (**tl).clone()], *sp);
                self.infer(&app, mode)
            }
        }
    }

    fn var_type(&self, name: &str) -> Result<Type, ParseError> {
        let (ty, sp) = &self.vars[name];
        self.uni.zonk(ty).ok_or(ParseError { kind: ParseErrorKind::AmbiguousVariableType(name.to_string()), span: *sp })
    }

    fn check_vars(&self) -> Result<(), ParseError> {
        for v in &self.var_order {
            self.var_type(v)?;
        }
        Ok(())
    }

    fn build(&self, e: &ETerm) -> Result<Term, ParseError> {
        let args = e.args.iter().map(|a| self.build(a)).collect::<Result<Vec<_>, _>>()?;
        let base = match &e.head {
            EHead::Sym(s) => Term::sym(s),
            EHead::Var(n) => Term::var(&Variable::new(n, self.var_type(n)?)),
            EHead::Pair => {
                let mut it = args.into_iter();
                return Ok(Term::pair(it.next().unwrap(), it.next().unwrap()));
            }
        };
        Ok(base.apply(args).expect("elaborated terms are well typed"))
    }

    /// Types a free-standing term; unknown identifiers are variables.
    pub fn term(&mut self, raw: &RawTerm) -> Result<Term, ParseError> {
        self.reset();
        let e = self.infer(raw, VarMode::Introduce)?;
        self.check_vars()?;
        self.build(&e)
    }

    /// Types a ground term; unknown identifiers are errors.
    pub fn ground_term(&mut self, raw: &RawTerm) -> Result<Term, ParseError> {
        self.reset();
        let e = self.infer(raw, VarMode::Ground)?;
        self.build(&e)
    }

    fn rule(&mut self, lhs: &RawTerm, rhs: &RawTerm, span: Span) -> Result<(Term, Term), ParseError> {
        self.reset();
        let l = self.infer(lhs, VarMode::Introduce)?;
        if !matches!(l.head, EHead::Sym(_)) {
            return err(ParseErrorKind::BadLeftSide, lhs.span());
        }
        let r = self.infer(rhs, VarMode::Closed)?;
        if !self.uni.unify(&l.ty, &r.ty) {
            return err(ParseErrorKind::TypeMismatch { expected: self.uni.show(&l.ty), found: self.uni.show(&r.ty) }, span);
        }
        self.check_vars()?;
        Ok((self.build(&l)?, self.build(&r)?))
    }
}

fn resolve_type(raw: &RawType, sig: &Signature, pairing: bool) -> Result<Type, ParseError> {
    match raw {
        RawType::Name(n, sp) => {
            if !sig.has_sort(n) {
                return err(ParseErrorKind::UnknownSort(n.clone()), *sp);
            }
            Ok(Type::sort(n))
        }
        RawType::Arrow(a, b) => Ok(Type::arrow(resolve_type(a, sig, pairing)?, resolve_type(b, sig, pairing)?)),
        RawType::Product(a, b) => {
            if !pairing {
                return err(ParseErrorKind::ProductsDisabled, raw_type_span(a));
            }
            Ok(Type::product(resolve_type(a, sig, pairing)?, resolve_type(b, sig, pairing)?))
        }
    }
}

fn raw_type_span(t: &RawType) -> Span {
    match t {
        RawType::Name(_, s) => *s,
        RawType::Arrow(a, _) | RawType::Product(a, _) => raw_type_span(a),
    }
}

/// Elaborates a parsed file into a checked system.
pub fn elaborate(file: &SourceFile) -> Result<Atrs, ParseError> {
    let pairing = file.items.iter().any(|i| matches!(i, Item::Pairing(_)));
    let mut sig = Signature::new();
    let mut var_decls: IndexMap<Arc<str>, Type> = IndexMap::new();
    for item in &file.items {
        if let Item::Sort(names) = item {
            for (n, sp) in names {
                if sig.add_sort(n).is_err() {
                    return err(ParseErrorKind::DuplicateDeclaration(n.clone()), *sp);
                }
            }
        }
    }
    for item in &file.items {
        match item {
            Item::Symbol { name, ty, kind, span } => {
                let t = resolve_type(ty, &sig, pairing)?;
                if sig.add_symbol(name, t, *kind).is_err() {
                    return err(ParseErrorKind::DuplicateDeclaration(name.clone()), *span);
                }
            }
            Item::Var { name, ty, span } => {
                let t = resolve_type(ty, &sig, pairing)?;
                if var_decls.insert(Arc::from(name.as_str()), t).is_some() {
                    return err(ParseErrorKind::DuplicateDeclaration(name.clone()), *span);
                }
            }
            _ => {}
        }
    }
    for name in var_decls.keys() {
        if sig.get(name).is_some() {
            let span = file
                .items
                .iter()
                .find_map(|i| match i {
                    Item::Var { name: n, span, .. } if **n == **name => Some(*span),
                    _ => None,
                })
                .unwrap_or_default();
            return err(ParseErrorKind::DuplicateDeclaration(name.to_string()), span);
        }
    }
    let mut rules = Vec::new();
    let mut el = Elaborator::new(&sig, &var_decls, pairing);
    for item in &file.items {
        if let Item::Rule { label, lhs, rhs, span } = item {
            let (l, r) = el.rule(lhs, rhs, *span)?;
            let idx = rules.len();
            rules.push(Rule {
                name: label.clone().unwrap_or_else(|| format!("r{}", idx + 1)),
                labelled: label.is_some(),
                lhs: l,
                rhs: r,
                span: Some(*span),
            });
        }
    }
    let spans: HashMap<String, Span> = rules.iter().map(|r| (r.name.clone(), r.span.unwrap_or_default())).collect();
    Atrs::new(sig, var_decls, rules, pairing).map_err(|e| {
        let span = match &e {
            AtrsError::RuleTypeMismatch { rule, .. }
            | AtrsError::BadLeftHead { rule }
            | AtrsError::UnboundRhsVariable { rule, .. }
            | AtrsError::DuplicateRuleName(rule) => spans.get(rule).copied().unwrap_or_default(),
            _ => Span::default(),
        };
        ParseError { kind: ParseErrorKind::Invalid(e.to_string()), span }
    })
}

pub fn parse_atrs(src: &str) -> Result<Atrs, ParseError> {
    elaborate(&parse_source(src)?)
}

pub fn parse_atrs_bytes(bytes: &[u8]) -> Result<Atrs, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(s) => parse_atrs(s),
        Err(e) => {
            let good = &bytes[..e.valid_up_to()];
            let line = 1 + good.iter().filter(|&&b| b == b'\n').count() as u32;
            let col = 1 + good.iter().rev().take_while(|&&b| b != b'\n').count() as u32;
            err(ParseErrorKind::InvalidUtf8, Span { line, col })
        }
    }
}

fn parse_raw_term(src: &str) -> Result<RawTerm, ParseError> {
    let mut p = Parser::new(src);
    let t = p.term()?;
    if !p.at_eof() {
        return p.unexpected("end of term");
    }
    Ok(t)
}

/// Parses a ground term against the signature of `atrs`.
pub fn parse_term(atrs: &Atrs, src: &str) -> Result<Term, ParseError> {
    let raw = parse_raw_term(src)?;
    Elaborator::new(atrs.signature(), atrs.var_decls(), atrs.pairing()).ground_term(&raw)
}

/// Parses a term that may contain variables; their types must be inferable.
pub fn parse_open_term(atrs: &Atrs, src: &str) -> Result<Term, ParseError> {
    let raw = parse_raw_term(src)?;
    Elaborator::new(atrs.signature(), atrs.var_decls(), atrs.pairing()).term(&raw)
}

/// The unique type of a term written in source syntax.
pub fn type_of(atrs: &Atrs, src: &str) -> Result<Type, ParseError> {
    parse_open_term(atrs, src).map(|t| t.ty().clone())
}
