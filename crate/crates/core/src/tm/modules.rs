//! Counting modules: numbers up to a bound P(|cs|) encoded as tuples of
//! terms, with seed (the maximum), pred, succ and a zero test.
//!
//! Generators write rule text into a [`Builder`]; symbols of a module
//! instance are named `<role>_<kind><pos>` where `pos` is the dotted path of
//! the instance inside the module expression (empty for the root), so
//! `prod(lin,lin)` uses `pred1_prod`, `pred1_lin.1` and `pred1_lin.2`.

use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;

use super::CompileError;
use crate::atrs::Atrs;
use crate::format::parse_atrs;
use crate::term::SymbolKind;
use crate::types::Type;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModuleExpr {
    Lin,
    Prod(Box<ModuleExpr>, Box<ModuleExpr>),
    Exp(Box<ModuleExpr>),
    E,
    ExpAB(u32, u32),
    PiPi(Box<ModuleExpr>),
}

impl ModuleExpr {
    pub fn kind(&self) -> &'static str {
        match self {
            ModuleExpr::Lin => "lin",
            ModuleExpr::Prod(..) => "prod",
            ModuleExpr::Exp(_) => "exp",
            ModuleExpr::E => "e",
            ModuleExpr::ExpAB(..) => "expab",
            ModuleExpr::PiPi(_) => "pipi",
        }
    }

    /// Type order of the generated rules.
    pub fn order(&self) -> usize {
        match self {
            ModuleExpr::Lin | ModuleExpr::E | ModuleExpr::ExpAB(..) => 1,
            ModuleExpr::Prod(a, b) => a.order().max(b.order()),
            ModuleExpr::Exp(m) => m.order() + 1,
            ModuleExpr::PiPi(m) => m.order(),
        }
    }

    /// Number of terms in a number representation.
    pub fn width(&self) -> usize {
        match self {
            ModuleExpr::Lin | ModuleExpr::Exp(_) => 1,
            ModuleExpr::E | ModuleExpr::ExpAB(..) | ModuleExpr::PiPi(_) => 2,
            ModuleExpr::Prod(a, b) => a.width() + b.width(),
        }
    }

    pub fn needs_pairing(&self) -> bool {
        match self {
            ModuleExpr::Lin | ModuleExpr::E => false,
            ModuleExpr::ExpAB(..) | ModuleExpr::PiPi(_) => true,
            ModuleExpr::Prod(a, b) => a.needs_pairing() || b.needs_pairing(),
            ModuleExpr::Exp(m) => m.needs_pairing(),
        }
    }

    /// The counting bound P(n), or `None` if it does not fit in a `u128`.
    pub fn bound(&self, n: u64) -> Option<u128> {
        let pow2 = |k: u128| if k < 128 { Some(1u128 << k) } else { None };
        match self {
            ModuleExpr::Lin => Some(n as u128 + 1),
            ModuleExpr::Prod(a, b) => a.bound(n)?.checked_mul(b.bound(n)?),
            ModuleExpr::Exp(m) => pow2(m.bound(n)?),
            ModuleExpr::E => pow2(n as u128 + 1),
            ModuleExpr::ExpAB(a, b) => {
                let base = (n as u128 + 1).checked_pow(*b)?;
                pow2((*a as u128).checked_mul(base)?)
            }
            // One bit per number of the inner module.
            ModuleExpr::PiPi(m) => pow2(m.bound(n)?),
        }
    }
}

impl fmt::Display for ModuleExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleExpr::Lin => f.write_str("lin"),
            ModuleExpr::E => f.write_str("e"),
            ModuleExpr::Prod(a, b) => write!(f, "prod({a},{b})"),
            ModuleExpr::Exp(m) => write!(f, "exp({m})"),
            ModuleExpr::ExpAB(a, b) => write!(f, "expab({a},{b})"),
            ModuleExpr::PiPi(m) => write!(f, "pipi({m})"),
        }
    }
}

struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
}

impl ExprParser<'_> {
    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn fail<T>(&self, what: &str) -> Result<T, CompileError> {
        Err(CompileError::BadModuleExpr(format!("expected {what} at offset {} in `{}`", self.pos, self.src)))
    }

    fn eat(&mut self, c: char) -> Result<(), CompileError> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(&format!("`{c}`"))
        }
    }

    fn word(&mut self) -> &str {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..].starts_with(|c: char| c.is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<u32, CompileError> {
        let w = self.word().to_string();
        w.parse().or_else(|_| self.fail("a number"))
    }

    fn expr(&mut self) -> Result<ModuleExpr, CompileError> {
        let w = self.word().to_string();
        Ok(match w.as_str() {
            "lin" => ModuleExpr::Lin,
            "e" => ModuleExpr::E,
            "prod" => {
                self.eat('(')?;
                let a = self.expr()?;
                self.eat(',')?;
                let b = self.expr()?;
                self.eat(')')?;
                ModuleExpr::Prod(Box::new(a), Box::new(b))
            }
            "exp" | "pipi" => {
                self.eat('(')?;
                let m = Box::new(self.expr()?);
                self.eat(')')?;
                if w == "pipi" && m.width() != 2 {
                    return Err(CompileError::BadModuleExpr(format!("pipi needs a module of width 2, `{m}` has {}", m.width())));
                }
                if w == "exp" {
                    ModuleExpr::Exp(m)
                } else {
                    ModuleExpr::PiPi(m)
                }
            }
            "expab" => {
                self.eat('(')?;
                let a = self.number()?;
                self.eat(',')?;
                let b = self.number()?;
                self.eat(')')?;
                if b == 0 {
                    return Err(CompileError::BadModuleExpr("expab needs b > 0".into()));
                }
                ModuleExpr::ExpAB(a, b)
            }
            _ => return self.fail("one of lin, e, prod, exp, expab, pipi"),
        })
    }
}

impl FromStr for ModuleExpr {
    type Err = CompileError;

    fn from_str(s: &str) -> Result<ModuleExpr, CompileError> {
        let mut p = ExprParser { src: s, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != s.len() {
            return p.fail("end of input");
        }
        Ok(e)
    }
}

// ---------------------------------------------------------------------------
// Rule text helpers

/// Whether `s` needs parentheses to be used as an argument.
fn compound(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if depth == 0 && (c.is_whitespace() || c == ';' || c == ',') => return true,
            _ => {}
        }
    }
    false
}

fn atom(s: &str) -> String {
    if compound(s) {
        format!("({s})")
    } else {
        s.to_string()
    }
}

/// `head a1 .. an`, parenthesizing compound arguments.
pub(crate) fn app<S: AsRef<str>>(head: &str, args: impl IntoIterator<Item = S>) -> String {
    let mut out = head.to_string();
    for a in args {
        out.push(' ');
        out.push_str(&atom(a.as_ref()));
    }
    out
}

/// A tuple term, or the single component itself.
pub(crate) fn tuple(items: &[String]) -> String {
    if items.len() == 1 {
        items[0].clone()
    } else {
        format!("({})", items.join(", "))
    }
}

/// Indexed variable names `x1 .. xa`.
pub(crate) fn vars(prefix: &str, a: usize) -> Vec<String> {
    (1..=a).map(|i| format!("{prefix}{i}")).collect()
}

fn cat(parts: &[&[String]]) -> Vec<String> {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn sort(s: &str) -> Type {
    Type::sort(s)
}

fn arrows(args: Vec<Type>, res: Type) -> Type {
    Type::arrows(args, res)
}

fn product(tys: &[Type]) -> Type {
    let mut it = tys.iter().rev();
    let mut acc = it.next().expect("non-empty product").clone();
    for t in it {
        acc = Type::product(t.clone(), acc);
    }
    acc
}

/// Identifier fragment for a type, used to name `ifelse` helpers.
fn mangle(ty: &Type) -> String {
    use crate::types::TypeKind;
    match ty.kind() {
        TypeKind::Sort(s) => s.to_string(),
        TypeKind::Arrow(a, b) => {
            let l = if a.is_arrow() { format!("[{}]", mangle(a)) } else { mangle(a) };
            format!("{l}~{}", mangle(b))
        }
        TypeKind::Product(a, b) => {
            let l = if a.is_sort() { mangle(a) } else { format!("[{}]", mangle(a)) };
            format!("{l}&{}", mangle(b))
        }
    }
}

/// Accumulates declarations and rules with a provenance note per rule.
pub(crate) struct Builder {
    pairing: bool,
    sorts: Vec<String>,
    decls: IndexMap<String, (Type, SymbolKind)>,
    rules: Vec<(String, String, String)>,
}

impl Builder {
    /// Sorts `symb`, `list`, `bool` with the list and boolean constructors
    /// and the given `symb` constants.
    pub(crate) fn new(pairing: bool, symbols: &[String]) -> Result<Builder, CompileError> {
        let mut b = Builder { pairing, sorts: Vec::new(), decls: IndexMap::new(), rules: Vec::new() };
        for s in ["symb", "list", "bool"] {
            b.sort(s);
        }
        for s in symbols {
            b.cons(s, sort("symb"))?;
        }
        b.cons("[]", sort("list"))?;
        b.cons("cons", arrows(vec![sort("symb"), sort("list")], sort("list")))?;
        b.cons("true", sort("bool"))?;
        b.cons("false", sort("bool"))?;
        Ok(b)
    }

    pub(crate) fn sort(&mut self, s: &str) {
        if !self.sorts.iter().any(|x| x == s) {
            self.sorts.push(s.to_string());
        }
    }

    pub(crate) fn cons(&mut self, name: &str, ty: Type) -> Result<(), CompileError> {
        if self.decls.contains_key(name) {
            return Err(CompileError::NameClash(name.to_string()));
        }
        self.decls.insert(name.to_string(), (ty, SymbolKind::Constructor));
        Ok(())
    }

    /// Declares a defined symbol; returns false if it already existed, in
    /// which case its rules must not be emitted again.
    pub(crate) fn fun(&mut self, name: &str, ty: Type) -> bool {
        match self.decls.get(name) {
            Some((t, SymbolKind::Defined)) => {
                debug_assert_eq!(*t, ty, "`{name}` declared at two types");
                false
            }
            Some(_) => panic!("`{name}` is already a constructor"),
            None => {
                self.decls.insert(name.to_string(), (ty, SymbolKind::Defined));
                true
            }
        }
    }

    pub(crate) fn has(&self, name: &str) -> bool {
        self.decls.contains_key(name)
    }

    pub(crate) fn rule(&mut self, prov: &str, lhs: String, rhs: String) {
        self.rules.push((lhs, rhs, prov.to_string()));
    }

    /// `ifelse_τ`, emitted once per type.
    pub(crate) fn ifelse(&mut self, ty: &Type) -> String {
        let name = format!("ifelse_{}", mangle(ty));
        let t = arrows(vec![sort("bool"), ty.clone(), ty.clone()], ty.clone());
        if self.fun(&name, t) {
            self.rule("if-then-else", app(&name, ["true", "y", "z"]), "y".into());
            self.rule("if-then-else", app(&name, ["false", "y", "z"]), "z".into());
        }
        name
    }

    pub(crate) fn not(&mut self) -> String {
        if self.fun("not", arrows(vec![sort("bool")], sort("bool"))) {
            self.rule("counting/exp: negation", "not true".into(), "false".into());
            self.rule("counting/exp: negation", "not false".into(), "true".into());
        }
        "not".to_string()
    }

    /// Renders the system; provenance notes become comments.
    pub(crate) fn text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        if self.pairing {
            out.push_str("pairing ;\n");
        }
        writeln!(out, "sort {} ;", self.sorts.join(" ")).unwrap();
        for (name, (ty, kind)) in &self.decls {
            let kw = match kind {
                SymbolKind::Constructor => "cons",
                SymbolKind::Defined => "fun",
            };
            writeln!(out, "{kw} {name} : {ty} ;").unwrap();
        }
        let mut last = "";
        for (lhs, rhs, prov) in &self.rules {
            if prov != last {
                writeln!(out, "\n// {prov}").unwrap();
                last = prov;
            }
            writeln!(out, "rule {lhs} -> {rhs} ;").unwrap();
        }
        out
    }

    /// Parses the accumulated text into a system plus per-rule provenance.
    pub(crate) fn finish(&self) -> Result<(Atrs, Vec<String>, String), CompileError> {
        let text = self.text();
        let atrs = parse_atrs(&text).map_err(|e| CompileError::Internal(format!("{e}")))?;
        let prov = self.rules.iter().map(|r| r.2.clone()).collect();
        Ok((atrs, prov, text))
    }
}

// ---------------------------------------------------------------------------
// Modules

/// The interface of a generated module instance.
#[derive(Clone, Debug)]
pub struct Manifest {
    /// `<kind><pos>`, the suffix of every symbol of the instance.
    pub name: String,
    /// Component types of a number representation.
    pub tys: Vec<Type>,
    pub seed: Vec<String>,
    pub pred: Vec<String>,
    pub succ: Vec<String>,
    pub zero: String,
    pub equal: String,
}

impl Manifest {
    pub fn width(&self) -> usize {
        self.tys.len()
    }

    pub(crate) fn seed_tuple(&self, cs: &str) -> Vec<String> {
        self.seed.iter().map(|s| app(s, [cs])).collect()
    }

    pub(crate) fn pred_tuple(&self, cs: &str, v: &[String]) -> Vec<String> {
        self.pred.iter().map(|s| app(s, cat(&[&[cs.to_string()], v]))).collect()
    }

    pub(crate) fn succ_tuple(&self, cs: &str, v: &[String]) -> Vec<String> {
        self.succ.iter().map(|s| app(s, cat(&[&[cs.to_string()], v]))).collect()
    }

    pub(crate) fn zero_call(&self, cs: &str, v: &[String]) -> String {
        app(&self.zero, cat(&[&[cs.to_string()], v]))
    }

    fn equal_call(&self, cs: &str, v: &[String], w: &[String]) -> String {
        app(&self.equal, cat(&[&[cs.to_string()], v, w]))
    }

    fn arg_types(&self) -> Vec<Type> {
        self.tys.clone()
    }
}

fn list() -> Type {
    sort("list")
}

fn boolean() -> Type {
    sort("bool")
}

/// Emits the rules for `expr` at instance path `pos`.
pub(crate) fn generate(b: &mut Builder, expr: &ModuleExpr, pos: &str) -> Manifest {
    let name = format!("{}{pos}", expr.kind());
    let sym = |role: &str| format!("{role}_{name}");
    match expr {
        ModuleExpr::Lin => {
            let prov = "counting/lin";
            let m = Manifest {
                name: name.clone(),
                tys: vec![list()],
                seed: vec![sym("seed1")],
                pred: vec![sym("pred1")],
                succ: vec![sym("succ1")],
                zero: sym("zero"),
                equal: sym("equal"),
            };
            b.fun(&m.seed[0], arrows(vec![list()], list()));
            b.fun(&m.pred[0], arrows(vec![list(), list()], list()));
            b.fun(&m.zero, arrows(vec![list(), list()], boolean()));
            b.rule(prov, app(&m.seed[0], ["cs"]), "cs".into());
            b.rule(prov, app(&m.pred[0], ["cs", "[]"]), "[]".into());
            b.rule(prov, app(&m.pred[0], ["cs", "x;xs"]), "xs".into());
            b.rule(prov, app(&m.zero, ["cs", "[]"]), "true".into());
            b.rule(prov, app(&m.zero, ["cs", "x;xs"]), "false".into());
            succ_support(b, &m);
            m
        }
        ModuleExpr::Prod(l, r) => {
            let pi = generate(b, l, &format!("{pos}.1"));
            let rho = generate(b, r, &format!("{pos}.2"));
            product_module(b, &pi, &rho, name)
        }
        ModuleExpr::Exp(inner) => {
            let pi = generate(b, inner, &format!("{pos}.1"));
            exp_module(b, &pi, name)
        }
        ModuleExpr::E => {
            let lin = generate(b, &ModuleExpr::Lin, &format!("{pos}.1"));
            let prov = "counting/e";
            let eq = sym("eqLen");
            b.fun(&eq, arrows(vec![list(), list()], boolean()));
            b.rule(prov, app(&eq, ["[]", "[]"]), "true".into());
            b.rule(prov, app(&eq, ["[]", "y;ys"]), "false".into());
            b.rule(prov, app(&eq, ["x;xs", "y;ys"]), app(&eq, ["xs", "ys"]));
            b.rule(prov, app(&eq, ["x;xs", "[]"]), "false".into());
            let ops = BaseOps {
                ty: list(),
                seed: lin.seed_tuple("cs").remove(0),
                zero: lin.zero.clone() + " cs",
                pred: lin.pred[0].clone() + " cs",
                eq,
                eq_cs: false,
            };
            bitstring_module(b, &ops, name, prov)
        }
        ModuleExpr::ExpAB(a, bb) => {
            let prov = "counting/expab";
            let width = *bb as usize + 1;
            let ty = product(&vec![list(); width]);
            let (seed, zero, pred, eq) = (sym("seedbase"), sym("zerobase"), sym("predbase"), sym("eqBase"));
            b.fun(&seed, arrows(vec![list()], ty.clone()));
            b.fun(&zero, arrows(vec![list(), ty.clone()], boolean()));
            b.fun(&pred, arrows(vec![list(), ty.clone()], ty.clone()));
            b.fun(&eq, arrows(vec![ty.clone(), ty.clone()], boolean()));
            let nils = vec!["[]".to_string(); width];
            // (xs0, .., xs(i-1), y;ys, [], .., []) and friends
            let shape = |pre: &str, i: usize, digit: &str, rest: &str| -> String {
                let mut v: Vec<String> = (0..i).map(|j| format!("{pre}{j}")).collect();
                v.push(digit.to_string());
                v.extend(std::iter::repeat(rest.to_string()).take(width - i - 1));
                tuple(&v)
            };
            let mut lead = "[]".to_string();
            for _ in 0..a.saturating_sub(1) {
                lead = format!("0;{lead}");
            }
            let mut seed_tuple = vec![lead];
            seed_tuple.extend(std::iter::repeat("c;zs".to_string()).take(width - 1));
            b.rule(prov, app(&seed, ["c;zs"]), tuple(&seed_tuple));
            b.rule(prov, app(&zero, ["cs".to_string(), tuple(&nils)]), "true".into());
            for i in 0..width {
                b.rule(prov, app(&zero, ["cs".to_string(), shape("xs", i, "y;ys", "[]")]), "false".into());
            }
            b.rule(prov, app(&pred, ["cs".to_string(), tuple(&nils)]), tuple(&nils));
            for i in 0..width {
                b.rule(
                    prov,
                    app(&pred, ["c;zs".to_string(), shape("xs", i, "y;ys", "[]")]),
                    shape("xs", i, "ys", "c;zs"),
                );
            }
            b.rule(prov, app(&eq, [tuple(&nils), tuple(&nils)]), "true".into());
            for i in 0..width {
                b.rule(prov, app(&eq, [shape("xs", i, "y;ys", "[]"), shape("zs", i, "[]", "[]")]), "false".into());
                b.rule(prov, app(&eq, [shape("xs", i, "[]", "[]"), shape("zs", i, "y;ys", "[]")]), "false".into());
                b.rule(
                    prov,
                    app(&eq, [shape("xs", i, "y;ys", "[]"), shape("zs", i, "n;ns", "[]")]),
                    app(&eq, [shape("xs", i, "ys", "[]"), shape("zs", i, "ns", "[]")]),
                );
            }
            let ops = BaseOps { ty, seed: app(&seed, ["cs"]), zero: zero + " cs", pred: pred + " cs", eq, eq_cs: false };
            bitstring_module(b, &ops, name, prov)
        }
        ModuleExpr::PiPi(inner) => {
            let pi = generate(b, inner, &format!("{pos}.1"));
            let prov = "counting/pipi";
            let a = pi.width();
            let ty = product(&pi.tys);
            let (seed, zero, pred, eq) = (sym("seedp"), sym("zerop"), sym("predp"), sym("eqBase"));
            b.fun(&seed, arrows(vec![list()], ty.clone()));
            b.fun(&zero, arrows(vec![list(), ty.clone()], boolean()));
            b.fun(&pred, arrows(vec![list(), ty.clone()], ty.clone()));
            b.fun(&eq, arrows(vec![list(), ty.clone(), ty.clone()], boolean()));
            let s = vars("s", a);
            let (nv, mv) = (vars("n", a), vars("m", a));
            b.rule(prov, app(&seed, ["cs"]), tuple(&pi.seed_tuple("cs")));
            b.rule(prov, app(&zero, ["cs".to_string(), tuple(&s)]), pi.zero_call("cs", &s));
            b.rule(prov, app(&pred, ["cs".to_string(), tuple(&s)]), tuple(&pi.pred_tuple("cs", &s)));
            b.rule(prov, app(&eq, ["cs".to_string(), tuple(&nv), tuple(&mv)]), pi.equal_call("cs", &nv, &mv));
            let ops = BaseOps { ty, seed: app(&seed, ["cs"]), zero: zero + " cs", pred: pred + " cs", eq, eq_cs: true };
            bitstring_module(b, &ops, name, prov)
        }
    }
}

/// Equality and successor expressed through seed, pred and zero.
fn succ_support(b: &mut Builder, m: &Manifest) {
    let prov = "counting/succ";
    let a = m.width();
    let name = &m.name;
    let tys = m.arg_types();
    let with = |pre: &[Type], post: &[Type], res: Type| {
        let mut v = pre.to_vec();
        v.extend(post.iter().cloned());
        arrows(v, res)
    };
    let (n, mv, mp) = (vars("n", a), vars("m", a), vars("mp", a));
    let bif = b.ifelse(&boolean());
    b.fun(&m.equal, with(&[list()], &cat_ty(&tys, &tys), boolean()));
    b.rule(
        prov,
        app(&m.equal, cat(&[&["cs".to_string()], &n, &mv])),
        app(
            &bif,
            [
                m.zero_call("cs", &n),
                m.zero_call("cs", &mv),
                app(&bif, [m.zero_call("cs", &mv), "false".into(), m.equal_call("cs", &m.pred_tuple("cs", &n), &m.pred_tuple("cs", &mv))]),
            ],
        ),
    );
    for i in 0..a {
        let (s1, s2, s3) = (m.succ[i].clone(), format!("succ2{}_{name}", i + 1), format!("succ3{}_{name}", i + 1));
        let ifi = b.ifelse(&tys[i]);
        b.fun(&s1, with(&[list()], &tys, tys[i].clone()));
        b.fun(&s2, with(&[list()], &cat_ty(&tys, &tys), tys[i].clone()));
        let mut s3_args = tys.clone();
        s3_args.push(tys[i].clone());
        s3_args.extend(tys.iter().cloned());
        b.fun(&s3, with(&[list()], &s3_args, tys[i].clone()));
        b.rule(prov, app(&s1, cat(&[&["cs".to_string()], &n])), app(&s2, cat(&[&["cs".to_string()], &n, &m.seed_tuple("cs")])));
        b.rule(
            prov,
            app(&s2, cat(&[&["cs".to_string()], &n, &mv])),
            app(
                &ifi,
                [
                    m.zero_call("cs", &mv),
                    app(&m.seed[i], ["cs"]),
                    app(&s3, cat(&[&["cs".to_string()], &n, &[mv[i].clone()], &m.pred_tuple("cs", &mv)])),
                ],
            ),
        );
        b.rule(
            prov,
            app(&s3, cat(&[&["cs".to_string()], &n, &[mv[i].clone()], &mp])),
            app(&ifi, [m.equal_call("cs", &n, &mp), mv[i].clone(), app(&s2, cat(&[&["cs".to_string()], &n, &mp]))]),
        );
    }
}

fn cat_ty(a: &[Type], b: &[Type]) -> Vec<Type> {
    a.iter().chain(b).cloned().collect()
}

fn product_module(b: &mut Builder, pi: &Manifest, rho: &Manifest, name: String) -> Manifest {
    let prov = "counting/product";
    let (a, bw) = (pi.width(), rho.width());
    let tys = cat_ty(&pi.tys, &rho.tys);
    let m = Manifest {
        name: name.clone(),
        tys: tys.clone(),
        seed: (1..=a + bw).map(|i| format!("seed{i}_{name}")).collect(),
        pred: (1..=a + bw).map(|i| format!("pred{i}_{name}")).collect(),
        succ: (1..=a + bw).map(|i| format!("succ{i}_{name}")).collect(),
        zero: format!("zero_{name}"),
        equal: format!("equal_{name}"),
    };
    let (u, v) = (vars("u", a), vars("v", bw));
    let uv = cat(&[&u, &v]);
    let cs = || "cs".to_string();
    let bif = b.ifelse(&boolean());
    for i in 0..a + bw {
        let ty = tys[i].clone();
        b.fun(&m.seed[i], arrows(vec![list()], ty.clone()));
        let rhs = if i < a { app(&pi.seed[i], ["cs"]) } else { app(&rho.seed[i - a], ["cs"]) };
        b.rule(prov, app(&m.seed[i], ["cs"]), rhs);
    }
    b.fun(&m.zero, arrows(cat_ty(&[list()], &tys), boolean()));
    b.rule(
        prov,
        app(&m.zero, cat(&[&[cs()], &uv])),
        app(&bif, [pi.zero_call("cs", &u), rho.zero_call("cs", &v), "false".into()]),
    );
    // The second test tells the (0,0) case apart, where pred must stay put.
    for i in 0..a + bw {
        let ty = tys[i].clone();
        let ptest = format!("ptest{}_{name}", i + 1);
        b.fun(&m.pred[i], arrows(cat_ty(&[list()], &tys), ty.clone()));
        b.fun(&ptest, arrows(cat_ty(&[list(), boolean(), boolean()], &tys), ty.clone()));
        b.rule(
            prov,
            app(&m.pred[i], cat(&[&[cs()], &uv])),
            app(&ptest, cat(&[&[cs(), rho.zero_call("cs", &v), pi.zero_call("cs", &u)], &uv])),
        );
        let (keep, down, stay) = if i < a {
            (u[i].clone(), pi.pred_tuple("cs", &u).remove(i), u[i].clone())
        } else {
            (rho.pred_tuple("cs", &v).remove(i - a), app(&rho.seed[i - a], ["cs"]), v[i - a].clone())
        };
        b.rule(prov, app(&ptest, cat(&[&[cs(), "false".into(), "b".into()], &uv])), keep);
        b.rule(prov, app(&ptest, cat(&[&[cs(), "true".into(), "false".into()], &uv])), down);
        b.rule(prov, app(&ptest, cat(&[&[cs(), "true".into(), "true".into()], &uv])), stay);
    }
    succ_support(b, &m);
    m
}

fn exp_module(b: &mut Builder, pi: &Manifest, name: String) -> Manifest {
    let prov = "counting/exp";
    let a = pi.width();
    let tau = arrows(pi.tys.clone(), boolean());
    let sym = |role: &str| format!("{role}_{name}");
    let m = Manifest {
        name: name.clone(),
        tys: vec![tau.clone()],
        seed: vec![sym("seed1")],
        pred: vec![sym("pred1")],
        succ: vec![sym("succ1")],
        zero: sym("zero"),
        equal: sym("equal"),
    };
    let (k, nv) = (vars("k", a), vars("n", a));
    let cs = || "cs".to_string();
    let sig = |pre: Vec<Type>, post: Vec<Type>, res: Type| arrows(cat_ty(&pre, &post), res);
    let bif = b.ifelse(&boolean());
    let not = b.not();
    let (zero2, predtest, predhelp, checkbit, flip) =
        (sym("zero'"), sym("predtest"), sym("predhelp"), sym("checkbit"), sym("flip"));
    b.fun(&m.seed[0], arrows(vec![list()], tau.clone()));
    b.fun(&m.zero, arrows(vec![list(), tau.clone()], boolean()));
    b.fun(&zero2, sig(vec![list()], cat_ty(&pi.tys, &[tau.clone()]), boolean()));
    b.fun(&m.pred[0], arrows(vec![list(), tau.clone()], tau.clone()));
    b.fun(&predtest, arrows(vec![list(), boolean(), tau.clone()], tau.clone()));
    b.fun(&predhelp, sig(vec![list(), tau.clone()], pi.tys.clone(), tau.clone()));
    b.fun(&checkbit, sig(vec![list(), boolean(), tau.clone()], pi.tys.clone(), tau.clone()));
    b.fun(&flip, sig(vec![list(), tau.clone()], pi.tys.clone(), tau.clone()));

    b.rule(prov, app(&m.seed[0], cat(&[&[cs()], &k])), "true".into());
    b.rule(prov, app(&m.zero, ["cs", "F"]), app(&zero2, cat(&[&[cs()], &pi.seed_tuple("cs"), &["F".to_string()]])));
    b.rule(
        prov,
        app(&zero2, cat(&[&[cs()], &k, &["F".to_string()]])),
        app(
            &bif,
            [
                app("F", &k),
                "false".into(),
                app(
                    &bif,
                    [
                        pi.zero_call("cs", &k),
                        "true".into(),
                        app(&zero2, cat(&[&[cs()], &pi.pred_tuple("cs", &k), &["F".to_string()]])),
                    ],
                ),
            ],
        ),
    );
    b.rule(prov, app(&m.pred[0], ["cs", "F"]), app(&predtest, ["cs".to_string(), app(&m.zero, ["cs", "F"]), "F".into()]));
    b.rule(prov, app(&predtest, ["cs", "true", "F"]), "F".into());
    b.rule(prov, app(&predtest, ["cs", "false", "F"]), app(&predhelp, cat(&[&[cs(), "F".into()], &pi.seed_tuple("cs")])));
    b.rule(
        prov,
        app(&predhelp, cat(&[&[cs(), "F".into()], &k])),
        app(&checkbit, cat(&[&[cs(), app("F", &k), app(&flip, cat(&[&[cs(), "F".into()], &k]))], &k])),
    );
    b.rule(prov, app(&checkbit, cat(&[&[cs(), "true".into(), "F".into()], &k])), "F".into());
    b.rule(
        prov,
        app(&checkbit, cat(&[&[cs(), "false".into(), "F".into()], &k])),
        app(&predhelp, cat(&[&[cs(), "F".into()], &pi.pred_tuple("cs", &k)])),
    );
    b.rule(
        prov,
        app(&flip, cat(&[&[cs(), "F".into()], &k, &nv])),
        app(&bif, [pi.equal_call("cs", &k, &nv), app(&not, [app("F", &nv)]), app("F", &nv)]),
    );
    succ_support(b, &m);
    m
}

/// What the bitstring construction needs from its underlying counter.
struct BaseOps {
    /// Type of a single base number.
    ty: Type,
    /// The largest base number, a term in `cs`.
    seed: String,
    /// Prefixes applied to one base number.
    zero: String,
    pred: String,
    /// Head of the equality test forcing its second argument.
    eq: String,
    /// Whether `eq` takes `cs` first.
    eq_cs: bool,
}

/// A bitstring `b0 .. bN` as a pair `(yss, zss)` of nondeterministic terms:
/// `yss` reduces to the base numbers whose bit is set, `zss` to the others.
fn bitstring_module(b: &mut Builder, ops: &BaseOps, name: String, prov: &str) -> Manifest {
    let sym = |role: &str| format!("{role}_{name}");
    let s = ops.ty.clone();
    let m = Manifest {
        name: name.clone(),
        tys: vec![s.clone(), s.clone()],
        seed: vec![sym("seed1"), sym("seed2")],
        pred: vec![sym("pred1"), sym("pred2")],
        succ: vec![sym("succ1"), sym("succ2")],
        zero: sym("zero"),
        equal: sym("equal"),
    };
    let (either, bot, all, bitset, check, zo, copy, addif, pr1, pr2) = (
        sym("either"),
        sym("bot"),
        sym("all"),
        sym("bitset"),
        sym("checkreducts"),
        sym("zo"),
        sym("copy"),
        sym("addif"),
        sym("pr1"),
        sym("pr2"),
    );
    let bif = b.ifelse(&boolean());
    let sif = b.ifelse(&s);
    let bit_args = |v: Vec<Type>| if ops.eq_cs { cat_ty(&[list()], &v) } else { v };
    b.fun(&either, arrows(vec![s.clone(), s.clone()], s.clone()));
    b.fun(&bot, s.clone());
    b.fun(&all, arrows(vec![list(), s.clone(), s.clone()], s.clone()));
    b.fun(&bitset, arrows(bit_args(vec![s.clone(), s.clone(), s.clone()]), boolean()));
    b.fun(&check, arrows(vec![boolean(), boolean()], boolean()));
    b.fun(&zo, arrows(vec![list(), s.clone(), s.clone(), s.clone()], boolean()));
    b.fun(&copy, arrows(vec![list(), s.clone(), s.clone(), s.clone(), boolean()], s.clone()));
    b.fun(&addif, arrows(vec![boolean(), s.clone(), s.clone()], s.clone()));
    b.fun(&pr1, arrows(vec![list(), s.clone(), s.clone(), s.clone()], s.clone()));
    b.fun(&pr2, arrows(vec![list(), s.clone(), s.clone(), s.clone()], s.clone()));
    for f in [&m.seed[0], &m.seed[1]] {
        b.fun(f, arrows(vec![list()], s.clone()));
    }
    for f in [&m.pred[0], &m.pred[1]] {
        b.fun(f, arrows(vec![list(), s.clone(), s.clone()], s.clone()));
    }
    b.fun(&m.zero, arrows(vec![list(), s.clone(), s.clone()], boolean()));

    let zero = |n: &str| app(&ops.zero, [n]);
    let pred = |n: &str| app(&ops.pred, [n]);
    let eq = |n: &str, q: &str| if ops.eq_cs { app(&ops.eq, ["cs", n, q]) } else { app(&ops.eq, [n, q]) };
    let bits = |n: &str, y: &str, z: &str| if ops.eq_cs { app(&bitset, ["cs", n, y, z]) } else { app(&bitset, [n, y, z]) };
    let ei = |n: &str, x: &str| app(&either, [n, x]);

    b.rule(prov, app(&either, ["n", "xss"]), "n".into());
    b.rule(prov, app(&either, ["n", "xss"]), "xss".into());
    b.rule(prov, bot.clone(), bot.clone());
    b.rule(prov, app(&m.seed[0], ["cs"]), app(&all, ["cs".to_string(), ops.seed.clone(), bot.clone()]));
    b.rule(prov, app(&m.seed[1], ["cs"]), bot.clone());
    b.rule(
        prov,
        app(&all, ["cs", "n", "xss"]),
        app(&sif, [zero("n"), ei("n", "xss"), app(&all, ["cs".to_string(), pred("n"), ei("n", "xss")])]),
    );
    let bit_lhs = if ops.eq_cs { app(&bitset, ["cs", "n", "yss", "zss"]) } else { app(&bitset, ["n", "yss", "zss"]) };
    b.rule(prov, bit_lhs, app(&check, [eq("n", "yss"), eq("n", "zss")]));
    b.rule(prov, app(&check, ["true", "b"]), "true".into());
    b.rule(prov, app(&check, ["b", "true"]), "false".into());
    b.rule(prov, app(&m.zero, ["cs", "yss", "zss"]), app(&zo, ["cs".to_string(), ops.seed.clone(), "yss".into(), "zss".into()]));
    b.rule(
        prov,
        app(&zo, ["cs", "n", "yss", "zss"]),
        app(
            &bif,
            [
                bits("n", "yss", "zss"),
                "false".into(),
                app(&bif, [zero("n"), "true".into(), app(&zo, ["cs".to_string(), pred("n"), "yss".into(), "zss".into()])]),
            ],
        ),
    );
    b.rule(
        prov,
        app(&copy, ["cs", "n", "yss", "zss", "false"]),
        app(&addif, [bits("n", "yss", "zss"), "n".into(), app(&copy, ["cs".to_string(), pred("n"), "yss".into(), "zss".into(), zero("n")])]),
    );
    b.rule(prov, app(&copy, ["cs", "n", "yss", "zss", "true"]), bot.clone());
    b.rule(prov, app(&addif, ["true", "n", "xss"]), ei("n", "xss"));
    b.rule(prov, app(&addif, ["false", "n", "xss"]), "xss".into());
    b.rule(
        prov,
        app(&m.pred[0], ["cs", "yss", "zss"]),
        app(&sif, [app(&m.zero, ["cs", "yss", "zss"]), "yss".into(), app(&pr1, ["cs".to_string(), ops.seed.clone(), "yss".into(), "zss".into()])]),
    );
    b.rule(
        prov,
        app(&m.pred[1], ["cs", "yss", "zss"]),
        app(&sif, [app(&m.zero, ["cs", "yss", "zss"]), "zss".into(), app(&pr2, ["cs".to_string(), ops.seed.clone(), "yss".into(), "zss".into()])]),
    );
    let copy_from = |y: &str, z: &str| app(&copy, ["cs".to_string(), pred("n"), y.into(), z.into(), zero("n")]);
    b.rule(
        prov,
        app(&pr1, ["cs", "n", "yss", "zss"]),
        app(
            &sif,
            [
                bits("n", "yss", "zss"),
                copy_from("yss", "zss"),
                ei("n", &app(&pr1, ["cs".to_string(), pred("n"), "yss".into(), "zss".into()])),
            ],
        ),
    );
    b.rule(
        prov,
        app(&pr2, ["cs", "n", "yss", "zss"]),
        app(
            &sif,
            [
                bits("n", "yss", "zss"),
                ei("n", &copy_from("zss", "yss")),
                app(&pr2, ["cs".to_string(), pred("n"), "yss".into(), "zss".into()]),
            ],
        ),
    );
    succ_support(b, &m);
    m
}

/// A generated module on its own, wrapped in a complete system.
#[derive(Clone, Debug)]
pub struct GeneratedModule {
    pub expr: ModuleExpr,
    pub manifest: Manifest,
    pub atrs: Atrs,
    /// One note per rule of `atrs`.
    pub provenance: Vec<String>,
    pub text: String,
}

impl GeneratedModule {
    /// The module as `.atrs` text, with a header naming the expression.
    pub fn to_text(&self) -> String {
        format!("// Counting module {}\n{}", self.expr, self.text)
    }
}

/// Generates the rules of a module expression over the symbols `0` and `1`.
pub fn gen_module(expr: &ModuleExpr, pairing: bool) -> Result<GeneratedModule, CompileError> {
    if expr.needs_pairing() && !pairing {
        return Err(CompileError::PairingRequired(expr.to_string()));
    }
    let mut b = Builder::new(pairing, &["0".to_string(), "1".to_string()])?;
    let manifest = generate(&mut b, expr, "");
    let (atrs, provenance, text) = b.finish()?;
    Ok(GeneratedModule { expr: expr.clone(), manifest, atrs, provenance, text })
}
