use std::fmt::Write;

use crate::atrs::Atrs;
use crate::term::{Head, Term, SymbolKind};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    Top,
    Arg,
    ConsHead,
}

fn is_cons_sugar(t: &Term) -> bool {
    matches!(t.head(), Head::Sym(s) if s.name() == "cons") && t.args().len() == 2
}

fn write_term(out: &mut String, t: &Term, ctx: Ctx) {
    if t.is_pair() {
        out.push('(');
        let mut cur = t;
        loop {
            write_term(out, &cur.args()[0], Ctx::Top);
            out.push_str(", ");
            let r = &cur.args()[1];
            if r.is_pair() {
                cur = r;
            } else {
                write_term(out, r, Ctx::Top);
                break;
            }
        }
        out.push(')');
        return;
    }
    if is_cons_sugar(t) {
        let paren = ctx != Ctx::Top;
        if paren {
            out.push('(');
        }
        write_term(out, &t.args()[0], Ctx::ConsHead);
        out.push_str(" ; ");
        write_term(out, &t.args()[1], Ctx::Top);
        if paren {
            out.push(')');
        }
        return;
    }
    let name: &str = match t.head() {
        Head::Sym(s) => s.name(),
        Head::Var(v) => &v.name,
        Head::Pair => unreachable!(),
    };
    if t.args().is_empty() {
        out.push_str(name);
        return;
    }
    let paren = ctx == Ctx::Arg;
    if paren {
        out.push('(');
    }
    out.push_str(name);
    for a in t.args() {
        out.push(' ');
        write_term(out, a, Ctx::Arg);
    }
    if paren {
        out.push(')');
    }
}

/// Source syntax for a term, using the list sugar for `cons`.
pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, Ctx::Top);
    s
}

/// Prints a system; `note(i)` may return a comment placed before rule `i`.
pub fn print_atrs_annotated(atrs: &Atrs, note: &dyn Fn(usize) -> Option<String>) -> String {
    let mut out = String::new();
    if atrs.pairing() {
        out.push_str("pairing ;\n");
    }
    let sig = atrs.signature();
    if !sig.sorts().is_empty() {
        out.push_str("sort");
        for s in sig.sorts() {
            write!(out, " {s}").unwrap();
        }
        out.push_str(" ;\n");
    }
    for s in sig.symbols() {
        let kw = match s.kind() {
            SymbolKind::Constructor => "cons",
            SymbolKind::Defined => "fun",
        };
        writeln!(out, "{kw} {} : {} ;", s.name(), s.ty()).unwrap();
    }
    for (v, t) in atrs.var_decls() {
        writeln!(out, "var {v} : {t} ;").unwrap();
    }
    if !atrs.rules().is_empty() && !out.is_empty() {
        out.push('\n');
    }
    for (i, r) in atrs.rules().iter().enumerate() {
        if let Some(n) = note(i) {
            for line in n.lines() {
                writeln!(out, "// {line}").unwrap();
            }
        }
        out.push_str("rule ");
        if r.labelled {
            write!(out, "{} : ", r.name).unwrap();
        }
        writeln!(out, "{} -> {} ;", print_term(&r.lhs), print_term(&r.rhs)).unwrap();
    }
    out
}

pub fn print_atrs(atrs: &Atrs) -> String {
    print_atrs_annotated(atrs, &|_| None)
}
