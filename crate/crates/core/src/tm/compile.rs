use std::fmt::Write;

use super::modules::{app, generate, vars, Builder, Manifest, ModuleExpr};
use super::{CompileError, Dir, TMachine, BLANK};
use crate::atrs::Atrs;
use crate::format::print_atrs_annotated;
use crate::types::Type;

/// Constructor used for the blank tape symbol.
pub const BLANK_CONS: &str = "B";

/// A Turing machine compiled to a cons-free system deciding its language
/// through `decide : list => bool`.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub atrs: Atrs,
    /// One note per rule of `atrs`.
    pub provenance: Vec<String>,
    pub expr: ModuleExpr,
    pub module: Manifest,
}

impl CompiledSystem {
    /// Tuple width of number representations.
    pub fn arity(&self) -> usize {
        self.module.width()
    }

    /// The system as `.atrs` text with a provenance comment per rule block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "// Turing machine simulation over counting module {}", self.expr).unwrap();
        let body = print_atrs_annotated(&self.atrs, &|i| {
            let prev = i.checked_sub(1).map(|j| &self.provenance[j]);
            (prev != Some(&self.provenance[i])).then(|| self.provenance[i].clone())
        });
        out.push_str(&body);
        out
    }
}

/// Names used as rule variables by the templates; machine symbols and
/// states must avoid them.
fn reserved_var(name: &str) -> bool {
    const FIXED: [&str; 22] = [
        "cs", "x", "xs", "y", "ys", "z", "zs", "q", "d", "a", "e", "b", "c", "n", "ns", "F", "s", "yss", "zss", "xss",
        "r", "w",
    ];
    if FIXED.contains(&name) {
        return true;
    }
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    stem.len() < name.len() && ["n", "m", "mp", "p", "u", "v", "k", "i", "s", "xs", "zs"].contains(&stem)
}

fn tape_cons(sym: &str) -> String {
    if sym == BLANK {
        BLANK_CONS.to_string()
    } else {
        sym.to_string()
    }
}

/// Compiles `tm` using the counting module `expr`. The machine's language is
/// decided correctly on inputs of length n whenever it halts within
/// `P(n) - 1` steps, where P is the module's bound.
pub fn compile_tm(tm: &TMachine, expr: &ModuleExpr, pairing: bool) -> Result<CompiledSystem, CompileError> {
    if expr.needs_pairing() && !pairing {
        return Err(CompileError::PairingRequired(expr.to_string()));
    }
    let symbols: Vec<String> = tm.tape.iter().map(|s| tape_cons(s)).collect();
    if tm.tape.iter().any(|s| s == BLANK_CONS) {
        return Err(CompileError::NameClash(BLANK_CONS.to_string()));
    }
    for s in ["0", "1"] {
        if !tm.input.iter().any(|i| i == s) {
            return Err(CompileError::NameClash(format!("input alphabet lacks `{s}`")));
        }
    }
    if let Some(bad) = symbols.iter().chain(&tm.states).find(|s| reserved_var(s)) {
        return Err(CompileError::NameClash(bad.clone()));
    }
    let mut b = Builder::new(pairing, &symbols)?;
    for s in ["state", "action", "dir"] {
        b.sort(s);
    }
    let st = Type::sort("state");
    let act = Type::sort("action");
    let symb = Type::sort("symb");
    let list = Type::sort("list");
    let boolean = Type::sort("bool");
    for q in &tm.states {
        b.cons(q, st.clone())?;
    }
    b.cons("fail", st.clone())?;
    b.cons("L", Type::sort("dir"))?;
    b.cons("R", Type::sort("dir"))?;
    b.cons("NA", act.clone())?;
    b.cons("action", Type::arrows(vec![symb.clone(), Type::sort("dir"), st.clone()], act.clone()))?;
    b.cons("end", Type::arrows(vec![st.clone()], act.clone()))?;

    let m = generate(&mut b, expr, "");
    let a = m.width();
    let num = m.tys.clone();
    let with = |pre: Vec<Type>, nums: usize, post: Vec<Type>, res: Type| {
        let mut v = pre;
        for _ in 0..nums {
            v.extend(num.iter().cloned());
        }
        v.extend(post);
        Type::arrows(v, res)
    };
    let fns = [
        ("transition", with(vec![list.clone()], 2, vec![], act.clone())),
        ("transitionhelp", Type::arrows(vec![st.clone(), symb.clone()], act.clone())),
        ("state", with(vec![list.clone()], 2, vec![], st.clone())),
        ("state0", with(vec![list.clone()], 1, vec![], st.clone())),
        ("statex", with(vec![list.clone()], 2, vec![], st.clone())),
        ("statexz", with(vec![list.clone()], 2, vec![], st.clone())),
        ("statey", Type::arrows(vec![act.clone(), act.clone(), act.clone()], st.clone())),
        ("stateyz", Type::arrows(vec![act.clone(), act.clone()], st.clone())),
        ("tape", with(vec![list.clone()], 2, vec![], symb.clone())),
        ("tapex", with(vec![list.clone()], 2, vec![], symb.clone())),
        ("tapey", with(vec![list.clone()], 2, vec![act.clone()], symb.clone())),
        ("inputtape", with(vec![list.clone()], 1, vec![], symb.clone())),
        ("get", with(vec![list.clone(), list.clone()], 1, vec![], symb.clone())),
        ("decide", Type::arrows(vec![list.clone()], boolean.clone())),
        ("findanswer", with(vec![list.clone(), st.clone()], 2, vec![], boolean.clone())),
    ];
    for (f, ty) in fns {
        if b.has(f) {
            return Err(CompileError::NameClash(f.to_string()));
        }
        b.fun(f, ty);
    }
    let if_state = b.ifelse(&st);
    let if_symb = b.ifelse(&symb);

    let (n, p, i) = (vars("n", a), vars("p", a), vars("i", a));
    let cs = || "cs".to_string();
    let args = |pre: &[String], xs: &[&[String]]| {
        let mut v = pre.to_vec();
        for x in xs {
            v.extend(x.iter().cloned());
        }
        v
    };
    let call = |f: &str, pre: &[String], xs: &[&[String]]| app(f, args(pre, xs));
    let zero = |v: &[String]| m.zero_call("cs", v);
    let pred = |v: &[String]| m.pred_tuple("cs", v);
    let succ = |v: &[String]| m.succ_tuple("cs", v);
    let seed = m.seed_tuple("cs");
    let trans = |nn: &[String], pp: &[String]| call("transition", &[cs()], &[nn, pp]);

    let prov = "tm-simulation/transition";
    b.rule(
        prov,
        call("transition", &[cs()], &[&n, &p]),
        app("transitionhelp", [call("state", &[cs()], &[&n, &p]), call("tape", &[cs()], &[&n, &p])]),
    );
    b.rule(prov, "transitionhelp fail x".into(), "NA".into());
    for t in &tm.transitions {
        let d = match t.dir {
            Dir::L => "L",
            Dir::R => "R",
        };
        b.rule(
            prov,
            app("transitionhelp", [t.state.clone(), tape_cons(&t.read)]),
            app("action", [tape_cons(&t.write), d.to_string(), t.next.clone()]),
        );
    }
    for q in ["accept", "reject"] {
        b.rule(prov, app("transitionhelp", [q, "x"]), app("end", [q]));
    }

    let prov = "tm-simulation/state";
    b.rule(
        prov,
        call("state", &[cs()], &[&n, &p]),
        app(&if_state, [zero(&n), call("state0", &[cs()], &[&p]), call("statex", &[cs()], &[&pred(&n), &p])]),
    );
    b.rule(prov, call("state0", &[cs()], &[&p]), app(&if_state, [zero(&p), tm.start.clone(), "fail".into()]));
    let prov = "tm-simulation/state (position 0 has no left neighbour)";
    b.rule(
        prov,
        call("statex", &[cs()], &[&n, &p]),
        app(
            &if_state,
            [
                zero(&p),
                call("statexz", &[cs()], &[&n, &p]),
                app("statey", [trans(&n, &pred(&p)), trans(&n, &p), trans(&n, &succ(&p))]),
            ],
        ),
    );
    b.rule(prov, call("statexz", &[cs()], &[&n, &p]), app("stateyz", [trans(&n, &p), trans(&n, &succ(&p))]));
    let prov = "tm-simulation/state";
    for (lhs, rhs) in [
        ("statey (action x R q) a e", "q"),
        ("statey (action x L q) a e", "fail"),
        ("statey (end q) a e", "fail"),
        ("statey NA (action x d q) e", "fail"),
        ("statey NA (end q) e", "q"),
        ("statey NA NA (action x L q)", "q"),
        ("statey NA NA (action x R q)", "fail"),
        ("statey NA NA (end q)", "fail"),
    ] {
        b.rule(prov, lhs.into(), rhs.into());
    }
    b.rule("tm-simulation/state (added: no neighbour acts)", "statey NA NA NA".into(), "fail".into());
    let prov = "tm-simulation/state (position 0 has no left neighbour)";
    for (lhs, rhs) in [
        ("stateyz (action x L q) e", "q"),
        ("stateyz (action x R q) e", "fail"),
        ("stateyz (end q) e", "q"),
        ("stateyz NA (action x L q)", "q"),
        ("stateyz NA (action x R q)", "fail"),
        ("stateyz NA (end q)", "fail"),
        ("stateyz NA NA", "fail"),
    ] {
        b.rule(prov, lhs.into(), rhs.into());
    }

    let prov = "tm-simulation/tape";
    b.rule(
        prov,
        call("tape", &[cs()], &[&n, &p]),
        app(&if_symb, [zero(&n), call("inputtape", &[cs()], &[&p]), call("tapex", &[cs()], &[&pred(&n), &p])]),
    );
    b.rule(prov, call("tapex", &[cs()], &[&n, &p]), app("tapey", args(&[cs()], &[&n, &p, &[trans(&n, &p)]])));
    b.rule(prov, app("tapey", args(&[cs()], &[&n, &p, &["action x d q".to_string()]])), "x".into());
    b.rule(prov, app("tapey", args(&[cs()], &[&n, &p, &["NA".to_string()]])), call("tape", &[cs()], &[&n, &p]));
    b.rule(prov, app("tapey", args(&[cs()], &[&n, &p, &["end q".to_string()]])), call("tape", &[cs()], &[&n, &p]));
    b.rule(
        prov,
        call("inputtape", &[cs()], &[&p]),
        app(&if_symb, [zero(&p), BLANK_CONS.to_string(), call("get", &[cs(), cs()], &[&pred(&p)])]),
    );
    b.rule(prov, call("get", &[cs(), "[]".into()], &[&i]), BLANK_CONS.into());
    b.rule(
        prov,
        call("get", &[cs(), "x;xs".into()], &[&i]),
        app(&if_symb, [zero(&i), "x".into(), call("get", &[cs(), "xs".into()], &[&pred(&i)])]),
    );

    let prov = "tm-simulation/decide";
    b.rule(prov, "decide cs".into(), call("findanswer", &[cs(), "fail".into()], &[&seed, &seed]));
    b.rule(
        prov,
        call("findanswer", &[cs(), "fail".into()], &[&n, &p]),
        call("findanswer", &[cs(), call("state", &[cs()], &[&n, &p])], &[&n, &pred(&p)]),
    );
    b.rule(prov, call("findanswer", &[cs(), "accept".into()], &[&n, &p]), "true".into());
    b.rule(prov, call("findanswer", &[cs(), "reject".into()], &[&n, &p]), "false".into());

    let (atrs, provenance, _) = b.finish()?;
    Ok(CompiledSystem { atrs, provenance, expr: expr.clone(), module: m })
}
