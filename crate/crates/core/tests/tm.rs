use std::collections::BTreeSet;

use consfree::format::{parse_tm, print_term};
use consfree::tm::{compile_tm, gen_module, module_selftest, simulate_tm, CompileError, ModuleExpr, Outcome, TMachine};
use consfree::{encode_input, parse_atrs, solve, Atrs, Mode, SolveError, SolverConfig, Term};

fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn machine(name: &str) -> TMachine {
    parse_tm(&std::fs::read_to_string(corpus_path(name)).unwrap()).unwrap()
}

fn expr(s: &str) -> ModuleExpr {
    s.parse().unwrap()
}

fn demand() -> SolverConfig {
    SolverConfig { mode: Mode::Demand, ..SolverConfig::default() }
}

fn decide_nfs(atrs: &Atrs, x: &str) -> Result<BTreeSet<String>, SolveError> {
    let decide = atrs.symbol("decide").unwrap();
    let t = Term::app(decide, vec![encode_input(atrs, x).unwrap()]).unwrap();
    Ok(solve(atrs, &t, demand())?.normal_forms().iter().map(print_term).collect())
}

fn inputs(max_len: usize) -> Vec<String> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for bits in 0..1u32 << len {
            out.push((0..len).rev().map(|i| if bits >> i & 1 == 1 { '1' } else { '0' }).collect());
        }
    }
    out
}

#[test]
fn module_expressions_parse_and_print() {
    for s in ["lin", "e", "prod(lin,lin)", "exp(lin)", "expab(1,1)", "pipi(e)", "exp(prod(lin,e))", "expab(2,3)"] {
        assert_eq!(expr(s).to_string(), s);
    }
    assert_eq!(expr(" prod( lin , e ) ").to_string(), "prod(lin,e)");
    for bad in ["", "prod(lin)", "lin(e)", "exp(lin", "pipi(lin)", "expab(1,0)", "foo"] {
        assert!(matches!(bad.parse::<ModuleExpr>(), Err(CompileError::BadModuleExpr(_))), "{bad:?}");
    }
}

#[test]
fn bounds() {
    let b = |s: &str, n| expr(s).bound(n).unwrap();
    assert_eq!(b("lin", 5), 6);
    assert_eq!(b("prod(lin,lin)", 3), 16);
    assert_eq!(b("e", 2), 8);
    assert_eq!(b("exp(lin)", 2), 8);
    assert_eq!(b("expab(1,1)", 3), 16);
    assert_eq!(b("expab(2,1)", 2), 2u128.pow(6));
    assert_eq!(b("expab(1,2)", 2), 2u128.pow(9));
    assert_eq!(b("pipi(e)", 1), 2u128.pow(4));
}

#[test]
fn selftests_count_to_the_bound() {
    let cases: &[(&str, &[usize])] = &[
        ("lin", &[1, 2, 3, 4, 5, 6]),
        ("prod(lin,lin)", &[1, 2, 3, 4]),
        ("e", &[1, 2]),
        ("exp(lin)", &[1, 2]),
        ("expab(1,1)", &[1, 2, 3]),
    ];
    for (s, ns) in cases {
        let e = expr(s);
        for &n in *ns {
            let r = module_selftest(&e, n, e.needs_pairing(), demand()).unwrap_or_else(|err| panic!("{s} n={n}: {err}"));
            assert_eq!(r.count, Some(e.bound(n as u64).unwrap()), "{s} n={n}");
            assert!(r.checks.iter().any(|c| c.what == "pred stays at zero"));
            assert!(r.checks.iter().any(|c| c.what == "succ stays at the maximum"));
            assert!(r.checks.iter().any(|c| c.what == "succ adds one"));
        }
    }
    let r = module_selftest(&expr("e"), 2, false, demand()).unwrap();
    assert_eq!(r.chain_length(), Some(7));
    assert_eq!(r.to_string(), "count=8 OK");
}

#[test]
fn selftest_rejects_bad_requests() {
    assert!(matches!(
        module_selftest(&expr("expab(1,1)"), 1, false, demand()),
        Err(CompileError::PairingRequired(_))
    ));
    assert!(matches!(module_selftest(&expr("lin"), 0, false, demand()), Err(CompileError::BadModuleExpr(_))));
    assert!(matches!(module_selftest(&expr("exp(e)"), 4, false, demand()), Err(CompileError::BadModuleExpr(_))));
}

#[test]
fn generated_module_verdicts() {
    for (s, order, pcf) in [
        ("lin", 1, None),
        ("e", 1, None),
        ("prod(lin,lin)", 1, None),
        ("exp(lin)", 2, None),
        ("exp(exp(lin))", 3, None),
        ("expab(1,1)", 1, Some(true)),
        ("pipi(e)", 1, Some(false)),
    ] {
        let e = expr(s);
        let g = gen_module(&e, e.needs_pairing()).unwrap();
        let v = g.atrs.verdict();
        assert!(v.constructor_system && v.left_linear && v.cons_free, "{s}: {:?}", v.violations);
        assert_eq!(v.type_order, order, "{s}");
        assert_eq!(v.product_cons_free, pcf, "{s}");
        assert_eq!(g.provenance.len(), g.atrs.rules().len());
    }
}

#[test]
fn pipi_violations_name_the_pair_building_rules() {
    let g = gen_module(&expr("pipi(e)"), true).unwrap();
    let v = g.atrs.verdict();
    let rules: BTreeSet<usize> = v.violating_rules().into_iter().map(|r| g.atrs.rule_by_name(r).unwrap().0).collect();
    assert!(!rules.is_empty());
    for r in rules {
        assert!(g.provenance[r].starts_with("counting/"), "{}", g.provenance[r]);
    }
}

#[test]
fn golden_module_files() {
    for (s, file) in [
        ("lin", "lin"),
        ("e", "e"),
        ("prod(lin,lin)", "prod_lin_lin"),
        ("exp(lin)", "exp_lin"),
        ("expab(1,1)", "expab_1_1"),
        ("pipi(e)", "pipi_e"),
    ] {
        let e = expr(s);
        let text = gen_module(&e, e.needs_pairing()).unwrap().to_text();
        let golden = std::fs::read_to_string(corpus_path(&format!("modules/{file}.atrs"))).unwrap();
        assert_eq!(text, golden, "golden file for {s} is stale");
        // the emitted text is itself a valid system
        parse_atrs(&golden).unwrap();
    }
}

#[test]
fn nested_modules_have_disjoint_names() {
    let e = expr("prod(e,e)");
    let g = gen_module(&e, false).unwrap();
    let names: Vec<String> = g.atrs.signature().defined().map(|s| s.name().to_string()).collect();
    assert!(names.iter().any(|n| n.ends_with("_e.1")));
    assert!(names.iter().any(|n| n.ends_with("_e.2")));
    let r = module_selftest(&e, 1, false, demand()).unwrap();
    assert_eq!(r.count, Some(16));
}

#[test]
fn pairing_is_required_for_pair_modules() {
    let tm = machine("parity.tm");
    for s in ["pipi(e)", "expab(1,1)"] {
        assert!(matches!(compile_tm(&tm, &expr(s), false), Err(CompileError::PairingRequired(_))));
        assert!(matches!(gen_module(&expr(s), false), Err(CompileError::PairingRequired(_))));
    }
}

#[test]
fn compiled_systems_are_cons_free() {
    for tm in ["contains_a_1.tm", "parity.tm"] {
        for s in ["lin", "e", "prod(lin,lin)", "exp(lin)", "expab(1,1)"] {
            let e = expr(s);
            let c = compile_tm(&machine(tm), &e, e.needs_pairing()).unwrap();
            let v = c.atrs.verdict();
            assert!(v.cons_free && v.left_linear, "{tm} {s}: {:?}", v.violations);
            assert_eq!(v.type_order, e.order(), "{tm} {s}");
            assert!(c.provenance.iter().any(|p| p == "tm-simulation/transition"));
            // printing and reparsing gives the same rules
            let again = parse_atrs(&c.to_text()).unwrap();
            assert_eq!(again.rules().len(), c.atrs.rules().len());
        }
    }
}

#[test]
fn compiled_parity_agrees_with_simulation() {
    let tm = machine("parity.tm");
    let c = compile_tm(&tm, &expr("e"), false).unwrap();
    for x in inputs(2) {
        let sim = simulate_tm(&tm, &x, 1000).unwrap();
        let want = if sim.outcome == Outcome::Accept { "true" } else { "false" };
        assert_eq!(decide_nfs(&c.atrs, &x).unwrap(), BTreeSet::from([want.to_string()]), "input {x}");
    }
}

#[test]
fn slow_machines_fall_back_to_failure() {
    // lin only counts to n + 1, too few steps for the parity machine, so
    // decide never reaches an answer.
    let tm = machine("parity.tm");
    let c = compile_tm(&tm, &expr("lin"), false).unwrap();
    assert!(decide_nfs(&c.atrs, "11").unwrap().is_empty());
}

#[test]
fn reserved_names_are_rejected() {
    let mut src = "input 0 1 ;\ntape 0 1 _ ;\nstates start cs accept reject ;\nstart start ;\n".to_string();
    for q in ["start", "cs"] {
        for a in ["0", "1", "_"] {
            src += &format!("trans {q} {a} {a} R accept ;\n");
        }
    }
    let tm = parse_tm(&src).unwrap();
    assert!(matches!(compile_tm(&tm, &expr("lin"), false), Err(CompileError::NameClash(n)) if n == "cs"));
}
