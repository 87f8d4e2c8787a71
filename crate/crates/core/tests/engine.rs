use consfree::engine::{
    one_step_reducts, parse_trace, reducts, replay, search, validate_semi_outermost, ReplayError, SearchBudget,
    SearchError, Strategy, TraceStep,
};
use consfree::{accepts, parse_atrs, parse_term, print_term, Acceptance, Atrs};

fn corpus(name: &str) -> Atrs {
    let path = format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_atrs(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn printed(set: impl IntoIterator<Item = consfree::Term>) -> Vec<String> {
    set.into_iter().map(|t| print_term(&t)).collect()
}

#[test]
fn succ_single_step() {
    let a = corpus("succ.atrs");
    let t = parse_term(&a, "succ (1;0;1;[])").unwrap();
    assert_eq!(printed(reducts(&a, &t, Strategy::Free)), vec!["0 ; succ (0 ; 1 ; [])"]);
    let r = search(&a, &t, Strategy::Free, SearchBudget::default()).unwrap();
    assert_eq!(printed(r.found()), vec!["0 ; 1 ; 1 ; []"]);
    assert!(!r.exhausted);
}

#[test]
fn data_has_no_reducts() {
    let a = corpus("succ.atrs");
    let t = parse_term(&a, "0 ; 1 ; []").unwrap();
    assert!(one_step_reducts(&a, &t, Strategy::Free).is_empty());
}

#[test]
fn either_is_nondeterministic() {
    let a = corpus("sat.atrs");
    let t = parse_term(&a, "either (0;[]) (1;[])").unwrap();
    assert_eq!(printed(reducts(&a, &t, Strategy::Free)), vec!["0 ; []", "1 ; []"]);
}

#[test]
fn majority_saturates() {
    let a = corpus("majority.atrs");
    let t = parse_term(&a, "majority (1;0;[])").unwrap();
    let r = search(&a, &t, Strategy::Free, SearchBudget::default()).unwrap();
    assert_eq!(printed(r.found()), vec!["1"]);
    assert!(!r.exhausted);
    for tr in r.normal_forms.values() {
        replay(&a, &tr.start, &tr.steps).unwrap();
    }
}

#[test]
fn sat_accepts_satisfiable_formula() {
    let a = corpus("sat.atrs");
    let budget = SearchBudget { max_steps: 200, max_terms: 100_000, max_term_size: 200 };
    match accepts(&a, "10?#?10#", Strategy::Free, budget).unwrap() {
        Acceptance::Yes(tr) => {
            let terms = replay(&a, &tr.start, &tr.steps).unwrap();
            assert_eq!(print_term(terms.last().unwrap()), "true");
        }
        Acceptance::Unknown => panic!("expected a witness"),
    }
}

#[test]
fn sat_rejects_contradiction_by_exhaustion() {
    let a = corpus("sat.atrs");
    let budget = SearchBudget { max_steps: 200, max_terms: 100_000, max_term_size: 200 };
    assert_eq!(accepts(&a, "1#0#", Strategy::Free, budget).unwrap(), Acceptance::Unknown);
}

#[test]
fn missing_decide() {
    let a = corpus("majority.atrs");
    assert_eq!(accepts(&a, "1", Strategy::Free, SearchBudget::default()), Err(SearchError::MissingDecideSymbol));
}

#[test]
fn root_too_large() {
    let a = corpus("majority.atrs");
    let t = parse_term(&a, "majority (1;0;[])").unwrap();
    let budget = SearchBudget { max_term_size: 3, ..SearchBudget::default() };
    assert!(matches!(search(&a, &t, Strategy::Free, budget), Err(SearchError::BudgetTooSmallForRoot { .. })));
}

#[test]
fn small_step_budget_exhausts() {
    let a = corpus("succ.atrs");
    let t = parse_term(&a, "succ (1;0;1;[])").unwrap();
    let budget = SearchBudget { max_steps: 1, ..SearchBudget::default() };
    let r = search(&a, &t, Strategy::Free, budget).unwrap();
    assert!(r.exhausted);
    assert!(r.found().is_empty());
}

#[test]
fn hocount_fsucc_outcomes() {
    let a = corpus("hocount.atrs");
    // The all-zero string plus one has bit 1 at o.
    let t = parse_term(&a, "fsucc nul o o").unwrap();
    let r = search(&a, &t, Strategy::Free, SearchBudget::default()).unwrap();
    assert!(!r.exhausted);
    assert_eq!(printed(r.found()), vec!["1"]);
    // A function that is 1 at o and s o: after one successor those bits are
    // 0 and the bit at s s o is 1.
    let f = "set (set nul o 1) (s o) 1";
    for (i, want) in [("o", "0"), ("s o", "0"), ("s (s o)", "1")] {
        let t = parse_term(&a, &format!("fsucc ({f}) o ({i})")).unwrap();
        let r = search(&a, &t, Strategy::Innermost, SearchBudget::default()).unwrap();
        assert_eq!(printed(r.found()), vec![want], "bit {i}");
    }
}

#[test]
fn trace_roundtrip_and_semi_outermost() {
    let a = corpus("succ.atrs");
    let t = parse_term(&a, "succ (1;0;1;[])").unwrap();
    let steps = parse_trace("C @ root\nB @ 2\n").unwrap();
    let terms = replay(&a, &t, &steps).unwrap();
    assert_eq!(print_term(&terms[2]), "0 ; 1 ; 1 ; []");
    let text: String = steps.iter().map(|s| format!("{s}\n")).collect();
    assert_eq!(text, "C @ root\nB @ 2\n");
    assert!(validate_semi_outermost(&a, &t, &steps).unwrap());
    assert!(validate_semi_outermost(&a, &t, &[]).unwrap());
    let bad = vec![TraceStep { rule: "A".into(), path: vec![] }];
    assert!(matches!(validate_semi_outermost(&a, &t, &bad), Err(ReplayError::NonReplayableTrace { .. })));
}

#[test]
fn semi_outermost_rejects_reduction_under_variable_pattern() {
    let a = corpus("majority.atrs");
    // `majority cs` has a variable pattern: reducing inside it first breaks the shape.
    let src = "sort symb list ; cons 0 : symb ; cons [] : list ; cons cons : symb => list => list ;
        fun id : list => list ; fun f : list => list ;
        rule I : id xs -> xs ; rule F : f xs -> xs ; rule G : f (0 ; xs) -> xs ;";
    let b = parse_atrs(src).unwrap();
    let t = parse_term(&b, "f (id (0;[]))").unwrap();
    assert!(!validate_semi_outermost(&b, &t, &parse_trace("I @ 1\nF @ root").unwrap()).unwrap());
    assert!(validate_semi_outermost(&b, &t, &parse_trace("I @ 1\nG @ root").unwrap()).unwrap());
    assert!(validate_semi_outermost(&b, &t, &parse_trace("F @ root\nI @ root").unwrap()).unwrap());
    drop(a);
}

#[test]
fn strategies_are_subsets() {
    let a = corpus("majority.atrs");
    let t = parse_term(&a, "majority (1;0;[])").unwrap();
    let r = search(&a, &t, Strategy::Free, SearchBudget::default()).unwrap();
    assert!(!r.exhausted);
    for s in [Strategy::Innermost, Strategy::Outermost] {
        let rs = search(&a, &t, s, SearchBudget::default()).unwrap();
        assert_eq!(rs.found(), r.found());
    }
}

#[test]
fn parallel_search_is_deterministic() {
    let a = corpus("sat.atrs");
    let t = consfree::engine::search_with_threads;
    let term = parse_term(&a, "decide (1;0;?;#;?;1;0;#;[])").unwrap();
    let budget = SearchBudget { max_steps: 60, max_terms: 20_000, max_term_size: 200 };
    let r1 = t(&a, &term, Strategy::Free, budget, 1).unwrap();
    let r4 = t(&a, &term, Strategy::Free, budget, 4).unwrap();
    assert_eq!(r1.normal_forms, r4.normal_forms);
    assert_eq!(r1.visited, r4.visited);
}
