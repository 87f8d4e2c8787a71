use std::collections::BTreeSet;
use std::fmt;

use super::modules::{app, generate, Builder, ModuleExpr};
use super::CompileError;
use crate::format::{parse_term, print_term};
use crate::solver::{Solver, SolverConfig};
use crate::term::Term;
use crate::types::Type;

/// One observed zero test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub what: String,
    pub term: String,
    pub expected: bool,
    /// Every boolean the term reduces to.
    pub got: Vec<bool>,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.got == [self.expected]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfTestReport {
    pub expr: ModuleExpr,
    pub n: usize,
    /// The bound P(n) the module should count to.
    pub expected: u128,
    /// One more than the number of decrements from seed to zero, if the
    /// chain reached zero deterministically.
    pub count: Option<u128>,
    pub checks: Vec<Check>,
}

impl SelfTestReport {
    pub fn ok(&self) -> bool {
        self.count == Some(self.expected) && self.checks.iter().all(Check::ok)
    }

    /// Decrements needed to get from seed to zero.
    pub fn chain_length(&self) -> Option<u128> {
        self.count.map(|c| c - 1)
    }
}

impl fmt::Display for SelfTestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let count = self.count.map_or("?".to_string(), |c| c.to_string());
        if self.ok() {
            return write!(f, "count={count} OK");
        }
        writeln!(f, "count={count} FAILED (expected {})", self.expected)?;
        for c in self.checks.iter().filter(|c| !c.ok()) {
            writeln!(f, "  {}: {} gave {:?}, expected {}", c.what, c.term, c.got, c.expected)?;
        }
        Ok(())
    }
}

fn numeral(k: u128) -> String {
    let mut s = "dz".to_string();
    for _ in 0..k {
        s = format!("ds ({s})");
    }
    s
}

/// Runs a module against driver rules on an input of length `n`.
///
/// `probe cs k` applies pred k times to the seed and tests for zero, so it
/// must give false for k < P(n) - 1 and true afterwards (pred stays at 0).
/// `sprobe cs j k` takes j preds, one succ, then k preds, which checks
/// that succ adds one and stays at the maximum. Every test must have a
/// single boolean result.
pub fn module_selftest(
    expr: &ModuleExpr,
    n: usize,
    pairing: bool,
    mut config: SolverConfig,
) -> Result<SelfTestReport, CompileError> {
    if expr.needs_pairing() && !pairing {
        return Err(CompileError::PairingRequired(expr.to_string()));
    }
    if n == 0 {
        return Err(CompileError::BadModuleExpr("self-tests need an input of length at least 1".into()));
    }
    let p = expr.bound(n as u64).filter(|&p| p <= 60).ok_or_else(|| {
        CompileError::BadModuleExpr(format!("the bound of {expr} at n={n} is too large to test"))
    })?;
    // The unary driver counters have up to P + 1 subterms, and sets of them
    // are only ever visited on demand.
    config.repr_budget_log2 = config.repr_budget_log2.max(p as u32 + 2);
    let mut b = Builder::new(pairing, &["0".to_string(), "1".to_string()])?;
    b.sort("nat");
    let nat = Type::sort("nat");
    b.cons("dz", nat.clone())?;
    b.cons("ds", Type::arrows(vec![nat.clone()], nat.clone()))?;
    let m = generate(&mut b, expr, "");
    let a = m.width();
    let u = super::modules::vars("u", a);
    let list = Type::sort("list");
    let boolean = Type::sort("bool");
    let with = |pre: Vec<Type>| {
        let mut v = pre;
        v.extend(m.tys.iter().cloned());
        Type::arrows(v, boolean.clone())
    };
    b.fun("probe", Type::arrows(vec![list.clone(), nat.clone()], boolean.clone()));
    b.fun("probeh", with(vec![list.clone(), nat.clone()]));
    b.fun("sprobe", Type::arrows(vec![list.clone(), nat.clone(), nat.clone()], boolean.clone()));
    b.fun("sprobeh", with(vec![list.clone(), nat.clone(), nat.clone()]));
    let cat = |pre: &[&str], v: &[String]| pre.iter().map(|s| s.to_string()).chain(v.iter().cloned()).collect::<Vec<_>>();
    let prov = "self-test driver";
    b.rule(prov, "probe cs k".into(), app("probeh", cat(&["cs", "k"], &m.seed_tuple("cs"))));
    b.rule(prov, app("probeh", cat(&["cs", "dz"], &u)), m.zero_call("cs", &u));
    b.rule(prov, app("probeh", cat(&["cs", "ds k"], &u)), app("probeh", cat(&["cs", "k"], &m.pred_tuple("cs", &u))));
    b.rule(prov, "sprobe cs j k".into(), app("sprobeh", cat(&["cs", "j", "k"], &m.seed_tuple("cs"))));
    b.rule(
        prov,
        app("sprobeh", cat(&["cs", "ds j", "k"], &u)),
        app("sprobeh", cat(&["cs", "j", "k"], &m.pred_tuple("cs", &u))),
    );
    b.rule(prov, app("sprobeh", cat(&["cs", "dz", "k"], &u)), app("probeh", cat(&["cs", "k"], &m.succ_tuple("cs", &u))));
    let (atrs, _, _) = b.finish()?;

    let cs = vec!["1"; n].join(";") + ";[]";
    let mut queries: Vec<(String, String, bool)> = Vec::new();
    for k in 0..=p {
        let what = if k == p { "pred stays at zero" } else { "pred chain" };
        queries.push((what.into(), format!("probe ({cs}) ({})", numeral(k)), k + 1 >= p));
    }
    for j in 0..=2u128.min(p - 1) {
        // value after j preds and one succ
        let v = (p - 1 - j + 1).min(p - 1);
        let what = if j == 0 { "succ stays at the maximum" } else { "succ adds one" };
        if v > 0 {
            queries.push((what.into(), format!("sprobe ({cs}) ({}) ({})", numeral(j), numeral(v - 1)), false));
        }
        queries.push((what.into(), format!("sprobe ({cs}) ({}) ({})", numeral(j), numeral(v)), true));
    }
    let starts = queries
        .iter()
        .map(|(_, t, _)| parse_term(&atrs, t).map_err(|e| CompileError::Internal(e.to_string())))
        .collect::<Result<Vec<Term>, _>>()?;
    let solver = Solver::new(&atrs, &starts, config)?;
    let sol = solver.solve()?;
    let mut checks = Vec::new();
    for ((what, _, expected), (t, res)) in queries.into_iter().zip(starts.iter().zip(&sol.results)) {
        let got: BTreeSet<bool> = res.iter().map(|r| print_term(r) == "true").collect();
        checks.push(Check { what, term: print_term(t), expected, got: got.into_iter().collect() });
    }
    let mut count = None;
    for (k, c) in checks.iter().take(p as usize + 1).enumerate() {
        match c.got.as_slice() {
            [false] => continue,
            [true] => count = Some(k as u128 + 1),
            _ => {}
        }
        break;
    }
    let report = SelfTestReport { expr: expr.clone(), n, expected: p, count, checks };
    if report.ok() {
        Ok(report)
    } else {
        Err(CompileError::SelfTestFailure(Box::new(report)))
    }
}
