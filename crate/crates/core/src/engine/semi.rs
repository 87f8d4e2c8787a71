//! Checks that a reduction is semi-outermost.
//!
//! A reduction of `f s1 .. sn` is accepted when it is empty, or when it first
//! rewrites some of the arguments `s1 .. sk` to instances of the patterns
//! `l1 .. lk` of a rule `f l1 .. lk -> r`, leaves arguments matched by a
//! variable and arguments beyond `k` untouched, then contracts at the root
//! and continues semi-outermost from the reduct. Each argument reduction is
//! itself semi-outermost. Terms with a constructor, variable or pair head
//! (and reductions that never reach the root) are checked per argument.

use super::trace::{apply_step, replay, ReplayError, TraceStep};
use crate::atrs::Atrs;
use crate::term::{Head, Term};

/// Whether `steps` from `start` form a semi-outermost reduction. Fails if the
/// steps do not replay.
pub fn validate_semi_outermost(atrs: &Atrs, start: &Term, steps: &[TraceStep]) -> Result<bool, ReplayError> {
    replay(atrs, start, steps)?;
    Ok(check(atrs, start, steps))
}

fn relative(steps: &[&TraceStep]) -> Vec<TraceStep> {
    steps.iter().map(|s| TraceStep { rule: s.rule.clone(), path: s.path[1..].to_vec() }).collect()
}

fn per_argument(atrs: &Atrs, t: &Term, steps: &[TraceStep]) -> bool {
    (0..t.args().len()).all(|i| {
        let sub: Vec<&TraceStep> = steps.iter().filter(|s| s.path[0] == i).collect();
        check(atrs, &t.args()[i], &relative(&sub))
    })
}

fn check(atrs: &Atrs, t: &Term, steps: &[TraceStep]) -> bool {
    if steps.is_empty() {
        return true;
    }
    let Some(j) = steps.iter().position(|s| s.path.is_empty()) else {
        return per_argument(atrs, t, steps);
    };
    if !matches!(t.head(), Head::Sym(_)) {
        return false;
    }
    let rule = &atrs.rule_by_name(&steps[j].rule).expect("replayed").1;
    let k = rule.arity();
    let pre = &steps[..j];
    if pre.iter().any(|s| s.path[0] >= k) {
        return false;
    }
    for (i, pat) in rule.lhs.args().iter().enumerate() {
        let sub: Vec<&TraceStep> = pre.iter().filter(|s| s.path[0] == i).collect();
        if pat.is_var() && !sub.is_empty() {
            return false;
        }
        if !check(atrs, &t.args()[i], &relative(&sub)) {
            return false;
        }
    }
    let mut cur = t.clone();
    for (i, s) in steps[..=j].iter().enumerate() {
        cur = apply_step(atrs, &cur, s, i).expect("replayed");
    }
    check(atrs, &cur, &steps[j + 1..])
}
