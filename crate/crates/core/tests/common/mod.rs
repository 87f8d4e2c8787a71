//! Random data and basic terms over a system's signature.
#![allow(dead_code)]

use consfree::types::TypeKind;
use consfree::{parse_atrs, Atrs, Symbol, Term, Type};
use rand::seq::SliceRandom;
use rand::Rng;

/// The cons-free systems of the corpus.
pub const CONS_FREE: [&str; 8] = [
    "majority.atrs",
    "sat.atrs",
    "consfree_fsucc.atrs",
    "choose.atrs",
    "parity.atrs",
    "eqlen.atrs",
    "hofold.atrs",
    "pairs.atrs",
];

pub fn corpus_path(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn corpus(name: &str) -> Atrs {
    parse_atrs(&std::fs::read_to_string(corpus_path(name)).unwrap()).unwrap()
}

fn constructors_of<'a>(atrs: &'a Atrs, ty: &Type) -> Vec<&'a Symbol> {
    atrs.signature()
        .constructors()
        .filter(|c| {
            let (args, res) = c.ty().uncurry();
            res == *ty && args.iter().all(|a| !a.is_arrow())
        })
        .collect()
}

/// A random data term of base type `ty`, or None if the sort is empty.
pub fn random_data(atrs: &Atrs, ty: &Type, depth: usize, rng: &mut impl Rng) -> Option<Term> {
    if let TypeKind::Product(l, r) = ty.kind() {
        return Some(Term::pair(random_data(atrs, l, depth, rng)?, random_data(atrs, r, depth, rng)?));
    }
    let cs = constructors_of(atrs, ty);
    let leaves: Vec<&Symbol> = cs.iter().copied().filter(|c| c.arity() == 0).collect();
    let pool = if depth == 0 && !leaves.is_empty() { &leaves } else { &cs };
    let c = *pool.choose(rng)?;
    let (args, _) = c.ty().uncurry();
    let sub = depth.saturating_sub(1);
    let args = args.iter().map(|a| random_data(atrs, a, sub, rng)).collect::<Option<Vec<_>>>()?;
    Term::app(c, args).ok()
}

/// Defined symbols taking and returning base-type values only.
pub fn first_order_functions(atrs: &Atrs) -> Vec<Symbol> {
    atrs.signature()
        .defined()
        .filter(|f| {
            let (args, res) = f.ty().uncurry();
            !res.is_arrow() && args.iter().all(|a| !a.is_arrow())
        })
        .cloned()
        .collect()
}

/// A random basic term `f d1 ... dn`.
pub fn random_basic(atrs: &Atrs, depth: usize, rng: &mut impl Rng) -> Term {
    let fs = first_order_functions(atrs);
    loop {
        let f = fs.choose(rng).expect("a first-order defined symbol");
        let (args, _) = f.ty().uncurry();
        let d = rng.gen_range(0..=depth);
        if let Some(args) = args.iter().map(|a| random_data(atrs, a, d, rng)).collect::<Option<Vec<_>>>() {
            return Term::app(f, args).unwrap();
        }
    }
}

/// A random type over the sorts `a` and `b` of order at most `max_order`,
/// with arrow chains of at most `max_args` arguments.
pub fn random_type(max_order: usize, max_args: usize, rng: &mut impl Rng) -> Type {
    let base = |rng: &mut dyn rand::RngCore| Type::sort(if rng.gen_bool(0.5) { "a" } else { "b" });
    if max_order == 0 {
        return base(rng);
    }
    let n = rng.gen_range(1..=max_args);
    let args: Vec<Type> = (0..n).map(|_| random_type(max_order - 1, max_args, rng)).collect();
    Type::arrows(args, base(rng))
}
