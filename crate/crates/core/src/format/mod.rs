//! Text formats: `.atrs` systems, `.tm` machines and input encoding.

mod lexer;
mod parse;
mod print;
mod tm_file;

pub use lexer::{tokenize, Span, Tok, Token};
pub use parse::{
    elaborate, parse_atrs, parse_atrs_bytes, parse_open_term, parse_source, parse_term, type_of, Elaborator, Item,
    ParseError, ParseErrorKind, RawTerm, RawType, SourceFile, KEYWORDS,
};
pub use print::{print_atrs, print_atrs_annotated, print_term};
pub use tm_file::{parse_tm, print_tm};

use thiserror::Error;

use crate::atrs::Atrs;
use crate::term::{Head, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("input string is empty")]
    EmptyInput,
    #[error("`{0}` is not a declared symbol constructor")]
    UnknownSymbol(char),
    #[error("the system declares no list constructors `cons` and `[]`")]
    NoListSort,
}

/// Encodes a string as the right-nested list `x1 ; ... ; xn ; []`.
pub fn encode_input(atrs: &Atrs, x: &str) -> Result<Term, EncodeError> {
    if x.is_empty() {
        return Err(EncodeError::EmptyInput);
    }
    let sig = atrs.signature();
    let (cons, nil) = match (sig.get("cons"), sig.get("[]")) {
        (Some(c), Some(n)) if c.is_constructor() && n.is_constructor() && c.arity() == 2 => (c, n),
        _ => return Err(EncodeError::NoListSort),
    };
    let elem = cons.ty().domain().expect("cons has arity two").clone();
    let mut items = Vec::new();
    for ch in x.chars() {
        match sig.get(&ch.to_string()) {
            Some(s) if s.is_constructor() && *s.ty() == elem => items.push(Term::sym(s)),
            _ => return Err(EncodeError::UnknownSymbol(ch)),
        }
    }
    let mut acc = Term::sym(nil);
    for it in items.into_iter().rev() {
        acc = Term::app(cons, vec![it, acc]).map_err(|_| EncodeError::NoListSort)?;
    }
    Ok(acc)
}

/// Inverse of [`encode_input`] for lists of single-character constants.
pub fn decode_input(t: &Term) -> Option<String> {
    let mut out = String::new();
    let mut cur = t;
    loop {
        match cur.head() {
            Head::Sym(s) if s.name() == "[]" && cur.args().is_empty() => return Some(out),
            Head::Sym(s) if s.name() == "cons" && cur.args().len() == 2 => {
                let h = &cur.args()[0];
                let name = h.head_symbol()?.name();
                if !h.args().is_empty() || name.chars().count() != 1 {
                    return None;
                }
                out.push_str(name);
                cur = &cur.args()[1];
            }
            _ => return None,
        }
    }
}
