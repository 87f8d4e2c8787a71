use std::fmt::Write;

use super::lexer::Tok;
use super::parse::{ParseError, ParseErrorKind, Parser};
use crate::tm::{Dir, TMachine, TmError, Transition};

fn names_until_semi(p: &mut Parser) -> Result<Vec<String>, ParseError> {
    let mut out = Vec::new();
    while p.peek_ident().is_some() {
        out.push(p.ident()?.0);
    }
    p.expect(Tok::Semi)?;
    Ok(out)
}

/// Parses a `.tm` file.
pub fn parse_tm(src: &str) -> Result<TMachine, ParseError> {
    let mut p = Parser::new(src);
    let (mut input, mut tape, mut states) = (None, None, None);
    let mut start = None;
    let mut trans = Vec::new();
    let mut last_span = Default::default();
    while !p.at_eof() {
        let (kw, span) = p.ident()?;
        last_span = span;
        match kw.as_str() {
            "input" => input = Some(names_until_semi(&mut p)?),
            "tape" => tape = Some(names_until_semi(&mut p)?),
            "states" => states = Some(names_until_semi(&mut p)?),
            "start" => {
                start = Some(p.ident()?.0);
                p.expect(Tok::Semi)?;
            }
            "trans" => {
                let parts = names_until_semi(&mut p)?;
                let [state, read, write, dir, next]: [String; 5] = parts.try_into().map_err(|_| ParseError {
                    kind: ParseErrorKind::Syntax {
                        expected: "`trans state read write L|R next ;`".into(),
                        found: "a different number of fields".into(),
                    },
                    span,
                })?;
                let dir = match dir.as_str() {
                    "L" => Dir::L,
                    "R" => Dir::R,
                    other => {
                        return Err(ParseError {
                            kind: ParseErrorKind::Syntax { expected: "`L` or `R`".into(), found: format!("`{other}`") },
                            span,
                        })
                    }
                };
                trans.push(Transition { state, read, write, dir, next });
            }
            other => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax {
                        expected: "`input`, `tape`, `states`, `start` or `trans`".into(),
                        found: format!("`{other}`"),
                    },
                    span,
                })
            }
        }
    }
    let missing = |what: &str| ParseError { kind: ParseErrorKind::Invalid(format!("missing `{what}` line")), span: last_span };
    let input = input.ok_or_else(|| missing("input"))?;
    let tape = tape.ok_or_else(|| missing("tape"))?;
    let states = states.ok_or_else(|| missing("states"))?;
    let start = start.unwrap_or_else(|| "start".to_string());
    TMachine::new(input, tape, states, start, trans).map_err(|e| {
        let msg = match e {
            TmError::Invalid(m) => m,
            other => other.to_string(),
        };
        ParseError { kind: ParseErrorKind::Invalid(msg), span: last_span }
    })
}

pub fn print_tm(tm: &TMachine) -> String {
    let mut out = String::new();
    writeln!(out, "input {} ;", tm.input.join(" ")).unwrap();
    writeln!(out, "tape {} ;", tm.tape.join(" ")).unwrap();
    writeln!(out, "states {} ;", tm.states.join(" ")).unwrap();
    writeln!(out, "start {} ;", tm.start).unwrap();
    for t in &tm.transitions {
        writeln!(out, "trans {} {} {} {} {} ;", t.state, t.read, t.write, t.dir, t.next).unwrap();
    }
    out
}
