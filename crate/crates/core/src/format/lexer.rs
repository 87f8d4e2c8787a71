use std::fmt;

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Arrow,
    FatArrow,
    Star,
    Ident(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Star => f.write_str("`*`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn punct(c: char) -> Option<Tok> {
    Some(match c {
        '(' => Tok::LParen,
        ')' => Tok::RParen,
        ',' => Tok::Comma,
        ';' => Tok::Semi,
        ':' => Tok::Colon,
        '*' => Tok::Star,
        _ => return None,
    })
}

/// Splits source text into tokens. Every character is either whitespace,
/// punctuation or part of an identifier, so lexing never fails.
pub fn tokenize(src: &str) -> Vec<Token> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1u32, 1u32);
    let mut i = 0;
    let two = |i: usize, a: char, b: char| chars.get(i) == Some(&a) && chars.get(i + 1) == Some(&b);
    while i < chars.len() {
        let c = chars[i];
        let span = Span { line, col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if two(i, '/', '/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if two(i, '-', '>') || two(i, '=', '>') {
            let tok = if c == '-' { Tok::Arrow } else { Tok::FatArrow };
            out.push(Token { tok, span });
            i += 2;
            col += 2;
            continue;
        }
        if let Some(tok) = punct(c) {
            out.push(Token { tok, span });
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        while i < chars.len() {
            let d = chars[i];
            if d.is_whitespace() || punct(d).is_some() || two(i, '-', '>') || two(i, '=', '>') || two(i, '/', '/') {
                break;
            }
            i += 1;
        }
        let text: String = chars[start..i].iter().collect();
        col += (i - start) as u32;
        out.push(Token { tok: Tok::Ident(text), span });
    }
    out.push(Token { tok: Tok::Eof, span: Span { line, col } });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_split_identifiers() {
        let toks: Vec<Tok> = tokenize("f x->y // note\n a=>b").into_iter().map(|t| t.tok).collect();
        assert_eq!(
            toks,
            vec![
                Tok::Ident("f".into()),
                Tok::Ident("x".into()),
                Tok::Arrow,
                Tok::Ident("y".into()),
                Tok::Ident("a".into()),
                Tok::FatArrow,
                Tok::Ident("b".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn spans_track_lines() {
        let toks = tokenize("sort a ;\n  cons [] : a ;");
        let nil = toks.iter().find(|t| t.tok == Tok::Ident("[]".into())).unwrap();
        assert_eq!(nil.span, Span { line: 2, col: 8 });
    }
}
