use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Num(String),
    Sym(&'static str),
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{}`", s),
            Tok::Sym(s) => write!(f, "`{}`", s),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const SYMS: [&str; 26] =
    ["-o", "|-", "::", "(", ")", "[", "]", "{", "}", ",", ".", "*", "+", "&", "!", "↑", "↓", ";", "@", "/", "|", "<", ">", "=", ":", "?"];

/// Tokens with their (line, column) positions, 1-based.
pub(crate) fn lex(src: &str, line0: usize) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let mut line = line0;
    let mut col = 1;
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < cs.len() && cs[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let j = (i..cs.len()).find(|&j| !cs[j].is_ascii_digit()).unwrap_or(cs.len());
            out.push((Tok::Num(cs[i..j].iter().collect()), start.0, start.1));
            col += j - i;
            i = j;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let j = (i..cs.len()).find(|&j| !(cs[j].is_alphanumeric() || cs[j] == '_' || cs[j] == '\'')).unwrap_or(cs.len());
            out.push((Tok::Ident(cs[i..j].iter().collect()), start.0, start.1));
            col += j - i;
            i = j;
            continue;
        }
        let rest: String = cs[i..cs.len().min(i + 2)].iter().collect();
        match SYMS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                out.push((Tok::Sym(s), start.0, start.1));
                let n = s.chars().count();
                i += n;
                col += n;
            }
            None => return Err(ParseError::new(line, col, format!("unexpected character `{}`", c))),
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}
