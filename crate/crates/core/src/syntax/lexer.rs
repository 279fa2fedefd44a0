use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase identifier: names, symbols, keywords.
    Lower(String),
    /// Capitalized or `_`-prefixed identifier: variables.
    Upper(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Comma,
    Dot,
    Bar,
    Colon,
    Hash,
    Eq,
    Turnstile,
    Backslash,
    Tilde,
    And,
    Or,
    Arrow,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Lower(s) | Tok::Upper(s) => return write!(f, "`{s}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::Colon => ":",
            Tok::Hash => "#",
            Tok::Eq => "=",
            Tok::Turnstile => ":-",
            Tok::Backslash => "\\",
            Tok::Tilde => "~",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Arrow => "->",
            Tok::Iff => "<->",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub ch: char,
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

/// Splits source text into tokens; `%` starts a comment running to end of line.
pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        let peek = chars.get(i + 1).copied();
        let peek2 = chars.get(i + 2).copied();
        let mut width = 1;
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = if c.is_uppercase() || c == '_' {
                    Tok::Upper(s)
                } else {
                    Tok::Lower(s)
                };
                out.push((tok, pos));
                continue;
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '<' if peek == Some('-') && peek2 == Some('>') => {
                width = 3;
                Some(Tok::Iff)
            }
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '|' => Some(Tok::Bar),
            ':' if peek == Some('-') => {
                width = 2;
                Some(Tok::Turnstile)
            }
            ':' => Some(Tok::Colon),
            '#' => Some(Tok::Hash),
            '=' => Some(Tok::Eq),
            '\\' if peek == Some('/') => {
                width = 2;
                Some(Tok::Or)
            }
            '\\' | 'λ' => Some(Tok::Backslash),
            '/' if peek == Some('\\') => {
                width = 2;
                Some(Tok::And)
            }
            '-' if peek == Some('>') => {
                width = 2;
                Some(Tok::Arrow)
            }
            '~' | '¬' => Some(Tok::Tilde),
            _ => return Err(LexError { pos, ch: c }),
        };
        if let Some(t) = tok {
            out.push((t, pos));
        }
        i += width;
        col += width;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn operators_and_identifiers() {
        assert_eq!(
            toks("p(X) :- a # X, <-> -> /\\ \\/ \\x"),
            vec![
                Tok::Lower("p".into()),
                Tok::LParen,
                Tok::Upper("X".into()),
                Tok::RParen,
                Tok::Turnstile,
                Tok::Lower("a".into()),
                Tok::Hash,
                Tok::Upper("X".into()),
                Tok::Comma,
                Tok::Iff,
                Tok::Arrow,
                Tok::And,
                Tok::Or,
                Tok::Backslash,
                Tok::Lower("x".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = lex("% comment\n  foo'").unwrap();
        assert_eq!(t[0], (Tok::Lower("foo'".into()), Pos { line: 2, col: 3 }));
    }

    #[test]
    fn bad_character_is_located() {
        assert_eq!(
            lex("a $").unwrap_err(),
            LexError {
                pos: Pos { line: 1, col: 3 },
                ch: '$'
            }
        );
    }
}
