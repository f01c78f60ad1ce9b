use super::{SourceLocation, SpecError};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(String),
    Real(String),
    Char(char),
    Str(String),
    /// Raw text following `@` up to the end of the line.
    Directive(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    DotDot,
    Bang,
    AndAnd,
    OrOr,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    Ne,
    Plus,
    Minus,
    Star,
    Newline,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) | Tok::Real(s) => format!("number `{s}`"),
            Tok::Char(c) => format!("character '{c}'"),
            Tok::Str(s) => format!("string \"{s}\""),
            Tok::Directive(_) => "`@` directive".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::DotDot => "..",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::EqEq => "==",
            Tok::Ge => ">=",
            Tok::Gt => ">",
            Tok::Ne => "!=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub(crate) fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, SpecError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let err = |line: u32, col: u32, msg: String| SpecError::Syntax {
        loc: SourceLocation::new(file, line, col),
        message: msg,
    };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok: Tok| {
            out.push(Token {
                tok,
                line: start_line,
                col: start_col,
            })
        };

        if c == '\n' {
            push(Tok::Newline);
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '@' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '\n' {
                j += 1;
            }
            let raw: String = chars[i + 1..j].iter().collect();
            push(Tok::Directive(raw.trim().to_string()));
            col += (j - i) as u32;
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            push(Tok::Ident(chars[i..j].iter().collect()));
            col += (j - i) as u32;
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let mut real = false;
            if j + 1 < chars.len() && chars[j] == '.' && chars[j + 1].is_ascii_digit() {
                real = true;
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            let lit: String = chars[i..j].iter().collect();
            push(if real { Tok::Real(lit) } else { Tok::Int(lit) });
            col += (j - i) as u32;
            i = j;
            continue;
        }
        if c == '\'' || c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            loop {
                match chars.get(j) {
                    None | Some('\n') => {
                        return Err(err(start_line, start_col, "unterminated literal".into()))
                    }
                    Some('\\') => {
                        let esc = match chars.get(j + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some(&e @ ('\\' | '\'' | '"')) => e,
                            _ => return Err(err(line, col + (j - i) as u32, "bad escape".into())),
                        };
                        s.push(esc);
                        j += 2;
                    }
                    Some(&q) if q == c => {
                        j += 1;
                        break;
                    }
                    Some(&other) => {
                        s.push(other);
                        j += 1;
                    }
                }
            }
            if c == '\'' {
                let mut it = s.chars();
                match (it.next(), it.next()) {
                    (Some(ch), None) => push(Tok::Char(ch)),
                    _ => {
                        return Err(err(
                            start_line,
                            start_col,
                            "character literal must hold exactly one character".into(),
                        ))
                    }
                }
            } else {
                push(Tok::Str(s));
            }
            col += (j - i) as u32;
            i = j;
            continue;
        }

        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('&', Some('&')) => (Tok::AndAnd, 2),
            ('|', Some('|')) => (Tok::OrOr, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('!', _) => (Tok::Bang, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            _ => return Err(err(line, col, format!("unexpected character `{c}`"))),
        };
        push(tok);
        i += width;
        col += width as u32;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
