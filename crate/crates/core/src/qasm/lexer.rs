use super::FrontendError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Integer,
    Real,
    Symbol,
    String,
}

/// A lexeme with its 1-based source position. Tokens never span lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token<'src> {
    pub kind: TokenKind,
    pub text: &'src str,
    pub line: usize,
    pub col: usize,
}

impl Token<'_> {
    /// Column just past the last character.
    pub fn end_col(&self) -> usize {
        self.col + self.text.chars().count()
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_symbol(&self, text: &str) -> bool {
        self.is(TokenKind::Symbol, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }
}

pub const KEYWORDS: &[&str] = &[
    "OPENQASM", "include", "qreg", "creg", "gate", "opaque", "measure", "reset", "barrier", "if", "pi", "U", "CX",
    "sin", "cos", "tan", "exp", "ln", "sqrt",
];

const TWO_CHAR_SYMBOLS: &[&str] = &["->", "=="];
const ONE_CHAR_SYMBOLS: &str = ";,[](){}+-*/^";

/// Splits OpenQASM 2.0 source into tokens, skipping whitespace and `//`
/// comments.
pub fn tokenize(source: &str) -> Result<Vec<Token<'_>>, FrontendError> {
    let mut tokens = Vec::new();
    for (line_idx, line) in source.lines().enumerate() {
        lex_line(line, line_idx + 1, &mut tokens)?;
    }
    Ok(tokens)
}

fn lex_line<'src>(line: &'src str, line_no: usize, out: &mut Vec<Token<'src>>) -> Result<(), FrontendError> {
    let bytes = line.as_bytes();
    let mut i = 0;
    // Column counts characters, not bytes; non-ASCII only appears in comments
    // and strings, so track it separately.
    let col_of = |byte: usize| line[..byte].chars().count() + 1;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if line[i..].starts_with("//") {
            break;
        }
        let start = i;
        let kind = if c.is_ascii_alphabetic() {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &line[start..i];
            if KEYWORDS.contains(&word) {
                TokenKind::Keyword
            } else if c.is_ascii_lowercase() {
                TokenKind::Identifier
            } else {
                return Err(FrontendError::Lex {
                    line: line_no,
                    col: col_of(start),
                    message: format!("identifier '{word}' must start with a lowercase letter"),
                });
            }
        } else if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            lex_number(line, &mut i, line_no, col_of(start))?
        } else if c == b'"' {
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' {
                i += 1;
            }
            if i == bytes.len() {
                return Err(FrontendError::Lex {
                    line: line_no,
                    col: col_of(start),
                    message: "unterminated string".into(),
                });
            }
            i += 1;
            TokenKind::String
        } else if TWO_CHAR_SYMBOLS.iter().any(|s| line[i..].starts_with(s)) {
            i += 2;
            TokenKind::Symbol
        } else if ONE_CHAR_SYMBOLS.as_bytes().contains(&c) {
            i += 1;
            TokenKind::Symbol
        } else {
            let ch = line[i..].chars().next().unwrap_or('?');
            return Err(FrontendError::Lex {
                line: line_no,
                col: col_of(start),
                message: format!("unexpected character '{ch}'"),
            });
        };
        out.push(Token {
            kind,
            text: &line[start..i],
            line: line_no,
            col: col_of(start),
        });
    }
    Ok(())
}

fn lex_number(line: &str, i: &mut usize, line_no: usize, col: usize) -> Result<TokenKind, FrontendError> {
    let bytes = line.as_bytes();
    let digits = |i: &mut usize| {
        let s = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i - s
    };
    let start = *i;
    let mut real = false;
    digits(i);
    if *i < bytes.len() && bytes[*i] == b'.' {
        real = true;
        *i += 1;
        digits(i);
    }
    if *i < bytes.len() && (bytes[*i] == b'e' || bytes[*i] == b'E') {
        real = true;
        *i += 1;
        if *i < bytes.len() && (bytes[*i] == b'+' || bytes[*i] == b'-') {
            *i += 1;
        }
        if digits(i) == 0 {
            return Err(FrontendError::Lex {
                line: line_no,
                col,
                message: format!("malformed exponent in '{}'", &line[start..*i]),
            });
        }
    }
    if *i < bytes.len() && (bytes[*i].is_ascii_alphabetic() || bytes[*i] == b'_') {
        return Err(FrontendError::Lex {
            line: line_no,
            col,
            message: format!("malformed number '{}{}'", &line[start..*i], bytes[*i] as char),
        });
    }
    let text = &line[start..*i];
    if !real && text.len() > 1 && text.starts_with('0') {
        return Err(FrontendError::Lex {
            line: line_no,
            col,
            message: format!("integer '{text}' has a leading zero"),
        });
    }
    Ok(if real { TokenKind::Real } else { TokenKind::Integer })
}
