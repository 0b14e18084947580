use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    // keywords
    Const,
    Proc,
    Choose,
    Main,
    Skip,
    Cond,
    True,
    False,
    // punctuation
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Bar,
    Arrow,
    Assign,
    // operators
    Plus,
    Minus,
    Star,
    Slash,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return write!(f, "identifier `{name}`"),
            Tok::Int(v) => return write!(f, "integer `{v}`"),
            Tok::Str(_) => "string literal",
            Tok::Const => "`const`",
            Tok::Proc => "`proc`",
            Tok::Choose => "`choose`",
            Tok::Main => "`main`",
            Tok::Skip => "`skip`",
            Tok::Cond => "`cond`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Comma => "`,`",
            Tok::Semi => "`;`",
            Tok::Bar => "`|`",
            Tok::Arrow => "`->`",
            Tok::Assign => "`=`",
            Tok::Plus => "`+`",
            Tok::Minus => "`-`",
            Tok::Star => "`*`",
            Tok::Slash => "`/`",
            Tok::EqEq => "`==`",
            Tok::NotEq => "`!=`",
            Tok::Lt => "`<`",
            Tok::Le => "`<=`",
            Tok::Gt => "`>`",
            Tok::Ge => "`>=`",
            Tok::AndAnd => "`&&`",
            Tok::OrOr => "`||`",
            Tok::Bang => "`!`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

pub fn is_keyword(word: &str) -> bool {
    keyword(word).is_some()
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "const" => Tok::Const,
        "proc" => Tok::Proc,
        "choose" => Tok::Choose,
        "main" => Tok::Main,
        "skip" => Tok::Skip,
        "cond" => Tok::Cond,
        "true" => Tok::True,
        "false" => Tok::False,
        _ => return None,
    })
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Lexer<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat(&mut self, expected: char) -> bool {
        if self.peek() == Some(expected) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    if ahead.next() != Some('/') {
                        return;
                    }
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn string(&mut self, line: usize, column: usize) -> Result<String, ParseError> {
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => {
                    return Err(ParseError::new(line, column, "unterminated string literal"))
                }
                Some('"') => return Ok(out),
                Some('\\') => {
                    let (l, c) = (self.line, self.column);
                    match self.bump() {
                        Some('n') => out.push('\n'),
                        Some('t') => out.push('\t'),
                        Some('r') => out.push('\r'),
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('0') => out.push('\0'),
                        _ => return Err(ParseError::new(l, c, "invalid escape sequence")),
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }
}

/// Splits source text into tokens, ending with a single `Eof` token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer {
        chars: source.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia();
        let (line, column) = (lx.line, lx.column);
        let Some(c) = lx.bump() else {
            out.push(Token {
                tok: Tok::Eof,
                line,
                column,
            });
            return Ok(out);
        };
        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '-' if lx.eat('>') => Tok::Arrow,
            '-' => Tok::Minus,
            '|' if lx.eat('|') => Tok::OrOr,
            '|' => Tok::Bar,
            '&' if lx.eat('&') => Tok::AndAnd,
            '=' if lx.eat('=') => Tok::EqEq,
            '=' => Tok::Assign,
            '!' if lx.eat('=') => Tok::NotEq,
            '!' => Tok::Bang,
            '<' if lx.eat('=') => Tok::Le,
            '<' => Tok::Lt,
            '>' if lx.eat('=') => Tok::Ge,
            '>' => Tok::Gt,
            '"' => Tok::Str(lx.string(line, column)?),
            c if c.is_ascii_digit() => {
                let mut digits = String::from(c);
                while let Some(d) = lx.peek().filter(char::is_ascii_digit) {
                    digits.push(d);
                    lx.bump();
                }
                if lx.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') {
                    return Err(ParseError::new(line, column, "malformed integer literal"));
                }
                let value = digits.parse::<i64>().map_err(|_| {
                    ParseError::new(line, column, "integer literal out of 64-bit range")
                })?;
                Tok::Int(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::from(c);
                while let Some(d) = lx.peek().filter(|c| c.is_ascii_alphanumeric() || *c == '_') {
                    word.push(d);
                    lx.bump();
                }
                keyword(&word).unwrap_or(Tok::Ident(word))
            }
            other => {
                return Err(ParseError::new(
                    line,
                    column,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        out.push(Token { tok, line, column });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_separators() {
        assert_eq!(
            toks("| || -> - == = != ! <= < >= > &&"),
            vec![
                Tok::Bar,
                Tok::OrOr,
                Tok::Arrow,
                Tok::Minus,
                Tok::EqEq,
                Tok::Assign,
                Tok::NotEq,
                Tok::Bang,
                Tok::Le,
                Tok::Lt,
                Tok::Ge,
                Tok::Gt,
                Tok::AndAnd,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let tokens = tokenize("// header\n  main // trailing\n{").unwrap();
        assert_eq!(tokens[0].tok, Tok::Main);
        assert_eq!((tokens[0].line, tokens[0].column), (2, 3));
        assert_eq!(tokens[1].tok, Tok::LBrace);
        assert_eq!((tokens[1].line, tokens[1].column), (3, 1));
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b\\c\n""#)[0], Tok::Str("a\"b\\c\n".into()));
    }

    #[test]
    fn lexical_errors() {
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("99999999999999999999").is_err());
        assert!(tokenize("12abc").is_err());
        assert!(tokenize("_x").is_err());
        assert!(tokenize("x & y").is_err());
        assert!(tokenize("caf\u{e9}").is_err());
    }

    #[test]
    fn identifiers_allow_digits_and_underscores() {
        assert_eq!(toks("a_1b")[0], Tok::Ident("a_1b".into()));
    }
}
