use crate::diagnostic::{Code, Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eq,
    Arrow,
    Pipe,
    Amp,
    Bang,
    Colon,
    /// Newline or semicolon.
    End,
    /// Already reported by the lexer.
    Error,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Str(_) => "a string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Colon => "`:`".into(),
            Tok::End => "end of statement".into(),
            Tok::Error => "invalid token".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Lexer<'a> {
    file: &'a str,
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
}

fn is_word_start(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Tokenizes the whole source. Bad input yields an `Error` token plus an
/// `E_LEX` diagnostic and lexing continues.
pub(crate) fn lex(file: &str, source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer {
        file,
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        tokens: Vec::new(),
        diagnostics: Vec::new(),
    };
    lx.run();
    (lx.tokens, lx.diagnostics)
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<char> {
        self.chars.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> char {
        let c = self.chars[self.pos];
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        c
    }

    fn span(&self, line: usize, column: usize, length: usize) -> SourceSpan {
        SourceSpan::new(self.file, line, column, length)
    }

    fn push(&mut self, tok: Tok, line: usize, column: usize, length: usize) {
        let span = self.span(line, column, length);
        self.tokens.push(Token { tok, span });
    }

    fn error(&mut self, message: String, line: usize, column: usize, length: usize) {
        let span = self.span(line, column, length);
        self.diagnostics
            .push(Diagnostic::new(Code::Lex, message).with_span(Some(span.clone())));
        self.tokens.push(Token { tok: Tok::Error, span });
    }

    fn run(&mut self) {
        while let Some(c) = self.peek() {
            let (line, column) = (self.line, self.column);
            match c {
                '\n' | ';' => {
                    self.bump();
                    self.push(Tok::End, line, column, 1);
                }
                ' ' | '\t' | '\r' => {
                    self.bump();
                }
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '"' => self.string(line, column),
                '-' if self.peek2() == Some('>') => {
                    self.bump();
                    self.bump();
                    self.push(Tok::Arrow, line, column, 2);
                }
                c if is_word_start(c) => self.word(line, column),
                _ => {
                    let tok = match c {
                        '{' => Some(Tok::LBrace),
                        '}' => Some(Tok::RBrace),
                        '(' => Some(Tok::LParen),
                        ')' => Some(Tok::RParen),
                        ',' => Some(Tok::Comma),
                        '=' => Some(Tok::Eq),
                        '|' => Some(Tok::Pipe),
                        '&' => Some(Tok::Amp),
                        '!' => Some(Tok::Bang),
                        ':' => Some(Tok::Colon),
                        _ => None,
                    };
                    self.bump();
                    match tok {
                        Some(t) => self.push(t, line, column, 1),
                        None => self.error(format!("unexpected character {c:?}"), line, column, 1),
                    }
                }
            }
        }
        let (line, column) = (self.line, self.column);
        self.push(Tok::Eof, line, column, 0);
    }

    fn word(&mut self, line: usize, column: usize) {
        let mut text = String::new();
        while self.peek().is_some_and(is_word_start) {
            text.push(self.bump());
        }
        let len = text.chars().count();
        let valid = !text.starts_with(|c: char| c.is_ascii_digit())
            && text
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if valid {
            self.push(Tok::Word(text), line, column, len);
        } else {
            self.error(
                format!("invalid identifier `{text}`: identifiers use lowercase letters, digits and `_`, and cannot start with a digit"),
                line,
                column,
                len,
            );
        }
    }

    fn string(&mut self, line: usize, column: usize) {
        self.bump();
        let mut text = String::new();
        let mut length = 1;
        let mut bad_escape: Option<(usize, usize, char)> = None;
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.error("unterminated string".into(), line, column, length);
                    return;
                }
                Some('"') => {
                    self.bump();
                    length += 1;
                    break;
                }
                Some('\\') => {
                    let (el, ec) = (self.line, self.column);
                    self.bump();
                    length += 1;
                    match self.peek() {
                        None | Some('\n') => continue,
                        Some(e) => {
                            self.bump();
                            length += 1;
                            match e {
                                '"' => text.push('"'),
                                '\\' => text.push('\\'),
                                'n' => text.push('\n'),
                                't' => text.push('\t'),
                                'r' => text.push('\r'),
                                other => {
                                    bad_escape.get_or_insert((el, ec, other));
                                }
                            }
                        }
                    }
                }
                Some(_) => {
                    text.push(self.bump());
                    length += 1;
                }
            }
        }
        match bad_escape {
            Some((el, ec, c)) => self.error(format!("unknown escape `\\{c}` in string"), el, ec, 2),
            None => self.push(Tok::Str(text), line, column, length),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex("t", src).0.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic_tokens() {
        assert_eq!(
            toks("causes a -> b # c\n"),
            vec![
                Tok::Word("causes".into()),
                Tok::Word("a".into()),
                Tok::Arrow,
                Tok::Word("b".into()),
                Tok::End,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn strings_and_escapes() {
        assert_eq!(toks(r#""a \"b\" \\ c\n""#)[0], Tok::Str("a \"b\" \\ c\n".into()));
        let (tokens, diags) = lex("t", "\"abc");
        assert_eq!(tokens[0].tok, Tok::Error);
        assert_eq!(diags[0].code, Code::Lex);
        let (_, diags) = lex("t", r#""a\qb""#);
        assert_eq!(diags[0].span.as_ref().unwrap().column, 3);
    }

    #[test]
    fn bad_identifiers_and_characters() {
        let (_, diags) = lex("t", "actor Op\noccurrence 1x\n@");
        let cols: Vec<_> = diags
            .iter()
            .map(|d| {
                let s = d.span.as_ref().unwrap();
                (s.line, s.column, s.length)
            })
            .collect();
        assert_eq!(cols, vec![(1, 7, 2), (2, 12, 2), (3, 1, 1)]);
    }

    #[test]
    fn crlf_is_a_single_line_break() {
        let (tokens, _) = lex("t", "a\r\nb");
        assert_eq!(tokens[2].span.line, 2);
        assert_eq!(tokens[2].span.column, 1);
    }

    #[test]
    fn columns_count_characters() {
        let (tokens, _) = lex("t", "\"é\" x");
        assert_eq!(tokens[0].span.length, 3);
        assert_eq!(tokens[1].span.column, 5);
    }
}
