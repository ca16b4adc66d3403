use super::diag::{DiagCode, Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokKind {
    /// Lowercase-initial identifier.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    Int(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Neck,
    Arrow,
    Colon,
    Plus,
    Eq,
    Le,
    Eof,
}

impl TokKind {
    pub fn describe(&self) -> String {
        match self {
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Var(s) => format!("variable `{s}`"),
            TokKind::Int(s) => format!("integer `{s}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::LBrace => "`{`".into(),
            TokKind::RBrace => "`}`".into(),
            TokKind::Comma => "`,`".into(),
            TokKind::Dot => "`.`".into(),
            TokKind::Neck => "`:-`".into(),
            TokKind::Arrow => "`->`".into(),
            TokKind::Colon => "`:`".into(),
            TokKind::Plus => "`+`".into(),
            TokKind::Eq => "`=`".into(),
            TokKind::Le => "`<=`".into(),
            TokKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub span: Span,
}

/// Tokenize; `%` starts a comment that runs to end of line. Unknown characters
/// yield diagnostics and are skipped.
pub fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (len, kind) = if c.is_ascii_alphabetic() || c == '_' {
            let n = chars[i..]
                .iter()
                .take_while(|ch| ch.is_ascii_alphanumeric() || **ch == '_')
                .count();
            let word: String = chars[i..i + n].iter().collect();
            let kind = if c.is_ascii_uppercase() || c == '_' {
                TokKind::Var(word)
            } else {
                TokKind::Ident(word)
            };
            (n, kind)
        } else if c.is_ascii_digit() {
            let n = chars[i..].iter().take_while(|ch| ch.is_ascii_digit()).count();
            (n, TokKind::Int(chars[i..i + n].iter().collect()))
        } else {
            match (c, next) {
                (':', Some('-')) => (2, TokKind::Neck),
                ('-', Some('>')) => (2, TokKind::Arrow),
                ('<', Some('=')) => (2, TokKind::Le),
                ('(', _) => (1, TokKind::LParen),
                (')', _) => (1, TokKind::RParen),
                ('{', _) => (1, TokKind::LBrace),
                ('}', _) => (1, TokKind::RBrace),
                (',', _) => (1, TokKind::Comma),
                ('.', _) => (1, TokKind::Dot),
                (':', _) => (1, TokKind::Colon),
                ('+', _) => (1, TokKind::Plus),
                ('=', _) => (1, TokKind::Eq),
                _ => {
                    diags.push(Diagnostic::new(
                        DiagCode::Syntax,
                        span,
                        format!("unexpected character `{}`", c.escape_debug()),
                    ));
                    advance(1, &mut i, &mut col);
                    continue;
                }
            }
        };
        toks.push(Token { kind, span });
        advance(len, &mut i, &mut col);
    }
    toks.push(Token {
        kind: TokKind::Eof,
        span: Span::new(line, col),
    });
    (toks, diags)
}

/// Cursor over a token stream shared by the program and annotation parsers.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &TokKind {
        &self.toks[self.pos].kind
    }

    pub fn peek_at(&self, k: usize) -> &TokKind {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].kind
    }

    pub fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), TokKind::Eof)
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, k: &TokKind) -> bool {
        if self.peek() == k {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, k: TokKind, context: &str) -> Result<Span, Diagnostic> {
        if *self.peek() == k {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[k.describe()], context))
        }
    }

    pub fn unexpected(&self, expected: &[String], context: &str) -> Diagnostic {
        Diagnostic::new(
            DiagCode::Syntax,
            self.span(),
            format!(
                "expected {} {context}, found {}",
                expected.join(" or "),
                self.peek().describe()
            ),
        )
    }

    /// Skip past the next `.` (or to end of input).
    pub fn recover(&mut self) {
        while !self.at_eof() {
            if self.bump().kind == TokKind::Dot {
                break;
            }
        }
    }
}
