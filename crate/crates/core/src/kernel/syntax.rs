//! ASCII concrete syntax for formulas, as printed by [`Formula::ascii`].
//!
//! ```text
//! bot  0  1  item(t)  A # B  A (+) B  A & B  ?A  A -o B  A o-o B  A => B
//! forall X. A   exists X. A   \X. A   F A B   (application)
//! ```

use std::fmt;

use super::formula::{Formula, Sort};
use super::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at offset {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Par,
    Oplus,
    With,
    Quest,
    Limp,
    Equiv,
    Implies,
    Lambda,
    Eof,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let is_ident = |c: u8| c.is_ascii_alphanumeric() || c == b'_' || c == b'\'';
    while i < bytes.len() {
        let c = bytes[i];
        let rest = &src[i..];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let (len, tok) = if rest.starts_with("o-o") {
            (3, Tok::Equiv)
        } else if rest.starts_with("(+)") {
            (3, Tok::Oplus)
        } else if rest.starts_with("-o") {
            (2, Tok::Limp)
        } else if rest.starts_with("=>") {
            (2, Tok::Implies)
        } else if c.is_ascii_digit() {
            let n = rest.bytes().take_while(u8::is_ascii_digit).count();
            (n, Tok::Num(rest[..n].to_string()))
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let n = rest.bytes().take_while(|b| is_ident(*b)).count();
            (n, Tok::Ident(rest[..n].to_string()))
        } else {
            let tok = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'#' => Tok::Par,
                b'&' => Tok::With,
                b'?' => Tok::Quest,
                b'\\' => Tok::Lambda,
                _ => {
                    return Err(SyntaxError {
                        offset: i,
                        message: format!("unexpected character `{}`", rest.chars().next().unwrap()),
                    })
                }
            };
            (1, tok)
        };
        out.push((i, tok));
        i += len;
    }
    out.push((src.len(), Tok::Eof));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            offset: self.offset(),
            message: msg.into(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), SyntaxError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}, found {:?}", self.peek()))
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Equiv {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::equiv(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.limp()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn limp(&mut self) -> Result<Formula, SyntaxError> {
        let lhs = self.with()?;
        if *self.peek() == Tok::Limp {
            self.bump();
            let rhs = self.limp()?;
            return Ok(Formula::limp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn with(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.oplus()?;
        while *self.peek() == Tok::With {
            self.bump();
            acc = Formula::with(acc, self.oplus()?);
        }
        Ok(acc)
    }

    fn oplus(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.par()?;
        while *self.peek() == Tok::Oplus {
            self.bump();
            acc = Formula::oplus(acc, self.par()?);
        }
        Ok(acc)
    }

    fn par(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.quest()?;
        while *self.peek() == Tok::Par {
            self.bump();
            acc = Formula::par(acc, self.quest()?);
        }
        Ok(acc)
    }

    fn quest(&mut self) -> Result<Formula, SyntaxError> {
        if *self.peek() == Tok::Quest {
            self.bump();
            return Ok(Formula::quest(self.quest()?));
        }
        self.application()
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !matches!(s.as_str(), "forall" | "exists"),
            Tok::Num(_) | Tok::LParen => true,
            _ => false,
        }
    }

    fn application(&mut self) -> Result<Formula, SyntaxError> {
        let head = self.atom()?;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        Ok(Formula::app(head, args))
    }

    fn binder_name(&mut self) -> Result<String, SyntaxError> {
        match self.bump() {
            Tok::Ident(x) => {
                self.expect(Tok::Dot, "`.` after bound variable")?;
                Ok(x)
            }
            other => self.err(format!("expected a variable name, found {other:?}")),
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        match self.bump() {
            Tok::Lambda => {
                let x = self.binder_name()?;
                Ok(Formula::lam(x, self.formula()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                let x = self.binder_name()?;
                let body = self.formula()?;
                let sort = infer_sort(&x, &body);
                Ok(if kw == "forall" {
                    Formula::forall(x, sort, body)
                } else {
                    Formula::exists(x, sort, body)
                })
            }
            Tok::Ident(kw) if kw == "item" => {
                self.expect(Tok::LParen, "`(` after item")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "`)` closing item")?;
                Ok(Formula::Item(t))
            }
            Tok::Ident(kw) if kw == "bot" => Ok(Formula::Bot),
            Tok::Ident(x) => Ok(Formula::Prop(x)),
            Tok::Num(n) if n == "0" => Ok(Formula::Zero),
            Tok::Num(n) if n == "1" => Ok(Formula::One),
            Tok::LParen => {
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            other => {
                self.pos = self.pos.saturating_sub(1);
                self.err(format!("unexpected token {other:?}"))
            }
        }
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        match self.bump() {
            Tok::Num(n) => Ok(Term::constant(n)),
            Tok::Ident(x) => {
                let is_var = x.starts_with(|c: char| c.is_ascii_uppercase() || c == '_');
                if *self.peek() == Tok::LParen && !is_var {
                    self.bump();
                    let mut args = vec![self.term()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen, "`)` closing term arguments")?;
                    Ok(Term::app(x, args))
                } else if is_var {
                    Ok(Term::Var(x))
                } else {
                    Ok(Term::constant(x))
                }
            }
            other => self.err(format!("expected a term, found {other:?}")),
        }
    }
}

fn infer_sort(x: &str, body: &Formula) -> Sort {
    if body.item_terms().iter().any(|t| t.occurs(x)) {
        Sort::First
    } else {
        Sort::Prop
    }
}

/// Parse a formula in ASCII syntax.
pub fn parse_formula(src: &str) -> Result<Formula, SyntaxError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("trailing input starting with {:?}", p.peek()));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_precedence() {
        let f = parse_formula("forall K. bot # K o-o K").unwrap();
        let want = Formula::forall(
            "K",
            Sort::Prop,
            Formula::equiv(Formula::par(Formula::Bot, Formula::prop("K")), Formula::prop("K")),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn parses_items_and_quest() {
        let f = parse_formula("forall X. ?0 -o ?(item(X) (+) 0 (+) 0)").unwrap();
        match f {
            Formula::Forall(x, Sort::First, body) => {
                assert_eq!(x, "X");
                assert!(matches!(*body, Formula::Limp(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_application_and_lambda() {
        let f = parse_formula(r"R (\l. item(x) -o l) w").unwrap();
        match f {
            Formula::App(h, args) => {
                assert_eq!(*h, Formula::prop("R"));
                assert_eq!(args.len(), 2);
                assert!(matches!(args[0], Formula::Lam(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ascii_printing_reparses() {
        let srcs = [
            "forall X. forall L. (item(X) # L) # K o-o item(X) # M",
            r"forall W. forall w. W w o-o W w",
            "1 & (A o-o B) => (C -o D) -o E",
            "exists q. S # q -o T",
        ];
        for s in srcs {
            let f = parse_formula(s).unwrap();
            let again = parse_formula(&f.ascii()).unwrap();
            assert!(f.alpha_eq(&again) || f.ascii() == again.ascii(), "{s}");
        }
    }

    #[test]
    fn reports_offset_of_errors() {
        let err = parse_formula("item(X").unwrap_err();
        assert_eq!(err.offset, 6);
        assert!(parse_formula("a $ b").is_err());
    }
}
