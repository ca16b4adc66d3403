use super::check::{check_annotation, check_ctor_annotation};
use super::diag::{DiagCode, Diagnostic, Span};
use super::lexer::{lex, Cursor, TokKind};
use super::types::Signature;
use super::{AnnBody, Annotation, AnnotationFile, CollExpr, CtorAnnotation, Mode, Relation};

/// Parse a `.ca` annotation file against an already-parsed signature.
pub fn parse_annotations(src: &str, sig: &Signature) -> Result<AnnotationFile, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(src);
    let mut p = AnnParser {
        cur: Cursor::new(toks),
        file: AnnotationFile::default(),
        mode_at: None,
        diags: Vec::new(),
    };
    while !p.cur.at_eof() {
        if let Err(d) = p.line() {
            p.diags.push(d);
            p.cur.recover();
        }
    }
    let has_lines = !p.file.annotations.is_empty() || !p.file.ctors.is_empty();
    if p.file.mode.is_none() && has_lines {
        p.diags.push(Diagnostic::new(
            DiagCode::NotApproximated,
            Span::new(1, 1),
            "missing `approx <type> as multiset|set|dlist.` header",
        ));
    }
    let mode = p.file.mode.unwrap_or(Mode::Multiset);
    for a in &mut p.file.annotations {
        a.mode = mode;
    }
    for a in &p.file.annotations {
        p.diags.extend(check_annotation(sig, &p.file.approximated, a));
    }
    for c in &p.file.ctors {
        p.diags.extend(check_ctor_annotation(sig, &p.file.approximated, c));
    }
    diags.append(&mut p.diags);
    if diags.is_empty() {
        Ok(p.file)
    } else {
        diags.sort_by_key(|d| d.span);
        Err(diags)
    }
}

struct AnnParser {
    cur: Cursor,
    file: AnnotationFile,
    mode_at: Option<Span>,
    diags: Vec<Diagnostic>,
}

impl AnnParser {
    fn line(&mut self) -> Result<(), Diagnostic> {
        let start = self.cur.span();
        let kw = match self.cur.peek() {
            TokKind::Ident(k) if matches!(k.as_str(), "approx" | "pred" | "ctor") => k.clone(),
            _ => {
                return Err(self.cur.unexpected(
                    &["`approx`".into(), "`pred`".into(), "`ctor`".into()],
                    "at start of line",
                ))
            }
        };
        self.cur.bump();
        match kw.as_str() {
            "approx" => self.header(start),
            "pred" => self.pred(start),
            _ => self.ctor(start),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), Diagnostic> {
        let span = self.cur.span();
        match self.cur.peek().clone() {
            TokKind::Ident(s) => {
                self.cur.bump();
                Ok((s, span))
            }
            _ => Err(self.cur.unexpected(&[what.into()], "")),
        }
    }

    fn header(&mut self, start: Span) -> Result<(), Diagnostic> {
        let (ty, _) = self.ident("a type name")?;
        match self.cur.peek() {
            TokKind::Ident(a) if a == "as" => {
                self.cur.bump();
            }
            _ => return Err(self.cur.unexpected(&["`as`".into()], "in approx header")),
        }
        let (m, mspan) = self.ident("`multiset`, `set` or `dlist`")?;
        let mode = Mode::parse(&m).ok_or_else(|| {
            Diagnostic::new(
                DiagCode::Syntax,
                mspan,
                format!("unknown mode `{m}`: expected `multiset`, `set` or `dlist`"),
            )
        })?;
        self.cur.expect(TokKind::Dot, "to end the header")?;
        match (self.file.mode, self.mode_at) {
            (Some(old), Some(at)) if old != mode => self.diags.push(Diagnostic::new(
                DiagCode::ConflictingModes,
                start,
                format!("mode `{mode}` conflicts with `{old}` chosen at {at}"),
            )),
            _ => {
                self.file.mode = Some(mode);
                self.mode_at = Some(start);
            }
        }
        self.file.approximated.insert(ty);
        Ok(())
    }

    fn params(&mut self) -> Result<Vec<String>, Diagnostic> {
        let mut params = Vec::new();
        if !self.cur.eat(&TokKind::LParen) {
            return Ok(params);
        }
        loop {
            let span = self.cur.span();
            match self.cur.peek().clone() {
                TokKind::Var(v) => {
                    self.cur.bump();
                    if v != "_" && params.contains(&v) {
                        return Err(Diagnostic::new(
                            DiagCode::Syntax,
                            span,
                            format!("parameter `{v}` is repeated"),
                        ));
                    }
                    params.push(v);
                }
                _ => return Err(self.cur.unexpected(&["a parameter variable".into()], "")),
            }
            match self.cur.peek() {
                TokKind::Comma => {
                    self.cur.bump();
                }
                TokKind::RParen => {
                    self.cur.bump();
                    return Ok(params);
                }
                _ => {
                    return Err(self
                        .cur
                        .unexpected(&["`,`".into(), "`)`".into()], "in parameter list"))
                }
            }
        }
    }

    fn pred(&mut self, start: Span) -> Result<(), Diagnostic> {
        let (predicate, _) = self.ident("a predicate name")?;
        let params = self.params()?;
        self.cur.expect(TokKind::Colon, "after the predicate head")?;
        let body = match self.cur.peek() {
            TokKind::Ident(t) if t == "true" => {
                self.cur.bump();
                AnnBody::Trivial
            }
            _ => {
                let lhs = self.side(&params)?;
                let relation = match self.cur.peek() {
                    TokKind::Eq => Relation::Eq,
                    TokKind::Le => Relation::Incl,
                    _ => return Err(self.cur.unexpected(&["`=`".into(), "`<=`".into()], "")),
                };
                self.cur.bump();
                let rhs = self.side(&params)?;
                AnnBody::Judgment { relation, lhs, rhs }
            }
        };
        self.cur.expect(TokKind::Dot, "to end the annotation")?;
        self.file.annotations.push(Annotation {
            predicate,
            params,
            mode: Mode::Multiset,
            body,
            span: start,
        });
        Ok(())
    }

    fn ctor(&mut self, start: Span) -> Result<(), Diagnostic> {
        let (constructor, _) = self.ident("a constructor name")?;
        let params = self.params()?;
        self.cur.expect(TokKind::Eq, "after the constructor head")?;
        let side = self.side(&params)?;
        self.cur.expect(TokKind::Dot, "to end the constructor map")?;
        self.file.ctors.push(CtorAnnotation {
            constructor,
            params,
            side,
            span: start,
        });
        Ok(())
    }

    /// `a + b + c` associates to the right.
    fn side(&mut self, params: &[String]) -> Result<CollExpr, Diagnostic> {
        let mut parts = vec![self.side_atom(params)?];
        while self.cur.eat(&TokKind::Plus) {
            parts.push(self.side_atom(params)?);
        }
        let last = parts.pop().expect("nonempty");
        Ok(parts.into_iter().rev().fold(last, |acc, p| CollExpr::union(p, acc)))
    }

    fn side_atom(&mut self, params: &[String]) -> Result<CollExpr, Diagnostic> {
        let span = self.cur.span();
        match self.cur.peek().clone() {
            TokKind::LBrace => {
                self.cur.bump();
                if self.cur.eat(&TokKind::RBrace) {
                    return Ok(CollExpr::Empty);
                }
                let vspan = self.cur.span();
                let v = match self.cur.peek().clone() {
                    TokKind::Var(v) => v,
                    _ => return Err(self.cur.unexpected(&["a parameter".into(), "`}`".into()], "")),
                };
                self.cur.bump();
                let pos = position(params, &v, vspan)?;
                match self.cur.peek() {
                    TokKind::RBrace => {
                        self.cur.bump();
                        Ok(CollExpr::Singleton(pos))
                    }
                    TokKind::Eof => Err(Diagnostic::new(
                        DiagCode::UnclosedParen,
                        span,
                        "unclosed `{` before end of input",
                    )),
                    _ => Err(self.cur.unexpected(&["`}`".into()], "")),
                }
            }
            TokKind::Var(v) => {
                self.cur.bump();
                Ok(CollExpr::Arg(position(params, &v, span)?))
            }
            _ => Err(self
                .cur
                .unexpected(&["`{`".into(), "a parameter".into()], "in collection expression")),
        }
    }
}

fn position(params: &[String], v: &str, span: Span) -> Result<usize, Diagnostic> {
    if v == "_" {
        return Err(Diagnostic::new(
            DiagCode::UnknownParameter,
            span,
            "`_` cannot be referenced",
        ));
    }
    params
        .iter()
        .position(|p| p == v)
        .map(|i| i + 1)
        .ok_or_else(|| {
            Diagnostic::new(
                DiagCode::UnknownParameter,
                span,
                format!("`{v}` is not a parameter of this annotation"),
            )
        })
}
