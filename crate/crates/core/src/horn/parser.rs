use std::collections::BTreeSet;

use super::diag::{DiagCode, Diagnostic, Span};
use super::lexer::{lex, Cursor, TokKind};
use super::types::{Decl, FnType, KindDecl, Signature, Type};
use super::{Atom, HornClause, Program};
use crate::kernel::Term;

const MAX_DEPTH: usize = 200;

/// Parse a `.hc` program. Syntax errors are recovered from at the next `.`, so
/// all of them are reported at once.
pub fn parse_program(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let (toks, mut diags) = lex(src);
    let mut p = ProgramParser {
        cur: Cursor::new(toks),
        sig: Signature::default(),
        clauses: Vec::new(),
        uses: Vec::new(),
        diags: Vec::new(),
    };
    while !p.cur.at_eof() {
        if let Err(d) = p.statement() {
            p.diags.push(d);
            p.cur.recover();
        }
    }
    p.check_types();
    p.check_arities();
    diags.append(&mut p.diags);
    if diags.is_empty() {
        Ok(Program::new(p.sig, p.clauses))
    } else {
        diags.sort_by_key(|d| d.span);
        Err(diags)
    }
}

struct ProgramParser {
    cur: Cursor,
    sig: Signature,
    clauses: Vec<HornClause>,
    /// Every functor/predicate occurrence: name, arity, location.
    uses: Vec<(String, usize, Span)>,
    diags: Vec<Diagnostic>,
}

impl ProgramParser {
    fn statement(&mut self) -> Result<(), Diagnostic> {
        let start = self.cur.span();
        if self.cur.eat(&TokKind::Neck) {
            return self.directive(start);
        }
        let head = self.atom()?;
        let mut body = Vec::new();
        if self.cur.eat(&TokKind::Neck) {
            body.push(self.atom()?);
            while self.cur.eat(&TokKind::Comma) {
                body.push(self.atom()?);
            }
        }
        if !self.cur.eat(&TokKind::Dot) {
            let expected = if body.is_empty() { "`:-` or `.`" } else { "`,` or `.`" };
            return Err(self.cur.unexpected(&[expected.into()], "after atom"));
        }
        let mut clause = HornClause::new(head, body, start);
        name_anonymous(&mut clause);
        self.clauses.push(clause);
        Ok(())
    }

    fn directive(&mut self, start: Span) -> Result<(), Diagnostic> {
        let kw = match self.cur.peek() {
            TokKind::Ident(k) if k == "kind" || k == "type" => k.clone(),
            _ => {
                return Err(self
                    .cur
                    .unexpected(&["`kind`".into(), "`type`".into()], "in declaration"))
            }
        };
        self.cur.bump();
        let name_span = self.cur.span();
        let name = match self.cur.bump().kind {
            TokKind::Ident(n) => n,
            other => {
                return Err(Diagnostic::new(
                    DiagCode::Syntax,
                    name_span,
                    format!("expected a lowercase name to declare, found {}", other.describe()),
                ))
            }
        };
        if kw == "kind" {
            let arity = self.kind_expr()?;
            self.cur.expect(TokKind::Dot, "to end the declaration")?;
            self.add_kind(KindDecl {
                name,
                arity,
                span: start,
            });
        } else {
            let ty = self.fn_type()?;
            self.cur.expect(TokKind::Dot, "to end the declaration")?;
            self.add_decl(Decl {
                name,
                ty,
                span: start,
            });
        }
        Ok(())
    }

    fn add_kind(&mut self, k: KindDecl) {
        if Signature::BUILTIN_TYPES.contains(&k.name.as_str()) {
            self.diags.push(Diagnostic::new(
                DiagCode::DuplicateDeclaration,
                k.span,
                format!("`{}` is a built-in type", k.name),
            ));
            return;
        }
        match self.sig.kind(&k.name) {
            Some(old) if old.arity == k.arity => {}
            Some(old) => self.diags.push(Diagnostic::new(
                DiagCode::DuplicateDeclaration,
                k.span,
                format!(
                    "kind `{}` redeclared with arity {} (previously {} at {})",
                    k.name, k.arity, old.arity, old.span
                ),
            )),
            None => self.sig.push_kind(k),
        }
    }

    fn add_decl(&mut self, d: Decl) {
        match self.sig.decl(&d.name) {
            Some(old) if old.ty == d.ty => {}
            Some(old) => self.diags.push(Diagnostic::new(
                DiagCode::DuplicateDeclaration,
                d.span,
                format!(
                    "`{}` redeclared as `{}` (previously `{}` at {})",
                    d.name, d.ty, old.ty, old.span
                ),
            )),
            None => self.sig.push_decl(d),
        }
    }

    fn kind_expr(&mut self) -> Result<usize, Diagnostic> {
        let mut arity = 0;
        loop {
            match self.cur.peek() {
                TokKind::Ident(t) if t == "type" => {
                    self.cur.bump();
                }
                _ => return Err(self.cur.unexpected(&["`type`".into()], "in kind")),
            }
            if !self.cur.eat(&TokKind::Arrow) {
                return Ok(arity);
            }
            arity += 1;
        }
    }

    fn fn_type(&mut self) -> Result<FnType, Diagnostic> {
        let mut parts = vec![self.type_app(0)?];
        while self.cur.eat(&TokKind::Arrow) {
            parts.push(self.type_app(0)?);
        }
        let result = parts.pop().expect("at least one type");
        Ok(FnType {
            params: parts,
            result,
        })
    }

    fn type_app(&mut self, depth: usize) -> Result<Type, Diagnostic> {
        if let TokKind::Ident(c) = self.cur.peek().clone() {
            self.cur.bump();
            let mut args = Vec::new();
            while matches!(
                self.cur.peek(),
                TokKind::Ident(_) | TokKind::Var(_) | TokKind::LParen
            ) {
                args.push(self.type_atom(depth + 1)?);
            }
            return Ok(Type::Con(c, args));
        }
        self.type_atom(depth)
    }

    fn type_atom(&mut self, depth: usize) -> Result<Type, Diagnostic> {
        if depth > MAX_DEPTH {
            return Err(Diagnostic::new(DiagCode::Syntax, self.cur.span(), "type nested too deeply"));
        }
        let span = self.cur.span();
        match self.cur.peek().clone() {
            TokKind::Ident(c) => {
                self.cur.bump();
                Ok(Type::con(c))
            }
            TokKind::Var(v) => {
                self.cur.bump();
                Ok(Type::Var(v))
            }
            TokKind::LParen => {
                self.cur.bump();
                let inner = self.fn_type()?;
                self.close_paren(span, "in type")?;
                if !inner.params.is_empty() {
                    return Err(Diagnostic::new(
                        DiagCode::Syntax,
                        span,
                        "higher-order types are not supported",
                    ));
                }
                Ok(inner.result)
            }
            _ => Err(self.cur.unexpected(&["a type".into()], "")),
        }
    }

    fn close_paren(&mut self, open: Span, context: &str) -> Result<(), Diagnostic> {
        match self.cur.peek() {
            TokKind::RParen => {
                self.cur.bump();
                Ok(())
            }
            TokKind::Eof => Err(Diagnostic::new(
                DiagCode::UnclosedParen,
                open,
                format!("unclosed `(` {context}: reached end of input"),
            )),
            _ => Err(self.cur.unexpected(&["`)`".into()], context)),
        }
    }

    fn atom(&mut self) -> Result<Atom, Diagnostic> {
        let span = self.cur.span();
        let predicate = match self.cur.peek().clone() {
            TokKind::Ident(p) => {
                self.cur.bump();
                p
            }
            _ => return Err(self.cur.unexpected(&["a predicate name".into()], "")),
        };
        let args = self.arguments(0)?;
        self.uses.push((predicate.clone(), args.len(), span));
        Ok(Atom {
            predicate,
            args,
            span,
        })
    }

    fn arguments(&mut self, depth: usize) -> Result<Vec<Term>, Diagnostic> {
        let open = self.cur.span();
        if !self.cur.eat(&TokKind::LParen) {
            return Ok(Vec::new());
        }
        let mut args = vec![self.term(depth + 1)?];
        loop {
            match self.cur.peek() {
                TokKind::Comma => {
                    self.cur.bump();
                    args.push(self.term(depth + 1)?);
                }
                TokKind::RParen => {
                    self.cur.bump();
                    return Ok(args);
                }
                TokKind::Eof => {
                    return Err(Diagnostic::new(
                        DiagCode::UnclosedParen,
                        open,
                        "unclosed `(`: expected `,` or `)` before end of input",
                    ))
                }
                _ => {
                    return Err(self
                        .cur
                        .unexpected(&["`,`".into(), "`)`".into()], "in argument list"))
                }
            }
        }
    }

    fn term(&mut self, depth: usize) -> Result<Term, Diagnostic> {
        if depth > MAX_DEPTH {
            return Err(Diagnostic::new(DiagCode::Syntax, self.cur.span(), "term nested too deeply"));
        }
        let span = self.cur.span();
        match self.cur.peek().clone() {
            TokKind::Var(v) => {
                self.cur.bump();
                Ok(Term::Var(v))
            }
            TokKind::Int(n) => {
                self.cur.bump();
                Ok(Term::constant(n))
            }
            TokKind::Ident(f) => {
                self.cur.bump();
                let args = self.arguments(depth)?;
                self.uses.push((f.clone(), args.len(), span));
                Ok(Term::app(f, args))
            }
            TokKind::Eof => Err(Diagnostic::new(
                DiagCode::Syntax,
                span,
                "expected a term, found end of input",
            )),
            _ => Err(self.cur.unexpected(&["a term".into()], "")),
        }
    }

    fn check_types(&mut self) {
        let sig = &self.sig;
        for d in sig.decls() {
            let mut tys: Vec<&Type> = d.ty.params.iter().collect();
            tys.push(&d.ty.result);
            for t in tys {
                check_type(sig, t, d.span, &mut self.diags);
            }
            if d.ty.params.iter().any(Type::is_prop) {
                self.diags.push(Diagnostic::new(
                    DiagCode::UnknownType,
                    d.span,
                    format!("`{}`: `o` may only appear as a result type", d.name),
                ));
            }
        }
    }

    fn check_arities(&mut self) {
        for (name, arity, span) in &self.uses {
            if let Some(d) = self.sig.decl(name) {
                if d.arity() != *arity {
                    self.diags.push(Diagnostic::new(
                        DiagCode::ArityMismatch,
                        *span,
                        format!("`{name}` is declared with arity {} but used with {arity}", d.arity()),
                    ));
                }
            }
        }
    }
}

fn check_type(sig: &Signature, t: &Type, span: Span, diags: &mut Vec<Diagnostic>) {
    if let Type::Con(c, args) = t {
        let arity = if Signature::BUILTIN_TYPES.contains(&c.as_str()) {
            Some(0)
        } else {
            sig.kind(c).map(|k| k.arity)
        };
        match arity {
            None => diags.push(Diagnostic::new(
                DiagCode::UnknownType,
                span,
                format!("unknown type `{c}`"),
            )),
            Some(n) if n != args.len() => diags.push(Diagnostic::new(
                DiagCode::ArityMismatch,
                span,
                format!("type `{c}` expects {n} argument(s), got {}", args.len()),
            )),
            Some(_) => {}
        }
        for a in args {
            check_type(sig, a, span, diags);
        }
    }
}

/// Give each `_` a distinct name not otherwise used in the clause.
fn name_anonymous(clause: &mut HornClause) {
    let used: BTreeSet<String> = clause.vars.iter().cloned().collect();
    if !used.contains("_") {
        return;
    }
    let mut n = 0;
    let mut fresh = || loop {
        n += 1;
        let name = format!("_{n}");
        if !used.contains(&name) {
            return name;
        }
    };
    let mut rename = |t: &Term| rename_anon(t, &mut fresh);
    clause.head.args = clause.head.args.iter().map(&mut rename).collect();
    for a in &mut clause.body {
        a.args = a.args.iter().map(&mut rename).collect();
    }
    let rebuilt = HornClause::new(clause.head.clone(), clause.body.clone(), clause.span);
    clause.vars = rebuilt.vars;
}

fn rename_anon(t: &Term, fresh: &mut impl FnMut() -> String) -> Term {
    match t {
        Term::Var(v) if v == "_" => Term::Var(fresh()),
        Term::Var(_) => t.clone(),
        Term::App { functor, args } => Term::app(
            functor.clone(),
            args.iter().map(|a| rename_anon(a, fresh)).collect(),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DECLS: &str = ":- kind list type.\n:- type nil list.\n:- type cons int -> list -> list.\n\
                         :- type append list -> list -> list -> o.\n";

    #[test]
    fn parses_a_fact() {
        let p = parse_program(&format!("{DECLS}append(nil,K,K).")).unwrap();
        assert_eq!(p.clauses.len(), 1);
        let c = &p.clauses[0];
        assert_eq!(c.head.predicate, "append");
        assert_eq!(c.head.args.len(), 3);
        assert!(c.body.is_empty());
        assert_eq!(c.vars, vec!["K".to_string()]);
    }

    #[test]
    fn empty_input_is_an_empty_program() {
        let p = parse_program("").unwrap();
        assert!(p.clauses.is_empty());
        let p = parse_program("% only a comment\n").unwrap();
        assert!(p.clauses.is_empty());
    }

    #[test]
    fn unclosed_paren_is_reported_on_line_one() {
        let diags = parse_program("append(nil").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, DiagCode::UnclosedParen);
        assert_eq!(diags[0].span.line, 1);
        assert!(diags[0].message.contains("unclosed"));
    }

    #[test]
    fn recovers_and_reports_every_error() {
        let src = "p(X .\nq(a).\nr(,).\n";
        let diags = parse_program(src).unwrap_err();
        let lines: Vec<usize> = diags.iter().map(|d| d.span.line).collect();
        assert_eq!(lines, vec![1, 3]);
        assert!(diags[0].message.contains("`,` or `)`"));
    }

    #[test]
    fn arity_mismatch_against_declaration() {
        let diags = parse_program(&format!("{DECLS}append(nil,K).")).unwrap_err();
        assert_eq!(diags[0].code, DiagCode::ArityMismatch);
        assert_eq!(diags[0].span.line, 5);
    }

    #[test]
    fn conflicting_redeclaration() {
        let diags = parse_program(":- kind list type.\n:- type nil list.\n:- type nil int.").unwrap_err();
        assert_eq!(diags[0].code, DiagCode::DuplicateDeclaration);
        // identical redeclaration is harmless
        assert!(parse_program(":- kind list type.\n:- type nil list.\n:- type nil list.").is_ok());
    }

    #[test]
    fn unknown_types_are_reported() {
        let diags = parse_program(":- type nil lst.").unwrap_err();
        assert_eq!(diags[0].code, DiagCode::UnknownType);
    }

    #[test]
    fn polymorphic_declarations() {
        let src = ":- kind btree type -> type.\n:- type emp btree A.\n\
                   :- type bt A -> btree A -> btree A -> btree A.\n";
        let p = parse_program(src).unwrap();
        let bt = p.signature.decl("bt").unwrap();
        assert_eq!(bt.arity(), 3);
        assert_eq!(bt.ty.to_string(), "A -> btree A -> btree A -> btree A");
        assert_eq!(p.signature.constructors_of("btree").count(), 2);
    }

    #[test]
    fn anonymous_variables_are_distinct() {
        let p = parse_program("p(_, _, X).").unwrap();
        let c = &p.clauses[0];
        assert_eq!(c.vars.len(), 3);
        assert!(c.vars.iter().all(|v| v != "_"));
    }

    #[test]
    fn printing_reparses_to_the_same_program() {
        let src = format!(
            "{DECLS}append(nil, K, K).\nappend(cons(X, L), K, cons(X, M)) :- append(L, K, M).\n"
        );
        let p = parse_program(&src).unwrap();
        let q = parse_program(&p.to_string()).unwrap();
        assert_eq!(p.without_spans(), q.without_spans());
    }
}
