//! Horn clause programs, their signatures, and collection annotations.

mod annot;
mod check;
pub mod diag;
pub mod lexer;
mod parser;
mod types;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::kernel::Term;

pub use annot::parse_annotations;
pub use check::{check_annotation, check_ctor_annotation, validate, validate_clauses, ClauseTypes};
pub use diag::{DiagCode, Diagnostic, Span};
pub use parser::parse_program;
pub use types::{Decl, FnType, KindDecl, Signature, Type};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Multiset,
    Set,
    Dlist,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "multiset" => Some(Mode::Multiset),
            "set" => Some(Mode::Set),
            "dlist" => Some(Mode::Dlist),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Multiset => "multiset",
            Mode::Set => "set",
            Mode::Dlist => "dlist",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Eq,
    Incl,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Incl => "<=",
        }
    }
}

/// `{}` | argument | `{argument}` | union, with 1-based argument positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CollExpr {
    Empty,
    Arg(usize),
    Singleton(usize),
    Union(Box<CollExpr>, Box<CollExpr>),
}

impl CollExpr {
    pub fn union(a: CollExpr, b: CollExpr) -> Self {
        CollExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn positions(&self, out: &mut Vec<(usize, bool)>) {
        match self {
            CollExpr::Empty => {}
            CollExpr::Arg(i) => out.push((*i, true)),
            CollExpr::Singleton(i) => out.push((*i, false)),
            CollExpr::Union(a, b) => {
                a.positions(out);
                b.positions(out);
            }
        }
    }

    /// Render with parameter names.
    pub fn show(&self, params: &[String]) -> String {
        let name = |i: &usize| params.get(i - 1).cloned().unwrap_or_else(|| format!("#{i}"));
        match self {
            CollExpr::Empty => "{}".into(),
            CollExpr::Arg(i) => name(i),
            CollExpr::Singleton(i) => format!("{{{}}}", name(i)),
            CollExpr::Union(a, b) => format!("{} + {}", a.show(params), b.show(params)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnnBody {
    Trivial,
    Judgment {
        relation: Relation,
        lhs: CollExpr,
        rhs: CollExpr,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub predicate: String,
    pub params: Vec<String>,
    pub mode: Mode,
    pub body: AnnBody,
    pub span: Span,
}

impl Annotation {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

impl fmt::Display for Annotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "pred {}", self.predicate)?;
        if !self.params.is_empty() {
            write!(f, "({})", self.params.join(", "))?;
        }
        match &self.body {
            AnnBody::Trivial => write!(f, ": true."),
            AnnBody::Judgment { relation, lhs, rhs } => write!(
                f,
                ": {} {} {}.",
                lhs.show(&self.params),
                relation.symbol(),
                rhs.show(&self.params)
            ),
        }
    }
}

/// A user-supplied constructor map, `ctor name(P1,...,Pn) = side.`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorAnnotation {
    pub constructor: String,
    pub params: Vec<String>,
    pub side: CollExpr,
    pub span: Span,
}

/// Contents of an annotation file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AnnotationFile {
    pub mode: Option<Mode>,
    pub approximated: BTreeSet<String>,
    pub annotations: Vec<Annotation>,
    pub ctors: Vec<CtorAnnotation>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
    pub span: Span,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.predicate)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    /// Variables in order of first occurrence (head, then body).
    pub vars: Vec<String>,
    pub head: Atom,
    pub body: Vec<Atom>,
    pub span: Span,
}

impl HornClause {
    pub fn new(head: Atom, body: Vec<Atom>, span: Span) -> Self {
        let mut vars = Vec::new();
        for a in std::iter::once(&head).chain(&body) {
            for t in &a.args {
                t.vars_in_order(&mut vars);
            }
        }
        HornClause {
            vars,
            head,
            body,
            span,
        }
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        std::iter::once(&self.head).chain(&self.body)
    }
}

impl fmt::Display for HornClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            let body: Vec<String> = self.body.iter().map(|a| a.to_string()).collect();
            write!(f, " :- {}", body.join(", "))?;
        }
        write!(f, ".")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub signature: Signature,
    pub clauses: Vec<HornClause>,
    pub annotations: Vec<Annotation>,
    pub ctor_maps: Vec<CtorAnnotation>,
    pub approximated: BTreeSet<String>,
    pub mode: Mode,
}

impl Program {
    pub fn new(signature: Signature, clauses: Vec<HornClause>) -> Self {
        Program {
            signature,
            clauses,
            annotations: Vec::new(),
            ctor_maps: Vec::new(),
            approximated: BTreeSet::new(),
            mode: Mode::Multiset,
        }
    }

    /// Attach a parsed annotation file. `mode` overrides the file's header.
    pub fn with_annotations(mut self, file: AnnotationFile, mode: Option<Mode>) -> Self {
        let mode = mode.or(file.mode).unwrap_or(Mode::Multiset);
        self.mode = mode;
        self.approximated = file.approximated;
        self.annotations = file
            .annotations
            .into_iter()
            .map(|a| Annotation { mode, ..a })
            .collect();
        self.ctor_maps = file.ctors;
        self
    }

    pub fn annotation(&self, predicate: &str) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.predicate == predicate)
    }

    pub fn clauses_for<'a>(&'a self, predicate: &'a str) -> impl Iterator<Item = &'a HornClause> {
        self.clauses.iter().filter(move |c| c.head.predicate == predicate)
    }

    pub fn is_collection(&self, ty: &Type) -> bool {
        ty.is_collection(&self.approximated)
    }

    /// Copy with every source span reset, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.signature = p.signature.without_spans();
        for c in &mut p.clauses {
            c.span = Span::default();
            c.head.span = Span::default();
            for a in &mut c.body {
                a.span = Span::default();
            }
        }
        for a in &mut p.annotations {
            a.span = Span::default();
        }
        for c in &mut p.ctor_maps {
            c.span = Span::default();
        }
        p
    }
}

/// Prints the signature and clauses in concrete `.hc` syntax.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.signature)?;
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
