use std::collections::BTreeSet;
use std::fmt;

use super::diag::Span;

/// Simple (possibly polymorphic) first-order type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Con(String, Vec<Type>),
    Var(String),
}

impl Type {
    pub fn con(name: impl Into<String>) -> Self {
        Type::Con(name.into(), Vec::new())
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Type::Con(c, _) => Some(c),
            Type::Var(_) => None,
        }
    }

    pub fn is_prop(&self) -> bool {
        self.head() == Some("o")
    }

    /// True when the head type constructor is approximated by a collection.
    pub fn is_collection(&self, approximated: &BTreeSet<String>) -> bool {
        self.head().is_some_and(|h| approximated.contains(h))
    }

    pub fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Type::Var(v) => {
                out.insert(v.clone());
            }
            Type::Con(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    fn fmt_arg(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Con(_, args) if !args.is_empty() => write!(f, "({self})"),
            _ => write!(f, "{self}"),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(v) => f.write_str(v),
            Type::Con(c, args) => {
                f.write_str(c)?;
                for a in args {
                    f.write_str(" ")?;
                    a.fmt_arg(f)?;
                }
                Ok(())
            }
        }
    }
}

/// `p₁ -> … -> pₙ -> result`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FnType {
    pub params: Vec<Type>,
    pub result: Type,
}

impl fmt::Display for FnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.params {
            write!(f, "{p} -> ")?;
        }
        write!(f, "{}", self.result)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KindDecl {
    pub name: String,
    pub arity: usize,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub ty: FnType,
    pub span: Span,
}

impl Decl {
    pub fn arity(&self) -> usize {
        self.ty.params.len()
    }

    pub fn is_predicate(&self) -> bool {
        self.ty.result.is_prop()
    }
}

/// Declared type constructors and typed functors/predicates, in declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    kinds: Vec<KindDecl>,
    decls: Vec<Decl>,
}

impl Signature {
    pub const BUILTIN_TYPES: [&'static str; 2] = ["o", "int"];

    pub fn kinds(&self) -> &[KindDecl] {
        &self.kinds
    }

    pub fn decls(&self) -> &[Decl] {
        &self.decls
    }

    pub fn kind(&self, name: &str) -> Option<&KindDecl> {
        self.kinds.iter().find(|k| k.name == name)
    }

    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| d.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&Decl> {
        self.decl(name).filter(|d| d.is_predicate())
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Decl> {
        self.decls.iter().filter(|d| d.is_predicate())
    }

    /// Constructors whose result type has head `kind`, in declaration order.
    pub fn constructors_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Decl> {
        self.decls
            .iter()
            .filter(move |d| d.ty.result.head() == Some(kind))
    }

    pub(crate) fn push_kind(&mut self, k: KindDecl) {
        self.kinds.push(k);
    }

    pub(crate) fn push_decl(&mut self, d: Decl) {
        self.decls.push(d);
    }

    pub fn without_spans(&self) -> Signature {
        let mut s = self.clone();
        s.kinds.iter_mut().for_each(|k| k.span = Span::default());
        s.decls.iter_mut().for_each(|d| d.span = Span::default());
        s
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in &self.kinds {
            write!(f, ":- kind {} type", k.name)?;
            for _ in 0..k.arity {
                write!(f, " -> type")?;
            }
            writeln!(f, ".")?;
        }
        for d in &self.decls {
            writeln!(f, ":- type {} {}.", d.name, d.ty)?;
        }
        Ok(())
    }
}
