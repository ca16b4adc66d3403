use std::collections::{BTreeMap, BTreeSet};

use super::diag::{DiagCode, Diagnostic, Span};
use super::types::{Decl, Signature, Type};
use super::{AnnBody, Annotation, CtorAnnotation, HornClause, Mode, Program, Relation};
use crate::kernel::Term;

/// Inferred types of a clause's variables. Variables whose type is left open
/// by the signature get a type variable.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClauseTypes {
    pub vars: BTreeMap<String, Type>,
}

impl ClauseTypes {
    pub fn of(&self, var: &str) -> Option<&Type> {
        self.vars.get(var)
    }

    /// Infer variable types for one clause against the signature.
    pub fn infer(sig: &Signature, clause: &HornClause) -> Result<ClauseTypes, Vec<Diagnostic>> {
        infer_clause(sig, clause)
    }
}

#[derive(Clone, Debug)]
enum Ty {
    Con(String, Vec<Ty>),
    Meta(usize),
}

#[derive(Default)]
struct Infer<'a> {
    bindings: Vec<Option<Ty>>,
    vars: BTreeMap<String, Ty>,
    sig: Option<&'a Signature>,
}

impl Infer<'_> {
    fn fresh(&mut self) -> Ty {
        self.bindings.push(None);
        Ty::Meta(self.bindings.len() - 1)
    }

    fn instantiate(&mut self, t: &Type, map: &mut BTreeMap<String, Ty>) -> Ty {
        match t {
            Type::Var(v) => {
                if let Some(m) = map.get(v) {
                    return m.clone();
                }
                let m = self.fresh();
                map.insert(v.clone(), m.clone());
                m
            }
            Type::Con(c, args) => {
                Ty::Con(c.clone(), args.iter().map(|a| self.instantiate(a, map)).collect())
            }
        }
    }

    fn walk(&self, t: &Ty) -> Ty {
        let mut t = t.clone();
        while let Ty::Meta(m) = t {
            match &self.bindings[m] {
                Some(b) => t = b.clone(),
                None => break,
            }
        }
        t
    }

    fn occurs(&self, m: usize, t: &Ty) -> bool {
        match self.walk(t) {
            Ty::Meta(n) => n == m,
            Ty::Con(_, args) => args.iter().any(|a| self.occurs(m, a)),
        }
    }

    fn unify(&mut self, a: &Ty, b: &Ty) -> bool {
        match (self.walk(a), self.walk(b)) {
            (Ty::Meta(m), Ty::Meta(n)) if m == n => true,
            (Ty::Meta(m), t) | (t, Ty::Meta(m)) => {
                if self.occurs(m, &t) {
                    return false;
                }
                self.bindings[m] = Some(t);
                true
            }
            (Ty::Con(c, xs), Ty::Con(d, ys)) => {
                c == d && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| self.unify(x, y))
            }
        }
    }

    fn export(&self, t: &Ty, open: &mut BTreeMap<usize, String>) -> Type {
        match self.walk(t) {
            Ty::Con(c, args) => Type::Con(c, args.iter().map(|a| self.export(a, open)).collect()),
            Ty::Meta(m) => {
                let n = open.len();
                Type::Var(open.entry(m).or_insert_with(|| format!("T{n}")).clone())
            }
        }
    }

    fn show(&self, t: &Ty) -> String {
        self.export(t, &mut BTreeMap::new()).to_string()
    }

    /// Check `decl(args)` and return the instantiated result type.
    fn check_app(&mut self, decl: &Decl, args: &[Term], span: Span) -> Result<Ty, Diagnostic> {
        if decl.arity() != args.len() {
            return Err(Diagnostic::new(
                DiagCode::ArityMismatch,
                span,
                format!(
                    "`{}` is declared with arity {} but used with {}",
                    decl.name,
                    decl.arity(),
                    args.len()
                ),
            ));
        }
        let mut map = BTreeMap::new();
        let params: Vec<Ty> = decl.ty.params.iter().map(|p| self.instantiate(p, &mut map)).collect();
        let result = self.instantiate(&decl.ty.result, &mut map);
        for (i, (arg, want)) in args.iter().zip(&params).enumerate() {
            let got = self.term(arg, span)?;
            if !self.unify(&got, want) {
                return Err(Diagnostic::new(
                    DiagCode::TypeMismatch,
                    span,
                    format!(
                        "argument {} of `{}`: `{arg}` has type `{}` but `{}` is expected",
                        i + 1,
                        decl.name,
                        self.show(&got),
                        self.show(want)
                    ),
                ));
            }
        }
        Ok(result)
    }

    fn term(&mut self, t: &Term, span: Span) -> Result<Ty, Diagnostic> {
        match t {
            Term::Var(v) => {
                if let Some(ty) = self.vars.get(v) {
                    return Ok(ty.clone());
                }
                let m = self.fresh();
                self.vars.insert(v.clone(), m.clone());
                Ok(m)
            }
            Term::App { functor, args } => {
                if args.is_empty() && functor.bytes().all(|b| b.is_ascii_digit()) {
                    return Ok(Ty::Con("int".into(), Vec::new()));
                }
                let sig = self.sig.expect("signature set");
                match sig.decl(functor) {
                    Some(d) if !d.is_predicate() => self.check_app(d, args, span),
                    Some(_) => Err(Diagnostic::new(
                        DiagCode::TypeMismatch,
                        span,
                        format!("predicate `{functor}` used as a term"),
                    )),
                    None => Err(Diagnostic::new(
                        DiagCode::UndeclaredFunctor,
                        span,
                        format!("undeclared functor {functor}/{}", args.len()),
                    )),
                }
            }
        }
    }
}

impl<'a> Infer<'a> {
    fn with(sig: &'a Signature) -> Self {
        Infer {
            sig: Some(sig),
            ..Default::default()
        }
    }
}

/// Check one predicate annotation against the signature.
pub fn check_annotation(
    sig: &Signature,
    approximated: &BTreeSet<String>,
    ann: &Annotation,
) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let name = format!("{}/{}", ann.predicate, ann.arity());
    let Some(decl) = sig.predicate(&ann.predicate) else {
        diags.push(Diagnostic::new(
            DiagCode::UnknownPredicate,
            ann.span,
            format!("annotation for unknown predicate {name}"),
        ));
        return diags;
    };
    if decl.arity() != ann.arity() {
        diags.push(Diagnostic::new(
            DiagCode::ArityMismatch,
            ann.span,
            format!("{name}: predicate `{}` has arity {}", decl.name, decl.arity()),
        ));
        return diags;
    }
    if let AnnBody::Judgment { relation, lhs, rhs } = &ann.body {
        if ann.mode == Mode::Dlist && *relation == Relation::Incl {
            diags.push(Diagnostic::new(
                DiagCode::UnsupportedJudgment,
                ann.span,
                format!("{name}: inclusion has no difference-list encoding; use `=`"),
            ));
        }
        let mut uses = Vec::new();
        lhs.positions(&mut uses);
        rhs.positions(&mut uses);
        check_positions(&decl.ty.params, approximated, &ann.params, &uses, &name, ann.span, &mut diags);
    }
    diags
}

/// Check one `ctor` map line against the signature.
pub fn check_ctor_annotation(
    sig: &Signature,
    approximated: &BTreeSet<String>,
    c: &CtorAnnotation,
) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let name = format!("{}/{}", c.constructor, c.params.len());
    let decl = match sig.decl(&c.constructor) {
        Some(d) if !d.is_predicate() => d,
        _ => {
            diags.push(Diagnostic::new(
                DiagCode::UndeclaredFunctor,
                c.span,
                format!("map for unknown constructor {name}"),
            ));
            return diags;
        }
    };
    if !decl.ty.result.is_collection(approximated) {
        diags.push(Diagnostic::new(
            DiagCode::NotApproximated,
            c.span,
            format!("{name} builds `{}`, which is not approximated", decl.ty.result),
        ));
    }
    if decl.arity() != c.params.len() {
        diags.push(Diagnostic::new(
            DiagCode::ArityMismatch,
            c.span,
            format!("{name}: constructor `{}` has arity {}", decl.name, decl.arity()),
        ));
        return diags;
    }
    let mut uses = Vec::new();
    c.side.positions(&mut uses);
    check_positions(&decl.ty.params, approximated, &c.params, &uses, &name, c.span, &mut diags);
    diags
}

fn check_positions(
    param_types: &[Type],
    approximated: &BTreeSet<String>,
    params: &[String],
    uses: &[(usize, bool)],
    name: &str,
    span: Span,
    diags: &mut Vec<Diagnostic>,
) {
    for &(pos, as_collection) in uses {
        let Some(ty) = pos.checked_sub(1).and_then(|i| param_types.get(i)) else {
            diags.push(Diagnostic::new(
                DiagCode::PositionOutOfRange,
                span,
                format!("{name}: position {pos} is out of range"),
            ));
            continue;
        };
        let pname = params.get(pos - 1).map(String::as_str).unwrap_or("?");
        let is_coll = ty.is_collection(approximated);
        if as_collection && !is_coll {
            diags.push(Diagnostic::new(
                DiagCode::ElementAsCollection,
                span,
                format!("{name}: `{pname}` has element type `{ty}` but is used as a collection"),
            ));
        } else if !as_collection && is_coll {
            diags.push(Diagnostic::new(
                DiagCode::CollectionAsElement,
                span,
                format!("{name}: `{pname}` has collection type `{ty}` but is used as an element"),
            ));
        }
    }
}

/// Type-check every clause against the signature.
pub fn validate_clauses(p: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for c in &p.clauses {
        if let Err(mut d) = infer_clause(&p.signature, c) {
            diags.append(&mut d);
        }
    }
    diags
}

pub(crate) fn infer_clause(sig: &Signature, c: &HornClause) -> Result<ClauseTypes, Vec<Diagnostic>> {
    let mut inf = Infer::with(sig);
    let mut diags = Vec::new();
    for atom in c.atoms() {
        let decl = match sig.decl(&atom.predicate) {
            Some(d) if d.is_predicate() => d,
            Some(_) => {
                diags.push(Diagnostic::new(
                    DiagCode::TypeMismatch,
                    atom.span,
                    format!("`{}` is a constructor, not a predicate", atom.predicate),
                ));
                continue;
            }
            None => {
                diags.push(Diagnostic::new(
                    DiagCode::UndeclaredPredicate,
                    atom.span,
                    format!("undeclared predicate {}/{}", atom.predicate, atom.args.len()),
                ));
                continue;
            }
        };
        if let Err(d) = inf.check_app(decl, &atom.args, atom.span) {
            diags.push(d);
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut open = BTreeMap::new();
    let vars = inf
        .vars
        .clone()
        .into_iter()
        .map(|(v, t)| (v, inf.export(&t, &mut open)))
        .collect();
    Ok(ClauseTypes { vars })
}

/// All well-formedness problems of an annotated program: clause typing,
/// annotation shape, and exactly-one-annotation per used predicate.
pub fn validate(p: &Program) -> Vec<Diagnostic> {
    let mut diags = validate_clauses(p);
    for k in &p.approximated {
        if p.signature.kind(k).is_none() {
            diags.push(Diagnostic::new(
                DiagCode::UnknownType,
                Span::new(1, 1),
                format!("approximated type `{k}` is not a declared kind"),
            ));
        }
    }
    let mut seen: BTreeMap<&str, Span> = BTreeMap::new();
    for a in &p.annotations {
        diags.extend(check_annotation(&p.signature, &p.approximated, a));
        match seen.get(a.predicate.as_str()) {
            Some(first) => diags.push(Diagnostic::new(
                DiagCode::DuplicateAnnotation,
                a.span,
                format!(
                    "{}/{} is annotated more than once (first at {first})",
                    a.predicate,
                    a.arity()
                ),
            )),
            None => {
                seen.insert(&a.predicate, a.span);
            }
        }
    }
    let mut seen_ctor: BTreeMap<&str, Span> = BTreeMap::new();
    for c in &p.ctor_maps {
        diags.extend(check_ctor_annotation(&p.signature, &p.approximated, c));
        if let Some(first) = seen_ctor.insert(&c.constructor, c.span) {
            diags.push(Diagnostic::new(
                DiagCode::DuplicateAnnotation,
                c.span,
                format!("constructor `{}` is mapped more than once (first at {first})", c.constructor),
            ));
        }
    }
    let mut missing = BTreeSet::new();
    for c in &p.clauses {
        for atom in c.atoms() {
            let declared = p.signature.predicate(&atom.predicate).is_some();
            if declared && !seen.contains_key(atom.predicate.as_str()) && missing.insert(&atom.predicate) {
                diags.push(Diagnostic::new(
                    DiagCode::MissingAnnotation,
                    atom.span,
                    format!(
                        "{}/{} has no annotation (write `pred {}(...): true.` if it makes no collection statement)",
                        atom.predicate,
                        atom.args.len(),
                        atom.predicate
                    ),
                ));
            }
        }
    }
    diags.sort_by_key(|d| d.span);
    diags
}
