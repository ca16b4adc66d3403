use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::ApproxError;
use crate::horn::{AnnBody, CollExpr, Decl, Mode, Program, Relation, Signature};
use crate::kernel::{fresh_name, Formula, Sort, Template, Term};

#[derive(Clone, Copy, Debug, Default)]
pub struct ThetaOptions {
    /// Derive maps for constructors that have neither a `ctor` line nor a built-in map.
    pub derive_ctors: bool,
}

/// A predicate's judgment template, kept with the annotation it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct PredTemplate {
    pub template: Template,
    pub trivial: bool,
}

/// θ: approximated types go to `o`, constructors to collection templates,
/// predicates to judgment templates.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproxMap {
    pub mode: Mode,
    pub approximated: BTreeSet<String>,
    pub ctor_map: BTreeMap<String, Template>,
    pub pred_map: BTreeMap<String, PredTemplate>,
}

impl ApproxMap {
    pub fn ctor(&self, name: &str) -> Option<&Template> {
        self.ctor_map.get(name)
    }

    pub fn pred(&self, name: &str) -> Option<&PredTemplate> {
        self.pred_map.get(name)
    }
}

impl fmt::Display for ApproxMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.approximated {
            writeln!(f, "{t} ↦ o")?;
        }
        for (c, t) in &self.ctor_map {
            writeln!(f, "{c} ↦ {t}")?;
        }
        for (p, t) in &self.pred_map {
            writeln!(f, "{p} ↦ {}", t.template)?;
        }
        Ok(())
    }
}

/// Build θ for a validated program.
pub fn build_theta(p: &Program, opts: ThetaOptions) -> Result<ApproxMap, ApproxError> {
    let mode = p.mode;
    let mut ctor_map = BTreeMap::new();
    for kind in &p.approximated {
        let ctors: Vec<&Decl> = p.signature.constructors_of(kind).collect();
        let mut derived = None;
        for decl in &ctors {
            let (params, side) = if let Some(c) = p.ctor_maps.iter().find(|c| c.constructor == decl.name) {
                (c.params.clone(), c.side.clone())
            } else if let Some(side) = builtin_side(decl, &p.approximated) {
                (default_params(decl.arity()), side)
            } else if opts.derive_ctors {
                let all = derived.get_or_insert_with(|| derive_sides(kind, &ctors, &p.approximated));
                match all.remove(&decl.name) {
                    Some(r) => (default_params(decl.arity()), r?),
                    None => unreachable!("derived map covers every constructor"),
                }
            } else {
                return Err(ApproxError::MissingConstructorMap {
                    constructor: decl.name.clone(),
                    kind: kind.clone(),
                });
            };
            ctor_map.insert(decl.name.clone(), side_template(&decl.name, &params, &side, mode)?);
        }
    }
    let mut pred_map = BTreeMap::new();
    for a in &p.annotations {
        let params = template_params(&a.params);
        let (body, trivial) = match &a.body {
            AnnBody::Trivial => (Formula::One, true),
            AnnBody::Judgment { relation, lhs, rhs } => {
                (judgment_body(*relation, lhs, rhs, &params, mode), false)
            }
        };
        let body = body.beta_normal().map_err(|source| ApproxError::Template {
            name: a.predicate.clone(),
            source,
        })?;
        let template = Template::new(a.predicate.clone(), params, body).map_err(|source| {
            ApproxError::Template {
                name: a.predicate.clone(),
                source,
            }
        })?;
        pred_map.insert(a.predicate.clone(), PredTemplate { template, trivial });
    }
    Ok(ApproxMap {
        mode,
        approximated: p.approximated.clone(),
        ctor_map,
        pred_map,
    })
}

/// Constructor maps built from the declarations of one kind: element arguments
/// become items, arguments of the kind itself become sub-collections, joined in
/// declaration order; nullary constructors become the unit.
pub fn derive_constructor_map(
    sig: &Signature,
    kind: &str,
    approximated: &BTreeSet<String>,
    mode: Mode,
) -> Result<BTreeMap<String, Template>, ApproxError> {
    let ctors: Vec<&Decl> = sig.constructors_of(kind).collect();
    let mut out = BTreeMap::new();
    for (name, side) in derive_sides(kind, &ctors, approximated) {
        let side = side?;
        let arity = sig.decl(&name).map(Decl::arity).unwrap_or(0);
        out.insert(name.clone(), side_template(&name, &default_params(arity), &side, mode)?);
    }
    Ok(out)
}

fn derive_sides(
    kind: &str,
    ctors: &[&Decl],
    approximated: &BTreeSet<String>,
) -> BTreeMap<String, Result<CollExpr, ApproxError>> {
    let mut out = BTreeMap::new();
    for decl in ctors {
        let mut parts = Vec::new();
        let mut err = None;
        for (i, ty) in decl.ty.params.iter().enumerate() {
            if !ty.is_collection(approximated) {
                parts.push(CollExpr::Singleton(i + 1));
            } else if ty.head() == Some(kind) {
                parts.push(CollExpr::Arg(i + 1));
            } else {
                err = Some(ApproxError::UnsupportedNesting {
                    constructor: decl.name.clone(),
                    position: i + 1,
                    ty: ty.to_string(),
                });
                break;
            }
        }
        let side = match err {
            Some(e) => Err(e),
            None => Ok(parts
                .into_iter()
                .rev()
                .reduce(|acc, p| CollExpr::union(p, acc))
                .unwrap_or(CollExpr::Empty)),
        };
        out.insert(decl.name.clone(), side);
    }
    out
}

/// `nil ↦ {}` and `cons(X, L) ↦ {X} + L` when the declarations have that shape.
fn builtin_side(decl: &Decl, approximated: &BTreeSet<String>) -> Option<CollExpr> {
    let kind = decl.ty.result.head()?;
    match (decl.name.as_str(), decl.ty.params.as_slice()) {
        ("nil", []) => Some(CollExpr::Empty),
        ("cons", [x, l]) if !x.is_collection(approximated) && l.head() == Some(kind) => {
            Some(CollExpr::union(CollExpr::Singleton(1), CollExpr::Arg(2)))
        }
        _ => None,
    }
}

fn default_params(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

fn template_params(params: &[String]) -> Vec<String> {
    let taken: BTreeSet<String> = params.iter().cloned().collect();
    let mut out: Vec<String> = Vec::new();
    for (i, p) in params.iter().enumerate() {
        if p == "_" {
            let mut all = taken.clone();
            all.extend(out.iter().cloned());
            let want = format!("_{}", i + 1);
            out.push(if all.contains(&want) { fresh_name("_", &all) } else { want });
        } else {
            out.push(p.clone());
        }
    }
    out
}

fn side_template(name: &str, params: &[String], side: &CollExpr, mode: Mode) -> Result<Template, ApproxError> {
    let err = |source| ApproxError::Template {
        name: name.to_string(),
        source,
    };
    let body = side_formula(side, params, mode).beta_normal().map_err(err)?;
    Template::new(name, params.to_vec(), body).map_err(err)
}

/// Formula denoting one side of an annotation. In dlist mode this is a
/// `λLλl.` abstraction over the tail.
pub fn side_formula(side: &CollExpr, params: &[String], mode: Mode) -> Formula {
    let name = |i: usize| params[i - 1].clone();
    match mode {
        Mode::Multiset | Mode::Set => {
            let unit = if mode == Mode::Multiset { Formula::Bot } else { Formula::Zero };
            match side {
                CollExpr::Empty => unit,
                CollExpr::Arg(i) => Formula::prop(name(*i)),
                CollExpr::Singleton(i) => Formula::item(Term::var(name(*i))),
                CollExpr::Union(a, b) => {
                    let (a, b) = (side_formula(a, params, mode), side_formula(b, params, mode));
                    if mode == Mode::Multiset {
                        Formula::par(a, b)
                    } else {
                        Formula::oplus(a, b)
                    }
                }
            }
        }
        Mode::Dlist => {
            let taken: BTreeSet<String> = params.iter().cloned().collect();
            let big = pick("L", &taken);
            let small = pick("l", &taken);
            dlist_side(side, params, &big, &small)
        }
    }
}

fn pick(base: &str, taken: &BTreeSet<String>) -> String {
    if taken.contains(base) {
        fresh_name(base, taken)
    } else {
        base.to_string()
    }
}

fn dlist_side(side: &CollExpr, params: &[String], big: &str, small: &str) -> Formula {
    let tail = || Formula::app(Formula::prop(big), vec![Formula::prop(small)]);
    let abs = |body: Formula| Formula::lam(big, Formula::lam(small, body));
    match side {
        CollExpr::Empty => abs(tail()),
        CollExpr::Arg(i) => Formula::prop(params[i - 1].clone()),
        CollExpr::Singleton(i) => abs(Formula::rlimp(
            Formula::item(Term::var(params[i - 1].clone())),
            Formula::rlimp(Formula::prop(small), tail()),
        )),
        CollExpr::Union(a, b) => {
            let a = dlist_side(a, params, big, small);
            let b = dlist_side(b, params, big, small);
            let inner = Formula::lam(small, Formula::app(b, vec![Formula::prop(big), Formula::prop(small)]));
            abs(Formula::app(a, vec![inner, Formula::prop(small)]))
        }
    }
}

fn judgment_body(relation: Relation, lhs: &CollExpr, rhs: &CollExpr, params: &[String], mode: Mode) -> Formula {
    let l = side_formula(lhs, params, mode);
    let r = side_formula(rhs, params, mode);
    let taken: BTreeSet<String> = params.iter().cloned().collect();
    match (mode, relation) {
        (Mode::Multiset, Relation::Eq) => Formula::equiv(l, r),
        (Mode::Multiset, Relation::Incl) => {
            let q = pick("q", &taken);
            Formula::exists(q.clone(), Sort::Prop, Formula::limp(Formula::par(l, Formula::prop(q)), r))
        }
        (Mode::Set, Relation::Eq) => Formula::equiv(Formula::quest(l), Formula::quest(r)),
        (Mode::Set, Relation::Incl) => Formula::limp(Formula::quest(l), Formula::quest(r)),
        (Mode::Dlist, _) => {
            let big = pick("W", &taken);
            let small = pick("w", &taken);
            let hole = || vec![Formula::prop(big.clone()), Formula::prop(small.clone())];
            Formula::forall(
                big.clone(),
                Sort::Prop,
                Formula::forall(
                    small.clone(),
                    Sort::Prop,
                    Formula::equiv(Formula::app(l, hole()), Formula::app(r, hole())),
                ),
            )
        }
    }
}
